#pragma once

// Drift fields of the N-particle mean-field system and of the McKean-Vlasov
// limit (the latter against an empirical proxy for the limit law).

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fhn/kernel.hpp"
#include "fhn/state.hpp"

namespace fhn {

struct Drift {
    double dx = 0.0;
    double dc = 0.0;
};

// (x - x³ - c - α, γx - c + β)
inline Drift intrinsic_drift(const State& z, const ModelParams& p) {
    require_finite(z, "intrinsic_drift");
    return {z.x - z.x * z.x * z.x - z.c - p.alpha, p.gamma * z.x - z.c + p.beta};
}

// (1/N) Σ_j K(z - z_j), the j with z_j = z contributing K(0,0) = 0.
inline double empirical_convolution(const Kernel& k, const State& z,
                                    const std::vector<State>& cloud) {
    if (cloud.empty()) throw std::invalid_argument("empirical_convolution: empty cloud");
    double sum = 0.0;
    for (const State& zj : cloud) sum += k(z - zj);
    return sum / double(cloud.size());
}

// Drift of particle i in the N-particle system (naive pairwise sum).
inline Drift mean_field_drift(std::size_t i, const std::vector<State>& ensemble,
                              const Kernel& kx, const Kernel& kc, const ModelParams& p) {
    if (i >= ensemble.size()) throw std::out_of_range("mean_field_drift: index out of range");
    Drift d = intrinsic_drift(ensemble[i], p);
    d.dx += empirical_convolution(kx, ensemble[i], ensemble);
    d.dc += empirical_convolution(kc, ensemble[i], ensemble);
    return d;
}

// Drift of the limit process at z, with the convolution K*μ̄ approximated by
// the empirical average over a proxy sample of μ̄.
inline Drift limit_drift(const State& z, const std::vector<State>& proxy, const Kernel& kx,
                         const Kernel& kc, const ModelParams& p) {
    if (proxy.empty()) throw std::invalid_argument("limit_drift: empty proxy");
    Drift d = intrinsic_drift(z, p);
    d.dx += empirical_convolution(kx, z, proxy);
    d.dc += empirical_convolution(kc, z, proxy);
    return d;
}

// Bulk interaction terms for a whole cloud. Zero and linear kernels use the
// algebraically identical centered form (1/N)ΣK(z_i - z_j) = A·(z_i - mean);
// other kinds fall back to the pairwise sum, sequential in j for each i.
class InteractionField {
public:
    InteractionField(const Kernel& kx, const Kernel& kc) : kx_(kx), kc_(kc) {}

    // Prepare for a cloud; call once per step before term().
    void bind(const std::vector<State>& cloud) {
        cloud_ = &cloud;
        if (fast_path()) {
            double sx = 0.0, sc = 0.0;
            for (const State& z : cloud) {
                sx += z.x;
                sc += z.c;
            }
            const double n = cloud.empty() ? 1.0 : double(cloud.size());
            mean_x_ = sx / n;
            mean_c_ = sc / n;
        }
    }

    // Interaction drift of an arbitrary state against the bound cloud.
    Drift term(const State& z) const {
        if (fast_path()) {
            const double dx = z.x - mean_x_, dc = z.c - mean_c_;
            return {kx_.a11() * dx + kx_.a12() * dc, kc_.a11() * dx + kc_.a12() * dc};
        }
        return {empirical_convolution(kx_, z, *cloud_), empirical_convolution(kc_, z, *cloud_)};
    }

    bool fast_path() const { return kx_.is_linear_family() && kc_.is_linear_family(); }

private:
    const Kernel& kx_;
    const Kernel& kc_;
    const std::vector<State>* cloud_ = nullptr;
    double mean_x_ = 0.0;
    double mean_c_ = 0.0;
};

} // namespace fhn
