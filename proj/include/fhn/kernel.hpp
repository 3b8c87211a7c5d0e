#pragma once

// Interaction kernels K: R² -> R evaluated on state differences, Lipschitz
// with respect to ||.||_1 and vanishing at the origin.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

#include "fhn/state.hpp"

namespace fhn {

enum class KernelKind { zero, linear, bounded_tanh, custom };

class Kernel {
public:
    Kernel() = default; // the zero kernel

    static Kernel zero() {
        Kernel k;
        k.kind_ = KernelKind::zero;
        k.lipschitz_ = 0.0;
        return k;
    }

    // K(dz) = a11·dx + a12·dc. Declared L defaults to |a11|+|a12|.
    static Kernel linear(double a11, double a12) {
        return linear(a11, a12, std::abs(a11) + std::abs(a12));
    }

    static Kernel linear(double a11, double a12, double lipschitz) {
        Kernel k;
        k.kind_ = KernelKind::linear;
        k.a11_ = a11;
        k.a12_ = a12;
        k.lipschitz_ = lipschitz;
        if (std::abs(a11) + std::abs(a12) > lipschitz)
            throw std::invalid_argument("Kernel: declared L below |a11|+|a12|");
        return k;
    }

    // K(dz) = scale·tanh(rate·(dx + dc)); L = |scale·rate|.
    static Kernel bounded_tanh(double scale, double rate) {
        Kernel k;
        k.kind_ = KernelKind::bounded_tanh;
        k.a11_ = scale;
        k.a12_ = rate;
        k.lipschitz_ = std::abs(scale * rate);
        return k;
    }

    static Kernel custom(std::function<double(const State&)> fn, double lipschitz) {
        Kernel k;
        k.kind_ = KernelKind::custom;
        k.fn_ = std::move(fn);
        k.lipschitz_ = lipschitz;
        if (!(lipschitz >= 0.0)) throw std::invalid_argument("Kernel: L must be >= 0");
        if (k.fn_({0.0, 0.0}) != 0.0)
            throw std::invalid_argument("Kernel: custom kernel must vanish at (0,0)");
        return k;
    }

    double operator()(const State& dz) const {
        require_finite(dz, "kernel_eval");
        switch (kind_) {
        case KernelKind::zero:
            return 0.0;
        case KernelKind::linear:
            return a11_ * dz.x + a12_ * dz.c;
        case KernelKind::bounded_tanh:
            return a11_ * std::tanh(a12_ * (dz.x + dz.c));
        case KernelKind::custom:
            return fn_(dz);
        }
        return 0.0;
    }

    KernelKind kind() const { return kind_; }
    double lipschitz_bound() const { return lipschitz_; }
    bool is_linear_family() const {
        return kind_ == KernelKind::zero || kind_ == KernelKind::linear;
    }
    double a11() const { return kind_ == KernelKind::linear ? a11_ : 0.0; }
    double a12() const { return kind_ == KernelKind::linear ? a12_ : 0.0; }
    double scale() const { return a11_; }
    double rate() const { return a12_; }

private:
    KernelKind kind_ = KernelKind::zero;
    double a11_ = 0.0;
    double a12_ = 0.0;
    double lipschitz_ = 0.0;
    std::function<double(const State&)> fn_;
};

inline double kernel_eval(const Kernel& k, const State& dz) { return k(dz); }

} // namespace fhn
