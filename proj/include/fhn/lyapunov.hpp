#pragma once

// Lyapunov machinery: the quadratic energy H, its exponential tilt H̃, and
// the explicit rate constants (λ, B, B̃) with the coefficient bundle
// α_X = γ/2 + 1/2, β_X = 17/2, α_C = 1/16, β_C = 1/2 + 1/32.

#include <cmath>
#include <stdexcept>

#include "fhn/numerics.hpp"
#include "fhn/state.hpp"

namespace fhn {

inline double H0_offset(const ModelParams& p) {
    return p.beta * p.beta / p.gamma + p.alpha * p.alpha;
}

// H(z) = γx²/2 + βx + c²/2 + αc + H0, always >= 0.
inline double H(const State& z, const ModelParams& p) {
    require_finite(z, "H");
    return 0.5 * p.gamma * z.x * z.x + p.beta * z.x + 0.5 * z.c * z.c + p.alpha * z.c +
           H0_offset(p);
}

// H̃ = ∫_0^H e^{a√u} du = (2/a²)(e^{a√H}(a√H - 1) + 1). The series branch
// keeps small a√H well conditioned.
inline double H_tilde_of_energy(double h, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("H_tilde: a must be > 0");
    if (!(h >= 0.0)) throw std::invalid_argument("H_tilde: energy must be >= 0");
    const double s = a * std::sqrt(h);
    if (s < 1e-3) {
        // e^s(s-1)+1 = Σ_{k>=2} s^k (k-1)/k!
        const double s2 = s * s;
        return (2.0 / (a * a)) * s2 * (0.5 + s / 3.0 + s2 / 8.0 + s2 * s / 30.0);
    }
    return (2.0 / (a * a)) * (std::exp(s) * (s - 1.0) + 1.0);
}

inline double H_tilde(const State& z, double a, const ModelParams& p) {
    return H_tilde_of_energy(H(z, p), a);
}

// a = ã / (4√2 max(√γ, 1)), taking the paper's upper bound with equality.
inline double tilt_from_a_tilde(double a_tilde, const ModelParams& p) {
    if (!(a_tilde > 0.0)) throw std::invalid_argument("tilt_from_a_tilde: ã must be > 0");
    return a_tilde / (4.0 * std::sqrt(2.0) * std::max(std::sqrt(p.gamma), 1.0));
}

struct LyapunovConstants {
    double lambda = 0.0;
    double B = 0.0;
    double B_tilde = 0.0;        // final value (max of the two branches)
    double B_tilde_nonlinear = 0.0; // branch with the mean-field moment terms
    double B_tilde_particle = 0.0;  // branch without them
    double a = 0.0;
    double alpha_X = 0.0;
    double beta_X = 0.0;
    double alpha_C = 0.0;
    double beta_C = 0.0;
};

inline double coeff_alpha_X(const ModelParams& p) { return 0.5 * p.gamma + 0.5; }
inline double coeff_beta_X() { return 8.5; }
inline double coeff_alpha_C() { return 1.0 / 16.0; }
inline double coeff_beta_C() { return 0.5 + 1.0 / 32.0; }

// L_X/8 + L_C(2 + 1/8) < 1 - λ/2
inline bool cond_lambda_lya(double L_X, double L_C, double lambda) {
    return L_X / 8.0 + L_C * (2.0 + 1.0 / 8.0) < 1.0 - 0.5 * lambda;
}

// Midpoint of the admissible interval (0, 2(1 - L_X/8 - L_C·17/8)).
inline double default_lambda(double L_X, double L_C) {
    const double upper = 2.0 * (1.0 - L_X / 8.0 - L_C * (2.0 + 1.0 / 8.0));
    if (!(upper > 0.0))
        throw std::invalid_argument("default_lambda: kernels too large for any λ > 0");
    return 0.5 * upper;
}

// B = A + σ_x²γ/2 + σ_c²/2 + λH0 + 17β²L_X + 17α²L_C, where A bounds the
// residual polynomial of the drift computation, separable in x and c. Each
// 1D supremum is found by scanning the derivative for sign changes inside a
// Cauchy-bound bracket and bisecting to 1e-12.
inline double derive_B(const ModelParams& p, double L_X, double L_C, double lambda) {
    if (!cond_lambda_lya(L_X, L_C, lambda))
        throw std::invalid_argument("derive_B: cond_lambda_lya violated");
    const double g = p.gamma, b = p.beta, al = p.alpha;

    // P_x(x) = -γx⁴ - βx³ + ((1+λ/2)γ + L_X(1+2γ+16γ²) + 17L_C)x² + (1+λ)βx
    const double cx2 = (1.0 + 0.5 * lambda) * g + L_X * (1.0 + 2.0 * g + 16.0 * g * g) +
                       17.0 * L_C;
    const double cx1 = (1.0 + lambda) * b;
    const double bound_x =
        1.0 + std::max({std::abs(b / g), std::abs(cx2 / g), std::abs(cx1 / g)});
    const auto Px = [&](double x) {
        return ((-g * x - b) * x + cx2) * x * x + cx1 * x;
    };
    const auto dPx = [&](double x) {
        return ((-4.0 * g * x - 3.0 * b) * x + 2.0 * cx2) * x + cx1;
    };
    const double sup_x = std::max(0.0, sup_on_interval(Px, dPx, -bound_x, bound_x));

    // P_c(c) = (L_X/8 + L_C·17/8 - (1-λ/2))c² - (1-λ)αc, downward parabola
    // under cond_lambda_lya.
    const double cc2 = L_X / 8.0 + L_C * (2.0 + 1.0 / 8.0) - (1.0 - 0.5 * lambda);
    const double cc1 = -(1.0 - lambda) * al;
    double sup_c = 0.0;
    if (cc1 != 0.0) {
        const double bound_c = 1.0 + std::abs(cc1 / cc2);
        const auto Pc = [&](double c) { return cc2 * c * c + cc1 * c; };
        const auto dPc = [&](double c) { return 2.0 * cc2 * c + cc1; };
        sup_c = std::max(0.0, sup_on_interval(Pc, dPc, -bound_c, bound_c, 64));
    }

    return sup_x + sup_c + 0.5 * p.sigma_x * p.sigma_x * g + 0.5 * p.sigma_c * p.sigma_c +
           lambda * H0_offset(p) + 17.0 * b * b * L_X + 17.0 * al * al * L_C;
}

struct BTildeResult {
    double value = 0.0;      // linear, may overflow to inf for huge inputs
    double log_value = 0.0;  // natural log, finite whenever the sup is > 0
};

// sup_{h>=0} e^{a√h}(Bp - λh/4), located by bisecting the derivative's
// bracket ψ(s) = aBp - aλs²/4 - λs/2 in s = √h (strictly decreasing).
inline BTildeResult sup_exp_branch(double Bp, double lambda, double a) {
    if (!(lambda > 0.0)) throw std::invalid_argument("derive_B_tilde: lambda must be > 0");
    if (Bp <= 0.0) return {0.0, kNegInf};
    if (!(a > 0.0)) return {Bp, std::log(Bp)};
    const auto psi = [&](double s) {
        return a * (Bp - 0.25 * lambda * s * s) - 0.5 * lambda * s;
    };
    double hi = 1.0;
    while (psi(hi) > 0.0) hi *= 2.0;
    const double s_star = bisect(psi, 0.0, hi, 1e-14);
    const double bracket = Bp - 0.25 * lambda * s_star * s_star;
    const double log_val = a * s_star + std::log(std::max(bracket, 1e-300));
    return {std::exp(std::min(log_val, 709.0)) * (log_val > 709.0 ? kInf : 1.0), log_val};
}

// B̃ for the tilted Lyapunov function. The nonlinear-process branch absorbs
// the limit's moment terms through C_init2; the particle-system branch keeps
// them outside (they cancel against the kernel-smallness conditions). The
// returned B_tilde is the max of the two, both are reported.
inline void derive_B_tilde(const ModelParams& p, double L_X, double L_C, double lambda,
                           double a, double C_init2, LyapunovConstants& out) {
    if (!(lambda > 0.0)) throw std::invalid_argument("derive_B_tilde: lambda must be > 0");
    const double B = derive_B(p, L_X, L_C, lambda);
    const double smax = 0.5 * std::max(p.sigma_x * p.sigma_x, p.sigma_c * p.sigma_c) *
                        std::max(p.gamma, 1.0);
    const double young = smax * smax * a * a / (2.0 * lambda);
    const double moment_coeff = coeff_alpha_X(p) * L_X + coeff_beta_X() * L_C +
                                coeff_alpha_C() * L_X + coeff_beta_C() * L_C;
    const double Bp_particle = B + young;
    const double Bp_nonlinear = Bp_particle + moment_coeff * C_init2;
    const auto part = sup_exp_branch(Bp_particle, lambda, a);
    const auto nonlin = sup_exp_branch(Bp_nonlinear, lambda, a);
    out.B = B;
    out.B_tilde_particle = part.value;
    out.B_tilde_nonlinear = nonlin.value;
    out.B_tilde = std::max(part.value, nonlin.value);
}

// Uniform-in-time second-moment bound C_init,2 from the exponential moment
// bound E e^{ã(|X|+|C|)} <= C_init,exp: u² <= (2/ã)² e^{-2} e^{ãu} gives the
// initial bound, the H-Gronwall inequality extends it to all t.
inline double derive_C_init2(const ModelParams& p, double lambda, double B,
                             double C_init_exp, double a_tilde) {
    if (!(a_tilde > 0.0) || !(C_init_exp > 0.0))
        throw std::invalid_argument("derive_C_init2: need ã > 0 and C_init_exp > 0");
    const double second_moment0 =
        (4.0 / (a_tilde * a_tilde)) * std::exp(-2.0) * C_init_exp;
    const double EH0 =
        std::max(p.gamma, 1.0) * second_moment0 + 1.5 * H0_offset(p);
    const double sup_EH = std::max(EH0, B / lambda);
    return 4.0 * sup_EH / std::min(p.gamma, 1.0);
}

// Full constant bundle for given kernels.
inline LyapunovConstants derive_lyapunov(const ModelParams& p, double L_X, double L_C,
                                         double a_tilde, double C_init_exp,
                                         double lambda_override = 0.0) {
    LyapunovConstants lc;
    lc.lambda = lambda_override > 0.0 ? lambda_override : default_lambda(L_X, L_C);
    if (!cond_lambda_lya(L_X, L_C, lc.lambda))
        throw std::invalid_argument("derive_lyapunov: cond_lambda_lya violated");
    lc.a = tilt_from_a_tilde(a_tilde, p);
    lc.alpha_X = coeff_alpha_X(p);
    lc.beta_X = coeff_beta_X();
    lc.alpha_C = coeff_alpha_C();
    lc.beta_C = coeff_beta_C();
    const double B = derive_B(p, L_X, L_C, lc.lambda);
    const double C_init2 = derive_C_init2(p, lc.lambda, B, C_init_exp, a_tilde);
    derive_B_tilde(p, L_X, L_C, lc.lambda, lc.a, C_init2, lc);
    return lc;
}

} // namespace fhn
