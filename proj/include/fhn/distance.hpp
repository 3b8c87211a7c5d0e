#pragma once

// Semimetric machinery: the weighted distance r, the concave transform f
// built from φ, Φ, g, the Lyapunov weight G, the semimetric ρ, and the full
// derived constant ledger with its verification report.
//
// The explicit constants are astronomically scaled (φ_min ~ e^{-qR²} with
// qR² in the 1e5..1e7 range for any usable configuration), so every extreme
// quantity carries a natural-log companion and all comparisons against them
// are done in log space. Linear doubles are kept where representable.

#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "fhn/kernel.hpp"
#include "fhn/lyapunov.hpp"
#include "fhn/numerics.hpp"
#include "fhn/state.hpp"

namespace fhn {

// r(z, z') = |x - x'| + δ|c - c'|
inline double r_dist(const State& z, const State& zbar, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("r_dist: delta must be > 0");
    return std::abs(z.x - zbar.x) + delta * std::abs(z.c - zbar.c);
}

// Appendix-B variant distance r = δ|Δx| + |2Δx - Δc|.
inline double r_dist_variant_b(const State& z, const State& zbar, double delta) {
    const double dx = z.x - zbar.x, dc = z.c - zbar.c;
    return delta * std::abs(dx) + std::abs(2.0 * dx - dc);
}

// The concave transform f(r) = ∫_0^{r∧R} φ(s) g(s) ds with
//   φ(s) = e^{-q s²},
//   Φ(s) = ∫_0^s φ = √π/(2√q)·erf(√q s),
//   g(s) = 1 - κ ∫_0^s Φ/φ,  κ = (c + 2εB̃)/σ².
// The g-integrand grows like e^{q s²}; its integral is carried in log space
// (adaptive Simpson while representable, asymptotic tail beyond).
class FMachinery {
public:
    FMachinery(double q, double log_kappa, double R) : q_(q), log_kappa_(log_kappa), R_(R) {
        if (!(q > 0.0) || !(R > 0.0))
            throw std::invalid_argument("FMachinery: need q > 0 and R > 0");
        sqrt_q_ = std::sqrt(q);
        phi_inf_ = 0.5 * std::sqrt(M_PI) / sqrt_q_;
        s_cut_ = std::min(R_, std::sqrt(600.0 / q_));
        build_log_I_nodes();
        log_I_at_cut_ = log_I(s_cut_);
        f_end_ = std::min(R_, std::sqrt(760.0 / q_));
        build_f_nodes();
        f_R_ = f_values_back_;
        log_fprime_R_ = log_phi(R_) + log_g(R_);
    }

    double q() const { return q_; }
    double R() const { return R_; }
    double log_kappa() const { return log_kappa_; }

    double phi(double r) const { return std::exp(-q_ * r * r); }
    double log_phi(double r) const { return -q_ * r * r; }

    double Phi(double r) const { return phi_inf_ * std::erf(sqrt_q_ * r); }

    // log ∫_0^r Φ(s)/φ(s) ds
    double log_I(double r) const {
        if (!(r >= 0.0)) throw std::invalid_argument("FMachinery::log_I: r < 0");
        if (r == 0.0) return kNegInf;
        if (r <= first_node_) {
            const double u = q_ * r * r;
            // I(r) = (r²/2)(1 + u/3 + 4u²/45 + ...)
            return 2.0 * std::log(r) - std::log(2.0) +
                   std::log1p(u / 3.0 + (4.0 / 45.0) * u * u);
        }
        if (r <= s_cut_) return log_I_interp_(r);
        const double logE_r = log_growth_integral(q_, r);
        const double logE_c = log_growth_integral(q_, s_cut_);
        const double log_tail =
            std::log(phi_inf_) + logE_r + log1mexp(std::min(logE_c - logE_r, -1e-18));
        return log_add(log_I_at_cut_, log_tail);
    }

    // g(r) = 1 - e^{log κ + log I(r)}; equals 1 to double precision whenever
    // the exponent underflows.
    double g(double r) const {
        const double e = log_kappa_ + log_I(r);
        if (e >= 0.0) return 0.0;
        return 1.0 - std::exp(e);
    }

    double log_g(double r) const {
        const double e = log_kappa_ + log_I(r);
        if (e >= 0.0) return kNegInf;
        return log1mexp(e);
    }

    double f(double r) const {
        if (!(r >= 0.0)) throw std::invalid_argument("FMachinery::f: r < 0");
        const double s = std::min(r, f_end_);
        if (s <= f_first_node_) {
            const double kappa_lin = std::exp(std::min(log_kappa_, 0.0));
            return s * (1.0 - (q_ + 0.5 * kappa_lin) * s * s / 3.0);
        }
        return f_nodes_(s);
    }

    double f_at_R() const { return f_R_; }

    // f' = φ·g by the product rule (left derivative at R, zero beyond).
    double fprime(double r) const {
        if (r > R_) return 0.0;
        return phi(r) * g(r);
    }

    double log_fprime(double r) const {
        if (r > R_) return kNegInf;
        return log_phi(r) + log_g(r);
    }

    double log_fprime_R() const { return log_fprime_R_; }

    // f'' = -2q r φ g - κ Φ, exact on (0, R).
    double f_second(double r) const {
        const double kappa_lin = std::exp(std::min(log_kappa_, 0.0));
        return -2.0 * q_ * r * phi(r) * g(r) - kappa_lin * Phi(r);
    }

private:
    void build_log_I_nodes() {
        const int n = 2048;
        first_node_ = s_cut_ / n;
        std::vector<double> xs, ys;
        xs.reserve(n);
        ys.reserve(n);
        double acc = 0.0;
        double prev = 0.0;
        const auto integrand = [this](double s) {
            return Phi(s) * std::exp(q_ * s * s);
        };
        for (int k = 1; k <= n; ++k) {
            const double x = (k == n) ? s_cut_ : s_cut_ * double(k) / n;
            acc += integrate(integrand, prev, x, 1e-300, 1e-11);
            xs.push_back(x);
            ys.push_back(std::log(acc));
            prev = x;
        }
        log_I_interp_ = PchipInterpolant(std::move(xs), std::move(ys));
    }

    void build_f_nodes() {
        const int n = 2048;
        f_first_node_ = f_end_ / n;
        std::vector<double> xs, ys;
        xs.reserve(n + 1);
        ys.reserve(n + 1);
        xs.push_back(0.0);
        ys.push_back(0.0);
        double acc = 0.0;
        double prev = 0.0;
        const auto integrand = [this](double s) { return phi(s) * g(s); };
        for (int k = 1; k <= n; ++k) {
            const double x = (k == n) ? f_end_ : f_end_ * double(k) / n;
            acc += integrate(integrand, prev, x, 1e-300, 1e-11);
            xs.push_back(x);
            ys.push_back(acc);
            prev = x;
        }
        f_values_back_ = acc;
        f_nodes_ = PchipInterpolant(std::move(xs), std::move(ys));
    }

    double q_;
    double log_kappa_;
    double R_;
    double sqrt_q_ = 0.0;
    double phi_inf_ = 0.0;
    double s_cut_ = 0.0;
    double f_end_ = 0.0;
    double first_node_ = 0.0;
    double f_first_node_ = 0.0;
    double log_I_at_cut_ = 0.0;
    double f_R_ = 0.0;
    double f_values_back_ = 0.0;
    double log_fprime_R_ = 0.0;
    PchipInterpolant log_I_interp_;
    PchipInterpolant f_nodes_;
};

// Inputs of the ledger derivation, kept for serialization round trips.
struct LedgerInputs {
    ModelParams params;
    double L_X = 0.0;
    double L_C = 0.0;
    double L_X_max = 4.0;
    double L_C_max = 0.2;
    double eta = 5.0;
    double delta_tilde = 0.1;
    double a_tilde = 1.0;
    double C_init_exp = 25.0;
    double xi_over_R = 1e-3;
    double lambda_override = 0.0;
};

// Every derived constant of the coupling construction. Quantities that
// under/overflow double precision carry log_* companions; the linear fields
// then hold 0 or inf.
struct CouplingLedger {
    LedgerInputs in;
    LyapunovConstants lyap;
    bool variant_b = false; // σ_x = 0 construction on the C channel
    double sigma_eff = 0.0;
    double C_init2 = 0.0;

    double delta = 0.0;
    double R0 = 0.0;
    double R = 0.0;
    double Cf1 = 0.0;
    double Cf2 = 0.0;
    double c = 0.0;
    double log_c = 0.0;
    int c_branch = 0; // 1-based index of the binding branch
    double epsilon = 0.0;
    double log_epsilon = 0.0;
    double phi_min = 0.0;
    double log_phi_min = 0.0;
    double C1 = 0.0, C2 = 0.0, Cz = 0.0;
    double log_C1 = 0.0, log_C2 = 0.0, log_Cz = 0.0;
    double q_f = 0.0;       // φ exponent for the actual kernels
    double q_worst = 0.0;   // φ_min exponent (L_max, ε C_f1 + C_f2)
    double q_cbranch = 0.0; // c third-branch exponent (L_max, C_f1 + C_f2)
    double xi = 0.0;

    std::shared_ptr<const FMachinery> f_machinery;

    const FMachinery& fm() const {
        if (!f_machinery) throw std::logic_error("CouplingLedger: machinery not built");
        return *f_machinery;
    }

    double pair_distance(const State& z, const State& zbar) const {
        return variant_b ? r_dist_variant_b(z, zbar, delta) : r_dist(z, zbar, delta);
    }

    // Reflection-switching argument of the coupled SDEs.
    double switching_argument(const State& z, const State& zbar) const {
        return variant_b ? std::abs(2.0 * (z.x - zbar.x) - (z.c - zbar.c))
                         : std::abs(z.x - zbar.x);
    }
};

inline CouplingLedger derive_ledger(const LedgerInputs& in) {
    const ModelParams& p = in.params;
    p.validate();
    if (!(in.eta > 4.0)) throw std::invalid_argument("derive_ledger: eta must be > 4");
    if (!(in.delta_tilde > 0.0))
        throw std::invalid_argument("derive_ledger: delta_tilde must be > 0");
    if (!(in.L_X >= 0.0) || !(in.L_X <= in.L_X_max))
        throw std::invalid_argument("derive_ledger: need 0 <= L_X <= L_X_max");
    if (!(in.L_C >= 0.0) || !(in.L_C <= in.L_C_max) || !(in.L_C_max < 1.0))
        throw std::invalid_argument("derive_ledger: need 0 <= L_C <= L_C_max < 1");
    if (!(in.xi_over_R > 0.0) || !(in.xi_over_R < 0.5))
        throw std::invalid_argument("derive_ledger: xi_over_R out of range");

    CouplingLedger led;
    led.in = in;
    led.variant_b = !(p.sigma_x > 0.0);
    led.sigma_eff = led.variant_b ? p.sigma_c : p.sigma_x;
    if (!(led.sigma_eff > 0.0))
        throw std::invalid_argument("derive_ledger: no usable noise channel");

    led.lyap = derive_lyapunov(p, in.L_X, in.L_C, in.a_tilde, in.C_init_exp,
                               in.lambda_override);
    led.C_init2 = derive_C_init2(p, led.lyap.lambda, led.lyap.B, in.C_init_exp, in.a_tilde);
    const double lambda = led.lyap.lambda;
    const double a = led.lyap.a;
    const double B_tilde = led.lyap.B_tilde;
    const double log_B_tilde = std::log(B_tilde);
    if (!std::isfinite(log_B_tilde))
        throw std::runtime_error("derive_ledger: B_tilde not representable");

    // δ; the Appendix-B construction additionally needs δ > 2.
    led.delta = (1.0 + in.delta_tilde) * (1.0 + in.L_X_max) / (1.0 - in.L_C_max);
    if (led.variant_b)
        led.delta = std::max(led.delta, (1.0 + in.delta_tilde) * 2.0);
    const double delta = led.delta;

    led.R0 = std::sqrt(1280.0 * B_tilde / (lambda * std::min(p.gamma, 1.0)));
    led.R = std::sqrt(1.0 + delta * delta) * led.R0;
    if (!std::isfinite(led.R)) throw std::runtime_error("derive_ledger: R not finite");

    const double root_gamma_term = std::sqrt(2.0 * std::max(p.gamma, 1.0));
    const double ab_term = a * (p.beta + p.alpha / delta);
    led.Cf1 = 16.0 * ((1.0 / (a * a)) * (p.gamma + ab_term * root_gamma_term) *
                          std::expm1(0.5 * a * a) +
                      root_gamma_term * (std::sqrt(p.gamma) + 1.0 / delta) * (M_E - 2.0));
    led.Cf2 = 4.0 * (p.gamma + (ab_term + 2.0 * a * a * (std::sqrt(p.gamma) + 1.0 / delta)) *
                                   root_gamma_term);

    const double sig2 = led.sigma_eff * led.sigma_eff;
    led.q_cbranch = (1.0 + delta * p.gamma + in.L_X_max + delta * in.L_C_max +
                     (led.Cf1 + led.Cf2) * sig2) /
                    (4.0 * sig2);
    const double qcR2 = led.q_cbranch * led.R * led.R;
    if (!std::isfinite(qcR2))
        throw std::runtime_error("derive_ledger: exponent q·R² overflows (R too large)");

    const double drift_margin = 1.0 - in.L_C - (1.0 + in.L_X) / delta;
    if (!(drift_margin > 0.0))
        throw std::runtime_error("derive_ledger: delta ordering fails (1 - L_C - (1+L_X)/δ <= 0)");
    const double log_b1 = std::log(2.0 / in.eta) + log_B_tilde;
    const double log_b2 = std::log(lambda / 160.0 * (in.eta - 4.0) / in.eta);
    const double log_b3 =
        std::log(std::min(led.sigma_eff / (std::sqrt(M_PI) * led.R), drift_margin) /
                 (2.0 * (1.0 + in.eta))) -
        qcR2;
    led.log_c = std::min({log_b1, log_b2, log_b3});
    led.c_branch = led.log_c == log_b1 ? 1 : (led.log_c == log_b2 ? 2 : 3);
    led.c = std::exp(led.log_c);

    led.log_epsilon = std::log(0.5 * in.eta) + led.log_c - log_B_tilde;
    if (led.log_epsilon > 1e-12)
        throw std::runtime_error("derive_ledger: epsilon > 1 (branch ordering broken)");
    led.log_epsilon = std::min(led.log_epsilon, 0.0);
    led.epsilon = std::exp(led.log_epsilon);

    led.q_worst = (1.0 + delta * p.gamma + in.L_X_max + delta * in.L_C_max +
                   (led.epsilon * led.Cf1 + led.Cf2) * sig2) /
                  (4.0 * sig2);
    led.log_phi_min = -led.q_worst * led.R * led.R;
    led.phi_min = std::exp(led.log_phi_min);

    const double dist_factor =
        std::log(16.0 * (1.0 + delta * delta) / std::min(p.gamma, 1.0));
    const double max_term_12 = std::max(dist_factor - led.log_epsilon, 0.0);
    led.log_C1 = -std::log(std::min(delta, 1.0)) + std::log(2.0) - led.log_phi_min +
                 max_term_12;
    led.log_C2 = -std::log(std::min(delta * delta, 1.0)) + std::log(2.0) -
                 led.log_phi_min + max_term_12;
    const double z_factor = std::log(4.0 * std::max(std::sqrt(1.0 / p.gamma), 1.0));
    led.log_Cz = std::log(2.0) - led.log_phi_min + std::max(z_factor - led.log_epsilon, 0.0);
    led.C1 = std::exp(led.log_C1);
    led.C2 = std::exp(led.log_C2);
    led.Cz = std::exp(led.log_Cz);

    led.q_f = (1.0 + delta * p.gamma + in.L_X + delta * in.L_C +
               (led.epsilon * led.Cf1 + led.Cf2) * sig2) /
              (4.0 * sig2);

    // κ = (c + 2εB̃)/σ² = c(1+η)/σ², exactly, since 2εB̃ = ηc.
    const double log_kappa =
        led.log_c + std::log1p(in.eta) - std::log(sig2);
    led.f_machinery = std::make_shared<FMachinery>(led.q_f, log_kappa, led.R);

    led.xi = in.xi_over_R * led.R;
    return led;
}

inline double phi(double r, const CouplingLedger& led) { return led.fm().phi(r); }
inline double Phi(double r, const CouplingLedger& led) { return led.fm().Phi(r); }
inline double g(double r, const CouplingLedger& led) { return led.fm().g(r); }
inline double f(double r, const CouplingLedger& led) { return led.fm().f(r); }

struct LedgerCheck {
    std::string name;
    bool pass = false;
    double slack = 0.0;  // worst margin; log units where the quantities live in logs
    double r_star = 0.0; // location of the worst margin, when meaningful
};

struct LedgerReport {
    std::vector<LedgerCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Numerical verification of every Lemma-parameters property on a grid of
// grid_n points over (0, R].
inline LedgerReport verify_ledger(const CouplingLedger& led, std::size_t grid_n = 10000) {
    const FMachinery& fm = led.fm();
    const double R = led.R;
    LedgerReport rep;

    const auto add = [&rep](std::string name, bool pass, double slack, double r_star) {
        rep.checks.push_back({std::move(name), pass, slack, r_star});
    };

    { // f'_+(0) = 1 by forward difference
        const double h = 1e-6;
        const double d = fm.f(h) / h;
        add("fprime0_equals_1", std::abs(d - 1.0) <= 1e-4, std::abs(d - 1.0), 0.0);
    }
    { // f'_-(R) > 0 in log space
        const double lfp = fm.log_fprime_R();
        add("fprime_R_positive", std::isfinite(lfp), lfp, R);
    }
    { // constant on [R, ∞)
        const bool ok = fm.f(R) == fm.f(1.5 * R) && fm.f(R) == fm.f(R + 1.0);
        add("f_constant_beyond_R", ok, 0.0, R);
    }

    bool mono_ok = true;
    double prev_f = 0.0;
    const double fR = fm.f_at_R();
    bool envelope_up_ok = true, envelope_lo_ok = true, concave_ok = true;
    double env_up_worst = kInf, env_up_r = 0.0, env_lo_worst = kInf, env_lo_r = 0.0;
    double conc_worst = kNegInf, conc_r = 0.0;
    double phi_worst = kInf, phi_r = 0.0;
    double g_worst = kInf, g_r = 0.0;
    double budget_min = kInf, budget_r = 0.0;
    const double log_fprime_R = fm.log_fprime_R();

    for (std::size_t k = 1; k <= grid_n; ++k) {
        const double r = R * double(k) / double(grid_n);
        const double fr = fm.f(r);
        if (fr < prev_f - 1e-12 * std::max(fR, 1e-300)) mono_ok = false;
        prev_f = fr;

        const double up = std::min(r, fR) - fr; // f(s) <= min(s, f(R))
        if (up < env_up_worst) {
            env_up_worst = up;
            env_up_r = r;
        }
        if (up < -1e-9 * std::max(fR, 1e-300)) envelope_up_ok = false;

        // min(s,R) f'_-(R) <= f(s), in logs
        const double lo =
            std::log(fr) - (std::log(std::min(r, R)) + log_fprime_R);
        if (lo < env_lo_worst) {
            env_lo_worst = lo;
            env_lo_r = r;
        }
        if (lo < -1e-9) envelope_lo_ok = false;

        const double fsec = fm.f_second(r);
        if (fsec > conc_worst) {
            conc_worst = fsec;
            conc_r = r;
        }
        if (fsec > 1e-12) concave_ok = false;

        const double phi_slack = fm.log_phi(r) - led.log_phi_min;
        if (phi_slack < phi_worst) {
            phi_worst = phi_slack;
            phi_r = r;
        }

        const double g_slack = -std::log(2.0) - (fm.log_kappa() + fm.log_I(r));
        if (g_slack < g_worst) {
            g_worst = g_slack;
            g_r = r;
        }

        const double ratio = fm.log_fprime(r) + std::log(r) - std::log(fr);
        if (ratio < budget_min) {
            budget_min = ratio;
            budget_r = r;
        }
    }

    add("f_nonneg_nondecreasing", mono_ok && fm.f(R * 1e-4) >= 0.0, 0.0, 0.0);
    add("f_concave", concave_ok, conc_worst, conc_r);
    add("f_envelope_upper", envelope_up_ok && fR <= R, env_up_worst, env_up_r);
    add("f_envelope_lower", envelope_lo_ok, env_lo_worst, env_lo_r);
    add("phi_ge_phi_min", phi_worst >= -1e-9, phi_worst, phi_r);
    add("g_ge_half", g_worst >= -1e-9, g_worst, g_r);

    { // 2 f'(R) >= e^{-q_f R²}, printed form, in logs
        const double slack = std::log(2.0) + log_fprime_R - (-led.q_f * R * R);
        add("two_fprime_R_ge_phi_R", slack >= -1e-9, slack, R);
    }
    { // 2c + 4εB̃ <= (1 - L_C - (1+L_X)/δ) min f'(r) r / f(r)
        const double lhs = std::log(2.0) + std::log1p(led.in.eta) + led.log_c;
        const double margin = 1.0 - led.in.L_C - (1.0 + led.in.L_X) / led.delta;
        const double rhs = std::log(margin) + budget_min;
        add("contraction_budget", lhs <= rhs + 1e-9, rhs - lhs, budget_r);
    }
    { // c <= (λ/160)·(80εB̃/λ)/(1 + 80εB̃/λ); with 80εB̃ = 40ηc the slack is
      // log(η/4) - log1p(40ηc/λ)
        const double x = std::exp(std::log(40.0 * led.in.eta / led.lyap.lambda) + led.log_c);
        const double slack = std::log(led.in.eta / 4.0) - std::log1p(x);
        add("c_le_lambda_branch", slack >= -1e-12, slack, 0.0);
    }
    {
        const double bound = (1.0 + led.in.L_X) / (1.0 - led.in.L_C);
        add("delta_ordering", led.delta > bound, led.delta - bound, 0.0);
    }
    add("epsilon_le_one", led.log_epsilon <= 0.0, -led.log_epsilon, 0.0);
    return rep;
}

// G^i = 1 + εH̃(z_i) + εH̃(z̄_i) + (ε/N)ΣH̃(z_j) + (ε/N)ΣH̃(z̄_j)
inline double G_weight(std::size_t i, const std::vector<State>& ens,
                       const std::vector<State>& ensbar, const CouplingLedger& led) {
    if (ens.size() != ensbar.size() || ens.empty())
        throw std::invalid_argument("G_weight: size mismatch or empty");
    if (i >= ens.size()) throw std::out_of_range("G_weight: index");
    const double a = led.lyap.a;
    const ModelParams& p = led.in.params;
    double avg = 0.0;
    for (std::size_t j = 0; j < ens.size(); ++j)
        avg += H_tilde(ens[j], a, p) + H_tilde(ensbar[j], a, p);
    avg /= double(ens.size());
    return 1.0 + led.epsilon * (H_tilde(ens[i], a, p) + H_tilde(ensbar[i], a, p) + avg);
}

// ρ = (1/N) Σ f(r(z_i, z̄_i)) G^i
inline double rho(const std::vector<State>& ens, const std::vector<State>& ensbar,
                  const CouplingLedger& led) {
    if (ens.size() != ensbar.size() || ens.empty())
        throw std::invalid_argument("rho: size mismatch or empty");
    const double a = led.lyap.a;
    const ModelParams& p = led.in.params;
    const std::size_t n = ens.size();
    double avg = 0.0;
    std::vector<double> ht(n), htbar(n);
    for (std::size_t j = 0; j < n; ++j) {
        ht[j] = H_tilde(ens[j], a, p);
        htbar[j] = H_tilde(ensbar[j], a, p);
        avg += ht[j] + htbar[j];
    }
    avg /= double(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double Gi = 1.0 + led.epsilon * (ht[i] + htbar[i] + avg);
        sum += led.fm().f(led.pair_distance(ens[i], ensbar[i])) * Gi;
    }
    return sum / double(n);
}

struct DistanceControlReport {
    bool l1_pass = false, l2_pass = false, lz_pass = false;
    double l1_slack = 0.0, l2_slack = 0.0, lz_slack = 0.0; // log-space margins
    bool all_pass() const { return l1_pass && l2_pass && lz_pass; }
};

// Lemma rho_1_2 for one pair, checked in log space:
//  (i)  ||z-z'||_1  <= C1 f(r) (1 + εH̃(z) + εH̃(z'))
//  (ii) ||z-z'||_2² <= C2 f(r) (1 + εH̃(z) + εH̃(z'))
//  (iii)||z-z'||_1  <= Cz f(r) (1 + ε√H(z) + ε√H(z'))
inline DistanceControlReport check_distance_control(const State& z, const State& zbar,
                                                    const CouplingLedger& led) {
    const ModelParams& p = led.in.params;
    const double a = led.lyap.a;
    const double dx = z.x - zbar.x, dc = z.c - zbar.c;
    const double l1 = std::abs(dx) + std::abs(dc);
    const double l2sq = dx * dx + dc * dc;
    const double r = led.pair_distance(z, zbar);
    const double log_f = r > 0.0 ? std::log(led.fm().f(r)) : kNegInf;

    const double ht_sum = H_tilde(z, a, p) + H_tilde(zbar, a, p);
    const double sqrtH_sum = std::sqrt(H(z, p)) + std::sqrt(H(zbar, p));
    const double w_tilde =
        ht_sum > 0.0 ? std::log1p(std::exp(led.log_epsilon + std::log(ht_sum))) : 0.0;
    const double w_sqrt =
        sqrtH_sum > 0.0 ? std::log1p(std::exp(led.log_epsilon + std::log(sqrtH_sum))) : 0.0;

    DistanceControlReport rep;
    const double log_l1 = l1 > 0.0 ? std::log(l1) : kNegInf;
    const double log_l2sq = l2sq > 0.0 ? std::log(l2sq) : kNegInf;

    const auto slack_of = [&](double lhs, double log_C, double w) {
        const double rhs = log_C + log_f + w;
        if (lhs == kNegInf) return kInf; // 0 <= 0 with equality
        return rhs - lhs;
    };
    rep.l1_slack = slack_of(log_l1, led.log_C1, w_tilde);
    rep.l2_slack = slack_of(log_l2sq, led.log_C2, w_tilde);
    rep.lz_slack = slack_of(log_l1, led.log_Cz, w_sqrt);
    rep.l1_pass = rep.l1_slack >= -1e-9;
    rep.l2_pass = rep.l2_slack >= -1e-9;
    rep.lz_pass = rep.lz_slack >= -1e-9;
    return rep;
}

struct AdmissibilityCheck {
    std::string name;
    bool pass = false;
    double slack = 0.0; // log units for the C_z/C_1 rows, linear otherwise
};

struct AdmissibilityReport {
    std::vector<AdmissibilityCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Assumption 2's kernel-smallness block against a derived ledger. All bounds
// are inclusive except cond_lambda_lya, which is strict.
inline AdmissibilityReport check_kernel_admissibility(const ModelParams& p, double L_X,
                                                      double L_C, const CouplingLedger& led) {
    (void)p;
    AdmissibilityReport rep;
    const double lambda = led.lyap.lambda;
    const double a = led.lyap.a;

    const auto log_bound_X = std::min({std::log(lambda / 128.0) - led.log_Cz,
                                       std::log(lambda * a / 512.0) - led.log_epsilon -
                                           led.log_Cz,
                                       led.log_c - std::log(2.0) - led.log_C1});
    const auto log_bound_C = std::min({std::log(lambda / (128.0 * led.delta)) - led.log_Cz,
                                       std::log(lambda * a / (512.0 * led.delta)) -
                                           led.log_epsilon - led.log_Cz,
                                       led.log_c - std::log(2.0 * led.delta) - led.log_C1});
    const double log_LX = L_X > 0.0 ? std::log(L_X) : kNegInf;
    const double log_LC = L_C > 0.0 ? std::log(L_C) : kNegInf;
    rep.checks.push_back({"L_X_small", log_LX <= log_bound_X + 1e-12,
                          log_bound_X - log_LX});
    rep.checks.push_back({"L_C_small", log_LC <= log_bound_C + 1e-12,
                          log_bound_C - log_LC});

    const double lhs_x = led.lyap.alpha_X * L_X + led.lyap.beta_X * L_C;
    const double rhs_x = led.in.params.gamma * lambda / 128.0;
    rep.checks.push_back({"alphaX_LX_betaX_LC", lhs_x <= rhs_x + 1e-15, rhs_x - lhs_x});

    const double lhs_c = led.lyap.alpha_C * L_X + led.lyap.beta_C * L_C;
    const double rhs_c = lambda / 128.0;
    rep.checks.push_back({"alphaC_LX_betaC_LC", lhs_c <= rhs_c + 1e-15, rhs_c - lhs_c});

    const double lhs_l = L_X / 8.0 + L_C * (2.0 + 1.0 / 8.0);
    const double rhs_l = 1.0 - 0.5 * lambda;
    rep.checks.push_back({"cond_lambda_lya", lhs_l < rhs_l, rhs_l - lhs_l});
    return rep;
}

} // namespace fhn
