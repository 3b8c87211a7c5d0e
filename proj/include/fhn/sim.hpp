#pragma once

// Euler-Maruyama time stepping of the particle system, the McKean-Vlasov
// proxy cloud, and the three coupled systems (synchronous, reflection on X,
// reflection on C).

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhn/distance.hpp"
#include "fhn/kernel.hpp"
#include "fhn/lyapunov.hpp"
#include "fhn/model.hpp"
#include "fhn/mollifier.hpp"
#include "fhn/parallel.hpp"
#include "fhn/rng.hpp"
#include "fhn/state.hpp"

namespace fhn {

// Standard-normal factor for (particle, channel, step); injectable so tests
// can replay reconstructed increments.
using NoiseFn = std::function<double(uint32_t, NoiseChannel, uint64_t)>;

struct InitialLaw {
    double mean_x = 0.0;
    double mean_c = 0.0;
    double std_x = 0.5;
    double std_c = 0.5;
};

struct StepOptions {
    bool clamp_enabled = false;
    double clamp_limit = 1e6;
    double blowup_limit = 1e8;
};

struct StepStats {
    uint64_t clamp_events = 0;
    uint64_t steps = 0;
};

struct Ensemble {
    std::vector<State> states;
    std::vector<uint32_t> streams; // stream handle follows its particle
    uint64_t seed = 0;
    uint64_t step = 0; // next noise step index
    double time = 0.0;

    std::size_t size() const { return states.size(); }

    static Ensemble init(std::size_t n, uint64_t seed, const InitialLaw& law) {
        Ensemble e;
        e.seed = seed;
        e.states.resize(n);
        e.streams.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            e.streams[i] = static_cast<uint32_t>(i);
            const auto gp = gauss_pair(seed, e.streams[i], NoiseChannel::spare, kInitStep);
            e.states[i] = {law.mean_x + law.std_x * gp.z0, law.mean_c + law.std_c * gp.z1};
        }
        return e;
    }
};

namespace detail {

inline double default_noise(uint64_t seed, uint32_t particle, NoiseChannel ch, uint64_t step) {
    return gaussian(seed, particle, ch, step);
}

inline void check_state(const State& z, const StepOptions& opt, std::atomic<bool>& blown) {
    if (!z.finite() || std::abs(z.x) > opt.blowup_limit || std::abs(z.c) > opt.blowup_limit)
        blown.store(true, std::memory_order_relaxed);
}

inline double apply_clamp(double x, const StepOptions& opt,
                          std::atomic<uint64_t>& clamp_events) {
    if (x > opt.clamp_limit) {
        clamp_events.fetch_add(1, std::memory_order_relaxed);
        return opt.clamp_limit;
    }
    if (x < -opt.clamp_limit) {
        clamp_events.fetch_add(1, std::memory_order_relaxed);
        return -opt.clamp_limit;
    }
    return x;
}

} // namespace detail

// One Euler-Maruyama step of the N-particle system (FN_MF):
// z_i += drift_i dt + (σ_x ΔB_x, σ_c ΔB_c), ΔB ~ N(0, dt) from stream i.
inline void step_particles(Ensemble& ens, const Kernel& kx, const Kernel& kc,
                           const ModelParams& p, double dt,
                           const StepOptions& opt = {}, const Parallel& par = Parallel(1),
                           StepStats* stats = nullptr, const NoiseFn* noise = nullptr) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_particles: dt must be > 0");
    if (ens.states.empty()) throw std::invalid_argument("step_particles: empty ensemble");
    const double sqrt_dt = std::sqrt(dt);
    const double amp_x = p.sigma_x * sqrt_dt, amp_c = p.sigma_c * sqrt_dt;
    InteractionField field(kx, kc);
    std::optional<std::vector<State>> snapshot;
    if (!field.fast_path()) snapshot = ens.states; // pairwise sums read the start states
    const std::vector<State>& ref = snapshot ? *snapshot : ens.states;
    field.bind(ref);

    std::atomic<bool> blown{false};
    std::atomic<uint64_t> clamp_events{0};
    const uint64_t step = ens.step;
    const uint64_t seed = ens.seed;

    par.for_each(ens.size(), [&](std::size_t i) {
        const State z = ref[i];
        Drift d = intrinsic_drift(z, p);
        const Drift inter = field.term(z);
        d.dx += inter.dx;
        d.dc += inter.dc;
        const uint32_t id = ens.streams[i];
        const double gx = noise ? (*noise)(id, NoiseChannel::sc_x, step)
                                : detail::default_noise(seed, id, NoiseChannel::sc_x, step);
        const double gc = noise ? (*noise)(id, NoiseChannel::c, step)
                                : detail::default_noise(seed, id, NoiseChannel::c, step);
        State out{z.x + d.dx * dt + amp_x * gx, z.c + d.dc * dt + amp_c * gc};
        if (opt.clamp_enabled) out.x = detail::apply_clamp(out.x, opt, clamp_events);
        detail::check_state(out, opt, blown);
        ens.states[i] = out;
    });

    if (blown.load())
        throw std::runtime_error(
            "step_particles: integration blow-up (use a smaller dt or enable the clamp)");
    if (stats) {
        stats->clamp_events += clamp_events.load();
        stats->steps += 1;
    }
    ens.step += 1;
    ens.time += dt;
}

// One step of the self-consistent M-particle proxy of (FN_limit): each
// particle's convolution term is the empirical average over the same cloud.
inline void step_limit_proxy(Ensemble& ens, const Kernel& kx, const Kernel& kc,
                             const ModelParams& p, double dt, const StepOptions& opt = {},
                             const Parallel& par = Parallel(1), StepStats* stats = nullptr,
                             const NoiseFn* noise = nullptr) {
    if (ens.size() < 2) throw std::invalid_argument("step_limit_proxy: need M >= 2");
    step_particles(ens, kx, kc, p, dt, opt, par, stats, noise);
}

enum class Coupling { synchronous, reflection_x, reflection_c };

inline const char* coupling_name(Coupling c) {
    switch (c) {
    case Coupling::synchronous: return "synchronous";
    case Coupling::reflection_x: return "reflection_x";
    case Coupling::reflection_c: return "reflection_c";
    }
    return "?";
}

inline Coupling coupling_from_name(const std::string& s) {
    if (s == "synchronous") return Coupling::synchronous;
    if (s == "reflection_x") return Coupling::reflection_x;
    if (s == "reflection_c") return Coupling::reflection_c;
    throw std::invalid_argument("unknown coupling mode: " + s);
}

// N coupled pairs (Z^{i,N}, Z̄^i). The limit members are the first N
// particles of an M-particle proxy cloud; pair i shares driving noise per
// the chosen coupling.
struct CoupledEnsemble {
    Ensemble system;                          // N particles
    Ensemble limit;                           // M-cloud (or N members when frozen)
    std::optional<std::vector<State>> frozen; // frozen proxy sample, if any
    std::size_t n_pairs = 0;
    Coupling coupling = Coupling::synchronous;
    double xi = 0.0;
    double R = 0.0;

    static CoupledEnsemble init(std::size_t n, std::size_t m, uint64_t seed,
                                Coupling coupling, double xi, double R,
                                const InitialLaw& law, const ModelParams& p) {
        if (coupling == Coupling::reflection_x && !(p.sigma_x > 0.0))
            throw std::invalid_argument("reflection_x requires sigma_x > 0");
        if (coupling == Coupling::reflection_c && !(p.sigma_x == 0.0 && p.sigma_c > 0.0))
            throw std::invalid_argument("reflection_c requires sigma_x = 0 and sigma_c > 0");
        if (n < 1 || m < std::max<std::size_t>(n, 2))
            throw std::invalid_argument("CoupledEnsemble: need 1 <= N <= M, M >= 2");
        CoupledEnsemble ce;
        ce.n_pairs = n;
        ce.coupling = coupling;
        ce.xi = xi;
        ce.R = R;
        ce.limit = Ensemble::init(m, seed, law);
        ce.system.seed = seed;
        ce.system.states.assign(ce.limit.states.begin(), ce.limit.states.begin() + n);
        ce.system.streams.assign(ce.limit.streams.begin(), ce.limit.streams.begin() + n);
        return ce;
    }

    // Switching argument of pair i (start-of-step states).
    double switch_arg(std::size_t i) const {
        const State& zs = system.states[i];
        const State& zl = limit.states[i];
        return coupling == Coupling::reflection_c
                   ? std::abs(2.0 * (zs.x - zl.x) - (zs.c - zl.c))
                   : std::abs(zs.x - zl.x);
    }
};

// Advances both members of every pair plus the proxy cloud by one step.
inline void step_coupled(CoupledEnsemble& ce, const Kernel& kx, const Kernel& kc,
                         const ModelParams& p, double dt, const StepOptions& opt = {},
                         const Parallel& par = Parallel(1), StepStats* stats = nullptr) {
    if (!(dt > 0.0)) throw std::invalid_argument("step_coupled: dt must be > 0");
    const std::size_t n = ce.n_pairs;
    const std::size_t m = ce.limit.size();
    const double sqrt_dt = std::sqrt(dt);
    const double amp_x = p.sigma_x * sqrt_dt, amp_c = p.sigma_c * sqrt_dt;

    InteractionField field_sys(kx, kc);
    InteractionField field_lim(kx, kc);
    std::optional<std::vector<State>> snap_sys, snap_lim;
    if (!field_sys.fast_path()) {
        snap_sys = ce.system.states;
        snap_lim = ce.limit.states;
    }
    const std::vector<State>& sys_ref = snap_sys ? *snap_sys : ce.system.states;
    const std::vector<State>& lim_ref = snap_lim ? *snap_lim : ce.limit.states;
    field_sys.bind(sys_ref);
    field_lim.bind(ce.frozen ? *ce.frozen : lim_ref);

    // Switching arguments and start states are taken before any update.
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = ce.switch_arg(i);

    std::atomic<bool> blown{false};
    std::atomic<uint64_t> clamp_events{0};
    const uint64_t step = ce.system.step;
    const uint64_t seed = ce.system.seed;

    par.for_each(m, [&](std::size_t j) {
        const uint32_t id = ce.limit.streams[j];
        const State zl = lim_ref[j];
        Drift dl = intrinsic_drift(zl, p);
        const Drift il = field_lim.term(zl);
        dl.dx += il.dx;
        dl.dc += il.dc;

        if (j < n) {
            const State zs = sys_ref[j];
            Drift ds = intrinsic_drift(zs, p);
            const Drift is = field_sys.term(zs);
            ds.dx += is.dx;
            ds.dc += is.dc;

            double gx_sys, gx_lim, gc_sys, gc_lim;
            switch (ce.coupling) {
            case Coupling::synchronous: {
                const double gx = gaussian(seed, id, NoiseChannel::sc_x, step);
                const double gc = gaussian(seed, id, NoiseChannel::c, step);
                gx_sys = gx_lim = gx;
                gc_sys = gc_lim = gc;
                break;
            }
            case Coupling::reflection_x: {
                const auto m2 = mollifiers(u[j], ce.xi, ce.R);
                const double gsc = gaussian(seed, id, NoiseChannel::sc_x, step);
                const double grc = gaussian(seed, id, NoiseChannel::rc_x, step);
                gx_sys = m2.sc * gsc + m2.rc * grc;
                gx_lim = m2.sc * gsc - m2.rc * grc;
                gc_sys = gc_lim = gaussian(seed, id, NoiseChannel::c, step);
                break;
            }
            case Coupling::reflection_c:
            default: {
                const auto m2 = mollifiers(u[j], ce.xi, ce.R);
                const double gsc = gaussian(seed, id, NoiseChannel::c, step);
                const double grc = gaussian(seed, id, NoiseChannel::spare, step);
                gc_sys = m2.sc * gsc + m2.rc * grc;
                gc_lim = m2.sc * gsc - m2.rc * grc;
                gx_sys = gx_lim = 0.0;
                break;
            }
            }
            State sys_out{zs.x + ds.dx * dt + amp_x * gx_sys,
                          zs.c + ds.dc * dt + amp_c * gc_sys};
            State lim_out{zl.x + dl.dx * dt + amp_x * gx_lim,
                          zl.c + dl.dc * dt + amp_c * gc_lim};
            if (opt.clamp_enabled) {
                sys_out.x = detail::apply_clamp(sys_out.x, opt, clamp_events);
                lim_out.x = detail::apply_clamp(lim_out.x, opt, clamp_events);
            }
            detail::check_state(sys_out, opt, blown);
            detail::check_state(lim_out, opt, blown);
            ce.system.states[j] = sys_out;
            ce.limit.states[j] = lim_out;
        } else {
            const double gx = gaussian(seed, id, NoiseChannel::sc_x, step);
            const double gc = gaussian(seed, id, NoiseChannel::c, step);
            State out{zl.x + dl.dx * dt + amp_x * gx, zl.c + dl.dc * dt + amp_c * gc};
            if (opt.clamp_enabled) out.x = detail::apply_clamp(out.x, opt, clamp_events);
            detail::check_state(out, opt, blown);
            ce.limit.states[j] = out;
        }
    });

    if (blown.load())
        throw std::runtime_error(
            "step_coupled: integration blow-up (use a smaller dt or enable the clamp)");
    if (stats) {
        stats->clamp_events += clamp_events.load();
        stats->steps += 1;
    }
    ce.system.step += 1;
    ce.system.time += dt;
    ce.limit.step += 1;
    ce.limit.time += dt;
}

// ---------------------------------------------------------------------------
// Trajectory runs with sampled observables.

struct Series {
    std::vector<std::string> columns; // first column is t
    std::vector<std::vector<double>> rows;
};

struct RunSpec {
    ModelParams params;
    Kernel kx;
    Kernel kc;
    std::size_t N = 256;
    std::size_t M = 4096;
    double dt = 1e-3;
    double T = 10.0;
    std::size_t sample_stride = 100;
    uint64_t seed = 1;
    double a_tilde = 1.0;
    InitialLaw init;
    StepOptions step_opts;
    unsigned threads = 1;
};

inline std::size_t validated_step_count(double T, double dt, std::size_t stride) {
    if (!(dt > 0.0)) throw std::invalid_argument("run: dt must be > 0");
    if (!(T >= 0.0)) throw std::invalid_argument("run: T must be >= 0");
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    if (std::abs(double(n) * dt - T) > dt * (1.0 + 1e-9))
        throw std::invalid_argument("run: T is not reproduced by dt within one step");
    if (stride == 0) throw std::invalid_argument("run: sample_stride must be >= 1");
    if (n % stride != 0)
        throw std::invalid_argument("run: sample_stride must divide the step count");
    return n;
}

namespace detail {

inline void sample_uncoupled(const Ensemble& ens, const ModelParams& p, double a,
                             Series& out) {
    const std::size_t n = ens.size();
    double sx = 0, sc = 0, sxx = 0, scc = 0, sH = 0, sHt = 0, max_ax = 0;
    for (const State& z : ens.states) {
        sx += z.x;
        sc += z.c;
        sxx += z.x * z.x;
        scc += z.c * z.c;
        const double h = H(z, p);
        sH += h;
        sHt += H_tilde_of_energy(h, a);
        max_ax = std::max(max_ax, std::abs(z.x));
    }
    const double inv = 1.0 / double(n);
    out.rows.push_back({ens.time, sx * inv, sc * inv, sxx * inv, scc * inv, sH * inv,
                        sHt * inv, max_ax});
}

} // namespace detail

// Simulates (FN_MF); samples moments and Lyapunov observables every stride.
inline Series run_particles(const RunSpec& spec) {
    spec.params.validate();
    const std::size_t nsteps = validated_step_count(spec.T, spec.dt, spec.sample_stride);
    const double a = tilt_from_a_tilde(spec.a_tilde, spec.params);
    Parallel par(spec.threads);
    Ensemble ens = Ensemble::init(spec.N, spec.seed, spec.init);
    Series out;
    out.columns = {"t", "mean_x", "mean_c", "m2_x", "m2_c", "mean_H", "mean_Htilde",
                   "max_abs_x"};
    detail::sample_uncoupled(ens, spec.params, a, out);
    StepStats stats;
    for (std::size_t k = 1; k <= nsteps; ++k) {
        step_particles(ens, spec.kx, spec.kc, spec.params, spec.dt, spec.step_opts, par,
                       &stats);
        if (k % spec.sample_stride == 0)
            detail::sample_uncoupled(ens, spec.params, a, out);
    }
    return out;
}

// Simulates the M-particle proxy of (FN_limit).
inline Series run_proxy(const RunSpec& spec) {
    RunSpec s = spec;
    s.N = spec.M;
    return run_particles(s);
}

// Simulates a coupled pair system; samples pair distances and the semimetric.
inline Series run_coupled(const RunSpec& spec, Coupling coupling,
                          const CouplingLedger& led) {
    spec.params.validate();
    const std::size_t nsteps = validated_step_count(spec.T, spec.dt, spec.sample_stride);
    Parallel par(spec.threads);
    CoupledEnsemble ce = CoupledEnsemble::init(spec.N, spec.M, spec.seed, coupling, led.xi,
                                               led.R, spec.init, spec.params);
    Series out;
    out.columns = {"t",      "mean_r", "mean_l1", "mean_f_r", "rho",
                   "frac_rc", "mean_H_sys", "mean_H_lim", "max_abs_x"};
    const auto sample = [&] {
        const std::size_t n = ce.n_pairs;
        double sr = 0, sl1 = 0, sfr = 0, nrc = 0, sHs = 0, sHl = 0, max_ax = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const State& zs = ce.system.states[i];
            const State& zl = ce.limit.states[i];
            const double r = led.pair_distance(zs, zl);
            sr += r;
            sl1 += std::abs(zs.x - zl.x) + std::abs(zs.c - zl.c);
            sfr += led.fm().f(r);
            if (mollifiers(ce.switch_arg(i), ce.xi, ce.R).rc > 0.0) nrc += 1.0;
            sHs += H(zs, spec.params);
            sHl += H(zl, spec.params);
            max_ax = std::max({max_ax, std::abs(zs.x), std::abs(zl.x)});
        }
        const double inv = 1.0 / double(n);
        out.rows.push_back({ce.system.time, sr * inv, sl1 * inv, sfr * inv,
                            rho(ce.system.states,
                                {ce.limit.states.begin(), ce.limit.states.begin() + n}, led),
                            nrc * inv, sHs * inv, sHl * inv, max_ax});
    };
    sample();
    StepStats stats;
    for (std::size_t k = 1; k <= nsteps; ++k) {
        step_coupled(ce, spec.kx, spec.kc, spec.params, spec.dt, spec.step_opts, par,
                     &stats);
        if (k % spec.sample_stride == 0) sample();
    }
    return out;
}

} // namespace fhn
