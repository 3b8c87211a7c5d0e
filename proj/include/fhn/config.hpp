#pragma once

// Flat key = value run configuration. Unknown keys are errors; '#' starts a
// comment. parse -> serialize -> parse is the identity.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fhn/distance.hpp"
#include "fhn/kernel.hpp"
#include "fhn/sim.hpp"
#include "fhn/state.hpp"

namespace fhn {

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct RunConfig {
    ModelParams params;

    std::string kx_kind = "zero";
    double kx_a11 = 0.0, kx_a12 = 0.0, kx_scale = 0.0, kx_rate = 0.0;
    double kx_lipschitz = -1.0; // < 0: tight default for the built-in kind
    std::string kc_kind = "zero";
    double kc_a11 = 0.0, kc_a12 = 0.0, kc_scale = 0.0, kc_rate = 0.0;
    double kc_lipschitz = -1.0;

    std::size_t n_particles = 256;
    std::size_t m_proxy = 4096;
    double dt = 1e-3;
    double t_end = 10.0;
    std::size_t sample_stride = 100;
    uint64_t seed = 1;
    std::string coupling = "reflection_x";

    double eta = 5.0;
    double delta_tilde = 0.1;
    double a_tilde = 1.0;
    double c_init_exp = 25.0;
    double xi_over_r = 1e-3;
    double lambda_override = 0.0;
    double l_x_max = 4.0;
    double l_c_max = 0.2;

    std::size_t replicas = 32;
    std::string out_dir = "out";
    unsigned threads = 1;
    bool clamp_enabled = false;
    double clamp_limit = 1e6;

    double init_mean_x = 0.0;
    double init_mean_c = 0.0;
    double init_std_x = 0.5;
    double init_std_c = 0.5;

    static RunConfig from_string(const std::string& text);
    static RunConfig from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str());
    }

    std::string to_string() const;

    Kernel kernel(const std::string& kind, double a11, double a12, double scale,
                  double rate, double lipschitz, const char* which) const {
        if (kind == "zero") {
            Kernel k = Kernel::zero();
            if (lipschitz > 0.0) k = Kernel::custom([](const State&) { return 0.0; }, lipschitz);
            return k;
        }
        if (kind == "linear")
            return lipschitz >= 0.0 ? Kernel::linear(a11, a12, lipschitz)
                                    : Kernel::linear(a11, a12);
        if (kind == "bounded_tanh") return Kernel::bounded_tanh(scale, rate);
        throw std::invalid_argument(std::string("unknown kernel kind for ") + which + ": " +
                                    kind);
    }

    Kernel kernel_x() const {
        return kernel(kx_kind, kx_a11, kx_a12, kx_scale, kx_rate, kx_lipschitz, "kx");
    }
    Kernel kernel_c() const {
        return kernel(kc_kind, kc_a11, kc_a12, kc_scale, kc_rate, kc_lipschitz, "kc");
    }

    LedgerInputs ledger_inputs() const {
        LedgerInputs in;
        in.params = params;
        in.L_X = kernel_x().lipschitz_bound();
        in.L_C = kernel_c().lipschitz_bound();
        in.L_X_max = std::max(l_x_max, in.L_X);
        in.L_C_max = std::max(l_c_max, in.L_C);
        in.eta = eta;
        in.delta_tilde = delta_tilde;
        in.a_tilde = a_tilde;
        in.C_init_exp = c_init_exp;
        in.xi_over_R = xi_over_r;
        in.lambda_override = lambda_override;
        return in;
    }

    RunSpec run_spec() const {
        RunSpec spec;
        spec.params = params;
        spec.kx = kernel_x();
        spec.kc = kernel_c();
        spec.N = n_particles;
        spec.M = m_proxy;
        spec.dt = dt;
        spec.T = t_end;
        spec.sample_stride = sample_stride;
        spec.seed = seed;
        spec.a_tilde = a_tilde;
        spec.init = {init_mean_x, init_mean_c, init_std_x, init_std_c};
        spec.step_opts.clamp_enabled = clamp_enabled;
        spec.step_opts.clamp_limit = clamp_limit;
        spec.threads = threads;
        return spec;
    }

    void validate() const {
        params.validate();
        if (n_particles < 1) throw std::invalid_argument("config: n_particles must be >= 1");
        if (m_proxy < 2) throw std::invalid_argument("config: m_proxy must be >= 2");
        if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be > 0");
        if (!(t_end >= 0.0)) throw std::invalid_argument("config: t_end must be >= 0");
        validated_step_count(t_end, dt, sample_stride);
        if (replicas < 1) throw std::invalid_argument("config: replicas must be >= 1");
        coupling_from_name(coupling);
        kernel_x();
        kernel_c();
    }
};

namespace detail_config {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        throw std::invalid_argument("config: bad numeric value for " + key + ": " + v);
    }
}

inline uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long u = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return u;
    } catch (...) {
        throw std::invalid_argument("config: bad integer value for " + key + ": " + v);
    }
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean value for " + key + ": " + v);
}

} // namespace detail_config

inline RunConfig RunConfig::from_string(const std::string& text) {
    using namespace detail_config;
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));

        if (key == "alpha") cfg.params.alpha = parse_double(val, key);
        else if (key == "beta") cfg.params.beta = parse_double(val, key);
        else if (key == "gamma") cfg.params.gamma = parse_double(val, key);
        else if (key == "sigma_x") cfg.params.sigma_x = parse_double(val, key);
        else if (key == "sigma_c") cfg.params.sigma_c = parse_double(val, key);
        else if (key == "kx_kind") cfg.kx_kind = val;
        else if (key == "kx_a11") cfg.kx_a11 = parse_double(val, key);
        else if (key == "kx_a12") cfg.kx_a12 = parse_double(val, key);
        else if (key == "kx_scale") cfg.kx_scale = parse_double(val, key);
        else if (key == "kx_rate") cfg.kx_rate = parse_double(val, key);
        else if (key == "kx_lipschitz") cfg.kx_lipschitz = parse_double(val, key);
        else if (key == "kc_kind") cfg.kc_kind = val;
        else if (key == "kc_a11") cfg.kc_a11 = parse_double(val, key);
        else if (key == "kc_a12") cfg.kc_a12 = parse_double(val, key);
        else if (key == "kc_scale") cfg.kc_scale = parse_double(val, key);
        else if (key == "kc_rate") cfg.kc_rate = parse_double(val, key);
        else if (key == "kc_lipschitz") cfg.kc_lipschitz = parse_double(val, key);
        else if (key == "n_particles") cfg.n_particles = parse_u64(val, key);
        else if (key == "m_proxy") cfg.m_proxy = parse_u64(val, key);
        else if (key == "dt") cfg.dt = parse_double(val, key);
        else if (key == "t_end") cfg.t_end = parse_double(val, key);
        else if (key == "sample_stride") cfg.sample_stride = parse_u64(val, key);
        else if (key == "seed") cfg.seed = parse_u64(val, key);
        else if (key == "coupling") cfg.coupling = val;
        else if (key == "eta") cfg.eta = parse_double(val, key);
        else if (key == "delta_tilde") cfg.delta_tilde = parse_double(val, key);
        else if (key == "a_tilde") cfg.a_tilde = parse_double(val, key);
        else if (key == "c_init_exp") cfg.c_init_exp = parse_double(val, key);
        else if (key == "xi_over_r") cfg.xi_over_r = parse_double(val, key);
        else if (key == "lambda_override") cfg.lambda_override = parse_double(val, key);
        else if (key == "l_x_max") cfg.l_x_max = parse_double(val, key);
        else if (key == "l_c_max") cfg.l_c_max = parse_double(val, key);
        else if (key == "replicas") cfg.replicas = parse_u64(val, key);
        else if (key == "out_dir") cfg.out_dir = val;
        else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_u64(val, key));
        else if (key == "clamp_enabled") cfg.clamp_enabled = parse_bool(val, key);
        else if (key == "clamp_limit") cfg.clamp_limit = parse_double(val, key);
        else if (key == "init_mean_x") cfg.init_mean_x = parse_double(val, key);
        else if (key == "init_mean_c") cfg.init_mean_c = parse_double(val, key);
        else if (key == "init_std_x") cfg.init_std_x = parse_double(val, key);
        else if (key == "init_std_c") cfg.init_std_c = parse_double(val, key);
        else
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
    }
    return cfg;
}

inline std::string RunConfig::to_string() const {
    std::ostringstream out;
    out << "alpha = " << format_double(params.alpha) << "\n";
    out << "beta = " << format_double(params.beta) << "\n";
    out << "gamma = " << format_double(params.gamma) << "\n";
    out << "sigma_x = " << format_double(params.sigma_x) << "\n";
    out << "sigma_c = " << format_double(params.sigma_c) << "\n";
    out << "kx_kind = " << kx_kind << "\n";
    out << "kx_a11 = " << format_double(kx_a11) << "\n";
    out << "kx_a12 = " << format_double(kx_a12) << "\n";
    out << "kx_scale = " << format_double(kx_scale) << "\n";
    out << "kx_rate = " << format_double(kx_rate) << "\n";
    out << "kx_lipschitz = " << format_double(kx_lipschitz) << "\n";
    out << "kc_kind = " << kc_kind << "\n";
    out << "kc_a11 = " << format_double(kc_a11) << "\n";
    out << "kc_a12 = " << format_double(kc_a12) << "\n";
    out << "kc_scale = " << format_double(kc_scale) << "\n";
    out << "kc_rate = " << format_double(kc_rate) << "\n";
    out << "kc_lipschitz = " << format_double(kc_lipschitz) << "\n";
    out << "n_particles = " << n_particles << "\n";
    out << "m_proxy = " << m_proxy << "\n";
    out << "dt = " << format_double(dt) << "\n";
    out << "t_end = " << format_double(t_end) << "\n";
    out << "sample_stride = " << sample_stride << "\n";
    out << "seed = " << seed << "\n";
    out << "coupling = " << coupling << "\n";
    out << "eta = " << format_double(eta) << "\n";
    out << "delta_tilde = " << format_double(delta_tilde) << "\n";
    out << "a_tilde = " << format_double(a_tilde) << "\n";
    out << "c_init_exp = " << format_double(c_init_exp) << "\n";
    out << "xi_over_r = " << format_double(xi_over_r) << "\n";
    out << "lambda_override = " << format_double(lambda_override) << "\n";
    out << "l_x_max = " << format_double(l_x_max) << "\n";
    out << "l_c_max = " << format_double(l_c_max) << "\n";
    out << "replicas = " << replicas << "\n";
    out << "out_dir = " << out_dir << "\n";
    out << "threads = " << threads << "\n";
    out << "clamp_enabled = " << (clamp_enabled ? "true" : "false") << "\n";
    out << "clamp_limit = " << format_double(clamp_limit) << "\n";
    out << "init_mean_x = " << format_double(init_mean_x) << "\n";
    out << "init_mean_c = " << format_double(init_mean_c) << "\n";
    out << "init_std_x = " << format_double(init_std_x) << "\n";
    out << "init_std_c = " << format_double(init_std_c) << "\n";
    return out.str();
}

} // namespace fhn
