#pragma once

// JSON run manifest: full configuration, the derived constant ledger with
// its log companions, and a git-style content hash of the inputs.

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "fhn/config.hpp"
#include "fhn/distance.hpp"
#include "fhn/sha1.hpp"

namespace fhn {

inline nlohmann::json lyapunov_to_json(const LyapunovConstants& lc) {
    return {
        {"lambda", lc.lambda},
        {"B", lc.B},
        {"B_tilde", lc.B_tilde},
        {"B_tilde_nonlinear", lc.B_tilde_nonlinear},
        {"B_tilde_particle", lc.B_tilde_particle},
        {"a", lc.a},
        {"alpha_X", lc.alpha_X},
        {"beta_X", lc.beta_X},
        {"alpha_C", lc.alpha_C},
        {"beta_C", lc.beta_C},
    };
}

inline nlohmann::json ledger_to_json(const CouplingLedger& led) {
    nlohmann::json j{
        {"variant_b", led.variant_b},
        {"sigma_eff", led.sigma_eff},
        {"C_init2", led.C_init2},
        {"delta", led.delta},
        {"delta_tilde", led.in.delta_tilde},
        {"eta", led.in.eta},
        {"L_X", led.in.L_X},
        {"L_C", led.in.L_C},
        {"L_X_max", led.in.L_X_max},
        {"L_C_max", led.in.L_C_max},
        {"R0", led.R0},
        {"R", led.R},
        {"Cf1", led.Cf1},
        {"Cf2", led.Cf2},
        {"c", led.c},
        {"log_c", led.log_c},
        {"c_branch", led.c_branch},
        {"epsilon", led.epsilon},
        {"log_epsilon", led.log_epsilon},
        {"phi_min", led.phi_min},
        {"log_phi_min", led.log_phi_min},
        {"C1", led.C1},
        {"log_C1", led.log_C1},
        {"C2", led.C2},
        {"log_C2", led.log_C2},
        {"Cz", led.Cz},
        {"log_Cz", led.log_Cz},
        {"q_f", led.q_f},
        {"q_worst", led.q_worst},
        {"q_cbranch", led.q_cbranch},
        {"xi", led.xi},
        {"lyapunov", lyapunov_to_json(led.lyap)},
        // The printed formulas differ between c's third branch (Cf1 + Cf2)
        // and phi_min (ε·Cf1 + Cf2); both are kept, as is the pair of B̃
        // branch values, so the discrepancies stay visible.
        {"notes",
         {{"c_third_branch_exponent", "uses Cf1 + Cf2 with L_max, as printed"},
          {"phi_min_exponent", "uses eps*Cf1 + Cf2 with L_max, as printed"},
          {"b_tilde", "final value is the max of the two reported branches"}}},
    };
    // Theorem-1 style moment-growth constants from the H-Gronwall bound:
    // E(|X̄|²+|C̄|²) <= C01 e^{C02 t}; with λ > 0 the bound is uniform.
    j["C01"] = led.C_init2;
    j["C02"] = 0.0;
    return j;
}

inline nlohmann::json verify_report_to_json(const LedgerReport& rep) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : rep.checks)
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"slack", c.slack},
                       {"r_star", c.r_star}});
    return arr;
}

inline nlohmann::json admissibility_to_json(const AdmissibilityReport& rep) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : rep.checks)
        arr.push_back({{"name", c.name}, {"pass", c.pass}, {"slack", c.slack}});
    return arr;
}

// The config goes in as a key -> value object mirroring the flat text form.
inline nlohmann::json config_to_json(const RunConfig& cfg) {
    nlohmann::json j;
    std::istringstream in(cfg.to_string());
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        j[detail_config::trim(line.substr(0, eq))] = detail_config::trim(line.substr(eq + 1));
    }
    return j;
}

inline nlohmann::json make_manifest(const RunConfig& cfg, const CouplingLedger& led) {
    const std::string cfg_text = cfg.to_string();
    return {
        {"config", config_to_json(cfg)},
        {"content_hash", git_blob_hash(cfg_text)},
        {"ledger", ledger_to_json(led)},
    };
}

inline void write_manifest(const nlohmann::json& manifest, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << manifest.dump(2) << "\n";
}

} // namespace fhn
