#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace fhn {

// One neuron state z = (x, c): membrane potential and adaptation variable.
struct State {
    double x = 0.0;
    double c = 0.0;

    bool finite() const { return std::isfinite(x) && std::isfinite(c); }
};

inline State operator-(const State& a, const State& b) { return {a.x - b.x, a.c - b.c}; }

inline void require_finite(const State& z, const char* where) {
    if (!z.finite()) throw std::domain_error(std::string(where) + ": non-finite state");
}

// Model constants of the stochastic FitzHugh-Nagumo system.
struct ModelParams {
    double alpha = 0.0;   // stimulus current
    double beta = 1.0;    // recovery offset, > 0
    double gamma = 1.0;   // recovery gain, > 0
    double sigma_x = 0.5; // X-noise std, >= 0
    double sigma_c = 0.5; // C-noise std, >= 0

    void validate() const {
        if (!(gamma > 0.0)) throw std::invalid_argument("ModelParams: gamma must be > 0");
        if (!(beta > 0.0)) throw std::invalid_argument("ModelParams: beta must be > 0");
        if (!(sigma_x >= 0.0) || !(sigma_c >= 0.0))
            throw std::invalid_argument("ModelParams: noise stds must be >= 0");
        if (!(sigma_x > 0.0) && !(sigma_c > 0.0))
            throw std::invalid_argument("ModelParams: need sigma_x > 0 or sigma_c > 0");
        if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(gamma) ||
            !std::isfinite(sigma_x) || !std::isfinite(sigma_c))
            throw std::invalid_argument("ModelParams: non-finite parameter");
    }
};

} // namespace fhn
