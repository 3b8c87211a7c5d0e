#pragma once

// Wasserstein estimators, replica statistics and the scaling-rate fits used
// by the acceptance suite.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "fhn/numerics.hpp"
#include "fhn/sim.hpp"
#include "fhn/state.hpp"

namespace fhn {

struct SampleCloud {
    std::vector<State> points;

    std::size_t size() const { return points.size(); }

    void validate() const {
        if (points.empty()) throw std::invalid_argument("SampleCloud: empty");
        for (const State& z : points) require_finite(z, "SampleCloud");
    }
};

namespace detail {

// Min-cost assignment on a square matrix (shortest augmenting paths with
// potentials, O(n³)). Returns row -> column.
inline std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) assign[p[j] - 1] = j - 1;
    return assign;
}

inline double pair_cost(const State& a, const State& b, int p) {
    const double dx = a.x - b.x, dc = a.c - b.c;
    return p == 1 ? std::abs(dx) + std::abs(dc) : dx * dx + dc * dc;
}

// Total cost of an assignment, summed in row order (shared with the
// brute-force oracle so equal assignments give bitwise-equal values).
inline double assignment_cost(const std::vector<std::vector<double>>& cost,
                              const std::vector<int>& assign) {
    double total = 0.0;
    for (std::size_t i = 0; i < assign.size(); ++i) total += cost[i][assign[i]];
    return total;
}

} // namespace detail

// Exact empirical W_p between two equal-size uniform clouds via optimal
// assignment on the n×n matrix of ||z - z'||_p^p costs.
inline double wasserstein_exact(const SampleCloud& a, const SampleCloud& b, int p) {
    a.validate();
    b.validate();
    if (p != 1 && p != 2) throw std::invalid_argument("wasserstein_exact: p must be 1 or 2");
    if (a.size() != b.size()) throw std::invalid_argument("wasserstein_exact: size mismatch");
    const std::size_t n = a.size();
    if (n > 256) throw std::invalid_argument("wasserstein_exact: n > 256");
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cost[i][j] = detail::pair_cost(a.points[i], b.points[j], p);
    const auto assign = detail::min_cost_assignment(cost);
    const double mean_cost = detail::assignment_cost(cost, assign) / double(n);
    return p == 1 ? mean_cost : std::sqrt(mean_cost);
}

struct W1BoundResult {
    double bound = 0.0;           // k · (1/N) Σ ||Z^{i,N} - Z̄^i||_1
    double mean_r_weighted = 0.0; // (1/N) Σ r(Z^{i,N}, Z̄^i), δ-weighted
};

// Coupling upper bound on W1(μ^{k,N}, μ̄^{⊗k}).
inline W1BoundResult coupled_w1_bound(const CoupledEnsemble& ce, std::size_t k,
                                      double delta, bool variant_b = false) {
    if (k < 1 || k > ce.n_pairs) throw std::invalid_argument("coupled_w1_bound: bad k");
    double l1 = 0.0, rw = 0.0;
    for (std::size_t i = 0; i < ce.n_pairs; ++i) {
        const State& zs = ce.system.states[i];
        const State& zl = ce.limit.states[i];
        l1 += std::abs(zs.x - zl.x) + std::abs(zs.c - zl.c);
        rw += variant_b ? r_dist_variant_b(zs, zl, delta) : r_dist(zs, zl, delta);
    }
    const double inv = 1.0 / double(ce.n_pairs);
    return {double(k) * l1 * inv, rw * inv};
}

// Per-time mean and standard error across independent replica series.
struct SeriesStats {
    std::vector<double> t;
    std::vector<double> mean;
    std::vector<double> se;
    bool se_valid = false;
};

inline std::size_t column_index(const Series& s, const std::string& name) {
    for (std::size_t i = 0; i < s.columns.size(); ++i)
        if (s.columns[i] == name) return i;
    throw std::invalid_argument("unknown observable column: " + name);
}

inline SeriesStats expectation_series(const std::vector<Series>& replicas,
                                      const std::string& observable) {
    if (replicas.empty()) throw std::invalid_argument("expectation_series: no replicas");
    const std::size_t col = column_index(replicas.front(), observable);
    const std::size_t rows = replicas.front().rows.size();
    for (const Series& s : replicas)
        if (s.rows.size() != rows || column_index(s, observable) != col)
            throw std::invalid_argument("expectation_series: replica shape mismatch");
    const std::size_t m = replicas.size();
    SeriesStats out;
    out.se_valid = m >= 2;
    out.t.resize(rows);
    out.mean.resize(rows);
    out.se.assign(rows, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < rows; ++r) {
        out.t[r] = replicas.front().rows[r][0];
        double sum = 0.0;
        for (const Series& s : replicas) sum += s.rows[r][col];
        const double mean = sum / double(m);
        out.mean[r] = mean;
        if (out.se_valid) {
            double ss = 0.0;
            for (const Series& s : replicas) {
                const double d = s.rows[r][col] - mean;
                ss += d * d;
            }
            out.se[r] = std::sqrt(ss / double(m - 1) / double(m));
        }
    }
    return out;
}

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double ci95_lo = 0.0;
    double ci95_hi = 0.0;
};

namespace detail {

inline RateFit fit_from(const LinearFit& lf) {
    RateFit rf;
    rf.slope = lf.slope;
    rf.intercept = lf.intercept;
    rf.r_squared = lf.r_squared;
    const double half = t_quantile_975(lf.n > 2 ? lf.n - 2 : 0) * lf.slope_stderr;
    rf.ci95_lo = lf.slope - half;
    rf.ci95_hi = lf.slope + half;
    return rf;
}

} // namespace detail

// Least squares on (log x, log y); the scaling exponent of y ~ C x^s.
inline RateFit fit_scaling(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() < 3 || xs.size() != ys.size())
        throw std::invalid_argument("fit_scaling: need >= 3 matched points");
    std::vector<double> lx(xs.size()), ly(ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
            throw std::invalid_argument("fit_scaling: data must be positive");
        lx[i] = std::log(xs[i]);
        ly[i] = std::log(ys[i]);
    }
    return detail::fit_from(least_squares(lx, ly));
}

// Least squares on (t, log y); the growth rate of y ~ C e^{s t}.
inline RateFit fit_exponential_envelope(const std::vector<double>& ts,
                                        const std::vector<double>& ys) {
    if (ts.size() < 3 || ts.size() != ys.size())
        throw std::invalid_argument("fit_exponential_envelope: need >= 3 matched points");
    std::vector<double> ly(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (!(ys[i] > 0.0))
            throw std::invalid_argument("fit_exponential_envelope: data must be positive");
        ly[i] = std::log(ys[i]);
    }
    return detail::fit_from(least_squares(ts, ly));
}

} // namespace fhn
