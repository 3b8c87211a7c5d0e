#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fhn/distance.hpp"
#include "fhn/metrics.hpp"
#include "fhn/rng.hpp"

using namespace fhn;

namespace {

const ModelParams kUnit{1.0, 1.0, 1.0, 0.5, 0.5};

SampleCloud random_cloud(uint64_t seed, std::size_t n, double scale = 1.0) {
    SampleCloud c;
    for (uint32_t i = 0; i < n; ++i) {
        const auto gp = gauss_pair(seed, i, NoiseChannel::spare, 9);
        c.points.push_back({scale * gp.z0, scale * gp.z1});
    }
    return c;
}

// Brute force over all pairings; same row-order cost summation as the
// assignment path so equal permutations give identical doubles.
double brute_force_wp(const SampleCloud& a, const SampleCloud& b, int p) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> cost(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = a.points[i].x - b.points[j].x;
            const double dc = a.points[i].c - b.points[j].c;
            cost[i][j] = p == 1 ? std::abs(dx) + std::abs(dc) : dx * dx + dc * dc;
        }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInf;
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += cost[i][perm[i]];
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double mean = best / double(n);
    return p == 1 ? mean : std::sqrt(mean);
}

} // namespace

TEST_CASE("wasserstein_exact basic values") {
    const SampleCloud a = random_cloud(101, 16);
    CHECK(wasserstein_exact(a, a, 1) == Catch::Approx(0.0).margin(1e-15));
    CHECK(wasserstein_exact(a, a, 2) == Catch::Approx(0.0).margin(1e-12));
    SampleCloud s1, s2;
    s1.points = {{0.0, 0.0}};
    s2.points = {{1.0, 0.0}};
    CHECK(wasserstein_exact(s1, s2, 1) == 1.0);
    CHECK(wasserstein_exact(s1, s2, 2) == 1.0);
    SECTION("errors") {
        SampleCloud b = random_cloud(102, 8);
        CHECK_THROWS_AS(wasserstein_exact(a, b, 1), std::invalid_argument);
        CHECK_THROWS_AS(wasserstein_exact(a, a, 3), std::invalid_argument);
        SampleCloud big = random_cloud(103, 257);
        CHECK_THROWS_AS(wasserstein_exact(big, big, 1), std::invalid_argument);
    }
}

TEST_CASE("assignment equals factorial brute force at n = 8") {
    for (uint32_t inst = 0; inst < 50; ++inst) {
        const SampleCloud a = random_cloud(2000 + inst, 8, 2.0);
        const SampleCloud b = random_cloud(3000 + inst, 8, 2.0);
        const int p = (inst % 2) ? 1 : 2;
        INFO("instance " << inst << " p=" << p);
        CHECK(wasserstein_exact(a, b, p) == brute_force_wp(a, b, p));
    }
}

TEST_CASE("wasserstein is a metric on small clouds") {
    for (uint32_t i = 0; i < 40; ++i) {
        const SampleCloud a = random_cloud(4000 + i, 16), b = random_cloud(5000 + i, 16),
                          c = random_cloud(6000 + i, 16);
        for (int p : {1, 2}) {
            const double ab = wasserstein_exact(a, b, p);
            CHECK(ab == Catch::Approx(wasserstein_exact(b, a, p)).margin(1e-12));
            CHECK(ab <= wasserstein_exact(a, c, p) + wasserstein_exact(c, b, p) + 1e-12);
        }
    }
}

TEST_CASE("coupling bound dominates the exact W1") {
    const auto led = [] {
        LedgerInputs in;
        in.params = kUnit;
        return derive_ledger(in);
    }();
    auto ce = CoupledEnsemble::init(64, 128, 404, Coupling::reflection_x, led.xi, led.R,
                                    {0.0, 0.0, 0.7, 0.7}, kUnit);
    for (int k = 0; k < 500; ++k)
        step_coupled(ce, Kernel::linear(0.03, 0.02), Kernel::linear(0.02, 0.01), kUnit,
                     1e-3);
    SampleCloud sys, lim;
    sys.points = ce.system.states;
    lim.points.assign(ce.limit.states.begin(), ce.limit.states.begin() + 64);
    const auto bound = coupled_w1_bound(ce, 1, led.delta);
    CHECK(bound.bound >= wasserstein_exact(sys, lim, 1));
    CHECK(bound.mean_r_weighted >= 0.0);
    SECTION("identical pairs give zero and k scales linearly") {
        auto ce0 = CoupledEnsemble::init(8, 16, 7, Coupling::synchronous, led.xi, led.R,
                                         {0.0, 0.0, 0.5, 0.5}, kUnit);
        CHECK(coupled_w1_bound(ce0, 1, led.delta).bound == 0.0);
        CHECK(coupled_w1_bound(ce, 4, led.delta).bound ==
              Catch::Approx(4.0 * bound.bound).epsilon(1e-14));
        CHECK_THROWS_AS(coupled_w1_bound(ce, 0, led.delta), std::invalid_argument);
        CHECK_THROWS_AS(coupled_w1_bound(ce, 65, led.delta), std::invalid_argument);
    }
    SECTION("W2 squared is dominated by C2 rho, in logs") {
        const double w2 = wasserstein_exact(sys, lim, 2);
        const double rho_val = rho(sys.points, lim.points, led);
        CHECK(2.0 * std::log(w2) <= led.log_C2 + std::log(rho_val) + 1e-9);
    }
}

TEST_CASE("expectation series across replicas") {
    SECTION("constant observable has zero standard error") {
        Series s;
        s.columns = {"t", "v"};
        s.rows = {{0.0, 3.0}, {1.0, 3.0}};
        const auto st = expectation_series({s, s, s}, "v");
        REQUIRE(st.se_valid);
        CHECK(st.mean[0] == 3.0);
        CHECK(st.se[0] == 0.0);
        CHECK(st.se[1] == 0.0);
    }
    SECTION("one replica flags the error as unavailable") {
        Series s;
        s.columns = {"t", "v"};
        s.rows = {{0.0, 1.0}};
        const auto st = expectation_series({s}, "v");
        CHECK_FALSE(st.se_valid);
        CHECK(std::isnan(st.se[0]));
    }
    SECTION("synthetic gaussians match the analytic standard error") {
        const std::size_t m = 100;
        const double sigma = 2.5;
        std::vector<Series> reps;
        for (uint32_t r = 0; r < m; ++r) {
            Series s;
            s.columns = {"t", "v"};
            s.rows = {{0.0, sigma * gaussian(777, r, NoiseChannel::spare, 1)}};
            reps.push_back(std::move(s));
        }
        const auto st = expectation_series(reps, "v");
        const double analytic = sigma / std::sqrt(double(m));
        CHECK(st.se[0] == Catch::Approx(analytic).epsilon(0.2));
    }
    SECTION("unknown observable and shape mismatches throw") {
        Series s;
        s.columns = {"t", "v"};
        s.rows = {{0.0, 1.0}};
        CHECK_THROWS_AS(expectation_series({s}, "w"), std::invalid_argument);
        Series s2 = s;
        s2.rows.push_back({1.0, 2.0});
        CHECK_THROWS_AS(expectation_series({s, s2}, "v"), std::invalid_argument);
    }
}

TEST_CASE("scaling fit") {
    SECTION("exact inverse square root") {
        std::vector<double> xs{16, 32, 64, 128, 256}, ys;
        for (double x : xs) ys.push_back(3.0 / std::sqrt(x));
        const auto fit = fit_scaling(xs, ys);
        CHECK(fit.slope == Catch::Approx(-0.5).epsilon(1e-12));
        CHECK(fit.r_squared == Catch::Approx(1.0));
        CHECK(fit.ci95_lo <= -0.5);
        CHECK(fit.ci95_hi >= -0.5);
    }
    SECTION("constant data fits slope zero") {
        std::vector<double> xs{1, 2, 4, 8}, ys{5, 5, 5, 5};
        CHECK(fit_scaling(xs, ys).slope == Catch::Approx(0.0).margin(1e-14));
    }
    SECTION("noisy slope: the CI covers -1/2 in at least 90% of resamples") {
        std::vector<double> xs{16, 32, 64, 128, 256};
        std::size_t covered = 0;
        const std::size_t trials = 100;
        for (uint32_t t = 0; t < trials; ++t) {
            std::vector<double> ys;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                const double noise =
                    0.08 * gaussian(888, t, NoiseChannel::spare, i + 1);
                ys.push_back(std::exp(std::log(2.0) - 0.5 * std::log(xs[i]) + noise));
            }
            const auto fit = fit_scaling(xs, ys);
            if (fit.ci95_lo <= -0.5 && -0.5 <= fit.ci95_hi) ++covered;
        }
        CHECK(covered >= 90);
    }
    SECTION("rejects nonpositive data") {
        CHECK_THROWS_AS(fit_scaling({1, 2, 3}, {1, -1, 2}), std::invalid_argument);
        CHECK_THROWS_AS(fit_scaling({1, 2}, {1, 1}), std::invalid_argument);
    }
}

TEST_CASE("exponential envelope fit") {
    std::vector<double> ts{0.0, 0.5, 1.0, 1.5, 2.0};
    SECTION("pure exponential growth") {
        std::vector<double> ys;
        for (double t : ts) ys.push_back(std::exp(2.0 * t));
        CHECK(fit_exponential_envelope(ts, ys).slope == Catch::Approx(2.0).epsilon(1e-12));
    }
    SECTION("decaying series has negative slope") {
        std::vector<double> ys;
        for (double t : ts) ys.push_back(0.7 * std::exp(-1.3 * t));
        CHECK(fit_exponential_envelope(ts, ys).slope < -1.0);
    }
}
