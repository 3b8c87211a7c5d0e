#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "fhn/distance.hpp"
#include "fhn/rng.hpp"

using namespace fhn;

namespace {

const ModelParams kUnit{1.0, 1.0, 1.0, 0.5, 0.5};

LedgerInputs default_inputs() {
    LedgerInputs in;
    in.params = kUnit;
    in.L_X = 0.0;
    in.L_C = 0.0;
    in.L_X_max = 4.0;
    in.L_C_max = 0.2;
    in.eta = 5.0;
    in.delta_tilde = 0.1;
    in.a_tilde = 1.0;
    in.C_init_exp = 25.0;
    in.xi_over_R = 1e-3;
    return in;
}

const CouplingLedger& default_ledger() {
    static const CouplingLedger led = derive_ledger(default_inputs());
    return led;
}

State sample_state(uint64_t seed, uint32_t i, double scale) {
    const auto gp = gauss_pair(seed, i, NoiseChannel::spare, 5);
    return {scale * gp.z0, scale * gp.z1};
}

State heavy_state(uint64_t seed, uint32_t i, double scale) {
    const auto gp = gauss_pair(seed, i, NoiseChannel::spare, 5);
    const auto gq = gauss_pair(seed, i, NoiseChannel::spare, 6);
    const auto clip = [](double v) { return std::clamp(v, -1e3, 1e3); };
    const double hx = gq.z0 != 0.0 ? gp.z0 / std::abs(gq.z0) : gp.z0;
    return {clip(scale * hx), clip(scale * gp.z1 * (1.0 + std::abs(gq.z1)))};
}

// Synthetic ledger with representable constants, for ops that only read the
// scalar fields (G, admissibility bound arithmetic).
CouplingLedger synthetic_ledger(double epsilon, double delta, double a) {
    CouplingLedger led;
    led.in = default_inputs();
    led.lyap.a = a;
    led.lyap.lambda = 1.0;
    led.delta = delta;
    led.epsilon = epsilon;
    led.log_epsilon = std::log(epsilon);
    return led;
}

} // namespace

TEST_CASE("weighted distance r") {
    CHECK(r_dist({0.3, -0.4}, {0.3, -0.4}, 2.0) == 0.0);
    CHECK(r_dist({1.0, 2.0}, {0.0, 0.0}, 2.0) == Catch::Approx(5.0));
    SECTION("symmetry and triangle inequality on random triples") {
        for (uint32_t i = 0; i < 2000; ++i) {
            const State a = sample_state(71, i, 3.0), b = sample_state(72, i, 3.0),
                        c = sample_state(73, i, 3.0);
            const double dab = r_dist(a, b, 2.5);
            CHECK(dab == r_dist(b, a, 2.5));
            CHECK(dab <= r_dist(a, c, 2.5) + r_dist(c, b, 2.5) + 1e-12);
        }
    }
    CHECK_THROWS_AS(r_dist({0, 0}, {1, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("appendix-B distance") {
    // r = δ|Δx| + |2Δx - Δc|
    CHECK(r_dist_variant_b({1.0, 1.0}, {0.0, 0.0}, 3.0) == Catch::Approx(3.0 + 1.0));
    CHECK(r_dist_variant_b({0.0, 2.0}, {0.0, 0.0}, 3.0) == Catch::Approx(2.0));
}

TEST_CASE("golden ledger for the default configuration") {
    const auto& led = default_ledger();

    SECTION("closed forms cross-checked against independent evaluations") {
        CHECK(led.delta == Catch::Approx(1.1 * 5.0 / 0.8).epsilon(1e-14)); // 6.875
        CHECK(led.lyap.lambda == Catch::Approx(1.0));
        CHECK(led.lyap.a == Catch::Approx(1.0 / (4.0 * std::sqrt(2.0))).epsilon(1e-14));
        const double a = led.lyap.a, delta = led.delta;
        const double root2max = std::sqrt(2.0);
        const double cf1 = 16.0 * ((1.0 / (a * a)) * (1.0 + a * (1.0 + 1.0 / delta) * root2max) *
                                       (std::exp(a * a / 2.0) - 1.0) +
                                   root2max * (1.0 + 1.0 / delta) * (M_E - 2.0));
        const double cf2 =
            4.0 * (1.0 + (a * (1.0 + 1.0 / delta) + 2.0 * a * a * (1.0 + 1.0 / delta)) * root2max);
        CHECK(led.Cf1 == Catch::Approx(cf1).epsilon(1e-12));
        CHECK(led.Cf2 == Catch::Approx(cf2).epsilon(1e-12));
        CHECK(led.R0 == Catch::Approx(std::sqrt(1280.0 * led.lyap.B_tilde)).epsilon(1e-12));
        CHECK(led.R == Catch::Approx(std::sqrt(1.0 + delta * delta) * led.R0).epsilon(1e-14));
        // ε = ηc/(2B̃) exactly, in logs
        CHECK(led.log_epsilon ==
              Catch::Approx(std::log(2.5) + led.log_c - std::log(led.lyap.B_tilde))
                  .epsilon(1e-12));
        CHECK(led.xi == Catch::Approx(1e-3 * led.R));
    }

    SECTION("golden regression values") {
        CHECK(led.lyap.B == Catch::Approx(3.8978744179829392).epsilon(1e-10));
        CHECK(led.lyap.B_tilde == Catch::Approx(4.3748765511506864).epsilon(1e-10));
        CHECK(led.R == Catch::Approx(519.88448075518602).epsilon(1e-10));
        CHECK(led.Cf1 == Catch::Approx(28.988642372442445).epsilon(1e-10));
        CHECK(led.Cf2 == Catch::Approx(5.5504338837704772).epsilon(1e-10));
        CHECK(led.q_f == Catch::Approx(9.2626084709426202).epsilon(1e-10));
        CHECK(led.q_worst == Catch::Approx(14.63760847094262).epsilon(1e-10));
        CHECK(led.q_cbranch == Catch::Approx(21.884769064053231).epsilon(1e-10));
        CHECK(led.log_c == Catch::Approx(-5915022.6145159742).epsilon(1e-8));
        CHECK(led.c_branch == 3);
        CHECK(led.log_phi_min == Catch::Approx(-3956250.9633818148).epsilon(1e-8));
        CHECK(led.log_C1 == Catch::Approx(9871281.4799408726).epsilon(1e-8));
        CHECK(led.fm().f_at_R() == Catch::Approx(0.29119122754752552).epsilon(1e-9));
        // the extreme constants underflow/overflow doubles, by construction
        CHECK(led.c == 0.0);
        CHECK(led.epsilon == 0.0);
        CHECK(led.phi_min == 0.0);
        CHECK(std::isinf(led.C1));
    }

    SECTION("verify_ledger is the oracle and passes every inequality") {
        const auto rep = verify_ledger(led);
        for (const auto& c : rep.checks) {
            INFO(c.name << " slack=" << c.slack << " at r*=" << c.r_star);
            CHECK(c.pass);
        }
        CHECK(rep.all_pass());
    }
}

TEST_CASE("derivation rejects invalid inputs by name") {
    auto in = default_inputs();
    SECTION("eta must exceed 4 strictly") {
        in.eta = 4.0;
        CHECK_THROWS_AS(derive_ledger(in), std::invalid_argument);
    }
    SECTION("delta_tilde positive") {
        in.delta_tilde = 0.0;
        CHECK_THROWS_AS(derive_ledger(in), std::invalid_argument);
    }
    SECTION("kernel bounds ordered") {
        in.L_X = 5.0; // above L_X_max
        CHECK_THROWS_AS(derive_ledger(in), std::invalid_argument);
        in.L_X = 0.0;
        in.L_C_max = 1.0;
        CHECK_THROWS_AS(derive_ledger(in), std::invalid_argument);
    }
    SECTION("huge actual kernels overflow the derived constants") {
        in.L_X = 4.0;
        in.L_C = 0.2;
        CHECK_THROWS_AS(derive_ledger(in), std::runtime_error);
    }
}

TEST_CASE("phi, Phi, g, f basic values") {
    const auto& led = default_ledger();
    CHECK(phi(0.0, led) == 1.0);
    CHECK(Phi(0.0, led) == 0.0);
    CHECK(g(0.0, led) == 1.0);
    CHECK(f(0.0, led) == 0.0);
    SECTION("f'_+(0) = 1 by forward difference") {
        CHECK(f(1e-6, led) / 1e-6 == Catch::Approx(1.0).margin(1e-4));
    }
    SECTION("f constant on [R, inf) and inside the envelope") {
        const double fR = led.fm().f_at_R();
        CHECK(f(led.R, led) == fR);
        CHECK(f(led.R + 3.0, led) == fR);
        CHECK(f(10.0 * led.R, led) == fR);
        for (int k = 1; k <= 500; ++k) {
            const double s = led.R * k / 500.0;
            const double fs = f(s, led);
            CHECK(fs <= std::min(s, fR) * (1.0 + 1e-9) + 1e-12);
            // lower envelope in logs: min(s,R) f'_-(R) <= f(s)
            CHECK(std::log(fs) >=
                  std::log(std::min(s, led.R)) + led.fm().log_fprime_R() - 1e-9);
        }
    }
}

TEST_CASE("f is concave: central second differences on the grid") {
    const auto& led = default_ledger();
    const auto& fm = led.fm();
    const double h = led.R / 10000.0;
    const double tol = 1e-6 * (1.0 + led.q_f);
    double worst = kNegInf;
    for (int k = 1; k < 10000; ++k) {
        const double r = h * k;
        const double d2 = (fm.f(r + h) - 2.0 * fm.f(r) + fm.f(r - h)) / (h * h);
        worst = std::max(worst, d2);
    }
    CHECK(worst <= tol);
}

TEST_CASE("Phi closed form agrees with quadrature of phi") {
    const auto& led = default_ledger();
    const auto& fm = led.fm();
    for (double r : {0.05, 0.3, 0.8, 1.7, 3.0}) {
        const double quad =
            integrate([&](double s) { return fm.phi(s); }, 0.0, r, 1e-300, 1e-12);
        CHECK(fm.Phi(r) == Catch::Approx(quad).epsilon(1e-10));
    }
}

TEST_CASE("G weight formula") {
    SECTION("epsilon -> 0 gives exactly 1") {
        const auto& led = default_ledger(); // ε underflows for the default ledger
        std::vector<State> a{{0.5, -1.0}, {2.0, 0.3}}, b{{0.0, 0.0}, {1.0, 1.0}};
        CHECK(G_weight(0, a, b, led) == 1.0);
    }
    SECTION("N=1 identical pair gives 1 + 4εH̃") {
        const auto led = synthetic_ledger(0.01, 2.0, 0.5);
        const State z{0.7, -0.2};
        const double ht = H_tilde(z, led.lyap.a, led.in.params);
        const std::vector<State> zz{z};
        CHECK(G_weight(0, zz, zz, led) == Catch::Approx(1.0 + 4.0 * 0.01 * ht).epsilon(1e-14));
    }
    SECTION("always >= 1 and size mismatch throws") {
        const auto led = synthetic_ledger(0.05, 2.0, 0.4);
        std::vector<State> a, b;
        for (uint32_t i = 0; i < 8; ++i) {
            a.push_back(sample_state(81, i, 2.0));
            b.push_back(sample_state(82, i, 2.0));
        }
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(G_weight(i, a, b, led) >= 1.0);
        b.pop_back();
        CHECK_THROWS_AS(G_weight(0, a, b, led), std::invalid_argument);
    }
}

TEST_CASE("semimetric rho") {
    const auto& led = default_ledger();
    std::vector<State> a, b;
    for (uint32_t i = 0; i < 16; ++i) {
        a.push_back(sample_state(83, i, 2.0));
        b.push_back(sample_state(84, i, 2.0));
    }
    SECTION("identical ensembles give zero") { CHECK(rho(a, a, led) == 0.0); }
    SECTION("single pair reduces to f(r)G") {
        const std::vector<State> a1{a[0]}, b1{b[0]};
        const double expected =
            led.fm().f(r_dist(a[0], b[0], led.delta)) * G_weight(0, a1, b1, led);
        CHECK(rho(a1, b1, led) == Catch::Approx(expected).epsilon(1e-14));
    }
    SECTION("bounded by f(R) times the largest weight") {
        double maxG = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) maxG = std::max(maxG, G_weight(i, a, b, led));
        CHECK(rho(a, b, led) <= led.fm().f_at_R() * maxG * (1.0 + 1e-12));
    }
    SECTION("invariant under simultaneous permutation") {
        std::vector<State> ap(a.rbegin(), a.rend()), bp(b.rbegin(), b.rend());
        CHECK(rho(ap, bp, led) == Catch::Approx(rho(a, b, led)).epsilon(1e-13));
    }
}

TEST_CASE("distance control (Lemma rho_1_2) holds pointwise") {
    const auto& led = default_ledger();
    SECTION("coincident pair holds with equality") {
        const State z{0.4, 0.9};
        const auto rep = check_distance_control(z, z, led);
        CHECK(rep.all_pass());
    }
    SECTION("random pairs covering both proof branches") {
        std::size_t small_branch = 0, large_branch = 0;
        std::size_t violations = 0;
        for (uint32_t i = 0; i < 20000; ++i) {
            // alternate tight and wide pairs so both r<=1 and r>=1 appear
            const double spread = (i % 2) ? 0.05 : 5.0;
            const State z = heavy_state(85, i, 2.0);
            const State zb{z.x + spread * sample_state(86, i, 1.0).x,
                           z.c + spread * sample_state(87, i, 1.0).c};
            const double r = r_dist(z, zb, led.delta);
            (r <= 1.0 ? small_branch : large_branch) += 1;
            if (!check_distance_control(z, zb, led).all_pass()) ++violations;
        }
        CHECK(violations == 0);
        CHECK(small_branch > 1000);
        CHECK(large_branch > 1000);
    }
    SECTION("adversarial far pair") {
        const auto rep = check_distance_control({1e3, -500.0}, {-1e3, 400.0}, led);
        CHECK(rep.all_pass());
    }
}

TEST_CASE("kernel admissibility report") {
    const auto& led = default_ledger();
    SECTION("zero kernels pass everything") {
        const auto rep = check_kernel_admissibility(kUnit, 0.0, 0.0, led);
        CHECK(rep.all_pass());
    }
    SECTION("L at the worst-case bound fails the uniform regime") {
        const auto rep = check_kernel_admissibility(kUnit, 4.0, 0.0, led);
        CHECK_FALSE(rep.all_pass());
        // the log-space kernel-smallness bound binds first
        bool lx_failed = false;
        for (const auto& c : rep.checks)
            if (c.name == "L_X_small") lx_failed = !c.pass;
        CHECK(lx_failed);
    }
    SECTION("inclusive boundary on a synthetic ledger") {
        auto led2 = synthetic_ledger(0.1, 2.0, 0.5);
        led2.log_Cz = std::log(0.01);
        led2.log_c = std::log(0.5);
        led2.log_C1 = 0.0; // C1 = 1, so c/(2C1) = 0.25 binds
        const auto at = check_kernel_admissibility(kUnit, 0.25, 0.0, led2);
        CHECK(at.checks[0].pass);
        const auto above = check_kernel_admissibility(kUnit, 0.2500001, 0.0, led2);
        CHECK_FALSE(above.checks[0].pass);
    }
}

TEST_CASE("appendix-B variant ledger") {
    auto in = default_inputs();
    in.params.sigma_x = 0.0;
    in.params.sigma_c = 0.5;
    const auto led = derive_ledger(in);
    CHECK(led.variant_b);
    CHECK(led.sigma_eff == 0.5);
    CHECK(led.delta > 2.0);
    SECTION("its Lemma-parameters report passes") {
        const auto rep = verify_ledger(led);
        for (const auto& c : rep.checks) {
            INFO(c.name << " slack=" << c.slack);
            CHECK(c.pass);
        }
    }
    SECTION("switching argument and pair distance use the variant forms") {
        const State z{1.0, 1.0}, zb{0.0, 0.0};
        CHECK(led.pair_distance(z, zb) == Catch::Approx(led.delta + 1.0));
        CHECK(led.switching_argument(z, zb) == Catch::Approx(1.0));
    }
}

TEST_CASE("randomized admissible configurations derive and verify") {
    for (uint32_t i = 0; i < 5; ++i) {
        const auto gp = gauss_pair(88, i, NoiseChannel::spare, 1);
        const auto gq = gauss_pair(89, i, NoiseChannel::spare, 2);
        LedgerInputs in;
        in.params.alpha = 0.5 * gp.z0;
        in.params.beta = 0.4 + 0.5 * std::abs(gp.z1);
        in.params.gamma = 0.5 + std::abs(gq.z0);
        in.params.sigma_x = 0.35 + 0.4 * std::abs(gq.z1);
        in.params.sigma_c = 0.5;
        in.L_X = 0.05 * std::abs(gp.z0);
        in.L_C = 0.03 * std::abs(gp.z1);
        in.L_X_max = std::max(4.0, in.L_X);
        in.L_C_max = 0.2;
        in.eta = 4.5 + std::abs(gq.z0);
        in.delta_tilde = 0.05 + 0.2 * std::abs(gq.z1);
        in.a_tilde = 0.6 + 0.5 * std::abs(gp.z0);
        in.C_init_exp = 25.0;
        const auto led = derive_ledger(in);
        const auto rep = verify_ledger(led, 2000);
        INFO("config " << i);
        CHECK(rep.all_pass());
    }
}
