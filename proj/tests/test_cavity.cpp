#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "dwell/cavity.hpp"

using namespace dwell;
using namespace dwell::cavity;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("steady-state fields") {
    CHECK(std::abs(steady_fields(CavityParams(0.7, 0.7), 0.0).alpha_ref) == 0.0);
    CHECK_THAT(std::norm(steady_fields(CavityParams(1.0, 3.0), 0.0).alpha_ref), WithinRel(0.25, 1e-15));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const CavityParams p(0.01 + 5.0 * u(rng), 0.01 + 5.0 * u(rng));
        const Complex in(u(rng) - 0.5, u(rng) - 0.5);
        const auto f = steady_fields(p, 10.0 * (u(rng) - 0.5), in);
        CHECK_THAT(std::norm(f.alpha_ref) + std::norm(f.alpha_tr), WithinRel(std::norm(in), 1e-12));
    }
    CHECK_THROWS_AS(CavityParams(0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(CavityParams(1.0, -2.0), InvalidParameter);
}

TEST_CASE("reflected dwell time, direct ratio") {
    const auto nb = make_narrowband_pulse();
    CHECK_THAT(tau_B_direct(CavityParams(1.0, 3.0), nb), WithinRel(-0.5, 1e-14));
    CHECK_THAT(tau_B_direct(CavityParams(0.01, 1.0), nb), WithinRel(-0.04, 0.01));
    CHECK_THAT(tau_B_direct(CavityParams(0.01, 1.0), nb), WithinRel(4.0 * 0.01 / (1e-4 - 1.0), 1e-13));
    CHECK_THROWS_AS(tau_B_direct(CavityParams(2.0, 2.0), nb), UndefinedConditional);

    const auto broad = make_gaussian_pulse(0.05);
    double prev = std::abs(tau_B_direct(CavityParams(0.1, 1.0), broad));
    for (double g1 : {0.01, 1e-3, 1e-4}) {
        const double t = std::abs(tau_B_direct(CavityParams(g1, 1.0), broad));
        CHECK(t < prev);
        prev = t;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("reflected dwell time, closed form") {
    CHECK_THAT(optical_depth(CavityParams(1.0, 3.0)), WithinRel(std::log(4.0), 1e-14));
    CHECK_THAT(tau_B_closed(CavityParams(1.0, 3.0)), WithinRel(-0.5, 1e-14));
    CHECK_THROWS_AS(tau_B_closed(CavityParams(1.0, 1.0)), InvalidParameter);
    CHECK_THROWS_AS(tau_B_closed(CavityParams(2.0, 1.0)), InvalidParameter);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double g1 = 1e-3 * std::pow(1e5, u(rng));
        const double g2 = g1 * (1.01 + std::pow(1e3, u(rng)));
        const CavityParams p(g1, g2);
        CHECK_THAT(tau_B_closed(p), WithinRel(4.0 * g1 / ((g1 - g2) * (g1 + g2)), 1e-12));
    }
    for (double g1 : {1e-5, 1e-4, 1e-3}) {
        const CavityParams p(g1, 1.0);
        const double eta = optical_depth(p);
        CHECK_THAT(tau_B_closed(p), WithinRel(-eta, 2.0 * eta));
        // Analogy with the atomic medium: transmitted-like and average times cancel to first order.
        const double avg = dwell_avg(p, make_narrowband_pulse());
        CHECK(std::abs(tau_B_closed(p) + avg) < eta * eta);
    }
}

TEST_CASE("path series") {
    const MirrorParams m(0.9, 0.6, 0.1);
    const double q = m.r1 * m.r2;
    const double closed = feynman_tau_B(m, 1).closed_form;
    double gap = closed - feynman_tau_B(m, 4).series_value;
    for (std::size_t n = 5; n < 20; ++n) {
        const double next = closed - feynman_tau_B(m, n).series_value;
        const double expected = q * (double(n + 1) - double(n) * q) / (double(n) - double(n - 1) * q);
        CHECK_THAT(next / gap, WithinRel(expected, 1e-6));
        gap = next;
    }
    CHECK_THAT(feynman_tau_B(m, 2000).series_value, WithinRel(closed, 1e-12));
    CHECK(std::abs(feynman_tau_B(MirrorParams(0.9, 1e-9, 0.1), 50).closed_form) < 1e-8);

    const CavityParams p(0.01, 1.0);
    CHECK_THAT(feynman_tau_B(mirror_map(p), 1).closed_form, WithinRel(tau_B_closed(p), 0.02));
    CHECK_THAT(tau_B_mirrors(mirror_map(p)), WithinRel(tau_B_closed(p), 0.02));

    CHECK_THROWS_AS(feynman_tau_B(MirrorParams(1.0, 1.0, 0.1), 5), DomainError);
    CHECK_THROWS_AS(feynman_tau_B(MirrorParams(0.5, 0.9, 0.1), 5), InvalidParameter);
    CHECK_THROWS_AS(feynman_tau_B(m, 0), InvalidParameter);
}

TEST_CASE("mirror map") {
    CHECK_THAT(mirror_reflectivity(1.0, 0.01), WithinRel(0.9975 / 1.0025, 1e-15));
    CHECK(mirror_reflectivity(0.0, 0.01) == 1.0);
    CHECK_THROWS_AS(mirror_reflectivity(400.0, 0.01), DomainError);
    CHECK_THROWS_AS(mirror_map(CavityParams(1.0, 500.0), 0.01), DomainError);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double tau = 0.001 + u(rng);
        const CavityParams p(3.9 * u(rng) / tau + 1e-6, 3.9 * u(rng) / tau + 1e-6);
        const MirrorParams m = mirror_map(p, tau);
        const CavityParams back = inverse_mirror_map(m);
        CHECK_THAT(back.gamma1, WithinRel(p.gamma1, 1e-12));
        CHECK_THAT(back.gamma2, WithinRel(p.gamma2, 1e-12));
        const double rate_form = std::pow((p.gamma1 - p.gamma2) / (p.gamma1 + p.gamma2), 2);
        CHECK_THAT(reflection_probability_mirrors(m), WithinAbs(rate_form, 1e-10));
    }
    CHECK_THAT(mirror_map(CavityParams(0.5, 2.0)).tau_rt, WithinRel(0.005, 1e-15));
}

TEST_CASE("average dwell time") {
    const auto nb = make_narrowband_pulse();
    CHECK_THAT(dwell_avg(CavityParams(1.0, 3.0), nb), WithinRel(0.25, 1e-14));
    CHECK(dwell_avg(CavityParams(1e-9, 1.0), make_gaussian_pulse(1.0)) < 1e-8);

    // Independent Simpson integration of |beta(omega)|^2 over the pulse spectrum.
    const CavityParams p(0.4, 1.1);
    const auto pulse = make_gaussian_pulse(0.8, 0.3);
    const int n = 40000;
    const double a = -30.0, b = 30.0, h = (b - a) / n;
    Eigen::ArrayXd w = Eigen::ArrayXd::LinSpaced(n + 1, a, b);
    const Eigen::ArrayXd s = pulse.spectral_density(w);
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double wt = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += wt * std::norm(steady_fields(p, w[i]).beta) * s[i];
    }
    const double direct = sum * h / 3.0;
    CHECK_THAT(dwell_avg(p, pulse), WithinRel(direct, 1e-10));
    CHECK_THAT(dwell_avg(p, pulse), WithinRel(transmission_probability(p, pulse) / p.gamma2, 1e-10));
    CHECK_THAT(reflection_probability(p, pulse) + transmission_probability(p, pulse), WithinAbs(1.0, 1e-9));
}
