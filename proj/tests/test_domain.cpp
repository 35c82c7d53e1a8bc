#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "dwell/domain.hpp"
#include "dwell/spectral.hpp"

using namespace dwell;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gaussian pulse density and normalization") {
    const auto p = make_gaussian_pulse(1.0);
    Eigen::ArrayXd w(1);
    w << 0.0;
    CHECK_THAT(p.spectral_density(w)[0], WithinRel(std::sqrt(2.0 / std::numbers::pi), 1e-12));

    // Intensity FWHM sqrt(2 ln 2)/sigma for S ~ exp(-2 sigma^2 w^2).
    const auto b = make_gaussian_pulse(0.05);
    Eigen::ArrayXd e(2);
    e << 0.0, 0.5 * std::sqrt(2.0 * std::numbers::ln2) / 0.05;
    const auto s = b.spectral_density(e);
    CHECK_THAT(s[1] / s[0], WithinRel(0.5, 1e-12));

    for (double sigma : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const auto g = make_gaussian_pulse(sigma, 0.7);
        const auto grid = spectral::make_grid(g, 1.0, 1 << 16);
        const Eigen::ArrayXd d = g.spectral_density(grid.omega);
        const double integral = grid.spacing() * (d.sum() - 0.5 * (d[0] + d[d.size() - 1]));
        CHECK_THAT(integral, WithinAbs(1.0, 1e-10));
    }
    CHECK_THROWS_AS(make_gaussian_pulse(-1.0), InvalidParameter);
    CHECK_THROWS_AS(make_gaussian_pulse(0.0), InvalidParameter);
}

TEST_CASE("narrow-band pulses have no sampled spectrum") {
    const auto p = make_narrowband_pulse(0.3);
    CHECK(p.is_narrowband());
    CHECK(p.detuning() == 0.3);
    CHECK_THROWS_AS(p.spectral_density(Eigen::ArrayXd::Zero(3)), UnsupportedVariant);
}

TEST_CASE("tabulated pulses are normalized exactly") {
    Eigen::ArrayXd w = Eigen::ArrayXd::LinSpaced(5, -2.0, 2.0);
    Eigen::ArrayXcd a(5);
    a << 0.0, 1.0, 2.0, 1.0, 0.0;
    const auto p = make_tabulated_pulse(w, a);
    CHECK(p.normalized());
    CHECK(p.time_symmetric());
    CHECK_THAT(tabulated_norm(w, std::get<TabulatedPulse>(p.kind()).amplitude), WithinAbs(1.0, 1e-14));
    CHECK_THAT(p.detuning(), WithinAbs(0.0, 1e-14));
    CHECK_THROWS_AS(make_tabulated_pulse(w, a, false), InvalidParameter);
    Eigen::ArrayXd bad = w;
    bad[2] = bad[1];
    CHECK_THROWS_AS(make_tabulated_pulse(bad, a), InvalidParameter);

    Eigen::ArrayXcd chirped = a;
    chirped[1] *= Complex(0.0, 1.0);
    CHECK_FALSE(make_tabulated_pulse(w, chirped).time_symmetric());
}

TEST_CASE("uniform medium coupling from optical depth") {
    CHECK_THAT(std::get<UniformCoupling>(make_uniform_medium(4.0, 1.0).coupling()).g0, WithinRel(1.0, 1e-15));
    CHECK(std::get<UniformCoupling>(make_uniform_medium(0.0, 1.0).coupling()).g0 == 0.0);
    CHECK_THAT(std::get<UniformCoupling>(make_uniform_medium(2.0, 2.0).coupling()).g0, WithinRel(0.5, 1e-15));
    CHECK_THROWS_AS(make_uniform_medium(-1.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(make_uniform_medium(1.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS(AtomParams(0.0), InvalidParameter);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double od0 = 50.0 * u(rng), len = 0.01 + 10.0 * u(rng), gamma = 0.1 + 5.0 * u(rng);
        const auto m = make_uniform_medium(od0, len, AtomParams(gamma));
        CHECK_THAT(m.od_integral(len), WithinAbs(od0, 1e-12 * std::max(1.0, od0)));
    }
}

TEST_CASE("optical depth accumulates along the medium") {
    const auto m = make_uniform_medium(4.0, 1.0);
    CHECK_THAT(m.od_integral(0.5), WithinRel(2.0, 1e-14));
    CHECK(m.od_integral(0.0) == 0.0);
    CHECK_THAT(m.od_integral(1.0), WithinRel(4.0, 1e-14));
    CHECK_THROWS_AS(m.od_integral(1.5), DomainError);
    CHECK_THROWS_AS(m.od_integral(-0.1), DomainError);
    CHECK(m.g(2.0) == 0.0);

    // Linear ramp g = z on [0, 2]: int g^2 = 8/3, OD0 = 4 * 8/3.
    Eigen::ArrayXd z = Eigen::ArrayXd::LinSpaced(201, 0.0, 2.0);
    const auto t = make_tabulated_medium(z, z);
    CHECK_THAT(t.od0(), WithinRel(32.0 / 3.0, 1e-12));
    CHECK_THAT(t.od_integral(1.0), WithinRel(4.0 / 3.0, 1e-12));
    double prev = 0.0;
    for (double x = 0.0; x <= 2.0; x += 0.05) {
        CHECK(t.od_integral(x) >= prev);
        prev = t.od_integral(x);
    }
}

TEST_CASE("effective optical depth") {
    CHECK(effective_od(1.0) == 0.0);
    CHECK(effective_od(1.0 + 1e-16) == 0.0);
    CHECK_THAT(effective_od(std::exp(-3.0)), WithinRel(3.0, 1e-14));
    CHECK_THROWS(effective_od(0.0));
    CHECK_THROWS_AS(WeakProbeConfig(0.0), InvalidParameter);
}

TEST_CASE("reports are invariant under the gamma rescaling") {
    const DelayReport a = spectral::analyze(make_gaussian_pulse(0.5, 0.4), make_uniform_medium(3.0, 1.0, AtomParams(2.0)));
    const DelayReport b = spectral::analyze(make_gaussian_pulse(1.0, 0.2), make_uniform_medium(3.0, 1.0, AtomParams(1.0)));
    CHECK_THAT(a.p_t, WithinRel(b.p_t, 1e-9));
    CHECK_THAT(a.tau_0 * 2.0, WithinRel(b.tau_0, 1e-9));
    CHECK_THAT(a.tau_T * 2.0, WithinRel(b.tau_T, 1e-9));
    CHECK_THAT(a.tau_S * 2.0, WithinRel(b.tau_S, 1e-9));
    CHECK(a.od_eff >= 0.0);
    CHECK_THAT(a.p_t + a.p_s, WithinAbs(1.0, 1e-15));
}
