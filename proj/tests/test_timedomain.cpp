#include <catch_amalgamated.hpp>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "../src/td_internal.hpp"
#include "dwell/spectral.hpp"
#include "dwell/timedomain.hpp"

using namespace dwell;
using namespace dwell::timedomain;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MediumProfile medium(double od0, double gamma = 1.0) { return make_uniform_medium(od0, 1.0, AtomParams(gamma)); }

FieldHistory forward(const PulseSpec& p, const MediumProfile& m, const GridOptions& o = {}) {
    return integrate_forward(p, m, make_grid(p, m, o));
}

}  // namespace

TEST_CASE("reaction propagator matches the matrix exponential") {
    for (double g : {0.0, 1e-9, 0.1, 0.25, 0.2501, 1.0, 7.0})
        for (double t : {1e-4, 0.01, 0.5, 3.0}) {
            Eigen::Matrix2cd a;
            a << 0.0, Complex(0.0, g), Complex(0.0, g), -0.5;
            const Eigen::Matrix2cd e = (a * t).exp();
            const auto p = detail::reaction(g, t);
            CHECK(std::abs(p.a - e(0, 0)) < 1e-14);
            CHECK(std::abs(p.b - e(0, 1)) < 1e-14);
            CHECK(std::abs(p.c - e(1, 0)) < 1e-14);
            CHECK(std::abs(p.d - e(1, 1)) < 1e-14);
            const auto q = p.adjoint();
            const Eigen::Matrix2cd h = e.adjoint();
            CHECK(std::abs(q.b - h(0, 1)) < 1e-14);
            CHECK(std::abs(q.c - h(1, 0)) < 1e-14);
        }
}

TEST_CASE("grid construction") {
    const auto g = make_grid(make_gaussian_pulse(1.0), medium(1.0));
    CHECK(g.cells == 200);
    CHECK_THAT(g.h * double(g.cells), WithinRel(1.0, 1e-14));
    GridOptions o;
    o.refine = 2.0;
    CHECK(make_grid(make_gaussian_pulse(1.0), medium(1.0), o).cells == 400);
    CHECK(make_grid(make_gaussian_pulse(0.1), medium(1.0)).cells == 500);
    CHECK_THROWS_AS(make_grid(make_narrowband_pulse(), medium(1.0)), UnsupportedVariant);
    Eigen::ArrayXd w = Eigen::ArrayXd::LinSpaced(3, -1.0, 1.0);
    Eigen::ArrayXcd a = Eigen::ArrayXcd::Ones(3);
    CHECK_THROWS_AS(make_grid(make_tabulated_pulse(w, a), medium(1.0)), UnsupportedVariant);
    o.truncation = 0.0;
    CHECK_THROWS_AS(make_grid(make_gaussian_pulse(1.0), medium(1.0), o), InvalidParameter);
}

TEST_CASE("free propagation is an exact shift") {
    const auto f = forward(make_gaussian_pulse(1.0), medium(0.0));
    CHECK(f.beta.cwiseAbs().maxCoeff() == 0.0);
    const Eigen::Index last = Eigen::Index(f.nodes()) - 1;
    for (Eigen::Index n = last; n < Eigen::Index(f.steps()); n += 37)
        CHECK(f.alpha(last, n) == f.alpha(0, n - last));
    CHECK_THAT(transmitted_probability(f), WithinAbs(1.0, 1e-12));
    CHECK(tau_avg_td(f) == 0.0);

    const auto b = integrate_backward(f, 1.0);
    CHECK((b.alpha - f.alpha).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(b.beta.cwiseAbs().maxCoeff() == 0.0);
    CHECK(tau_T_td(weak_trace(f, b)) == 0.0);
    CHECK_THAT(com_delays(f, 1.0).transmitted, WithinAbs(0.0, 1e-9));
    CHECK(std::isnan(com_delays(f, 1.0).scattered));
}

TEST_CASE("forward and backward invariants") {
    const auto p = make_gaussian_pulse(1.0);
    const auto m = medium(2.0);
    const auto f = forward(p, m);
    const double p_t = transmitted_probability(f);
    CHECK_THAT(p_t, WithinRel(spectral::transmission_probability(p, m).p_t, 0.01));
    for (Eigen::Index n = 1; n < f.norm.size(); ++n) CHECK(f.norm[n] <= f.norm[n - 1] + 1e-15);
    CHECK((f.norm + f.scattered - 1.0).abs().maxCoeff() < 1e-4);

    const auto b = integrate_backward(f, p_t);
    for (Eigen::Index n = 1; n < b.norm.size(); ++n) CHECK(b.norm[n] >= b.norm[n - 1] - 1e-15);
    const double drift = (b.overlap - b.overlap[0]).abs().maxCoeff() / std::abs(b.overlap[0]);
    CHECK(drift < 1e-6);
    CHECK_THAT(std::abs(b.overlap[0]), WithinRel(std::sqrt(p_t), 1e-6));
    CHECK_THROWS_AS(integrate_backward(f, 0.0), InvalidParameter);

    const auto tr = weak_trace(f, b);
    CHECK(std::abs(tr.phi[0]) < 1e-12);
    const DelayReport ref = spectral::analyze(p, m);
    CHECK_THAT(tau_T_td(tr), WithinRel(ref.tau_T, 0.02));
    CHECK_THAT(tau_avg_td(f), WithinRel(1.0 - p_t, 0.01));

    const auto com = com_delays(f, p_t);
    CHECK(com.time_symmetric);
    CHECK_THAT(com.transmitted, WithinRel(ref.tau_T, 0.02));
    CHECK_THAT(com.scattered, WithinRel(ref.tau_S, 0.02));
}

TEST_CASE("weak probe scales out of the transmitted time") {
    const auto p = make_gaussian_pulse(1.0);
    const auto f = forward(p, medium(1.0));
    const auto b = integrate_backward(f, transmitted_probability(f));
    const auto t1 = weak_trace(f, b, WeakProbeConfig(1.0));
    const auto t2 = weak_trace(f, b, WeakProbeConfig(0.01));
    CHECK_THAT(t2.phi.abs().maxCoeff(), WithinRel(0.01 * t1.phi.abs().maxCoeff(), 1e-12));
    CHECK_THAT(tau_T_td(t2), WithinRel(tau_T_td(t1), 1e-12));
}

TEST_CASE("narrow-ish resonant pulse at low depth has a negative transmitted time") {
    const auto r = analyze(make_gaussian_pulse(3.0), medium(0.1));
    CHECK(r.tau_T < 0.0);
    CHECK_THAT(r.tau_T, WithinRel(spectral::tau_T(make_gaussian_pulse(3.0), medium(0.1)), 0.02));
}

TEST_CASE("time-domain reports are gamma invariant") {
    // Same dimensionless problem: sigma, length and 1/gamma all halved.
    const auto a = analyze(make_gaussian_pulse(0.5), make_uniform_medium(2.0, 0.5, AtomParams(2.0)));
    const auto b = analyze(make_gaussian_pulse(1.0), medium(2.0, 1.0));
    CHECK_THAT(a.p_t, WithinRel(b.p_t, 1e-10));
    CHECK_THAT(2.0 * a.tau_T, WithinRel(b.tau_T, 1e-10));
    CHECK_THAT(2.0 * a.tau_0, WithinRel(b.tau_0, 1e-10));
}

TEST_CASE("tabulated coupling profile") {
    // Half-sine profile; both engines only see the integrated depth for transmission.
    Eigen::ArrayXd z = Eigen::ArrayXd::LinSpaced(101, 0.0, 1.0);
    Eigen::ArrayXd g = (z * 3.141592653589793).sin() * 1.2;
    const auto m = make_tabulated_medium(z, g);
    const auto p = make_gaussian_pulse(1.0);
    const DelayReport td = analyze(p, m);
    const DelayReport sp = spectral::analyze(p, m);
    CHECK_THAT(td.p_t, WithinRel(sp.p_t, 0.01));
    CHECK_THAT(td.tau_T, WithinRel(sp.tau_T, 0.02));
}

TEST_CASE("integration limits") {
    GridOptions o;
    o.max_steps = 10;
    CHECK_THROWS_AS(analyze(make_gaussian_pulse(1.0), medium(1.0), o), NonConvergence);
}

TEST_CASE("brute-force oracle") {
    const auto p = make_gaussian_pulse(1.0);
    GridOptions o;
    o.min_medium_cells = 50;
    o.samples_per_sigma = 10.0;
    const auto f = forward(p, medium(0.3), o);
    OracleOptions tiny;
    tiny.max_node_steps = 1e3;
    CHECK_THROWS_AS(tau_S_oracle(f, tiny), OracleBudget);
    CHECK(oracle_cost(f) > 1e3);

    GridOptions few = o;
    few.min_medium_cells = 20;
    CHECK_THROWS_AS(tau_S_oracle(forward(p, medium(0.3), few)), InvalidParameter);

    // Thin medium: close to the single-atom value, between 1/gamma and 2/gamma.
    const double ts = tau_S_oracle(f);
    const double ref = spectral::tau_S(p, medium(0.3));
    CHECK(ts > 1.0);
    CHECK(ts < 2.0);
    CHECK_THAT(ts, WithinRel(ref, 0.05));
}
