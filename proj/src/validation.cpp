#include "dwell/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "dwell/app.hpp"
#include "dwell/cavity.hpp"
#include "dwell/csv.hpp"
#include "dwell/figures.hpp"
#include "dwell/kernels.hpp"
#include "dwell/parallel.hpp"
#include "dwell/spectral.hpp"
#include "dwell/timedomain.hpp"

namespace dwell::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double v) { return format_number(v); }

CheckStatus status(bool ok) { return ok ? CheckStatus::pass : CheckStatus::fail; }

// measured < limit (NaN fails)
CheckResult below(std::string name, double measured, double limit) {
    return {std::move(name), measured, "< " + num(limit), status(measured < limit)};
}

CheckResult at_most(std::string name, double measured, double limit) {
    return {std::move(name), measured, "<= " + num(limit), status(measured <= limit)};
}

CheckResult at_least(std::string name, double measured, double limit) {
    return {std::move(name), measured, ">= " + num(limit), status(measured >= limit)};
}

CheckResult within(std::string name, double measured, double lo, double hi) {
    return {std::move(name), measured, "in [" + num(lo) + ", " + num(hi) + "]",
            status(measured >= lo && measured <= hi)};
}

double rel(double a, double ref) { return std::abs(a - ref) / std::abs(ref); }

QuadratureOptions quadrature(const ValidationOptions& o) {
    QuadratureOptions q;
    if (o.frequency_intervals) {
        q.initial_intervals = *o.frequency_intervals;
        q.refine = false;
    }
    return q;
}

struct Case {
    PulseSpec pulse;
    MediumProfile medium;
};

// Fixed-seed sweep: sigma*gamma log-uniform in [0.02, 100] or narrow-band,
// detuning in [-3, 3] gamma, OD0 in (0, 20], gamma in [0.5, 2].
const std::vector<Case>& random_cases() {
    static const std::vector<Case> cases = [] {
        std::mt19937_64 rng(20231107);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::vector<Case> v;
        for (int i = 0; i < 200; ++i) {
            const double gamma = 0.5 + 1.5 * u(rng);
            const double s = 0.02 * std::pow(5000.0, u(rng));
            const bool nb = u(rng) < 0.15;
            const double det = (-3.0 + 6.0 * u(rng)) * gamma;
            const double od0 = 20.0 * (1.0 - u(rng));
            v.push_back({nb ? make_narrowband_pulse(det) : make_gaussian_pulse(s / gamma, det),
                         make_uniform_medium(od0, 1.0, AtomParams(gamma))});
        }
        return v;
    }();
    return cases;
}

template <class T, class F>
std::vector<T> map_cases(const std::vector<Case>& cases, F&& f) {
    std::vector<T> out(cases.size());
    parallel_for(cases.size(), [&](std::size_t i) { out[i] = f(cases[i]); });
    return out;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::isnan(x) || std::isnan(m) ? std::nan("") : std::max(m, x);
    return m;
}

std::vector<CheckResult> c1(const ValidationOptions& o) {
    const auto t0 = Clock::now();
    const auto q = quadrature(o);
    const auto err = map_cases<double>(random_cases(), [&](const Case& c) {
        const DelayReport r = spectral::analyze(c.pulse, c.medium, q);
        return std::abs(r.tau_0 * c.medium.gamma() - r.p_s);
    });
    const double dt = seconds_since(t0);
    return {below("c1.average_time_identity.max_abs", max_of(err), 1e-9), below("c1.runtime_s", dt, 10.0)};
}

std::vector<CheckResult> c2(const ValidationOptions& o) {
    const auto t0 = Clock::now();
    const auto q = quadrature(o);
    const auto err = map_cases<double>(random_cases(), [&](const Case& c) {
        const DelayReport r = spectral::analyze(c.pulse, c.medium, q);
        const double G = c.medium.gamma();
        return std::abs(r.p_s * r.tau_S + r.p_t * r.tau_T - r.p_s / G) / (r.p_s / G);
    });
    const double dt = seconds_since(t0);
    return {below("c2.sum_rule.max_rel", max_of(err), 1e-9), below("c2.runtime_s", dt, 10.0)};
}

std::vector<CheckResult> c3(const ValidationOptions& o) {
    double nb = 0.0;
    for (double od0 : {1e-3, 0.1, 1.0, 5.0, 20.0})
        for (double G : {0.5, 1.0, 3.0}) {
            const DelayReport r =
                spectral::analyze(make_narrowband_pulse(0.0), make_uniform_medium(od0, 1.0, AtomParams(G)));
            nb = std::max(nb, rel(r.tau_T, -od0 / G));
        }
    const auto q = quadrature(o);
    std::vector<Case> gaussian;
    for (const auto& c : random_cases())
        if (!c.pulse.is_narrowband()) gaussian.push_back(c);
    const auto err = map_cases<double>(gaussian, [&](const Case& c) {
        const auto m = spectral::moments(c.pulse, c.medium, q);
        const double a = m.tau_T_weighted / m.transmitted, b = m.tau_T_resolvent / m.transmitted;
        return std::abs(a - b) / std::max(1.0, std::abs(a));
    });
    return {below("c3.narrowband_tau_T_vs_minus_od0.max_rel", nb, 1e-12),
            below("c3.group_delay_vs_resolvent_form.max", max_of(err), 1e-10)};
}

std::vector<CheckResult> c4(const ValidationOptions& o) {
    const auto q = quadrature(o);
    const auto err = map_cases<double>(random_cases(), [&](const Case& c) {
        const DelayReport r = spectral::analyze(c.pulse, c.medium, q);
        const double sd = c.pulse.is_narrowband() ? *r.t_S : spectral::scattered_delay(c.pulse, c.medium, q);
        return rel(sd, r.tau_S);
    });
    return {below("c4.scattered_delay_vs_tau_S.max_rel", max_of(err), 1e-9)};
}

double nb_tau_S(double od0) {
    return spectral::analyze(make_narrowband_pulse(0.0), make_uniform_medium(od0, 1.0)).tau_S;
}

std::vector<CheckResult> c5(const ValidationOptions&) {
    return {below("c5.wigner_delay_at_resonance.abs_err", std::abs(spectral::wigner_delay(0.0) - 2.0), 1e-12),
            below("c5.tau_S_od0_1e-4.abs_err", std::abs(nb_tau_S(1e-4) - 2.0), 1e-3),
            below("c5.tau_S_od0_30.abs_err", std::abs(nb_tau_S(30.0) - 1.0), 1e-3),
            below("c5.tau_S_od0_ln2.abs_err", std::abs(nb_tau_S(std::numbers::ln2) - (1.0 + std::numbers::ln2)),
                  1e-9)};
}

// Time-domain cross-validation cases shared by criteria 6 and 11.
struct TdCase {
    double od0;
    DelayReport spectral, coarse, halved, fine;  // fine: default grid
    double bookkeeping = 0.0;                    // max |norm + scattered - 1| over steps
    double runtime = 0.0;
};

DelayReport td_report(const timedomain::FieldHistory& fwd, double G) {
    using namespace timedomain;
    DelayReport r;
    r.method = Method::timedomain;
    r.p_t = transmitted_probability(fwd);
    r.p_s = 1.0 - r.p_t;
    r.tau_0 = tau_avg_td(fwd);
    r.tau_T = tau_T_td(weak_trace(fwd, integrate_backward(fwd, r.p_t)));
    r.tau_S = 1.0 / G - r.p_t / r.p_s * r.tau_T;
    return r;
}

double bookkeeping(const timedomain::FieldHistory& fwd) {
    return (fwd.norm + fwd.scattered - 1.0).abs().maxCoeff();
}

const std::vector<TdCase>& td_cases() {
    static const std::vector<TdCase> cases = [] {
        std::vector<TdCase> v;
        for (double od0 : {0.5, 2.0, 5.0}) v.push_back({od0, {}, {}, {}, {}});
        parallel_for(v.size(), [&](std::size_t i) {
            using namespace timedomain;
            const auto t0 = Clock::now();
            TdCase& c = v[i];
            const auto pulse = make_gaussian_pulse(1.0);
            const auto medium = make_uniform_medium(c.od0, 1.0);
            c.spectral = spectral::analyze(pulse, medium);
            GridOptions g;
            const auto fwd = integrate_forward(pulse, medium, make_grid(pulse, medium, g));
            c.fine = td_report(fwd, 1.0);
            c.bookkeeping = bookkeeping(fwd);
            // Tight tails so the O(h^2) error dominates the halving test.
            g.truncation = 1e-12;
            g.tail_tolerance = 1e-13;
            for (double refine : {1.0, 2.0}) {
                g.refine = refine;
                const auto f = integrate_forward(pulse, medium, make_grid(pulse, medium, g));
                (refine == 1.0 ? c.coarse : c.halved) = td_report(f, 1.0);
                c.bookkeeping = std::max(c.bookkeeping, bookkeeping(f));
            }
            c.runtime = seconds_since(t0);
        });
        return v;
    }();
    return cases;
}

std::vector<CheckResult> c6(const ValidationOptions&) {
    std::vector<CheckResult> out;
    for (const auto& c : td_cases()) {
        const std::string p = "c6.od0_" + num(c.od0) + ".";
        out.push_back(below(p + "P_T.rel_err", rel(c.fine.p_t, c.spectral.p_t), 0.01));
        out.push_back(below(p + "tau_T.rel_err", rel(c.fine.tau_T, c.spectral.tau_T), 0.02));
        out.push_back(below(p + "tau_0.rel_err", rel(c.fine.tau_0, c.spectral.tau_0), 0.01));
        auto ratio = [&](double coarse, double halved, double ref) {
            return std::abs(coarse - ref) / std::abs(halved - ref);
        };
        out.push_back(within(p + "P_T.halving_ratio", ratio(c.coarse.p_t, c.halved.p_t, c.spectral.p_t), 3.0, 5.0));
        out.push_back(
            within(p + "tau_T.halving_ratio", ratio(c.coarse.tau_T, c.halved.tau_T, c.spectral.tau_T), 3.0, 5.0));
        out.push_back(
            within(p + "tau_0.halving_ratio", ratio(c.coarse.tau_0, c.halved.tau_0, c.spectral.tau_0), 3.0, 5.0));
        out.push_back(below(p + "runtime_s", c.runtime, 120.0));
    }
    return out;
}

std::vector<CheckResult> c7(const ValidationOptions& o) {
    if (!o.full) return {{"c7.oracle_vs_sum_rule.rel_err", std::nan(""), "< 0.05 (full profile only)", CheckStatus::skip}};
    using namespace timedomain;
    const auto t0 = Clock::now();
    const auto pulse = make_gaussian_pulse(1.0);
    const auto medium = make_uniform_medium(1.0, 1.0);
    GridOptions g;
    g.min_medium_cells = 50;
    g.samples_per_sigma = 50.0;
    const auto fwd = integrate_forward(pulse, medium, make_grid(pulse, medium, g));
    const double oracle = tau_S_oracle(fwd);
    const double dt = seconds_since(t0);
    const double ref = spectral::analyze(pulse, medium).tau_S;
    return {below("c7.oracle_vs_sum_rule.rel_err", rel(oracle, ref), 0.05), below("c7.runtime_s", dt, 600.0)};
}

std::vector<CheckResult> c8(const ValidationOptions&) {
    const Dataset d = make_figure("fig4");
    // columns: sigma, od_eff, od0, P_T, tau_T, tau_S
    auto series = [&](double sigma) {
        std::vector<std::vector<double>> rows;
        for (const auto& r : d.rows)
            if (r[0] == sigma) rows.push_back(r);
        return rows;
    };
    const auto mid = series(1.0);
    double crossing = std::nan("");
    for (std::size_t i = 0; i + 1 < mid.size(); ++i)
        if (mid[i][4] < 0.0 && mid[i + 1][4] >= 0.0) {
            const double f = mid[i][4] / (mid[i][4] - mid[i + 1][4]);
            crossing = mid[i][1] + f * (mid[i + 1][1] - mid[i][1]);
            break;
        }
    const auto broad = series(0.05);
    auto nearest = [&](double x) {
        return *std::min_element(broad.begin(), broad.end(), [&](const auto& a, const auto& b) {
            return std::abs(a[1] - x) < std::abs(b[1] - x);
        });
    };
    const auto a = nearest(4.9), b = nearest(5.1);
    const double slope = (b[4] - a[4]) / (b[1] - a[1]);
    double dip = broad.front()[5];
    for (const auto& r : broad) dip = std::min(dip, r[5]);
    return {within("c8.tau_T_zero_crossing_sigma_1.od_eff", crossing, 1.7, 2.3),
            within("c8.tau_T_slope_sigma_0.05_at_od_eff_5", slope, 0.45, 0.55),
            within("c8.tau_S_dip_sigma_0.05.min", dip, 0.4, 0.6),
            at_least("c8.tau_S_sigma_0.05_at_od_eff_8", broad.back()[5], 0.99)};
}

std::vector<CheckResult> c9(const ValidationOptions& o) {
    const auto q = quadrature(o);
    const auto pulse = make_gaussian_pulse(0.05);
    auto at = [&](double od0) {
        const auto medium = make_uniform_medium(od0, 1.0);
        return std::pair{spectral::analyze(pulse, medium, q), spectral::asymptotics(pulse, medium, q)};
    };
    auto at_eff = [&](double e) { return at(spectral::od0_for_od_eff(pulse, e, 1.0, AtomParams{}, q)); };
    double f5 = 0.0, f6 = 0.0, g8 = 0.0, g4 = 0.0;
    for (double e : {0.001, 0.005, 0.01, 0.02, 0.03, 0.04, 0.049}) {
        const auto [r, a] = at_eff(e);
        f5 = std::max(f5, rel(a.tau_S_low_od, r.tau_S));
    }
    for (double e : {3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) {
        const auto [r, a] = at_eff(e);
        f6 = std::max(f6, rel(a.tau_S_high_od, r.tau_S));
        g8 = std::max(g8, rel(a.tau_T_high_od, r.tau_T));
    }
    for (double od0 : {0.01, 0.02, 0.05, 0.09}) {
        const auto [r, a] = at(od0);
        g4 = std::max(g4, rel(a.tau_T_low_od, r.tau_T));
    }
    return {below("c9.low_od_tau_S_approx.max_rel", f5, 0.1), below("c9.high_od_tau_S_approx.max_rel", f6, 0.1),
            below("c9.high_od_tau_T_approx.max_rel", g8, 0.1), below("c9.low_od_tau_T_approx.max_rel", g4, 0.1)};
}

std::vector<CheckResult> c10(const ValidationOptions& o) {
    using namespace cavity;
    const auto q = quadrature(o);
    const auto nb = make_narrowband_pulse(0.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double closed = 0.0, direct = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double g1 = 1e-3 * std::pow(1e5, u(rng));
        const double g2 = g1 * (1.01 + std::pow(1e3, u(rng)));
        const CavityParams p(g1, g2);
        const double ref = 4.0 * g1 / ((g1 - g2) * (g1 + g2));
        closed = std::max(closed, rel(tau_B_closed(p), ref));
        direct = std::max(direct, rel(tau_B_direct(p, nb), ref));
    }
    double small = 0.0, eta_max = 0.0;
    for (double g1 : {1e-4, 1e-3, 5e-3, 0.012}) {
        const CavityParams p(g1, 1.0);
        const double eta = optical_depth(p);
        eta_max = std::max(eta_max, eta);
        small = std::max(small, rel(tau_B_direct(p, nb), -eta / p.gamma2));
    }
    // Path series from the mirrors of (0.01, 1).
    const CavityParams pc(0.01, 1.0);
    const MirrorParams m = mirror_map(pc);
    const double qrt = m.r1 * m.r2;
    const auto n_conv = std::size_t(std::ceil(60.0 / (1.0 - qrt)));
    const auto sum = feynman_tau_B(m, n_conv);
    const auto n_gap = std::size_t(std::ceil(20.0 / (1.0 - qrt)));
    const double gap0 = sum.closed_form - feynman_tau_B(m, n_gap).series_value;
    const double gap1 = sum.closed_form - feynman_tau_B(m, n_gap + 1).series_value;

    double dwell = 0.0;
    const auto g = make_gaussian_pulse(1.0, 0.2);
    for (const auto& pulse : {nb, g})
        for (auto [g1, g2] : {std::pair{0.3, 1.0}, std::pair{2.0, 0.5}}) {
            const CavityParams p(g1, g2);
            const double ref = transmission_probability(p, pulse, q) / g2;
            dwell = std::max(dwell, rel(dwell_avg(p, pulse, q), ref));
        }
    const CavityParams p13(1.0, 3.0);
    const double tb = tau_B_direct(p13, nb);
    const double da = dwell_avg(p13, nb);
    return {below("c10.direct_ratio_vs_closed_form.max_rel", closed, 1e-12),
            below("c10.direct_ratio_quadrature_vs_closed_form.max_rel", direct, 1e-12),
            below("c10.tau_B_1_3.abs_err", std::abs(tb + 0.5), 1e-12),
            at_most("c10.small_eta.max_eta", eta_max, 0.05),
            below("c10.tau_B_vs_minus_eta_over_gamma2.max_rel", small, 0.02),
            below("c10.path_series_vs_closed_form.rel", rel(sum.series_value, sum.closed_form), 1e-9),
            below("c10.path_series_gap_ratio_vs_r1r2.rel", rel(gap1 / gap0, qrt), 0.01),
            below("c10.path_series_vs_rate_closed_form.rel", rel(sum.closed_form, tau_B_closed(pc)), 0.02),
            below("c10.dwell_avg_vs_P_tr_over_gamma2.max_rel", dwell, 1e-10),
            below("c10.sign.tau_B", tb, 0.0),
            {"c10.sign.dwell_avg", da, "> 0", status(da > 0.0)}};
}

std::vector<CheckResult> c11(const ValidationOptions&) {
    std::vector<CheckResult> out;
    for (const auto& c : td_cases())
        out.push_back(below("c11.od0_" + num(c.od0) + ".norm_plus_scattered.max_dev", c.bookkeeping, 1e-4));
    return out;
}

}  // namespace

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::skip: return "skip";
    }
    return "?";
}

std::vector<CheckResult> criterion(int n, const ValidationOptions& o) {
    switch (n) {
        case 1: return c1(o);
        case 2: return c2(o);
        case 3: return c3(o);
        case 4: return c4(o);
        case 5: return c5(o);
        case 6: return c6(o);
        case 7: return c7(o);
        case 8: return c8(o);
        case 9: return c9(o);
        case 10: return c10(o);
        case 11: return c11(o);
    }
    throw InvalidParameter("criterion number must be 1.." + std::to_string(criterion_count));
}

std::vector<CheckResult> invariants(const ValidationOptions& o) {
    std::vector<CheckResult> out;
    const auto q = quadrature(o);

    // Quadrature convergence against a tightly refined reference.
    {
        const auto pulse = make_gaussian_pulse(0.05, 0.3);
        const auto medium = make_uniform_medium(5.0, 1.0);
        QuadratureOptions tight;
        tight.rel_tol = 1e-13;
        const auto ref = spectral::moments(pulse, medium, tight);
        const auto got = spectral::moments(pulse, medium, q);
        const double e = std::max({rel(got.transmitted, ref.transmitted), rel(got.tau_T_weighted, ref.tau_T_weighted),
                                   rel(got.scattered_delay, ref.scattered_delay)});
        out.push_back(below("inv.spectral_quadrature_converged.max_rel", e, 1e-8));
    }
    // Field-based overlap against the closed-form spectral integral.
    {
        const auto pulse = make_gaussian_pulse(1.0);
        const auto medium = make_uniform_medium(2.0, 1.0);
        const auto grid = spectral::make_grid(pulse, 1.0, 4096);
        const auto fwd = spectral::forward_fields(pulse, medium, grid, 129);
        const double p_t = spectral::transmission_probability(pulse, medium).p_t;
        const double overlap = spectral::tau_T_overlap(spectral::backward_fields(fwd, p_t));
        out.push_back(below("inv.spectral_field_overlap_vs_formula.rel", rel(overlap, spectral::tau_T(pulse, medium)),
                            1e-3));
    }
    // Backward/forward overlap conservation and centre-of-mass delays.
    {
        using namespace timedomain;
        const auto pulse = make_gaussian_pulse(1.0);
        const auto medium = make_uniform_medium(2.0, 1.0);
        const auto fwd = integrate_forward(pulse, medium, make_grid(pulse, medium));
        const double p_t = transmitted_probability(fwd);
        const auto bwd = integrate_backward(fwd, p_t);
        const double drift = (bwd.overlap - bwd.overlap[0]).abs().maxCoeff() / std::abs(bwd.overlap[0]);
        out.push_back(below("inv.timedomain_overlap_conservation.max_rel", drift, 1e-6));
        const auto com = com_delays(fwd, p_t);
        const DelayReport r = spectral::analyze(pulse, medium);
        out.push_back(below("inv.com_transmitted_vs_tau_T.rel", rel(com.transmitted, r.tau_T), 1e-3));
        out.push_back(below("inv.com_scattered_vs_tau_S.rel", rel(com.scattered, r.tau_S), 1e-3));
    }
    // Bisection round trip for the effective optical depth.
    {
        const auto pulse = make_gaussian_pulse(1.0);
        double e = 0.0;
        for (double target : {0.1, 2.0, 6.0}) {
            const double od0 = spectral::od0_for_od_eff(pulse, target);
            e = std::max(e, std::abs(spectral::analyze(pulse, make_uniform_medium(od0, 1.0)).od_eff - target));
        }
        out.push_back(below("inv.od_eff_bisection_roundtrip.max_abs", e, 1e-8));
    }
    // Cavity probability conservation.
    {
        const cavity::CavityParams p(0.4, 1.3);
        const auto pulse = make_gaussian_pulse(2.0, 0.1);
        const double s =
            cavity::reflection_probability(p, pulse, q) + cavity::transmission_probability(p, pulse, q);
        out.push_back(below("inv.cavity_P_ref_plus_P_tr.abs_err", std::abs(s - 1.0), 1e-9));
    }
    // Deterministic CSV output.
    {
        std::ostringstream a, b;
        write_dataset(a, make_figure("fig3b"));
        write_dataset(b, make_figure("fig3b"));
        out.push_back(below("inv.csv_deterministic.mismatch", a.str() == b.str() ? 0.0 : 1.0, 0.5));
    }
    return out;
}

void write_checks(std::ostream& out, const std::vector<CheckResult>& checks) {
    for (const auto& c : checks)
        out << c.name << ',' << format_number(c.measured) << ',' << c.bound << ',' << to_string(c.status) << '\n';
}

bool all_passed(const std::vector<CheckResult>& checks) {
    return std::none_of(checks.begin(), checks.end(), [](const auto& c) { return c.status == CheckStatus::fail; });
}

int validate_command(const std::string& profile, std::optional<std::size_t> frequency_intervals, std::ostream& out,
                     std::ostream& err) {
    ValidationOptions o;
    if (profile == "full") o.full = true;
    else if (profile != "fast") {
        err << "error: unknown profile '" << profile << "' (expected fast or full)\n";
        return precondition_error;
    }
    o.frequency_intervals = frequency_intervals;
    std::vector<CheckResult> all;
    try {
        for (int n = 1; n <= criterion_count; ++n) {
            auto c = criterion(n, o);
            write_checks(out, c);
            out.flush();
            all.insert(all.end(), c.begin(), c.end());
        }
        auto inv = invariants(o);
        write_checks(out, inv);
        all.insert(all.end(), inv.begin(), inv.end());
    } catch (const std::exception& e) {
        err << "error: validation aborted: " << e.what() << '\n';
        return check_failed;
    }
    bool ok = true;
    for (const auto& c : all)
        if (c.status == CheckStatus::fail) {
            err << "FAILED: " << c.name << " measured " << format_number(c.measured) << ", expected " << c.bound
                << '\n';
            ok = false;
        }
    return ok ? 0 : check_failed;
}

}  // namespace dwell::cli
