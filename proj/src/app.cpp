#include "dwell/app.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dwell/csv.hpp"
#include "dwell/figures.hpp"
#include "dwell/parallel.hpp"
#include "dwell/spectral.hpp"
#include "dwell/timedomain.hpp"

namespace dwell::cli {

namespace {

// Writes through a stream bound to a file, or stdout for "-".
template <class F>
void with_output(const std::string& path, F&& body) {
    if (path == "-") {
        body(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file '" + path + "'");
    body(f);
    if (!f) throw ConfigError("failed writing '" + path + "'");
}

void check_engine(const Scenario& s) {
    if (s.engine != Engine::spectral && !s.pulse.get_if<GaussianPulse>())
        throw UnsupportedVariant("the timedomain engine needs a Gaussian pulse (got " + s.pulse.describe() + ")");
}

DelayReport run_timedomain(const Scenario& s) {
    if (s.trace_output.empty() && s.history_output.empty()) return timedomain::analyze(s.pulse, s.medium, s.grid);

    using namespace timedomain;
    const double G = s.medium.gamma();
    const GridSpec grid = make_grid(s.pulse, s.medium, s.grid);
    const FieldHistory fwd = integrate_forward(s.pulse, s.medium, grid);
    DelayReport r;
    r.method = Method::timedomain;
    r.p_t = transmitted_probability(fwd);
    r.p_s = 1.0 - r.p_t;
    r.tau_0 = tau_avg_td(fwd);
    const FieldHistory bwd = integrate_backward(fwd, r.p_t);
    const WeakTrace trace = weak_trace(fwd, bwd, WeakProbeConfig(s.epsilon));
    r.tau_T = tau_T_td(trace);
    r.tau_S = r.p_s > 0.0 ? 1.0 / G - r.p_t / r.p_s * r.tau_T : std::nan("");
    r.od_eff = effective_od(r.p_t);

    if (!s.trace_output.empty()) {
        with_output(s.trace_output, [&](std::ostream& out) {
            CsvWriter w(out);
            w.comment("time-domain weak-probe trace; phi = cross-phase, norm = no-jump norm, scattered = cumulative "
                      "scattering probability");
            w.comment("times in the scenario's units");
            w.row(std::vector<std::string>{"t", "phi", "norm", "scattered"});
            for (Eigen::Index n = 0; n < trace.t.size(); ++n)
                w.row(std::vector<double>{trace.t[n], trace.phi[n], fwd.norm[n], fwd.scattered[n]});
        });
    }
    if (!s.history_output.empty()) {
        with_output(s.history_output, [&](std::ostream& out) {
            CsvWriter w(out);
            w.comment("forward field history on the medium nodes, every " + std::to_string(s.history_stride) +
                      " steps; t and z in the scenario's units");
            w.row(std::vector<std::string>{"step", "t", "z", "alpha_re", "alpha_im", "beta_re", "beta_im"});
            for (std::size_t n = 0; n < fwd.steps(); n += s.history_stride)
                for (std::size_t j = 0; j < fwd.nodes(); ++j) {
                    const Complex a = fwd.alpha(Eigen::Index(j), Eigen::Index(n));
                    const Complex b = fwd.beta(Eigen::Index(j), Eigen::Index(n));
                    w.row(std::vector<double>{double(n), fwd.t[Eigen::Index(n)] / G, fwd.z[Eigen::Index(j)] / G,
                                              a.real(), a.imag(), b.real(), b.imag()});
                }
        });
    }
    return r;
}

}  // namespace

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return config_error;
    if (dynamic_cast<const InvalidParameter*>(&e) || dynamic_cast<const DomainError*>(&e) ||
        dynamic_cast<const UnsupportedVariant*>(&e) || dynamic_cast<const UndefinedConditional*>(&e))
        return precondition_error;
    return numeric_error;
}

std::vector<DelayReport> run_scenario(const Scenario& s) {
    check_engine(s);
    std::vector<DelayReport> out;
    if (s.engine != Engine::timedomain) out.push_back(spectral::analyze(s.pulse, s.medium, s.quadrature));
    if (s.engine != Engine::spectral) out.push_back(run_timedomain(s));
    return out;
}

void write_reports(std::ostream& out, const Scenario& s, const std::vector<DelayReport>& reports) {
    CsvWriter w(out);
    w.comment("pulse: " + s.pulse.describe());
    w.comment("medium: " + s.medium.describe());
    w.comment(std::string("engine: ") + to_string(s.engine));
    w.row(report_header());
    for (const auto& r : reports) w.row(report_cells(r));
}

MediumProfile with_od0(const MediumProfile& m, double od0) {
    if (m.uniform()) return make_uniform_medium(od0, m.length(), m.atom());
    const double cur = m.od0();
    if (!(cur > 0.0)) throw InvalidParameter("cannot rescale a tabulated profile with zero optical depth");
    if (!(od0 >= 0.0)) throw InvalidParameter("od0 must be >= 0");
    const auto& t = std::get<TabulatedCoupling>(m.coupling());
    return make_tabulated_medium(t.z, t.g * std::sqrt(od0 / cur), m.atom());
}

std::vector<double> sweep_values(const SweepSpec& sw) {
    std::vector<double> v(sw.count);
    for (std::size_t i = 0; i < sw.count; ++i) {
        const double f = double(i) / double(sw.count - 1);
        v[i] = sw.log_spacing ? sw.from * std::pow(sw.to / sw.from, f) : sw.from + (sw.to - sw.from) * f;
    }
    v.back() = sw.to;
    return v;
}

Scenario sweep_point(const SweepSpec& sw, double value) {
    Scenario s = sw.base;
    switch (sw.axis) {
        case Axis::od0:
            s.medium = with_od0(s.medium, value);
            break;
        case Axis::od_eff: {
            const double od0 =
                spectral::od0_for_od_eff(s.pulse, value, s.medium.length(), s.medium.atom(), s.quadrature);
            s.medium = with_od0(s.medium, od0);
            break;
        }
        case Axis::detuning:
            if (auto g = s.pulse.get_if<GaussianPulse>()) s.pulse = make_gaussian_pulse(g->sigma, value);
            else if (s.pulse.is_narrowband()) s.pulse = make_narrowband_pulse(value);
            else throw UnsupportedVariant("a detuning sweep needs a Gaussian or narrow-band pulse");
            break;
        case Axis::sigma:
            if (s.pulse.is_narrowband() || s.pulse.get_if<TabulatedPulse>())
                throw UnsupportedVariant("a sigma sweep needs a Gaussian pulse");
            s.pulse = make_gaussian_pulse(value, s.pulse.detuning());
            break;
    }
    return s;
}

void run_sweep(std::ostream& out, const SweepSpec& sw) {
    const auto values = sweep_values(sw);
    std::vector<std::pair<double, std::vector<DelayReport>>> results(values.size());
    parallel_for(values.size(), [&](std::size_t i) {
        const Scenario s = sweep_point(sw, values[i]);
        results[i] = {s.medium.od0(), run_scenario(s)};
    });
    CsvWriter w(out);
    w.comment(std::string("sweep over ") + to_string(sw.axis) + ", " + std::to_string(sw.count) + " points, " +
              (sw.log_spacing ? "log" : "linear") + " spacing");
    w.comment("pulse template: " + sw.base.pulse.describe());
    w.comment("medium template: " + sw.base.medium.describe());
    w.comment(std::string("engine: ") + to_string(sw.base.engine));
    std::vector<std::string> header = {"index", std::string("sweep_") + to_string(sw.axis), "od0"};
    for (auto& h : report_header()) header.push_back(h);
    w.row(header);
    for (std::size_t i = 0; i < values.size(); ++i)
        for (const auto& r : results[i].second) {
            std::vector<std::string> cells = {std::to_string(i), format_number(values[i]),
                                              format_number(results[i].first)};
            for (auto& c : report_cells(r)) cells.push_back(c);
            w.row(cells);
        }
}

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        body();
        return ok;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace

int run_command(const std::string& path, std::ostream& err) {
    return guarded(err, [&] {
        const Scenario s = load_scenario(path);
        const auto reports = run_scenario(s);
        with_output(s.output, [&](std::ostream& out) { write_reports(out, s, reports); });
    });
}

int sweep_command(const std::string& path, std::ostream& err) {
    return guarded(err, [&] {
        const SweepSpec sw = load_sweep(path);
        // Compute before opening the file so a failed sweep leaves no partial output.
        std::ostringstream buf;
        run_sweep(buf, sw);
        with_output(sw.base.output, [&](std::ostream& out) { out << buf.str(); });
    });
}

int figure_command(const std::string& name, const std::string& out_path, std::ostream& err) {
    return guarded(err, [&] {
        const Dataset d = make_figure(name);
        with_output(out_path, [&](std::ostream& out) { write_dataset(out, d); });
    });
}

}  // namespace dwell::cli
