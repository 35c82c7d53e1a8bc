#include "dwell/figures.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>

#include "dwell/csv.hpp"
#include "dwell/kernels.hpp"
#include "dwell/parallel.hpp"
#include "dwell/spectral.hpp"

namespace dwell::cli {

namespace {

constexpr double inf = narrowband_sigma;

const std::vector<std::string> units = {"units: gamma = c = 1, medium length 1, times in 1/gamma, detuning in gamma"};

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * double(i) / double(n - 1);
    return v;
}

std::vector<double> logspace(double a, double b, std::size_t n) {
    std::vector<double> v = linspace(std::log10(a), std::log10(b), n);
    for (double& x : v) x = std::pow(10.0, x);
    return v;
}

PulseSpec pulse_for(double sigma) {
    return std::isinf(sigma) ? make_narrowband_pulse(0.0) : make_gaussian_pulse(sigma, 0.0);
}

// Rows for every (series, x) pair, computed concurrently and kept in grid order.
std::vector<std::vector<double>> tabulate(const std::vector<double>& series, const std::vector<double>& xs,
                                          const std::function<std::vector<double>(double, double)>& point) {
    std::vector<std::vector<double>> rows(series.size() * xs.size());
    parallel_for(rows.size(), [&](std::size_t i) {
        const double s = series[i / xs.size()], x = xs[i % xs.size()];
        rows[i] = {s, x};
        const auto rest = point(s, x);
        rows[i].insert(rows[i].end(), rest.begin(), rest.end());
    });
    return rows;
}

double od0_for(double sigma, double od_eff) {
    return spectral::od0_for_od_eff(pulse_for(sigma), od_eff);
}

Dataset fig2() {
    Dataset d;
    d.provenance = {"fig2: transmission-conditioned excitation time tau_T against resonant optical depth OD0",
                    "tau_T = transmission-weighted average of the group delay t_g(w) = -OD0 (1 - 4w^2) / (1 + 4w^2)^2",
                    "weight S(w) exp(-OD0 / (1 + 4w^2)), Gaussian spectrum of RMS duration sigma; sigma = inf is the "
                    "narrow-band limit tau_T = t_g(0) = -OD0",
                    "sigma set chosen to span narrow-band to broadband: inf, 3, 1, 0.3, 0.05"};
    d.provenance.insert(d.provenance.end(), units.begin(), units.end());
    d.columns = {"sigma", "od0", "P_T", "tau_T"};
    d.rows = tabulate({inf, 3.0, 1.0, 0.3, 0.05}, linspace(0.0, 20.0, 81), [](double s, double od0) {
        const DelayReport r = spectral::analyze(pulse_for(s), make_uniform_medium(od0, 1.0));
        return std::vector<double>{r.p_t, r.tau_T};
    });
    return d;
}

Dataset fig3a() {
    Dataset d;
    d.provenance = {"fig3a: narrow-band group delay t_g against detuning",
                    "t_g(Delta) = -OD0 (1 - 4 Delta^2) / (1 + 4 Delta^2)^2 (derivative of the transmitted phase)"};
    d.provenance.insert(d.provenance.end(), units.begin(), units.end());
    d.columns = {"od0", "delta", "t_g"};
    d.rows = tabulate({0.5, 1.0, 2.0, 5.0, 10.0}, linspace(-3.0, 3.0, 301),
                      [](double od0, double w) { return std::vector<double>{kernels::group_delay(w, od0)}; });
    return d;
}

Dataset fig3b() {
    Dataset d;
    d.provenance = {"fig3b: narrow-band scattering-conditioned excitation time tau_S against detuning",
                    "tau_S = 1 - [exp(-x) / (1 - exp(-x))] t_g(Delta), x = OD0 / (1 + 4 Delta^2) (sum rule)",
                    "t_S = Wigner delay 2 / (1 + 4 Delta^2) plus the optical-depth-averaged group delay; equals tau_S",
                    "od0 = 1e-6 approximates the single-atom limit"};
    d.provenance.insert(d.provenance.end(), units.begin(), units.end());
    d.columns = {"od0", "delta", "P_S", "tau_S", "t_S"};
    d.rows = tabulate({1e-6, 0.5, 1.0, 2.0, 5.0, 10.0}, linspace(-3.0, 3.0, 301), [](double od0, double w) {
        const double x = od0 * kernels::lorentzian(w);
        return std::vector<double>{-std::expm1(-x), kernels::scattered_time(w, od0), kernels::scattered_delay(w, od0)};
    });
    return d;
}

Dataset fig4() {
    Dataset d;
    d.provenance = {"fig4: tau_T and tau_S against effective optical depth OD_eff = -ln P_T",
                    "OD0 found by bisection on the monotone P_T(OD0) = int S(w) exp(-OD0 / (1 + 4w^2)) dw",
                    "tau_T = transmission-weighted group delay; tau_S = (1 - P_T tau_T) / P_S from the sum rule",
                    "sigma = inf is the narrow-band limit, 1 is intermediate, 0.05 is broadband"};
    d.provenance.insert(d.provenance.end(), units.begin(), units.end());
    d.columns = {"sigma", "od_eff", "od0", "P_T", "tau_T", "tau_S"};
    d.rows = tabulate({inf, 1.0, 0.05}, linspace(0.02, 8.0, 400), [](double s, double e) {
        const double od0 = od0_for(s, e);
        const DelayReport r = spectral::analyze(pulse_for(s), make_uniform_medium(od0, 1.0));
        return std::vector<double>{od0, r.p_t, r.tau_T, r.tau_S};
    });
    return d;
}

const std::vector<double>& broadband_grid() {
    static const std::vector<double> g = logspace(1e-3, 10.0, 101);
    return g;
}

Dataset figF1() {
    Dataset d;
    d.provenance = {"figF1: broadband pulse (sigma = 0.05), exact P_T and tau_S with their approximate forms",
                    "P_T_low = 1 - sqrt(pi/2) sigma OD0; P_T_high = exp(-sigma sqrt(2 OD0))",
                    "tau_S_low = 1 - sqrt(2/pi) OD_eff / (4 sigma); tau_S_high = 1 - OD_eff / (2 (exp(OD_eff) - 1))",
                    "exact values by adaptive trapezoid quadrature over the Gaussian spectrum"};
    d.provenance.insert(d.provenance.end(), units.begin(), units.end());
    d.columns = {"sigma", "od_eff", "od0", "P_T", "P_T_low", "P_T_high", "tau_S", "tau_S_low", "tau_S_high"};
    d.rows = tabulate({0.05}, broadband_grid(), [](double s, double e) {
        const double od0 = od0_for(s, e);
        const auto pulse = pulse_for(s);
        const auto medium = make_uniform_medium(od0, 1.0);
        const DelayReport r = spectral::analyze(pulse, medium);
        const auto a = spectral::asymptotics(pulse, medium);
        return std::vector<double>{od0, r.p_t, a.p_t_low_od, a.p_t_high_od, r.tau_S, a.tau_S_low_od, a.tau_S_high_od};
    });
    return d;
}

Dataset figG1() {
    Dataset d;
    d.provenance = {"figG1: broadband pulse (sigma = 0.05), exact tau_T with its approximate forms",
                    "tau_T_low = sqrt(pi/2) (sigma / 4) OD0^2; tau_T_high = OD_eff / 2",
                    "exact values: transmission-weighted group delay by adaptive trapezoid quadrature"};
    d.provenance.insert(d.provenance.end(), units.begin(), units.end());
    d.columns = {"sigma", "od_eff", "od0", "tau_T", "tau_T_low", "tau_T_high"};
    d.rows = tabulate({0.05}, broadband_grid(), [](double s, double e) {
        const double od0 = od0_for(s, e);
        const auto pulse = pulse_for(s);
        const auto medium = make_uniform_medium(od0, 1.0);
        const DelayReport r = spectral::analyze(pulse, medium);
        const auto a = spectral::asymptotics(pulse, medium);
        return std::vector<double>{od0, r.tau_T, a.tau_T_low_od, a.tau_T_high_od};
    });
    return d;
}

}  // namespace

const std::vector<std::string>& figure_names() {
    static const std::vector<std::string> n = {"fig2", "fig3a", "fig3b", "fig4", "figF1", "figG1"};
    return n;
}

Dataset make_figure(const std::string& name) {
    if (name == "fig2") return fig2();
    if (name == "fig3a") return fig3a();
    if (name == "fig3b") return fig3b();
    if (name == "fig4") return fig4();
    if (name == "figF1") return figF1();
    if (name == "figG1") return figG1();
    throw InvalidParameter("unknown figure '" + name + "' (expected fig2, fig3a, fig3b, fig4, figF1 or figG1)");
}

void write_dataset(std::ostream& out, const Dataset& d) {
    CsvWriter w(out);
    for (const auto& line : d.provenance) w.comment(line);
    w.row(d.columns);
    for (const auto& r : d.rows) w.row(r);
}

}  // namespace dwell::cli
