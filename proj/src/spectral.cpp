#include "dwell/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dwell/kernels.hpp"

namespace dwell::spectral {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Window {
    double lo, hi;
};

// Integration window in gamma = 1 units.
Window window_for(const PulseSpec& p) {
    if (auto g = p.get_if<GaussianPulse>()) {
        const double w = std::max(20.0, 8.0 / g->sigma);
        return {g->detuning - w, g->detuning + w};
    }
    if (auto t = p.get_if<TabulatedPulse>()) return {t->omega[0], t->omega[t->omega.size() - 1]};
    throw UnsupportedVariant("narrow-band pulse cannot be integrated; use the closed forms");
}

void require_scattering(double p_s, const char* what) {
    if (!(p_s > 0.0)) throw UndefinedConditional(std::string(what) + " is undefined when nothing is scattered (P_S = 0)");
}

}  // namespace

double lorentzian(double omega, double gamma) {
    if (!(gamma > 0.0)) throw InvalidParameter("gamma must be > 0");
    return kernels::lorentzian(omega / gamma);
}

double group_delay(double detuning, double od0, double gamma) {
    if (!(od0 >= 0.0)) throw InvalidParameter("od0 must be >= 0");
    if (!(gamma > 0.0)) throw InvalidParameter("gamma must be > 0");
    return kernels::group_delay(detuning / gamma, od0) / gamma;
}

double wigner_delay(double detuning, double gamma) {
    if (!(gamma > 0.0)) throw InvalidParameter("gamma must be > 0");
    return kernels::wigner_delay(detuning / gamma) / gamma;
}

MediumResponse medium_response(const MediumProfile& medium, double z, double omega) {
    const double w = omega / medium.gamma();
    const double od = medium.od_integral(z) * kernels::lorentzian(w);
    return {od, -w * od};
}

FrequencyGrid make_grid(const PulseSpec& pulse, double gamma, std::size_t intervals) {
    if (intervals < 1024 || intervals % 2 != 0)
        throw InvalidParameter("frequency grid needs an even number of intervals >= 1024");
    const Window win = window_for(pulse.scaled(gamma));
    FrequencyGrid grid;
    grid.center = 0.5 * (win.lo + win.hi) * gamma;
    grid.half_width = 0.5 * (win.hi - win.lo) * gamma;
    grid.omega = Eigen::ArrayXd::LinSpaced(Eigen::Index(intervals + 1), win.lo * gamma, win.hi * gamma);
    return grid;
}

SpectralFields forward_fields(const PulseSpec& pulse, const MediumProfile& medium, const FrequencyGrid& grid,
                              std::size_t z_points) {
    if (pulse.is_narrowband())
        throw UnsupportedVariant("narrow-band pulse has no field solution on a grid; use the closed forms");
    if (z_points < 2) throw InvalidParameter("need at least two z samples");
    const double G = medium.gamma();
    SpectralFields f;
    f.gamma = G;
    f.omega = grid.omega;
    f.z = Eigen::ArrayXd::LinSpaced(Eigen::Index(z_points), 0.0, medium.length());
    f.g = medium.g(f.z);

    const Eigen::ArrayXcd a_in = pulse.amplitude(f.omega);
    const Eigen::ArrayXd lor = kernels::lorentzian(Eigen::ArrayXd(f.omega / G));
    const Eigen::Index nz = f.z.size(), nw = f.omega.size();
    f.od.resize(nz, nw);
    f.alpha_fwd.resize(nz, nw);
    f.beta_fwd.resize(nz, nw);
    const Complex I(0.0, 1.0);
    const Eigen::ArrayXcd coupling = I / (I * f.omega + 0.5 * G);
    for (Eigen::Index j = 0; j < nz; ++j) {
        const double odz = medium.od_integral(f.z[j]);
        const Eigen::ArrayXd od = odz * lor;
        const Eigen::ArrayXd phase = -(f.omega / G) * od;
        // exp(-i phi - OD/2 - i z w)
        const Eigen::ArrayXcd prop = (-I * (phase + f.z[j] * f.omega).cast<Complex>() - 0.5 * od.cast<Complex>()).exp();
        const Eigen::ArrayXcd alpha = a_in * prop;
        f.od.row(j) = od.matrix().transpose();
        f.alpha_fwd.row(j) = alpha.matrix().transpose();
        f.beta_fwd.row(j) = (f.g[j] * coupling * alpha).matrix().transpose();
    }
    return f;
}

SpectralFields backward_fields(SpectralFields f, double p_t) {
    if (!(p_t > 0.0) || p_t > 1.0 + 1e-12) throw InvalidParameter("backward fields need 0 < P_T <= 1");
    const Eigen::Index nz = f.z.size();
    const Complex I(0.0, 1.0);
    const double G = f.gamma;
    const Eigen::ArrayXcd coupling = I / (I * f.omega - 0.5 * G);
    f.p_t = p_t;
    f.alpha_bwd.resize(f.alpha_fwd.rows(), f.alpha_fwd.cols());
    f.beta_bwd.resize(f.alpha_fwd.rows(), f.alpha_fwd.cols());
    const Eigen::ArrayXd od_end = f.od.row(nz - 1).transpose().array();
    for (Eigen::Index j = 0; j < nz; ++j) {
        const Eigen::ArrayXd gain = (f.od.row(j).transpose().array() - od_end).exp() / std::sqrt(p_t);
        const Eigen::ArrayXcd alpha = f.alpha_fwd.row(j).transpose().array() * gain.cast<Complex>();
        f.alpha_bwd.row(j) = alpha.matrix().transpose();
        f.beta_bwd.row(j) = (f.g[j] * coupling * alpha).matrix().transpose();
    }
    return f;
}

double tau_T_overlap(const SpectralFields& f) {
    if (f.beta_bwd.size() == 0) throw InvalidParameter("fields carry no backward half");
    auto trap = [](const Eigen::ArrayXd& x) {
        Eigen::ArrayXd w = Eigen::ArrayXd::Zero(x.size());
        for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
            const double h = x[i + 1] - x[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        return w;
    };
    const Eigen::ArrayXd wz = trap(f.z), ww = trap(f.omega);
    const Eigen::MatrixXcd prod = (f.beta_bwd.array().conjugate() * f.beta_fwd.array()).matrix();
    const Complex total = (wz.matrix().transpose().cast<Complex>() * prod * ww.matrix().cast<Complex>())(0, 0);
    return total.real() / std::sqrt(f.p_t);
}

Moments moments(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt) {
    const PulseSpec p = pulse.scaled(medium.gamma());
    const Window win = window_for(p);
    const double od0 = medium.od0();
    auto integrand = [&](const Eigen::ArrayXd& w) {
        const Eigen::ArrayXd s = p.spectral_density(w);
        const Eigen::ArrayXd l = kernels::lorentzian(w);
        const Eigen::ArrayXd x = od0 * l;
        const Eigen::ArrayXd trans = s * (-x).exp();
        const Eigen::ArrayXd scat = s * (-x).unaryExpr([](double v) { return -std::expm1(v); });
        const Eigen::ArrayXd resolvent =
            w.unaryExpr([od0](double v) { return kernels::group_delay_resolvent(v, od0); });
        const Eigen::ArrayXd deficit = x.unaryExpr([](double v) { return kernels::first_moment_deficit(v); });
        Eigen::ArrayXXd out(w.size(), 6);
        out.col(0) = s;
        out.col(1) = trans;
        out.col(2) = scat;
        out.col(3) = trans * kernels::group_delay(w, od0);
        out.col(4) = trans * resolvent;
        out.col(5) = scat * kernels::wigner_delay(w) - s * (1 - 4 * w.square()) * l * deficit;
        return out;
    };
    const QuadratureResult r = trapezoid(integrand, win.lo, win.hi, opt);
    return {r.value[0], r.value[1], r.value[2], r.value[3], r.value[4], r.value[5], r.intervals};
}

Probabilities transmission_probability(const PulseSpec& pulse, const MediumProfile& medium,
                                       const QuadratureOptions& opt) {
    if (auto nb = pulse.get_if<NarrowBandPulse>()) {
        const double x = medium.od0() * kernels::lorentzian(nb->detuning / medium.gamma());
        return {std::exp(-x), -std::expm1(-x)};
    }
    const Moments m = moments(pulse, medium, opt);
    return {m.transmitted, 1.0 - m.transmitted};
}

double tau_avg(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt) {
    const double G = medium.gamma();
    if (auto nb = pulse.get_if<NarrowBandPulse>()) {
        const double x = medium.od0() * kernels::lorentzian(nb->detuning / G);
        return -std::expm1(-x) / G;
    }
    return moments(pulse, medium, opt).scattered / G;
}

double tau_T(const PulseSpec& pulse, const MediumProfile& medium, TauTForm form, const QuadratureOptions& opt) {
    const double G = medium.gamma();
    if (auto nb = pulse.get_if<NarrowBandPulse>()) {
        const double w = nb->detuning / G;
        const double t = form == TauTForm::weighted_group_delay ? kernels::group_delay(w, medium.od0())
                                                                 : kernels::group_delay_resolvent(w, medium.od0());
        return t / G;
    }
    const Moments m = moments(pulse, medium, opt);
    const double num = form == TauTForm::weighted_group_delay ? m.tau_T_weighted : m.tau_T_resolvent;
    return num / m.transmitted / G;
}

double tau_S(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt) {
    const double G = medium.gamma();
    if (auto nb = pulse.get_if<NarrowBandPulse>()) {
        require_scattering(medium.od0(), "tau_S");
        return kernels::scattered_time(nb->detuning / G, medium.od0()) / G;
    }
    const Moments m = moments(pulse, medium, opt);
    const double p_s = 1.0 - m.transmitted;
    require_scattering(p_s, "tau_S");
    return (1.0 - m.tau_T_weighted / p_s) / G;
}

double scattered_delay(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt) {
    const double G = medium.gamma();
    if (auto nb = pulse.get_if<NarrowBandPulse>()) {
        require_scattering(medium.od0(), "scattered delay");
        return kernels::scattered_delay(nb->detuning / G, medium.od0()) / G;
    }
    const Moments m = moments(pulse, medium, opt);
    require_scattering(m.scattered, "scattered delay");
    return m.scattered_delay / m.scattered / G;
}

Asymptotics asymptotics(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt) {
    const auto* g = pulse.get_if<GaussianPulse>();
    if (!g) throw UnsupportedVariant("broadband approximants are defined for Gaussian pulses only");
    const double G = medium.gamma();
    const double s = g->sigma * G;
    const double od0 = medium.od0();
    const Moments m = moments(pulse, medium, opt);
    Asymptotics a;
    a.od_eff = effective_od(m.transmitted);
    const double e = a.od_eff;
    a.p_t_low_od = 1.0 - std::sqrt(std::numbers::pi / 2.0) * s * od0;
    a.p_t_high_od = std::exp(-s * std::sqrt(2.0 * od0));
    a.tau_S_low_od = (1.0 - std::sqrt(2.0 / std::numbers::pi) * e / (4.0 * s)) / G;
    a.tau_S_high_od = e > 0.0 ? (1.0 - kernels::bernoulli_ratio(e) / 2.0) / G : 0.5 / G;
    a.tau_T_low_od = std::sqrt(std::numbers::pi / 2.0) * (g->sigma / 4.0) * od0 * od0;
    a.tau_T_high_od = e / (2.0 * G);
    if (s > 0.2) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "sigma*gamma = %.3g is outside the broadband regime (<= 0.2)", s);
        a.warning = buf;
    }
    return a;
}

DelayReport analyze(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt) {
    const double G = medium.gamma();
    const double od0 = medium.od0();
    DelayReport r;
    r.method = Method::analytic;
    if (auto nb = pulse.get_if<NarrowBandPulse>()) {
        const double w = nb->detuning / G;
        const double x = od0 * kernels::lorentzian(w);
        r.p_t = std::exp(-x);
        r.p_s = -std::expm1(-x);
        r.tau_0 = r.p_s / G;
        r.tau_T = kernels::group_delay(w, od0) / G;
        r.tau_S = od0 > 0.0 ? kernels::scattered_time(w, od0) / G : nan;
        r.t_g = r.tau_T;
        r.t_W = kernels::wigner_delay(w) / G;
        r.t_S = od0 > 0.0 ? kernels::scattered_delay(w, od0) / G : nan;
        r.od_eff = x;
        return r;
    }
    const Moments m = moments(pulse, medium, opt);
    r.p_t = m.transmitted;
    r.p_s = 1.0 - m.transmitted;
    r.tau_0 = m.scattered / G;
    r.tau_T = m.tau_T_weighted / m.transmitted / G;
    r.tau_S = r.p_s > 0.0 ? (1.0 - m.tau_T_weighted / r.p_s) / G : nan;
    r.od_eff = effective_od(r.p_t);
    return r;
}

double od0_for_od_eff(const PulseSpec& pulse, double od_eff, double length, AtomParams atom,
                      const QuadratureOptions& opt) {
    if (!(od_eff >= 0.0) || !std::isfinite(od_eff)) throw InvalidParameter("od_eff must be finite and >= 0");
    if (od_eff == 0.0) return 0.0;
    if (auto nb = pulse.get_if<NarrowBandPulse>()) return od_eff / kernels::lorentzian(nb->detuning / atom.gamma());
    auto eff = [&](double od0) {
        return effective_od(transmission_probability(pulse, make_uniform_medium(od0, length, atom), opt).p_t);
    };
    double lo = 0.0, hi = std::max(1.0, od_eff);
    for (int i = 0; eff(hi) < od_eff; ++i) {
        if (i > 200) throw NumericError("od_eff target is not reachable");
        lo = hi;
        hi *= 2.0;
    }
    // P_T(OD0) is strictly monotone, so plain bisection converges.
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (eff(mid) < od_eff ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace dwell::spectral
