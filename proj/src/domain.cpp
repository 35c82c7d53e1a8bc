#include "dwell/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace dwell {

namespace {

bool finite(double x) { return std::isfinite(x); }

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Locate the segment of an increasing grid containing x (x inside the range).
Eigen::Index segment(const Eigen::ArrayXd& xs, double x) {
    const double* first = xs.data();
    const double* last = xs.data() + xs.size();
    Eigen::Index i = std::upper_bound(first, last, x) - first - 1;
    return std::clamp<Eigen::Index>(i, 0, xs.size() - 2);
}

void check_increasing(const Eigen::ArrayXd& xs, const char* what) {
    if (xs.size() < 2) throw InvalidParameter(std::string(what) + ": need at least two samples");
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        if (!finite(xs[i])) throw InvalidParameter(std::string(what) + ": non-finite sample");
        if (i > 0 && !(xs[i] > xs[i - 1]))
            throw InvalidParameter(std::string(what) + ": samples must increase strictly");
    }
}

}  // namespace

AtomParams::AtomParams(double gamma) : gamma_(gamma) {
    if (!(gamma > 0.0) || !finite(gamma)) throw InvalidParameter(fmt("gamma must be > 0 (got %g)", gamma));
}

WeakProbeConfig::WeakProbeConfig(double eps) : epsilon(eps) {
    if (!(eps > 0.0) || !finite(eps)) throw InvalidParameter(fmt("epsilon must be > 0 (got %g)", eps));
}

// ---- pulses ---------------------------------------------------------------

PulseSpec make_gaussian_pulse(double sigma, double detuning) {
    if (!(sigma > 0.0) || !finite(sigma)) throw InvalidParameter(fmt("sigma must be > 0 (got %g)", sigma));
    if (!finite(detuning)) throw InvalidParameter("detuning must be finite");
    return PulseSpec(GaussianPulse{sigma, detuning}, true);
}

PulseSpec make_narrowband_pulse(double detuning) {
    if (!finite(detuning)) throw InvalidParameter("detuning must be finite");
    return PulseSpec(NarrowBandPulse{detuning}, true);
}

double tabulated_norm(const Eigen::ArrayXd& omega, const Eigen::ArrayXcd& a) {
    // |a + t(b - a)|^2 integrated over one segment is h(|a|^2 + Re(a b*) + |b|^2)/3.
    const Eigen::Index n = omega.size();
    const Eigen::ArrayXd h = omega.tail(n - 1) - omega.head(n - 1);
    const Eigen::ArrayXd lo = a.head(n - 1).abs2();
    const Eigen::ArrayXd hi = a.tail(n - 1).abs2();
    const Eigen::ArrayXd cross = (a.head(n - 1) * a.tail(n - 1).conjugate()).real();
    return (h * (lo + cross + hi)).sum() / 3.0;
}

PulseSpec make_tabulated_pulse(Eigen::ArrayXd omega, Eigen::ArrayXcd amplitude, bool normalize) {
    check_increasing(omega, "tabulated spectrum");
    if (amplitude.size() != omega.size())
        throw InvalidParameter("tabulated spectrum: omega and amplitude sizes differ");
    if (!amplitude.real().allFinite() || !amplitude.imag().allFinite())
        throw InvalidParameter("tabulated spectrum: non-finite amplitude");
    const double norm = tabulated_norm(omega, amplitude);
    if (!(norm > 0.0)) throw InvalidParameter("tabulated spectrum carries no power");
    if (normalize) {
        amplitude /= std::sqrt(norm);
    } else if (std::abs(norm - 1.0) > 1e-6) {
        throw InvalidParameter(fmt("tabulated spectrum integrates to %.9g, expected 1", norm));
    }
    return PulseSpec(TabulatedPulse{std::move(omega), std::move(amplitude)}, normalize);
}

double PulseSpec::detuning() const {
    if (auto g = get_if<GaussianPulse>()) return g->detuning;
    if (auto nb = get_if<NarrowBandPulse>()) return nb->detuning;
    const auto& t = std::get<TabulatedPulse>(kind_);
    // Centroid of the interpolated |a|^2; trapezoid on the samples is adequate here.
    const Eigen::Index n = t.omega.size();
    const Eigen::ArrayXd s = t.amplitude.abs2();
    const Eigen::ArrayXd h = t.omega.tail(n - 1) - t.omega.head(n - 1);
    const Eigen::ArrayXd ws = s * t.omega;
    const double m0 = (h * (s.head(n - 1) + s.tail(n - 1))).sum();
    const double m1 = (h * (ws.head(n - 1) + ws.tail(n - 1))).sum();
    return m0 > 0.0 ? m1 / m0 : 0.5 * (t.omega[0] + t.omega[n - 1]);
}

bool PulseSpec::time_symmetric() const {
    const auto* t = get_if<TabulatedPulse>();
    if (!t) return true;
    const double peak = t->amplitude.abs().maxCoeff();
    std::optional<double> phase;
    for (Eigen::Index i = 0; i < t->amplitude.size(); ++i) {
        const Complex a = t->amplitude[i];
        if (std::abs(a) < 1e-9 * peak) continue;
        const double p = std::arg(a);
        if (!phase) {
            phase = p;
        } else if (std::abs(std::remainder(p - *phase, 2.0 * std::numbers::pi)) > 1e-9) {
            return false;
        }
    }
    return true;
}

Eigen::ArrayXcd PulseSpec::amplitude(const Eigen::ArrayXd& w) const {
    if (auto g = get_if<GaussianPulse>()) {
        const double s = g->sigma;
        const double a0 = std::pow(2.0 / std::numbers::pi, 0.25) * std::sqrt(s);
        return (a0 * (-(s * s) * (w - g->detuning).square()).exp()).cast<Complex>();
    }
    if (is_narrowband()) throw UnsupportedVariant("narrow-band pulse has no sampled spectrum; use the closed forms");
    const auto& t = std::get<TabulatedPulse>(kind_);
    const Eigen::Index n = t.omega.size();
    Eigen::ArrayXcd out(w.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        const double x = w[k];
        if (x < t.omega[0] || x > t.omega[n - 1]) {
            out[k] = 0.0;
            continue;
        }
        const Eigen::Index i = segment(t.omega, x);
        const double f = (x - t.omega[i]) / (t.omega[i + 1] - t.omega[i]);
        out[k] = t.amplitude[i] + f * (t.amplitude[i + 1] - t.amplitude[i]);
    }
    return out;
}

Eigen::ArrayXd PulseSpec::spectral_density(const Eigen::ArrayXd& w) const {
    if (auto g = get_if<GaussianPulse>()) {
        const double s = g->sigma;
        return std::sqrt(2.0 / std::numbers::pi) * s * (-2.0 * s * s * (w - g->detuning).square()).exp();
    }
    return amplitude(w).abs2();
}

PulseSpec PulseSpec::scaled(double gamma) const {
    if (!(gamma > 0.0)) throw InvalidParameter("gamma must be > 0");
    if (auto g = get_if<GaussianPulse>()) return PulseSpec(GaussianPulse{g->sigma * gamma, g->detuning / gamma}, true);
    if (auto nb = get_if<NarrowBandPulse>()) return PulseSpec(NarrowBandPulse{nb->detuning / gamma}, true);
    const auto& t = std::get<TabulatedPulse>(kind_);
    return PulseSpec(TabulatedPulse{t.omega / gamma, t.amplitude * std::sqrt(gamma)}, normalized_);
}

std::string PulseSpec::describe() const {
    if (auto g = get_if<GaussianPulse>()) return fmt("gaussian sigma=%.12g detuning=%.12g", g->sigma, g->detuning);
    if (auto nb = get_if<NarrowBandPulse>()) return fmt("narrowband detuning=%.12g", nb->detuning);
    const auto& t = std::get<TabulatedPulse>(kind_);
    return fmt("tabulated %.0f samples on [%.12g", double(t.omega.size()), t.omega[0]) +
           fmt(", %.12g]", t.omega[t.omega.size() - 1]);
}

// ---- medium ---------------------------------------------------------------

MediumProfile::MediumProfile(double length, Coupling coupling, AtomParams atom)
    : length_(length), coupling_(std::move(coupling)), atom_(atom) {
    if (!(length > 0.0) || !finite(length)) throw InvalidParameter(fmt("length must be > 0 (got %g)", length));
    if (auto u = std::get_if<UniformCoupling>(&coupling_)) {
        if (!(u->g0 >= 0.0) || !finite(u->g0)) throw InvalidParameter(fmt("coupling must be >= 0 (got %g)", u->g0));
        return;
    }
    auto& t = std::get<TabulatedCoupling>(coupling_);
    check_increasing(t.z, "coupling profile");
    if (t.g.size() != t.z.size()) throw InvalidParameter("coupling profile: z and g sizes differ");
    if (!t.g.allFinite() || (t.g < 0.0).any()) throw InvalidParameter("coupling profile: g must be finite and >= 0");
    const Eigen::Index n = t.z.size();
    if (t.z[0] != 0.0 || std::abs(t.z[n - 1] - length) > 1e-12 * length)
        throw InvalidParameter("coupling profile must span exactly [0, L]");
    t.z[n - 1] = length;
    cumulative_ = Eigen::ArrayXd::Zero(n);
    for (Eigen::Index i = 1; i < n; ++i) {
        const double a = t.g[i - 1], b = t.g[i];
        cumulative_[i] = cumulative_[i - 1] + (t.z[i] - t.z[i - 1]) * (a * a + a * b + b * b) / 3.0;
    }
}

double MediumProfile::g(double z) const {
    if (z < 0.0 || z > length_) return 0.0;
    if (auto u = std::get_if<UniformCoupling>(&coupling_)) return u->g0;
    const auto& t = std::get<TabulatedCoupling>(coupling_);
    const Eigen::Index i = segment(t.z, z);
    const double f = (z - t.z[i]) / (t.z[i + 1] - t.z[i]);
    return t.g[i] + f * (t.g[i + 1] - t.g[i]);
}

Eigen::ArrayXd MediumProfile::g(const Eigen::ArrayXd& z) const {
    return z.unaryExpr([this](double x) { return g(x); });
}

namespace {

// int_0^z g^2 for a tabulated profile, z in [0, L].
double tabulated_g2(const TabulatedCoupling& t, const Eigen::ArrayXd& cumulative, double z) {
    const Eigen::Index i = segment(t.z, z);
    const double h = t.z[i + 1] - t.z[i];
    const double s = (z - t.z[i]) / h;
    const double a = t.g[i], d = t.g[i + 1] - t.g[i];
    return cumulative[i] + h * (a * a * s + a * d * s * s + d * d * s * s * s / 3.0);
}

}  // namespace

double MediumProfile::g2_integral(double a, double b) const {
    a = std::clamp(a, 0.0, length_);
    b = std::clamp(b, 0.0, length_);
    if (b <= a) return 0.0;
    if (auto u = std::get_if<UniformCoupling>(&coupling_)) return u->g0 * u->g0 * (b - a);
    const auto& t = std::get<TabulatedCoupling>(coupling_);
    return tabulated_g2(t, cumulative_, b) - tabulated_g2(t, cumulative_, a);
}

double MediumProfile::od_integral(double z) const {
    if (!(z >= 0.0 && z <= length_)) throw DomainError(fmt("z=%g outside the medium [0, %g]", z, length_));
    return 4.0 / gamma() * g2_integral(0.0, z);
}

MediumProfile MediumProfile::scaled() const {
    const double G = gamma();
    if (auto u = std::get_if<UniformCoupling>(&coupling_))
        return MediumProfile(length_ * G, UniformCoupling{u->g0 / G}, AtomParams{1.0});
    const auto& t = std::get<TabulatedCoupling>(coupling_);
    return MediumProfile(length_ * G, TabulatedCoupling{t.z * G, t.g / G}, AtomParams{1.0});
}

std::string MediumProfile::describe() const {
    const std::string kind = uniform() ? "uniform" : "tabulated";
    return kind + fmt(" od0=%.12g length=%.12g", od0(), length_) + fmt(" gamma=%.12g", gamma());
}

MediumProfile make_uniform_medium(double od0, double length, AtomParams atom) {
    if (!(od0 >= 0.0) || !finite(od0)) throw InvalidParameter(fmt("od0 must be >= 0 (got %g)", od0));
    if (!(length > 0.0) || !finite(length)) throw InvalidParameter(fmt("length must be > 0 (got %g)", length));
    return MediumProfile(length, UniformCoupling{std::sqrt(od0 * atom.gamma() / (4.0 * length))}, atom);
}

MediumProfile make_tabulated_medium(Eigen::ArrayXd z, Eigen::ArrayXd g, AtomParams atom) {
    if (z.size() < 2) throw InvalidParameter("coupling profile: need at least two samples");
    const double length = z[z.size() - 1];
    return MediumProfile(length, TabulatedCoupling{std::move(z), std::move(g)}, atom);
}

const char* to_string(Method m) { return m == Method::analytic ? "analytic" : "timedomain"; }

double effective_od(double p_t) {
    if (!(p_t > 0.0)) throw UndefinedConditional("effective optical depth needs P_T > 0");
    return p_t >= 1.0 ? 0.0 : -std::log(p_t);
}

}  // namespace dwell
