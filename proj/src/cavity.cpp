#include "dwell/cavity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace dwell::cavity {

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Spectral integrals over the pulse: columns are |beta|^2, |alpha_ref|^2, |alpha_tr|^2 and
// the complex numerator of the reflected dwell time (real and imaginary parts).
Eigen::ArrayXd spectral_integrals(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt) {
    const double g1 = p.gamma1, g2 = p.gamma2, gs = g1 + g2;
    auto row = [&](double w, double s, double* out) {
        const double den = gs * gs + 4.0 * w * w;
        const Complex phase = Complex(g1 - g2, 2.0 * w) / Complex(gs, 2.0 * w);
        out[0] = 4.0 * g1 * s / den;
        out[1] = s * ((g1 - g2) * (g1 - g2) + 4.0 * w * w) / den;
        out[2] = 4.0 * g1 * g2 * s / den;
        out[3] = (phase * (s / den)).real();
        out[4] = (phase * (s / den)).imag();
    };
    Eigen::ArrayXd v(5);
    if (auto nb = pulse.get_if<NarrowBandPulse>()) {
        row(nb->detuning, 1.0, v.data());
        return v;
    }
    double lo, hi;
    if (auto g = pulse.get_if<GaussianPulse>()) {
        const double w = std::max(8.0 / g->sigma, 20.0 * gs);
        lo = g->detuning - w;
        hi = g->detuning + w;
    } else {
        const auto& t = std::get<TabulatedPulse>(pulse.kind());
        lo = t.omega[0];
        hi = t.omega[t.omega.size() - 1];
    }
    auto f = [&](const Eigen::ArrayXd& w) {
        const Eigen::ArrayXd s = pulse.spectral_density(w);
        Eigen::ArrayXXd out(w.size(), 5);
        double r[5];
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            row(w[i], s[i], r);
            for (int c = 0; c < 5; ++c) out(i, c) = r[c];
        }
        return out;
    };
    return trapezoid(f, lo, hi, opt).value;
}

}  // namespace

CavityParams::CavityParams(double g1, double g2) : gamma1(g1), gamma2(g2) {
    if (!(g1 > 0.0) || !(g2 > 0.0) || !std::isfinite(g1) || !std::isfinite(g2))
        throw InvalidParameter(fmt("cavity rates must be > 0 (got %g, %g)", g1, g2));
}

MirrorParams::MirrorParams(double a, double b, double t) : r1(a), r2(b), tau_rt(t) {
    if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0))
        throw InvalidParameter(fmt("mirror reflectivities must lie in (0, 1] (got %g, %g)", a, b));
    if (!(t > 0.0) || !std::isfinite(t)) throw InvalidParameter(fmt("round-trip time must be > 0 (got %g)", t));
}

SteadyFields steady_fields(const CavityParams& p, double omega, Complex a) {
    const Complex den(p.gamma1 + p.gamma2, 2.0 * omega);
    return {-2.0 * std::sqrt(p.gamma1) * a / den, Complex(p.gamma2 - p.gamma1, 2.0 * omega) / den * a,
            -2.0 * std::sqrt(p.gamma1 * p.gamma2) * a / den};
}

double reflection_probability(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt) {
    return spectral_integrals(p, pulse, opt)[1];
}

double transmission_probability(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt) {
    return spectral_integrals(p, pulse, opt)[2];
}

double tau_B_direct(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt) {
    const Eigen::ArrayXd v = spectral_integrals(p, pulse, opt);
    const double p_ref = v[1];
    if (!(p_ref > 0.0)) throw UndefinedConditional("reflected dwell time is undefined when P_ref = 0");
    return v[3] / (p_ref / (4.0 * p.gamma1));
}

double optical_depth(const CavityParams& p) {
    if (p.gamma1 == p.gamma2) throw UndefinedConditional("matched mirrors reflect nothing (P_ref = 0)");
    // P_ref = ((g1 - g2)/(g1 + g2))^2 = (1 - 2 g_min/(g1 + g2))^2
    return -2.0 * std::log1p(-2.0 * std::min(p.gamma1, p.gamma2) / (p.gamma1 + p.gamma2));
}

double tau_B_closed(const CavityParams& p) {
    if (!(p.gamma1 < p.gamma2))
        throw InvalidParameter(fmt("closed-form dwell time needs gamma1 < gamma2 (got %g, %g)", p.gamma1, p.gamma2));
    return -2.0 * std::sinh(0.5 * optical_depth(p)) / p.gamma2;
}

double dwell_avg(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt) {
    return spectral_integrals(p, pulse, opt)[0];
}

FeynmanResult feynman_tau_B(const MirrorParams& m, std::size_t n_terms) {
    const double q = m.r1 * m.r2;
    if (q >= 1.0) throw DomainError("path series diverges for r1 r2 >= 1");
    if (!(m.r2 < m.r1)) throw InvalidParameter(fmt("path series needs r2 < r1 (got %g, %g)", m.r2, m.r1));
    if (n_terms == 0) throw InvalidParameter("path series needs at least one term");
    const double t1sq = 1.0 - m.r1 * m.r1;
    const double net = (m.r1 - m.r2) / (1.0 - q);
    double sum = 0.0, power = 1.0;
    for (std::size_t n = 1; n <= n_terms; ++n) {
        sum += double(n) * power;
        power *= q;
    }
    return {-m.tau_rt * t1sq * m.r2 * sum / net, -m.tau_rt * m.r2 * t1sq / ((1.0 - q) * (m.r1 - m.r2))};
}

double tau_B_mirrors(const MirrorParams& m) {
    const double t1sq = 1.0 - m.r1 * m.r1;
    return -0.25 * m.tau_rt * t1sq * (1.0 + m.r2) * (1.0 + m.r2) / ((m.r1 - m.r2) * (1.0 - m.r1 * m.r2));
}

double reflection_probability_mirrors(const MirrorParams& m) {
    const double a = (m.r1 - m.r2) / (1.0 - m.r1 * m.r2);
    return a * a;
}

double mirror_reflectivity(double gamma, double tau_rt) {
    if (!(gamma >= 0.0) || !(tau_rt > 0.0)) throw InvalidParameter("mirror map needs gamma >= 0 and tau_rt > 0");
    const double x = gamma * tau_rt / 4.0;
    if (!(x < 1.0)) throw DomainError(fmt("gamma * tau_rt = %g is outside the mirror-map regime (< 4)", 4.0 * x));
    return (1.0 - x) / (1.0 + x);
}

double mirror_rate(double r, double tau_rt) {
    if (!(r > 0.0 && r <= 1.0) || !(tau_rt > 0.0)) throw InvalidParameter("mirror map needs r in (0, 1] and tau_rt > 0");
    return 4.0 / tau_rt * (1.0 - r) / (1.0 + r);
}

MirrorParams mirror_map(const CavityParams& p) { return mirror_map(p, 0.01 / p.gamma2); }

MirrorParams mirror_map(const CavityParams& p, double tau_rt) {
    return MirrorParams(mirror_reflectivity(p.gamma1, tau_rt), mirror_reflectivity(p.gamma2, tau_rt), tau_rt);
}

CavityParams inverse_mirror_map(const MirrorParams& m) {
    return CavityParams(mirror_rate(m.r1, m.tau_rt), mirror_rate(m.r2, m.tau_rt));
}

}  // namespace dwell::cavity
