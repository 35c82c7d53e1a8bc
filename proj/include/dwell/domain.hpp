#pragma once

#include <complex>
#include <optional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "dwell/errors.hpp"

// Value types shared by the spectral and time-domain engines.
//
// Units: c = 1 everywhere. Public constructors take physical values
// (times in the same unit as 1/gamma); the engines rescale to gamma = 1
// internally and convert results back.

namespace dwell {

using Complex = std::complex<double>;

class AtomParams {
public:
    explicit AtomParams(double gamma = 1.0);
    double gamma() const { return gamma_; }

private:
    double gamma_;
};

struct GaussianPulse {
    double sigma;     // RMS duration of |alpha_in(t)|^2 [time]
    double detuning;  // carrier offset from the atomic line [frequency]
};

// Delta spectrum at `detuning`; only closed forms can evaluate it.
struct NarrowBandPulse {
    double detuning;
};

// Complex spectral amplitude on an increasing frequency grid,
// linearly interpolated and zero outside the samples.
struct TabulatedPulse {
    Eigen::ArrayXd omega;
    Eigen::ArrayXcd amplitude;
};

class PulseSpec {
public:
    using Kind = std::variant<GaussianPulse, NarrowBandPulse, TabulatedPulse>;

    const Kind& kind() const { return kind_; }
    bool normalized() const { return normalized_; }

    template <class T>
    const T* get_if() const { return std::get_if<T>(&kind_); }
    bool is_narrowband() const { return std::holds_alternative<NarrowBandPulse>(kind_); }

    // Nominal carrier detuning; the amplitude-weighted centroid for tabulated input.
    double detuning() const;

    // |alpha_in(t)| even in t. True for Gaussian and narrow-band pulses,
    // and for tabulated spectra whose samples share one phase.
    bool time_symmetric() const;

    // alpha_in(omega) with sum |.|^2 d omega = 1. Throws UnsupportedVariant for narrow-band.
    Eigen::ArrayXcd amplitude(const Eigen::ArrayXd& omega) const;
    // S(omega) = |alpha_in(omega)|^2.
    Eigen::ArrayXd spectral_density(const Eigen::ArrayXd& omega) const;

    // Same pulse expressed in units where gamma = 1.
    PulseSpec scaled(double gamma) const;

    std::string describe() const;

private:
    friend PulseSpec make_gaussian_pulse(double, double);
    friend PulseSpec make_narrowband_pulse(double);
    friend PulseSpec make_tabulated_pulse(Eigen::ArrayXd, Eigen::ArrayXcd, bool);

    PulseSpec(Kind kind, bool normalized) : kind_(std::move(kind)), normalized_(normalized) {}

    Kind kind_;
    bool normalized_;
};

PulseSpec make_gaussian_pulse(double sigma, double detuning = 0.0);
PulseSpec make_narrowband_pulse(double detuning = 0.0);
// With normalize = false the samples must already integrate to 1 (to 1e-6).
PulseSpec make_tabulated_pulse(Eigen::ArrayXd omega, Eigen::ArrayXcd amplitude, bool normalize = true);

// Exact integral of |linear interpolant|^2 over the sample range.
double tabulated_norm(const Eigen::ArrayXd& omega, const Eigen::ArrayXcd& amplitude);

struct UniformCoupling {
    double g0;
};

// g(z) samples on [0, L]: z must start at 0, end at L and increase strictly.
struct TabulatedCoupling {
    Eigen::ArrayXd z;
    Eigen::ArrayXd g;
};

class MediumProfile {
public:
    using Coupling = std::variant<UniformCoupling, TabulatedCoupling>;

    MediumProfile(double length, Coupling coupling, AtomParams atom = AtomParams{});

    double length() const { return length_; }
    const AtomParams& atom() const { return atom_; }
    double gamma() const { return atom_.gamma(); }
    const Coupling& coupling() const { return coupling_; }
    bool uniform() const { return std::holds_alternative<UniformCoupling>(coupling_); }

    // Resonant optical depth 4/gamma * int_0^L g^2 dz.
    double od0() const { return od_integral(length_); }

    // g(z); zero outside [0, L].
    double g(double z) const;
    Eigen::ArrayXd g(const Eigen::ArrayXd& z) const;

    // int g^2 over [a, b] intersected with [0, L].
    double g2_integral(double a, double b) const;

    // Resonant optical depth accumulated up to z. Throws DomainError outside [0, L].
    double od_integral(double z) const;

    // Same medium in units where gamma = 1 (lengths times gamma, g divided by gamma).
    MediumProfile scaled() const;

    std::string describe() const;

private:
    double length_;
    Coupling coupling_;
    AtomParams atom_;
    Eigen::ArrayXd cumulative_;  // int_0^{z_i} g^2, tabulated only
};

MediumProfile make_uniform_medium(double od0, double length, AtomParams atom = AtomParams{});
MediumProfile make_tabulated_medium(Eigen::ArrayXd z, Eigen::ArrayXd g, AtomParams atom = AtomParams{});

struct WeakProbeConfig {
    explicit WeakProbeConfig(double epsilon = 1.0);
    double epsilon;  // cross-phase per unit length [rad/length]
};

enum class Method { analytic, timedomain };

const char* to_string(Method m);

// Probabilities and excitation times for one pulse/medium pair. Times in 1/gamma
// units of the caller (already re-dimensionalized).
struct DelayReport {
    double p_t = 1.0;
    double p_s = 0.0;
    double tau_0 = 0.0;
    double tau_T = 0.0;
    double tau_S = 0.0;
    std::optional<double> t_g;  // narrow-band only
    std::optional<double> t_W;
    std::optional<double> t_S;
    double od_eff = 0.0;
    Method method = Method::analytic;
};

// -ln P_T, clamped at zero when rounding pushes P_T a hair above one.
double effective_od(double p_t);

}  // namespace dwell
