#pragma once

#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "dwell/domain.hpp"
#include "dwell/quadrature.hpp"

// Frequency-domain solutions of the forward/backward propagation problem and
// the excitation-time and delay formulas built on them.
//
// Inputs are in physical units (times in the unit of 1/gamma, frequencies in
// gamma's unit, c = 1); outputs are re-dimensionalized to the same units.

namespace dwell::spectral {

// Uniform grid symmetric about the pulse centre.
struct FrequencyGrid {
    Eigen::ArrayXd omega;
    double center = 0.0;
    double half_width = 0.0;

    std::size_t intervals() const { return std::size_t(omega.size() - 1); }
    double spacing() const { return 2.0 * half_width / double(intervals()); }
};

// Half-width max(20 gamma, 8/sigma) for Gaussians, the sample range for tabulated
// spectra. `intervals` must be even and >= 1024.
FrequencyGrid make_grid(const PulseSpec& pulse, double gamma, std::size_t intervals = 1024);

// [1 + (2 omega/gamma)^2]^-1
double lorentzian(double omega, double gamma = 1.0);

struct MediumResponse {
    double od;     // OD(z, omega)
    double phase;  // phi(z, omega) = -(omega/gamma) OD(z, omega)
};

MediumResponse medium_response(const MediumProfile& medium, double z, double omega);

// Fields on a (z, omega) grid, rows = z samples, columns = omega samples.
// The free-flight factor e^{-i z omega} is included.
struct SpectralFields {
    Eigen::ArrayXd z;
    Eigen::ArrayXd omega;
    Eigen::ArrayXd g;           // g(z)
    Eigen::MatrixXd od;         // OD(z, omega)
    double gamma = 1.0;
    Eigen::MatrixXcd alpha_fwd, beta_fwd;
    Eigen::MatrixXcd alpha_bwd, beta_bwd;  // empty until backward_fields
    double p_t = 0.0;                      // post-selection probability used for the backward half
};

// Throws UnsupportedVariant for narrow-band pulses. `z_points` >= 2 samples span [0, L].
SpectralFields forward_fields(const PulseSpec& pulse, const MediumProfile& medium, const FrequencyGrid& grid,
                              std::size_t z_points = 65);

// Adds the transmission-post-selected backward fields. Throws InvalidParameter for p_t <= 0.
SpectralFields backward_fields(SpectralFields fields, double p_t);

// Re (1/sqrt P_T) int dz int d omega conj(beta_bwd) beta_fwd by 2D trapezoid.
double tau_T_overlap(const SpectralFields& fields);

struct Probabilities {
    double p_t;
    double p_s;
};

Probabilities transmission_probability(const PulseSpec& pulse, const MediumProfile& medium,
                                       const QuadratureOptions& opt = {});

// (1/gamma) int S (1 - e^{-OD0 L}); equals P_S/gamma.
double tau_avg(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt = {});

double group_delay(double detuning, double od0, double gamma = 1.0);

enum class TauTForm {
    weighted_group_delay,  // (1/P_T) int S e^{-OD0 L} t_g
    resolvent,             // Re (gamma OD0 / 4 P_T) int S e^{-OD0 L} / (w^2 - gamma^2/4 - i w gamma)
};

double tau_T(const PulseSpec& pulse, const MediumProfile& medium, TauTForm form = TauTForm::weighted_group_delay,
             const QuadratureOptions& opt = {});

double wigner_delay(double detuning, double gamma = 1.0);

// Scattering-conditioned excitation time 1/gamma - (P_T/P_S) tau_T.
// Throws UndefinedConditional when P_S = 0.
double tau_S(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt = {});

// Delay of the scattered pulse: Wigner delay plus optical-depth-averaged group
// delay, averaged over the scattered spectrum. Throws UndefinedConditional when P_S = 0.
double scattered_delay(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt = {});

// Broadband approximants for a Gaussian pulse; od_eff uses the exact P_T.
struct Asymptotics {
    double od_eff;
    double p_t_low_od;     // 1 - sqrt(pi/2) sigma gamma OD0
    double p_t_high_od;    // exp(-sigma gamma sqrt(2 OD0))
    double tau_S_low_od;   // 1/gamma - sqrt(2/pi) OD_eff / (4 sigma gamma^2)
    double tau_S_high_od;  // 1/gamma - [e^{-OD_eff}/(1 - e^{-OD_eff})] OD_eff / (2 gamma)
    double tau_T_low_od;   // sqrt(pi/2) (sigma/4) OD0^2
    double tau_T_high_od;  // OD_eff / (2 gamma)
    std::string warning;   // non-empty when sigma gamma > 0.2
};

// Throws UnsupportedVariant for non-Gaussian pulses.
Asymptotics asymptotics(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt = {});

// All spectral integrals in one refinement pass, in units gamma = 1.
struct Moments {
    double norm;              // int S
    double transmitted;       // int S e^{-x}
    double scattered;         // int S (1 - e^{-x})
    double tau_T_weighted;    // int S e^{-x} t_g
    double tau_T_resolvent;   // int S e^{-x} Re[...]
    double scattered_delay;   // int S (1 - e^{-x}) t_S(w)
    std::size_t intervals;
};

// x = OD0 L(w). Pulse and medium in physical units; throws UnsupportedVariant for narrow-band.
Moments moments(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt = {});

// Complete analytic report. tau_S is NaN when P_S = 0; t_g, t_W, t_S are set only
// for narrow-band pulses.
DelayReport analyze(const PulseSpec& pulse, const MediumProfile& medium, const QuadratureOptions& opt = {});

// OD0 giving the requested effective optical depth for this pulse (bisection on
// the monotone P_T(OD0)).
double od0_for_od_eff(const PulseSpec& pulse, double od_eff, double length = 1.0, AtomParams atom = AtomParams{},
                      const QuadratureOptions& opt = {});

}  // namespace dwell::spectral
