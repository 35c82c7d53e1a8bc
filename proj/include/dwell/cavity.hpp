#pragma once

#include <cstddef>

#include "dwell/domain.hpp"
#include "dwell/quadrature.hpp"

// Single-mode cavity between an input mirror (intensity decay rate gamma1) and
// an output mirror (gamma2), fed by a single-photon pulse. Rates and the pulse
// share one time unit; nothing here is rescaled.

namespace dwell::cavity {

struct CavityParams {
    CavityParams(double gamma1, double gamma2);
    double gamma1;
    double gamma2;
};

// Real amplitude reflectivities and the round-trip time; |t_j|^2 = 1 - r_j^2.
struct MirrorParams {
    MirrorParams(double r1, double r2, double tau_rt);
    double r1;
    double r2;
    double tau_rt;
};

struct SteadyFields {
    Complex beta;       // intracavity amplitude
    Complex alpha_ref;  // reflected
    Complex alpha_tr;   // transmitted
};

// Response to the spectral component alpha_in at frequency omega.
SteadyFields steady_fields(const CavityParams& p, double omega, Complex alpha_in = 1.0);

// Reflected / transmitted probabilities for a pulse.
double reflection_probability(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt = {});
double transmission_probability(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt = {});

// Weak-value dwell time of a reflected photon, ratio of two spectral integrals.
// Either rate ordering is accepted. Throws UndefinedConditional when P_ref = 0.
double tau_B_direct(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt = {});

// Cavity "optical depth" -ln P_ref for a resonant narrow-band photon.
double optical_depth(const CavityParams& p);

// -2 sinh(eta/2) / gamma2 for a resonant narrow-band photon. Requires gamma1 < gamma2
// (the branch that mirrors the atomic medium); throws InvalidParameter otherwise.
double tau_B_closed(const CavityParams& p);

// int |beta(t)|^2 dt, evaluated spectrally.
double dwell_avg(const CavityParams& p, const PulseSpec& pulse, const QuadratureOptions& opt = {});

struct FeynmanResult {
    double series_value;  // first N round-trip paths
    double closed_form;   // all paths
};

// First-moment pointer shift summed over reflection paths, divided by the net
// reflection amplitude. Requires r2 < r1 < 1 and n_terms >= 1.
FeynmanResult feynman_tau_B(const MirrorParams& m, std::size_t n_terms);

// Same dwell time from the mirror coefficients without the r ~ 1 approximation.
double tau_B_mirrors(const MirrorParams& m);

// ((r1 - r2) / (1 - r1 r2))^2
double reflection_probability_mirrors(const MirrorParams& m);

// r = (1 - gamma tau/4) / (1 + gamma tau/4); gamma >= 0, gamma tau < 4.
double mirror_reflectivity(double gamma, double tau_rt);
// Inverse of mirror_reflectivity; r in (0, 1].
double mirror_rate(double r, double tau_rt);

// Default round-trip time 0.01 / gamma2.
MirrorParams mirror_map(const CavityParams& p);
MirrorParams mirror_map(const CavityParams& p, double tau_rt);
CavityParams inverse_mirror_map(const MirrorParams& m);

}  // namespace dwell::cavity
