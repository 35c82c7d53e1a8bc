#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "dwell/domain.hpp"

// Space-time integration of the forward no-jump equations
//   (d_t + d_z) alpha = i g beta,   d_t beta = -beta/2 + i g alpha
// and of their transmission-post-selected adjoint, in units gamma = c = 1.
//
// Grid: unit Courant (dz = dt = h). The medium is split into M cells with one
// node at each cell centre carrying the cell-averaged g^2. alpha lives on
// characteristic slots: slot k holds alpha along u = t - z = t_start + (k - 1/2) h,
// and at step n node j sees slot n - j, so advection is an index shift.
// Each step is half reaction, shift, half reaction with the exact 2x2
// propagator of the local coupling/decay matrix.
//
// Histories are stored in the internal units; operations that return times
// convert back with the medium's gamma.

namespace dwell::timedomain {

struct GridOptions {
    std::size_t min_medium_cells = 200;
    double samples_per_sigma = 50.0;
    double truncation = 1e-8;   // input dropped where |alpha_in| < truncation * peak
    double tail_tolerance = 1e-8;  // stop once medium excitation < tail_tolerance * its peak
    std::size_t max_steps = 2'000'000;
    double refine = 1.0;        // extra factor on the cell count (2 halves h)
};

struct GridSpec {
    double h = 0.0;           // dz = dt
    std::size_t cells = 0;    // medium cells
    double length = 0.0;      // medium length
    double t_start = 0.0;     // time of step 0
    double half_span = 0.0;   // input support is |u| <= half_span
    double tail_tolerance = 1e-8;
    std::size_t max_steps = 0;
    double gamma = 1.0;       // caller's gamma, for converting times back
};

// Internal-unit grid for a Gaussian pulse crossing the medium.
// Throws UnsupportedVariant for narrow-band and tabulated pulses (no finite time support).
GridSpec make_grid(const PulseSpec& pulse, const MediumProfile& medium, const GridOptions& opt = {});

enum class Direction { forward, backward };

struct FieldHistory {
    Direction direction = Direction::forward;
    GridSpec grid;
    Eigen::ArrayXd z;        // node positions
    Eigen::ArrayXd g;        // node couplings (sqrt of the cell mean of g^2)
    Eigen::ArrayXd t;        // step times
    Eigen::MatrixXcd alpha;  // rows = nodes, cols = steps
    Eigen::MatrixXcd beta;
    Eigen::ArrayXd norm;        // whole-line norm at each step
    Eigen::ArrayXd scattered;   // forward: cumulative int dt int dz |beta|^2
    Eigen::ArrayXcd overlap;    // backward: <psi_bwd | psi_fwd> at each step
    // Slot arrays over k = slot_min .. slot_min + size - 1.
    long slot_min = 0;
    Eigen::ArrayXcd input;      // forward: alpha_in on each slot
    Eigen::ArrayXcd slots;      // forward: slot values at the last step; backward: at step 0
    double input_com = 0.0;     // int |alpha_in|^2 u du
    double p_t = 1.0;           // backward: post-selection probability

    std::size_t steps() const { return std::size_t(t.size()); }
    std::size_t nodes() const { return std::size_t(z.size()); }
    double slot_u(long k) const { return grid.t_start + (double(k) - 0.5) * grid.h; }
};

FieldHistory integrate_forward(const PulseSpec& pulse, const MediumProfile& medium, const GridSpec& grid);

// Discrete adjoint of the forward step run from the last step down to step 0,
// starting from alpha_bwd = alpha_fwd / sqrt(p_t), beta_bwd = 0. The overlap with
// the forward history is conserved to rounding.
FieldHistory integrate_backward(const FieldHistory& forward, double p_t);

// All transmitted probability at the last step: sum over slots of h |alpha|^2.
double transmitted_probability(const FieldHistory& forward);

struct WeakTrace {
    Eigen::ArrayXd t;     // caller's time units
    Eigen::ArrayXd phi;   // cross-phase shift [rad]
    double epsilon = 1.0;
};

// phi(t) = (eps / sqrt P_T) Re int dz conj(beta_bwd) beta_fwd.
WeakTrace weak_trace(const FieldHistory& forward, const FieldHistory& backward,
                     const WeakProbeConfig& probe = WeakProbeConfig{});

// (1/eps) int phi dt.
double tau_T_td(const WeakTrace& trace);
// int dt int dz |beta_fwd|^2.
double tau_avg_td(const FieldHistory& forward);

struct ComDelays {
    double transmitted;
    double scattered;
    bool time_symmetric;   // false: the equivalence with tau_T / tau_S is not guaranteed
};

// Centre-of-mass delays of the transmitted pulse and of the scattered light
// (scattering-position propagation time removed), relative to the input.
// The scattered delay is NaN when nothing is scattered.
ComDelays com_delays(const FieldHistory& forward, double p_t, bool time_symmetric = true);

struct OracleOptions {
    double max_node_steps = 2e10;   // work cap, counted in node updates
    std::size_t threads = 0;        // 0: thread_count()
    double skip_below = 1e-14;      // ignore detection cells with |beta|^2 below this fraction of the peak
};

// Brute-force scattering-conditioned excitation time: for every detection cell
// (Z, T) evolve the adjoint equations backwards from beta = 1/h at node Z and
// accumulate the weak-value integrand. Needs >= 50 medium cells. Throws
// OracleBudget if the estimated work exceeds the cap.
double tau_S_oracle(const FieldHistory& forward, const OracleOptions& opt = {});

// Work (node updates) tau_S_oracle would spend on this history.
double oracle_cost(const FieldHistory& forward, const OracleOptions& opt = {});

// Forward + backward run, reporting P_T, tau_0, tau_T and tau_S (sum-rule route).
DelayReport analyze(const PulseSpec& pulse, const MediumProfile& medium, const GridOptions& opt = {});

}  // namespace dwell::timedomain
