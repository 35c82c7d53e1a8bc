#include "dwell/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "td_internal.hpp"

namespace dwell::timedomain {

namespace detail {

Propagator reaction(double g, double t) {
    // A = B - (1/4) I with B^2 = mu^2 I, mu^2 = 1/16 - g^2.
    constexpr double half_decay = 0.25;
    if (g == 0.0) return {1.0, 0.0, 0.0, std::exp(-2.0 * half_decay * t)};
    const Complex I(0.0, 1.0);
    const Complex mu = std::sqrt(Complex(half_decay * half_decay - g * g));
    const Complex x = mu * t;
    Complex ch, sh;  // cosh(mu t), sinh(mu t)/mu
    if (std::abs(x) < 1e-4) {
        const Complex x2 = x * x;
        ch = 1.0 + x2 / 2.0 + x2 * x2 / 24.0;
        sh = t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
    } else {
        ch = std::cosh(x);
        sh = std::sinh(x) / mu;
    }
    const double damp = std::exp(-half_decay * t);
    return {damp * (ch + half_decay * sh), damp * I * g * sh, damp * I * g * sh, damp * (ch - half_decay * sh)};
}

std::vector<Propagator> half_step_propagators(const Eigen::ArrayXd& g, double h) {
    std::vector<Propagator> p;
    p.reserve(std::size_t(g.size()));
    for (Eigen::Index j = 0; j < g.size(); ++j) p.push_back(reaction(g[j], 0.5 * h));
    return p;
}

}  // namespace detail

namespace {

using detail::Propagator;

void check_grid(const GridSpec& grid, const MediumProfile& med) {
    if (!(grid.h > 0.0) || grid.cells == 0) throw InvalidParameter("time-domain grid: empty grid");
    if (std::abs(grid.h * double(grid.cells) - med.length()) > 1e-9 * med.length())
        throw InvalidParameter("time-domain grid does not tile the medium (h * cells != L)");
    if (!(grid.half_span > 0.0) || grid.max_steps == 0) throw InvalidParameter("time-domain grid: bad time span");
}

const GaussianPulse& gaussian_only(const PulseSpec& p) {
    if (auto g = p.get_if<GaussianPulse>()) return *g;
    if (p.is_narrowband())
        throw UnsupportedVariant("narrow-band pulses have no finite time support; use the spectral closed forms");
    throw UnsupportedVariant("tabulated spectra have no finite time support; use the spectral engine");
}

// Trapezoid weights for n equally spaced samples.
double trap_weight(std::size_t i, std::size_t n, double h) { return (i == 0 || i + 1 == n) ? 0.5 * h : h; }

}  // namespace

GridSpec make_grid(const PulseSpec& pulse, const MediumProfile& medium, const GridOptions& opt) {
    const GaussianPulse g = gaussian_only(pulse.scaled(medium.gamma()));
    if (!(opt.truncation > 0.0 && opt.truncation < 1.0)) throw InvalidParameter("truncation must lie in (0, 1)");
    if (!(opt.tail_tolerance > 0.0)) throw InvalidParameter("tail tolerance must be positive");
    if (!(opt.samples_per_sigma > 0.0) || !(opt.refine > 0.0) || opt.min_medium_cells == 0)
        throw InvalidParameter("grid resolution settings must be positive");
    const double L = medium.length() * medium.gamma();
    const double base = std::max(double(opt.min_medium_cells), std::ceil(L * opt.samples_per_sigma / g.sigma));
    GridSpec grid;
    grid.cells = std::size_t(std::ceil(base * opt.refine));
    grid.length = L;
    grid.h = L / double(grid.cells);
    // |alpha_in(u)| = exp(-u^2 / 4 sigma^2) relative to its peak.
    grid.half_span = 2.0 * g.sigma * std::sqrt(-std::log(opt.truncation));
    grid.t_start = -grid.half_span;
    grid.tail_tolerance = opt.tail_tolerance;
    grid.max_steps = opt.max_steps;
    grid.gamma = medium.gamma();
    return grid;
}

FieldHistory integrate_forward(const PulseSpec& pulse, const MediumProfile& medium, const GridSpec& grid) {
    const GaussianPulse pg = gaussian_only(pulse.scaled(medium.gamma()));
    const MediumProfile med = medium.scaled();
    check_grid(grid, med);
    if (std::abs(grid.gamma - medium.gamma()) > 1e-12 * medium.gamma())
        throw InvalidParameter("grid was built for a different gamma");

    const double h = grid.h;
    const long M = long(grid.cells);
    FieldHistory hist;
    hist.direction = Direction::forward;
    hist.grid = grid;
    hist.z.resize(M);
    hist.g.resize(M);
    for (long j = 0; j < M; ++j) {
        hist.z[j] = (double(j) + 0.5) * h;
        hist.g[j] = std::sqrt(med.g2_integral(double(j) * h, double(j + 1) * h) / h);
    }
    const std::vector<Propagator> P = detail::half_step_propagators(hist.g, h);

    // Input slots k_lo .. k_in; later slots carry nothing.
    const long k_lo = -(M - 1);
    const long k_in = long(std::ceil(2.0 * grid.half_span / h + 0.5));
    hist.slot_min = k_lo;
    std::vector<Complex> input;
    input.reserve(std::size_t(k_in - k_lo + 1));
    double mass = 0.0;
    for (long k = k_lo; k <= k_in; ++k) {
        const double u = hist.slot_u(k);
        const Complex a = std::exp(-u * u / (4.0 * pg.sigma * pg.sigma)) * std::polar(1.0, pg.detuning * u);
        input.push_back(a);
        mass += h * std::norm(a);
    }
    for (auto& a : input) a /= std::sqrt(mass);
    auto input_at = [&](long k) { return k <= k_in ? input[std::size_t(k - k_lo)] : Complex(0.0); };
    // unentered[k - k_lo] = sum_{k' > k} h |alpha_in|^2
    std::vector<double> unentered(input.size() + 1, 0.0);
    for (long i = long(input.size()) - 1; i >= 0; --i)
        unentered[std::size_t(i)] = unentered[std::size_t(i + 1)] + (i + 1 < long(input.size()) ? h * std::norm(input[std::size_t(i + 1)]) : 0.0);
    auto mass_after = [&](long n) { return n < k_lo ? 1.0 : (n - k_lo < long(input.size()) ? unentered[std::size_t(n - k_lo)] : 0.0); };

    std::vector<Complex> slots(input.begin(), input.begin() + M);  // slots k_lo .. 0
    auto slot = [&](long k) -> Complex& { return slots[std::size_t(k - k_lo)]; };
    Eigen::ArrayXcd beta = Eigen::ArrayXcd::Zero(M);

    std::vector<Complex> alpha_store, beta_store;
    const std::size_t estimate = std::size_t(k_in + M) + std::size_t(std::ceil(40.0 / h));
    alpha_store.reserve(estimate * std::size_t(M));
    beta_store.reserve(estimate * std::size_t(M));
    std::vector<double> times, norms, scattered;

    double exited = 0.0, cumulative = 0.0, prev_beta_mass = 0.0, peak_medium = 0.0;
    for (long n = 0;; ++n) {
        if (n > 0) {
            // Step n-1 -> n.
            for (long j = 0; j < M; ++j) P[std::size_t(j)].apply(slot(n - 1 - j), beta[j]);
            exited += h * std::norm(slot(n - M));
            slots.push_back(input_at(n));
            for (long j = 0; j < M; ++j) P[std::size_t(j)].apply(slot(n - j), beta[j]);
        }
        double alpha_mass = 0.0;
        for (long j = 0; j < M; ++j) {
            alpha_store.push_back(slot(n - j));
            alpha_mass += h * std::norm(slot(n - j));
        }
        beta_store.insert(beta_store.end(), beta.data(), beta.data() + M);
        const double beta_mass = h * beta.abs2().sum();
        if (n > 0) cumulative += 0.5 * h * (prev_beta_mass + beta_mass);
        prev_beta_mass = beta_mass;
        times.push_back(grid.t_start + double(n) * h);
        norms.push_back(mass_after(n) + alpha_mass + beta_mass + exited);
        scattered.push_back(cumulative);

        const double medium_mass = alpha_mass + beta_mass;
        peak_medium = std::max(peak_medium, medium_mass);
        if (n >= k_in + M && medium_mass <= grid.tail_tolerance * peak_medium) break;
        if (std::size_t(n) + 1 >= grid.max_steps)
            throw NonConvergence("forward integration did not reach the tail tolerance within " +
                                 std::to_string(grid.max_steps) + " steps");
    }

    const Eigen::Index steps = Eigen::Index(times.size());
    hist.t = Eigen::Map<Eigen::ArrayXd>(times.data(), steps);
    hist.norm = Eigen::Map<Eigen::ArrayXd>(norms.data(), steps);
    hist.scattered = Eigen::Map<Eigen::ArrayXd>(scattered.data(), steps);
    hist.alpha = Eigen::Map<Eigen::MatrixXcd>(alpha_store.data(), M, steps);
    alpha_store = {};
    hist.beta = Eigen::Map<Eigen::MatrixXcd>(beta_store.data(), M, steps);
    beta_store = {};
    hist.slots = Eigen::Map<Eigen::ArrayXcd>(slots.data(), Eigen::Index(slots.size()));
    hist.input.resize(hist.slots.size());
    hist.input_com = 0.0;
    for (Eigen::Index i = 0; i < hist.input.size(); ++i) {
        const long k = k_lo + long(i);
        hist.input[i] = input_at(k);
        hist.input_com += h * std::norm(hist.input[i]) * hist.slot_u(k);
    }
    return hist;
}

double transmitted_probability(const FieldHistory& fwd) {
    if (fwd.direction != Direction::forward) throw InvalidParameter("transmitted probability needs a forward history");
    return fwd.grid.h * fwd.slots.abs2().sum();
}

FieldHistory integrate_backward(const FieldHistory& fwd, double p_t) {
    if (fwd.direction != Direction::forward) throw InvalidParameter("backward integration needs a forward history");
    if (!(p_t > 0.0)) throw InvalidParameter("backward integration needs P_T > 0");
    const double h = fwd.grid.h;
    const long M = long(fwd.nodes());
    const long N = long(fwd.steps()) - 1;
    const long k_lo = fwd.slot_min;
    const double root = std::sqrt(p_t);

    FieldHistory b;
    b.direction = Direction::backward;
    b.grid = fwd.grid;
    b.z = fwd.z;
    b.g = fwd.g;
    b.t = fwd.t;
    b.slot_min = k_lo;
    b.p_t = p_t;
    b.input_com = fwd.input_com;
    b.alpha.resize(M, N + 1);
    b.beta.resize(M, N + 1);
    b.norm.resize(N + 1);
    b.overlap.resize(N + 1);

    const std::vector<Propagator> P = [&] {
        auto p = detail::half_step_propagators(fwd.g, h);
        for (auto& q : p) q = q.adjoint();
        return p;
    }();

    Eigen::ArrayXcd slots = fwd.slots / root;
    auto slot = [&](long k) -> Complex& { return slots[k - k_lo]; };
    Eigen::ArrayXcd beta = Eigen::ArrayXcd::Zero(M);

    // Slots k <= n - M have not re-entered the medium: their backward value is the
    // forward final value over sqrt(P_T). prefix[i] = sum_{k <= k_lo + i - 1} h |fwd slot|^2.
    Eigen::ArrayXd prefix(fwd.slots.size() + 1);
    prefix[0] = 0.0;
    for (Eigen::Index i = 0; i < fwd.slots.size(); ++i) prefix[i + 1] = prefix[i] + h * std::norm(fwd.slots[i]);
    auto right_mass = [&](long n) {
        const long last = n - M;  // highest slot right of the medium
        return last < k_lo ? 0.0 : prefix[last - k_lo + 1];
    };

    Complex left_overlap = 0.0;
    double left_norm = 0.0;
    for (long n = N; n >= 0; --n) {
        if (n < N) {
            // Adjoint of step n -> n+1.
            for (long j = 0; j < M; ++j) P[std::size_t(j)].apply(slot(n + 1 - j), beta[j]);
            left_overlap += h * std::conj(slot(n + 1)) * fwd.input[n + 1 - k_lo];
            left_norm += h * std::norm(slot(n + 1));
            for (long j = 0; j < M; ++j) P[std::size_t(j)].apply(slot(n - j), beta[j]);
        }
        Complex medium = 0.0;
        double medium_norm = 0.0;
        for (long j = 0; j < M; ++j) {
            const Complex a = slot(n - j);
            b.alpha(j, n) = a;
            b.beta(j, n) = beta[j];
            medium += std::conj(a) * fwd.alpha(j, n) + std::conj(beta[j]) * fwd.beta(j, n);
            medium_norm += std::norm(a) + std::norm(beta[j]);
        }
        b.overlap[n] = left_overlap + h * medium + right_mass(n) / root;
        b.norm[n] = left_norm + h * medium_norm + right_mass(n) / p_t;
    }
    b.slots = slots;
    return b;
}

WeakTrace weak_trace(const FieldHistory& fwd, const FieldHistory& bwd, const WeakProbeConfig& probe) {
    if (fwd.direction != Direction::forward || bwd.direction != Direction::backward)
        throw InvalidParameter("weak trace needs a forward and a backward history");
    if (fwd.grid.h != bwd.grid.h || fwd.grid.cells != bwd.grid.cells || fwd.steps() != bwd.steps() ||
        fwd.grid.t_start != bwd.grid.t_start)
        throw InvalidParameter("forward and backward histories are on different grids");
    const double G = fwd.grid.gamma;
    const double h = fwd.grid.h;
    WeakTrace tr;
    tr.epsilon = probe.epsilon;
    tr.t = fwd.t / G;
    const Eigen::ArrayXcd dens = (bwd.beta.array().conjugate() * fwd.beta.array()).colwise().sum().transpose();
    // The phase is dimensionless, so only the time axis is rescaled.
    tr.phi = probe.epsilon * h * dens.real() / std::sqrt(bwd.p_t);
    return tr;
}

double tau_T_td(const WeakTrace& tr) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 1 < tr.t.size(); ++i) s += 0.5 * (tr.t[i + 1] - tr.t[i]) * (tr.phi[i] + tr.phi[i + 1]);
    return s / tr.epsilon;
}

double tau_avg_td(const FieldHistory& fwd) {
    if (fwd.direction != Direction::forward) throw InvalidParameter("tau_avg_td needs a forward history");
    return fwd.scattered[fwd.scattered.size() - 1] / fwd.grid.gamma;
}

ComDelays com_delays(const FieldHistory& fwd, double p_t, bool time_symmetric) {
    if (fwd.direction != Direction::forward) throw InvalidParameter("com_delays needs a forward history");
    if (!(p_t > 0.0)) throw InvalidParameter("com_delays needs P_T > 0");
    const double h = fwd.grid.h;
    double first = 0.0;
    for (Eigen::Index i = 0; i < fwd.slots.size(); ++i)
        first += h * std::norm(fwd.slots[i]) * fwd.slot_u(fwd.slot_min + long(i));
    ComDelays d;
    d.time_symmetric = time_symmetric;
    d.transmitted = (first / p_t - fwd.input_com) / fwd.grid.gamma;

    const std::size_t n = fwd.steps();
    double w0 = 0.0, w1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = trap_weight(i, n, h);
        const Eigen::ArrayXd b2 = fwd.beta.col(Eigen::Index(i)).array().abs2();
        w0 += w * b2.sum();
        w1 += w * (b2 * (fwd.t[Eigen::Index(i)] - fwd.z)).sum();
    }
    d.scattered = w0 > 0.0 ? (w1 / w0 - fwd.input_com) / fwd.grid.gamma : std::numeric_limits<double>::quiet_NaN();
    return d;
}

DelayReport analyze(const PulseSpec& pulse, const MediumProfile& medium, const GridOptions& opt) {
    const GridSpec grid = make_grid(pulse, medium, opt);
    const FieldHistory fwd = integrate_forward(pulse, medium, grid);
    DelayReport r;
    r.method = Method::timedomain;
    r.p_t = transmitted_probability(fwd);
    r.p_s = 1.0 - r.p_t;
    r.tau_0 = tau_avg_td(fwd);
    const FieldHistory bwd = integrate_backward(fwd, r.p_t);
    r.tau_T = tau_T_td(weak_trace(fwd, bwd));
    const double G = medium.gamma();
    r.tau_S = r.p_s > 0.0 ? 1.0 / G - r.p_t / r.p_s * r.tau_T : std::numeric_limits<double>::quiet_NaN();
    r.od_eff = effective_od(r.p_t);
    return r;
}

}  // namespace dwell::timedomain
