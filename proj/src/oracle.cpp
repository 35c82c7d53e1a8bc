#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "dwell/parallel.hpp"
#include "dwell/timedomain.hpp"
#include "td_internal.hpp"

namespace dwell::timedomain {

namespace {

struct Plan {
    long first = 0;                    // earliest step with any excitation
    double threshold = 0.0;            // |beta(Z, T)|^2 below this is skipped
    std::vector<long> detection_steps; // steps T with at least one detection cell
};

Plan make_plan(const FieldHistory& fwd, const OracleOptions& opt) {
    Plan p;
    const Eigen::ArrayXd b2 = fwd.beta.array().abs2().colwise().maxCoeff().transpose();
    const double peak = b2.maxCoeff();
    p.threshold = opt.skip_below * peak;
    p.first = long(b2.size());
    for (Eigen::Index n = 0; n < b2.size(); ++n) {
        if (b2[n] > 0.0 && b2[n] > 1e-30 * peak) {
            p.first = std::min(p.first, long(n));
        }
        if (peak > 0.0 && b2[n] >= p.threshold) p.detection_steps.push_back(long(n));
    }
    return p;
}

}  // namespace

double oracle_cost(const FieldHistory& fwd, const OracleOptions& opt) {
    const Plan p = make_plan(fwd, opt);
    const double M = double(fwd.nodes());
    double cost = 0.0;
    for (long T : p.detection_steps) cost += double(std::max(0L, T - p.first + 1)) * M * (M + 1) / 2.0;
    return 2.0 * cost;  // two half reactions per step
}

double tau_S_oracle(const FieldHistory& fwd, const OracleOptions& opt) {
    if (fwd.direction != Direction::forward) throw InvalidParameter("the oracle needs a forward history");
    if (fwd.nodes() < 50) throw InvalidParameter("the oracle needs at least 50 medium cells");
    const double cost = oracle_cost(fwd, opt);
    if (cost > opt.max_node_steps) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "oracle needs ~%.3g node updates, budget is %.3g", cost, opt.max_node_steps);
        throw OracleBudget(buf);
    }
    const Plan plan = make_plan(fwd, opt);
    const double h = fwd.grid.h;
    const long M = long(fwd.nodes());
    const std::vector<detail::Propagator> P = [&] {
        auto p = detail::half_step_propagators(fwd.g, h);
        for (auto& q : p) q = q.adjoint();
        return p;
    }();

    // contribution[i]: sum over Z of h conj(beta(Z, T)) * inner(Z, T) for T = detection_steps[i].
    std::vector<Complex> contribution(plan.detection_steps.size());
    parallel_for(
        plan.detection_steps.size(),
        [&](std::size_t i) {
            const long T = plan.detection_steps[i];
            const long span = T - plan.first;
            // Backward alpha on slots T - M + 1 .. T (offset by base); beta on nodes.
            const long base = plan.first - M;
            std::vector<Complex> slots(std::size_t(T - base + 1));
            std::vector<Complex> beta(static_cast<std::size_t>(M));
            Complex total = 0.0;
            for (long Z = 0; Z < M; ++Z) {
                const Complex bz = fwd.beta(Z, T);
                if (std::norm(bz) < plan.threshold) continue;
                std::fill(slots.begin(), slots.end(), Complex(0.0));
                std::fill(beta.begin(), beta.end(), Complex(0.0));
                beta[std::size_t(Z)] = 1.0 / h;
                // Detection step T carries half the trapezoid weight.
                Complex inner = 0.5 * h * h * fwd.beta(Z, T) * std::conj(beta[std::size_t(Z)]);
                for (long n = T - 1; n >= plan.first && n >= T - span; --n) {
                    // Support of the adjoint solution: nodes lo .. Z.
                    const long lo = std::max(0L, Z - (T - n));
                    for (long j = lo; j <= Z; ++j) P[std::size_t(j)].apply(slots[std::size_t(n + 1 - j - base)], beta[std::size_t(j)]);
                    for (long j = lo; j <= Z; ++j) P[std::size_t(j)].apply(slots[std::size_t(n - j - base)], beta[std::size_t(j)]);
                    Complex s = 0.0;
                    for (long j = lo; j <= Z; ++j) s += fwd.beta(j, n) * std::conj(beta[std::size_t(j)]);
                    inner += h * h * s;
                }
                total += h * std::conj(bz) * inner;
            }
            contribution[i] = total;
        },
        opt.threads);

    // Fixed-order reduction keeps the result independent of the thread count.
    const std::size_t steps = fwd.steps();
    Complex sum = 0.0;
    for (std::size_t i = 0; i < contribution.size(); ++i) {
        const std::size_t T = std::size_t(plan.detection_steps[i]);
        const double w = (T == 0 || T + 1 == steps) ? 0.5 * h : h;
        sum += w * contribution[i];
    }
    const double p_s = fwd.scattered[fwd.scattered.size() - 1];  // gamma * tau_0 in internal units
    if (!(p_s > 0.0)) throw UndefinedConditional("oracle tau_S is undefined when nothing is scattered");
    return sum.real() / p_s / fwd.grid.gamma;
}

}  // namespace dwell::timedomain
