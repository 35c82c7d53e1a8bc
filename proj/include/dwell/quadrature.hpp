#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Core>

#include "dwell/errors.hpp"

namespace dwell {

struct QuadratureOptions {
    std::size_t initial_intervals = 1024;
    std::size_t max_intervals = std::size_t{1} << 20;
    double rel_tol = 1e-9;
    // false: evaluate once on the initial grid, no doubling and no convergence check.
    bool refine = true;
};

struct QuadratureResult {
    Eigen::ArrayXd value;     // one integral per integrand column
    std::size_t intervals;    // grid actually used
    double change;            // largest scaled change at the last doubling (NaN if not refined)
};

// Composite trapezoid rule for a vector-valued integrand on [a, b], doubling the
// grid (reusing previous nodes) until every component changes by less than
// rel_tol times max(|I_k|, int |f_k|). `f` maps an ArrayXd of nodes to an
// ArrayXXd with one row per node and one column per component.
template <class F>
QuadratureResult trapezoid(F&& f, double a, double b, const QuadratureOptions& opt) {
    if (!(b > a)) throw InvalidParameter("quadrature: empty interval");
    if (opt.initial_intervals < 2 || opt.initial_intervals % 2 != 0)
        throw InvalidParameter("quadrature: initial interval count must be even and >= 2");
    if (!(opt.rel_tol > 0.0)) throw InvalidParameter("quadrature: tolerance must be positive");

    std::size_t n = opt.initial_intervals;
    double h = (b - a) / double(n);
    const Eigen::ArrayXd nodes = Eigen::ArrayXd::LinSpaced(Eigen::Index(n + 1), a, b);
    const Eigen::ArrayXXd v0 = f(nodes);
    Eigen::ArrayXd sum = v0.colwise().sum().transpose() - 0.5 * (v0.row(0) + v0.row(Eigen::Index(n))).transpose();
    Eigen::ArrayXd asum = v0.abs().colwise().sum().transpose() -
                          0.5 * (v0.row(0).abs() + v0.row(Eigen::Index(n)).abs()).transpose();
    Eigen::ArrayXd est = h * sum;
    if (!opt.refine) return {est, n, std::nan("")};

    while (true) {
        if (2 * n > opt.max_intervals)
            throw NumericError("quadrature did not converge within " + std::to_string(opt.max_intervals) +
                               " intervals");
        const Eigen::ArrayXd mid =
            a + 0.5 * h + h * Eigen::ArrayXd::LinSpaced(Eigen::Index(n), 0.0, double(n - 1));
        const Eigen::ArrayXXd vm = f(mid);
        sum += vm.colwise().sum().transpose();
        asum += vm.abs().colwise().sum().transpose();
        n *= 2;
        h *= 0.5;
        const Eigen::ArrayXd next = h * sum;
        const Eigen::ArrayXd scale = next.abs().max(h * asum).max(1e-300);
        const double change = ((next - est).abs() / scale).maxCoeff();
        est = next;
        if (!std::isfinite(change)) throw NumericError("quadrature produced a non-finite value");
        if (change < opt.rel_tol) return {est, n, change};
    }
}

}  // namespace dwell
