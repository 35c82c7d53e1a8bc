#pragma once

// Pieces shared by the time-domain integrator and the brute-force oracle.

#include <complex>
#include <vector>

#include "dwell/timedomain.hpp"

namespace dwell::timedomain::detail {

// exp(A t) for A = [[0, i g], [i g, -1/2]] (gamma = 1), stored row-major.
struct Propagator {
    Complex a, b, c, d;

    void apply(Complex& x, Complex& y) const {
        const Complex nx = a * x + b * y;
        y = c * x + d * y;
        x = nx;
    }
    Propagator adjoint() const { return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)}; }
};

Propagator reaction(double g, double t);

// Half-step propagators for every node of a history's grid.
std::vector<Propagator> half_step_propagators(const Eigen::ArrayXd& g, double h);

}  // namespace dwell::timedomain::detail
