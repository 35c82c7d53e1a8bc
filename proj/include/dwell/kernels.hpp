#pragma once

#include <cmath>
#include <complex>
#include <concepts>

#include <Eigen/Core>

// Closed-form line-shape kernels in units gamma = c = 1.
// Each has a scalar overload and an Eigen overload taking any array
// expression; the array overloads return evaluated arrays.

namespace dwell::kernels {

template <class D>
using Plain = typename Eigen::ArrayBase<D>::PlainObject;

// [1 + (2w)^2]^-1
template <std::floating_point T>
T lorentzian(T w) {
    return T(1) / (T(1) + T(4) * w * w);
}
template <class D>
Plain<D> lorentzian(const Eigen::ArrayBase<D>& w) {
    return (1 + 4 * w.square()).inverse();
}

// Transmission group delay -od0 (1 - 4w^2) L(w)^2, relative to free flight.
template <std::floating_point T>
T group_delay(T w, T od0) {
    const T l = lorentzian(w);
    return -od0 * (T(1) - T(4) * w * w) * l * l;
}
template <class D>
Plain<D> group_delay(const Eigen::ArrayBase<D>& w, typename D::Scalar od0) {
    const Plain<D> l = lorentzian(w);
    return -od0 * (1 - 4 * w.square()) * l.square();
}

// Same delay written as Re[(od0/4) / (w^2 - 1/4 - i w)], the form that comes
// straight out of the z-integrated backward/forward field overlap.
template <std::floating_point T>
T group_delay_resolvent(T w, T od0) {
    using C = std::complex<T>;
    return std::real(C(od0 / T(4)) / C(w * w - T(0.25), -w));
}

// Elastic-scattering phase delay 2 L(w).
template <std::floating_point T>
T wigner_delay(T w) {
    return T(2) * lorentzian(w);
}
template <class D>
Plain<D> wigner_delay(const Eigen::ArrayBase<D>& w) {
    return 2 * lorentzian(w);
}

// x / (e^x - 1), equal to 1 at x = 0.
template <std::floating_point T>
T bernoulli_ratio(T x) {
    return x == T(0) ? T(1) : x / std::expm1(x);
}

// 1 - e^{-x}(1 + x), accurate for small x.
template <std::floating_point T>
T first_moment_deficit(T x) {
    if (x < T(0.1)) {
        // sum_{k>=2} (-1)^k (k-1) x^k / k!
        T term = x * x / T(2);
        T sum = term;
        for (int k = 3; k < 30; ++k) {
            term *= -x / T(k);
            const T add = term * T(k - 1);
            sum += add;
            if (std::abs(add) < T(1e-18) * std::abs(sum)) break;
        }
        return sum;
    }
    return -std::expm1(-x) - x * std::exp(-x);
}

// Narrow-band scattered-conditioned excitation time from the sum rule:
// 1 - [e^{-x}/(1 - e^{-x})] t_g with x = od0 L(w).
template <std::floating_point T>
T scattered_time(T w, T od0) {
    const T l = lorentzian(w);
    return T(1) + (T(1) - T(4) * w * w) * l * bernoulli_ratio(od0 * l);
}

// Narrow-band scattered-pulse delay: Wigner delay plus the group delay averaged
// over optical depths 0..od0 with weight e^{-eta L(w)}, integrals done in closed form.
template <std::floating_point T>
T scattered_delay(T w, T od0) {
    const T l = lorentzian(w);
    const T x = od0 * l;
    const T avg = x == T(0) ? T(0) : first_moment_deficit(x) / -std::expm1(-x);
    return wigner_delay(w) - (T(1) - T(4) * w * w) * l * avg;
}

}  // namespace dwell::kernels
