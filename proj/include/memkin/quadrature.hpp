#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>

#include "memkin/errors.hpp"

namespace memkin {

/// Adaptive Gauss-Kronrod (15-point) integration over [a, b].
/// Throws accuracy_error when the estimated relative error exceeds `rel_tol`
/// by a wide margin (the integrand resisted refinement).
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10, int max_depth = 15) {
    double err = 0, l1 = 0;
    double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, max_depth, rel_tol, &err, &l1);
    if (l1 > 0 && err > 1e3 * rel_tol * l1 && err > 1e-14 * l1)
        throw accuracy_error("quadrature did not converge to the requested tolerance");
    return value;
}

/// Integral of f over [a, inf). The upper limit is truncated where the
/// integrand has decayed below 1e-14 of its peak; `decay_scale` sets the
/// probing stride (roughly the slowest e-folding time of the integrand).
template <class F>
double integrate_to_inf(F&& f, double a, double decay_scale, double rel_tol = 1e-10) {
    if (!(decay_scale > 0) || !std::isfinite(decay_scale))
        throw accuracy_error("integrate_to_inf: invalid decay scale");

    double peak = 0;
    for (int i = 0; i < 400; ++i) {
        double x = a + decay_scale * i * 0.25;
        peak = std::max(peak, std::abs(f(x)));
    }
    if (peak == 0) return 0.0;
    // A single probe can sit on an isolated zero of the integrand, so each
    // rung samples three incommensurate offsets.
    auto rung = [&](double x) {
        return std::max({std::abs(f(x)), std::abs(f(x + 0.31 * decay_scale)),
                         std::abs(f(x + 0.73 * decay_scale))});
    };
    double upper = a + decay_scale;
    while (rung(upper) > 1e-14 * peak && upper - a < 1e6 * decay_scale)
        upper += decay_scale;
    // Clear the tail by a few more scales (the probe sees points, not the envelope).
    upper += 5 * decay_scale;
    return integrate(f, a, upper, rel_tol);
}

}  // namespace memkin
