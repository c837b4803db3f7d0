#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "memkin/errors.hpp"

namespace memkin {

struct OdeOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    std::size_t max_steps = 5'000'000;  ///< attempted steps (including rejections)
};

/// Adaptive explicit Runge-Kutta with the Dormand-Prince embedded 5(4) pair.
/// Advances y in place from t0 to t1. The right-hand side is called as
/// rhs(t, y, dydt) with dydt preallocated. Throws accuracy_error when the
/// tolerance cannot be met within the step budget.
template <class Rhs>
void integrate_adaptive(Rhs&& rhs, std::vector<double>& y, double t0, double t1,
                        const OdeOptions& opt = {}) {
    // Dormand & Prince (1980) coefficients; first-same-as-last.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // y5 - y4, the embedded error estimate.
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const std::size_t n = y.size();
    const double span = t1 - t0;
    if (span == 0.0) return;

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), yt(n), ynew(n);

    double t = t0;
    rhs(t, y, k1);

    // Initial step: scale of y over scale of dy/dt, conservatively clipped.
    double ny = 0, nf = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ny = std::max(ny, std::abs(y[i]));
        nf = std::max(nf, std::abs(k1[i]));
    }
    double h = (nf > 0) ? 0.01 * (ny + opt.abs_tol) / nf : std::abs(span) * 1e-3;
    h = std::copysign(std::min(h, std::abs(span)), span);

    bool k1_fresh = true;
    for (std::size_t step = 0; step < opt.max_steps; ++step) {
        if ((span > 0 && t >= t1) || (span < 0 && t <= t1)) return;
        if (std::abs(h) < 1e-14 * std::abs(span))
            throw accuracy_error("ODE step size underflow (system too stiff for explicit RK)");
        if ((span > 0 && t + h > t1) || (span < 0 && t + h < t1)) h = t1 - t;

        if (!k1_fresh) rhs(t, y, k1);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, yt, k2);
        for (std::size_t i = 0; i < n; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, yt, k3);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, yt, k4);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, yt, k5);
        for (std::size_t i = 0; i < n; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                a65 * k5[i]);
        rhs(t + h, yt, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h, ynew, k7);

        double err = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
            double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (e / scale) * (e / scale);
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            k1_fresh = true;
        } else {
            k1_fresh = true;  // k1 still matches (t, y); nothing changed
        }
        double factor = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(factor, 0.2, 5.0);
    }
    throw accuracy_error("ODE tolerance not achievable within the step budget");
}

}  // namespace memkin
