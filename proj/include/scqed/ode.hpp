#pragma once

// Adaptive embedded Runge-Kutta pair (Dormand-Prince 5(4)) on complex state
// vectors.  A fixed-step mode is kept for order-convergence checks.

#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Dense>

#include "scqed/errors.hpp"

namespace scqed {

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;        // 0: choose from the first derivative
    double h_fixed = 0.0;       // > 0: fixed-step mode, no error control
    long max_steps = 200'000'000;
};

// observer(t, y) is called at t0 and after every accepted step
template <typename Rhs, typename Observer>
inline void integrate_ode(const Rhs& rhs, Eigen::VectorXcd y, double t0, double t1,
                          const OdeOptions& opt, Observer&& observer) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    if (!(t1 > t0)) throw std::invalid_argument("integrate_ode: need t1 > t0");
    double t = t0;
    observer(t, y);
    Eigen::VectorXcd k1 = rhs(t, y);
    double h = opt.h_fixed > 0 ? opt.h_fixed : opt.h_init;
    if (h <= 0) {
        double d = k1.norm() / std::max(1.0, y.norm());
        h = std::min(0.01 * (t1 - t0), 0.1 / std::max(1e-8, d));
    }
    Eigen::VectorXcd k2, k3, k4, k5, k6, k7, ynew;
    for (long step = 0; step < opt.max_steps; ++step) {
        if (t >= t1) return;
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }
        if (h < 1e-14 * std::max(1.0, std::abs(t)) && !last)
            throw NumericalError("integrate_ode: step size underflow at t = " + std::to_string(t));

        k2 = rhs(t + c2 * h, y + h * (a21 * k1));
        k3 = rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = rhs(t + h, ynew);

        if (opt.h_fixed > 0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            observer(t, y);
            continue;
        }

        Eigen::VectorXcd errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double sc = opt.atol + opt.rtol * std::max(y.cwiseAbs().maxCoeff(),
                                                   ynew.cwiseAbs().maxCoeff());
        double err = errv.cwiseAbs().maxCoeff() / sc;
        if (err <= 1.0) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            observer(t, y);
        }
        double fac = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, fac));
    }
    throw NumericalError("integrate_ode: step budget exhausted at t = " + std::to_string(t));
}

}  // namespace scqed
