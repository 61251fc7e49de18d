#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "weylstrip/errors.hpp"
#include "weylstrip/matrix.hpp"

namespace weylstrip {

struct OdeOptions {
    double tol = 1e-10;       // local error per step, max-norm, quasi-relative
    double h_init = 0.0;      // 0 = choose automatically
    long max_steps = 5'000'000;
};

struct OdeStats {
    double error_estimate = 0.0;  // accumulated accepted local errors
    long steps = 0;
    long rejected = 0;
};

namespace detail {
template <class State>
double max_abs(const State& y) {
    if (y.size() == 0) return 0.0;
    return y.cwiseAbs().maxCoeff();
}
}  // namespace detail

/// Adaptive Dormand-Prince 5(4) for y' = rhs(x, y) on Eigen-like states.
/// Accepted steps keep the local error below opt.tol scaled by the state
/// magnitude; stalls and step-count blowups raise StepFailure.
template <class State, class Rhs>
State integrate_ode(Rhs&& rhs, State y, double x0, double x1,
                    const OdeOptions& opt = {}, OdeStats* stats = nullptr) {
    const double span = x1 - x0;
    if (span == 0.0) return y;
    const double dir = span > 0 ? 1.0 : -1.0;

    State k1 = rhs(x0, y);
    double h = opt.h_init;
    if (h == 0.0) {
        const double d0 = detail::max_abs(y) + 1.0;
        const double d1 = detail::max_abs(k1);
        h = 0.01 * d0 / (d1 + 1e-30);
    }
    h = dir * std::min(std::abs(h), std::abs(span));
    const double h_floor = std::max(std::abs(span), 1.0) * 1e-14;

    double x = x0;
    OdeStats local;
    while (dir * (x1 - x) > 0.0) {
        if (local.steps + local.rejected > opt.max_steps)
            throw StepFailure("integrate_ode: step budget exhausted");
        if (dir * (x + h) > dir * x1) h = x1 - x;

        const State k2 = rhs(x + h / 5.0, State(y + (h / 5.0) * k1));
        const State k3 = rhs(x + 3.0 * h / 10.0,
                             State(y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2)));
        const State k4 =
            rhs(x + 4.0 * h / 5.0,
                State(y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 +
                               32.0 / 9.0 * k3)));
        const State k5 =
            rhs(x + 8.0 * h / 9.0,
                State(y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                               64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4)));
        const State k6 =
            rhs(x + h,
                State(y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 +
                               46732.0 / 5247.0 * k3 + 49.0 / 176.0 * k4 -
                               5103.0 / 18656.0 * k5)));
        const State ynew =
            y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                     125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                     11.0 / 84.0 * k6);
        const State k7 = rhs(x + h, ynew);
        const State err_vec =
            h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 +
                 71.0 / 1920.0 * k4 - 17253.0 / 339200.0 * k5 +
                 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7);

        const double ymag =
            std::max({1.0, detail::max_abs(y), detail::max_abs(ynew)});
        const double scale = opt.tol * ymag;
        double errnorm = detail::max_abs(err_vec) / scale;
        const bool finite = std::isfinite(errnorm) &&
                            std::isfinite(detail::max_abs(ynew));
        if (!finite) errnorm = 10.0;

        if (errnorm <= 1.0) {
            x += h;
            y = ynew;
            k1 = k7;  // FSAL
            local.steps++;
            local.error_estimate += errnorm * scale;
        } else {
            local.rejected++;
        }

        const double grow =
            errnorm > 0.0 ? 0.9 * std::pow(errnorm, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        if (std::abs(h) < h_floor && dir * (x1 - x) > 0.0)
            throw StepFailure("integrate_ode: step size underflow");
    }

    if (stats) {
        stats->error_estimate += local.error_estimate;
        stats->steps += local.steps;
        stats->rejected += local.rejected;
    }
    return y;
}

}  // namespace weylstrip
