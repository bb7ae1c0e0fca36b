// ode.hpp — Embedded Dormand-Prince 5(4) integrator with dense output.
// Templated over any Eigen dense state (real/complex vectors or matrices).

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>

namespace duffloq::ode {

struct NonConvergence : std::runtime_error {
    double t_fail;
    explicit NonConvergence(double t)
        : std::runtime_error("ode: step size underflow at t = " + std::to_string(t)),
          t_fail(t) {}
};

struct Options {
    double rtol = 1e-9;
    double atol = 1e-12;
    double hmax = std::numeric_limits<double>::infinity();
    std::int64_t max_steps = 500'000'000;
    bool dense = false;  // compute interpolation coefficients per step
};

namespace dp5 {
// Butcher tableau, error weights (b5 - b4), and dense-output weights.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;
}  // namespace dp5

// Quartic interpolant over one accepted step; valid for t in [t0, t0 + h].
template <class State>
struct DenseStep {
    double t0 = 0.0, h = 0.0;
    State r1, r2, r3, r4, r5;

    State eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
};

template <class State>
double error_norm(const State& err, const State& y0, const State& y1, const Options& opt) {
    const auto sc = (opt.atol + opt.rtol * y0.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).eval();
    const double s = (err.cwiseAbs().array() / sc).square().sum();
    return std::sqrt(s / static_cast<double>(err.size()));
}

// Integrates dy/dt = f(t, y) from t0 to t1. After every accepted step calls
// observer(step, t_new, y_new); step.h == 0 marks the initial state. Returns
// the final state. Throws NonConvergence on step-size underflow.
template <class State, class Rhs, class Observer>
State integrate(Rhs&& f, State y, double t0, double t1, const Options& opt, Observer&& observer) {
    using namespace dp5;
    if (!(t1 > t0)) throw std::invalid_argument("ode: t1 must exceed t0");

    double t = t0;
    State k1 = f(t, y);
    State k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1;
    State ynew = y, yerr = y;
    DenseStep<State> ds;
    ds.t0 = t0;
    ds.h = 0.0;
    ds.r1 = y;
    observer(ds, t, y);

    // Initial step size from the scaled derivative norms.
    const double span = t1 - t0;
    double h;
    {
        const auto sc = (opt.atol + opt.rtol * y.cwiseAbs().array()).eval();
        const double n = static_cast<double>(y.size());
        const double d0 = std::sqrt((y.cwiseAbs().array() / sc).square().sum() / n);
        const double d1 = std::sqrt((k1.cwiseAbs().array() / sc).square().sum() / n);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
        h = std::min({h, span, opt.hmax});
        if (!(h > 0.0)) h = 1e-6 * span;
    }

    const double safety = 0.9, facmin = 0.2, beta = 0.04;
    const double expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;
    double facmax = 10.0;
    std::int64_t nsteps = 0;

    bool last = false;
    while (!last) {
        if (++nsteps > opt.max_steps) throw NonConvergence(t);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw NonConvergence(t);
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        k2 = f(t + c2 * h, y + (h * a21) * k1);
        k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
        k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f(t + h, ynew);  // FSAL
        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double err = error_norm(yerr, y, ynew, opt);
        if (err <= 1.0) {
            if (opt.dense) {
                ds.t0 = t;
                ds.h = h;
                ds.r1 = y;
                ds.r2 = ynew - y;
                ds.r3 = h * k1 - ds.r2;
                ds.r4 = ds.r2 - h * k7 - ds.r3;
                ds.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
            } else {
                ds.t0 = t;
                ds.h = h;
            }
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            observer(ds, t, y);

            const double fac11 = std::pow(std::max(err, 1e-16), expo1);
            double fac = fac11 / std::pow(facold, beta);
            fac = std::max(facmin, std::min(facmax, safety / fac));
            facold = std::max(err, 1e-4);
            facmax = 10.0;
            if (!last) h = std::min({h * fac, opt.hmax, t1 - t});
        } else {
            last = false;
            const double fac11 = std::pow(err, expo1);
            h *= std::max(facmin, safety / fac11);
            facmax = 1.0;
        }
    }
    return y;
}

template <class State, class Rhs>
State integrate(Rhs&& f, State y, double t0, double t1, const Options& opt) {
    return integrate(
        std::forward<Rhs>(f), std::move(y), t0, t1, opt,
        [](const DenseStep<State>&, double, const State&) {});
}

}  // namespace duffloq::ode
