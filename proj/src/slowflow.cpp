#include "duffloq/slowflow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace duffloq::kb {

double SlowFlowState::amplitude() const { return std::hypot(u, v); }

ResponseCoefficients kb_coefficients(const SystemParams& p) {
    p.validate();
    ResponseCoefficients c;
    c.delta_tilde = (p.omega - p.omega0) * (p.omega + p.omega0) / (2.0 * p.omega);
    c.cubic = 3.0 * p.alpha / (8.0 * p.m * p.omega);
    c.drive = p.F / (2.0 * p.m * p.omega);
    c.gamma = p.gamma;
    return c;
}

namespace {
SlowFlowState flow_rhs(const ResponseCoefficients& c, const SlowFlowState& s) {
    const double x2 = s.u * s.u + s.v * s.v;
    const double a = c.delta_tilde - c.cubic * x2;
    return {-a * s.v - 0.5 * c.gamma * s.u, a * s.u + c.drive - 0.5 * c.gamma * s.v};
}

// Real nonnegative roots of c3 Y^3 + c2 Y^2 + c1 Y + c0 = 0.
std::vector<double> real_nonneg_roots(double c3, double c2, double c1, double c0) {
    std::vector<double> roots;
    const double scale = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
    if (scale == 0.0) return roots;

    if (std::abs(c3) > 1e-14 * scale) {
        Eigen::Matrix3d comp = Eigen::Matrix3d::Zero();
        comp(1, 0) = 1.0;
        comp(2, 1) = 1.0;
        comp(0, 2) = -c0 / c3;
        comp(1, 2) = -c1 / c3;
        comp(2, 2) = -c2 / c3;
        Eigen::EigenSolver<Eigen::Matrix3d> es(comp);
        for (int i = 0; i < 3; ++i) {
            const std::complex<double> r = es.eigenvalues()(i);
            const double mag = std::max(1.0, std::abs(r));
            if (std::abs(r.imag()) <= 1e-9 * mag && r.real() >= -1e-12 * mag)
                roots.push_back(std::max(0.0, r.real()));
        }
    } else if (std::abs(c2) > 1e-14 * scale) {
        const double disc = c1 * c1 - 4.0 * c2 * c0;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (double r : {(-c1 + sq) / (2.0 * c2), (-c1 - sq) / (2.0 * c2)})
                if (r >= -1e-12) roots.push_back(std::max(0.0, r));
        }
    } else if (std::abs(c1) > 1e-300) {
        const double r = -c0 / c1;
        if (r >= -1e-12) roots.push_back(std::max(0.0, r));
    } else {
        throw std::invalid_argument(
            "steady_states: degenerate response (resonant undamped linear drive)");
    }
    return roots;
}
}  // namespace

SlowFlowState slow_flow_rhs(const SlowFlowState& state, const SystemParams& params) {
    if (!std::isfinite(state.u) || !std::isfinite(state.v))
        throw std::invalid_argument("slow_flow_rhs: non-finite state");
    return flow_rhs(kb_coefficients(params), state);
}

void jacobian(const ResponseCoefficients& c, const SlowFlowState& s, double out[2][2]) {
    const double k = c.cubic;
    out[0][0] = 2.0 * k * s.u * s.v - 0.5 * c.gamma;
    out[0][1] = -c.delta_tilde + k * (s.u * s.u + 3.0 * s.v * s.v);
    out[1][0] = c.delta_tilde - k * (3.0 * s.u * s.u + s.v * s.v);
    out[1][1] = -2.0 * k * s.u * s.v - 0.5 * c.gamma;
}

namespace {
SteadyState classify(const ResponseCoefficients& c, const SlowFlowState& s) {
    double j[2][2];
    jacobian(c, s, j);
    const double tr = j[0][0] + j[1][1];
    const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    const std::complex<double> disc =
        std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
    SteadyState st;
    st.state = s;
    st.eigenvalues[0] = 0.5 * (tr + disc);
    st.eigenvalues[1] = 0.5 * (tr - disc);
    st.stable = st.eigenvalues[0].real() < -1e-10 && st.eigenvalues[1].real() < -1e-10;
    return st;
}
}  // namespace

std::vector<SteadyState> response_steady_states(const ResponseCoefficients& c) {
    const double k = c.cubic, dt = c.delta_tilde, f = c.drive, g = c.gamma;

    const std::vector<double> ys =
        real_nonneg_roots(k * k, -2.0 * dt * k, dt * dt + 0.25 * g * g, -f * f);
    if (ys.empty())
        throw std::runtime_error("steady_states: response cubic produced no real root");

    std::vector<SteadyState> states;
    for (double y : ys) {
        const double a = dt - k * y;
        const double den = g * g + 4.0 * a * a;
        SlowFlowState s;
        if (den > 1e-300) {
            s.u = -4.0 * a * f / den;
            s.v = 2.0 * g * f / den;
        } else {
            // gamma = 0 and A = 0: undriven frequency-locked circle; pick a
            // representative point.
            s.u = std::sqrt(std::max(0.0, y));
            s.v = 0.0;
        }

        const SlowFlowState r = flow_rhs(c, s);
        const double resid = std::hypot(r.u, r.v);
        if (resid > 1e-10 * std::max(1.0, s.amplitude())) continue;

        bool dup = false;
        for (const auto& prev : states)
            if (std::abs(prev.state.u - s.u) <= 1e-10 * std::max(1.0, std::abs(s.u)) &&
                std::abs(prev.state.v - s.v) <= 1e-10 * std::max(1.0, std::abs(s.v)))
                dup = true;
        if (dup) continue;

        states.push_back(classify(c, s));
    }
    if (states.empty())
        throw std::runtime_error("steady_states: all cubic roots failed the residual check");
    std::sort(states.begin(), states.end(),
              [](const SteadyState& a, const SteadyState& b) { return a.X() < b.X(); });
    return states;
}

std::vector<SteadyState> steady_states(const SystemParams& params) {
    return response_steady_states(kb_coefficients(params));
}

SteadyState stability(const SlowFlowState& state, const SystemParams& params) {
    const ResponseCoefficients c = kb_coefficients(params);
    const SlowFlowState r = flow_rhs(c, state);
    if (std::hypot(r.u, r.v) > 1e-8 * std::max(1.0, state.amplitude()))
        throw std::invalid_argument("stability: state is not a fixed point to 1e-8 residual");
    return classify(c, state);
}

}  // namespace duffloq::kb
