// slowflow.hpp — First-order averaged slow flow of the driven Duffing
// oscillator: vector field, steady states via the response cubic, and linear
// stability.
//
// Quadrature convention: x(t) = u cos(w t) + v sin(w t) with the drive term
// -F cos(w t) x in the Hamiltonian. With A(X) = delta_tilde - K X^2,
//   du/dt = -A v - (gamma/2) u
//   dv/dt =  A u + f - (gamma/2) v,
// delta_tilde = (w^2 - w0^2)/(2w), K = 3 alpha/(8 m w), f = F/(2 m w).
// The lock-in quadratures of the exact trajectory converge to the stable
// fixed points of this flow, including signs.

#pragma once

#include <complex>
#include <vector>

#include "duffloq/params.hpp"

namespace duffloq::kb {

struct SlowFlowState {
    double u = 0.0;
    double v = 0.0;
    double amplitude() const;
};

struct SteadyState {
    SlowFlowState state;
    bool stable = false;
    std::complex<double> eigenvalues[2];
    double X() const { return state.amplitude(); }
};

// Coefficients of the generic quadrature flow above. The same cubic serves
// the averaged classical flow and the first-order rotating-frame response in
// either operator basis.
struct ResponseCoefficients {
    double delta_tilde = 0.0;
    double cubic = 0.0;  // K
    double drive = 0.0;  // f
    double gamma = 0.0;
};

ResponseCoefficients kb_coefficients(const SystemParams& params);

SlowFlowState slow_flow_rhs(const SlowFlowState& state, const SystemParams& params);

// All real fixed points, sorted by amplitude ascending, with stability from
// the analytic 2x2 Jacobian. The cubic in Y = X^2,
//   [(delta_tilde - K Y)^2 + (gamma/2)^2] Y = f^2,
// is solved through companion-matrix eigenvalues.
std::vector<SteadyState> response_steady_states(const ResponseCoefficients& coeffs);
std::vector<SteadyState> steady_states(const SystemParams& params);

// Jacobian of the flow at (u, v); rows (du/dt, dv/dt), columns (u, v).
void jacobian(const ResponseCoefficients& coeffs, const SlowFlowState& state, double out[2][2]);

// Requires the state to be a fixed point to 1e-8 residual.
SteadyState stability(const SlowFlowState& state, const SystemParams& params);

}  // namespace duffloq::kb
