// classical.hpp — Exact lab-frame time evolution of the driven Duffing
// oscillator (the ground-truth oracle), lock-in demodulation at the drive
// frequency, hysteretic frequency sweeps, and periodogram estimation.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "duffloq/params.hpp"

namespace duffloq::classical {

struct Trajectory {
    Eigen::VectorXd t;  // strictly increasing, uniform
    Eigen::VectorXd x;
    Eigen::VectorXd p;

    double dt() const { return t(1) - t(0); }
    void validate() const;
};

struct LockInResult {
    double u = 0.0;  // cosine quadrature
    double v = 0.0;  // sine quadrature
    double X = 0.0;  // sqrt(u^2 + v^2)
};

enum class WindowKind { Rectangular, Hann };

struct Spectrum {
    Eigen::VectorXd omega;  // nonnegative, uniform grid
    Eigen::VectorXd psd;    // one-sided; peak bin of a tone A carries A^2/2 * span
};

// dx/dt = p/m; dp/dt = -m w0^2 x - alpha x^3 - gamma p + F cos(w t)
Eigen::Vector2d duffing_rhs(const Eigen::Vector2d& state, double t, const SystemParams& params);

// Undriven energy p^2/2m + m w0^2 x^2/2 + alpha x^4/4 (conserved for F = gamma = 0).
double energy(const SystemParams& params, double x, double p);

// Adaptive DP5(4) run resampled on a uniform grid commensurate with the drive
// period: samples_per_period integer samples per 2 pi / omega, >= 32.
// tol is the per-step relative tolerance, valid range (1e-14, 1e-3).
Trajectory integrate(const Eigen::Vector2d& initial, double t0, double t1,
                     const SystemParams& params, double tol, int samples_per_period = 64);

// Endpoint-only propagation (used for settling between sweep points).
Eigen::Vector2d evolve_state(const Eigen::Vector2d& initial, double t0, double t1,
                             const SystemParams& params, double tol);

// Quadratures over the last n_periods full drive periods of the trajectory:
//   u = (2/Tw) int x cos(w t) dt,  v = (2/Tw) int x sin(w t) dt,
// trapezoidal on the uniform grid. n_periods >= 4.
LockInResult lockin_amplitude(const Trajectory& traj, double omega, int n_periods);

enum class SweepDirection { Up, Down };

struct SweepPoint {
    double delta = 0.0;  // omega - omega0
    LockInResult lockin;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    std::optional<std::size_t> failed_index;  // set when a grid point did not converge
};

struct SweepOptions {
    SweepDirection direction = SweepDirection::Down;
    int settle_periods = 0;     // raised to ceil(5/(gamma T)) when gamma > 0
    int measure_periods = 64;
    double tol = 1e-9;
    int samples_per_period = 64;
};

// Stationary response along a detuning grid with state continuation: each
// point starts from the previous point's final phase-space state. The grid
// must be monotone in the sweep direction. Non-convergence at a point
// returns the partial result with the failing index set.
SweepResult sweep_response(const SystemParams& params, const std::vector<double>& delta_grid,
                           const SweepOptions& opts);

// Single-window one-sided periodogram of x(t). With a rectangular window over
// an integer number of drive periods the bin at the tone frequency carries
// A^2/2 * span for a tone of amplitude A; summing psd * (bin spacing / 2 pi)
// recovers the mean square of the windowed signal.
Spectrum periodogram(const Trajectory& traj, WindowKind window = WindowKind::Rectangular);

// Closed driven harmonic oscillator (alpha = gamma = 0, omega != omega0):
//   x(t) = A_omega cos(w t) + C cos(w0 t) + S sin(w0 t)
struct DrivenHOTones {
    double A_omega = 0.0;  // F/(m (w0^2 - w^2))
    double C = 0.0;        // x0 - A_omega
    double S = 0.0;        // p0/(m w0)
    double omega = 0.0;
    double omega0 = 0.0;

    double eval(double t) const;
};

DrivenHOTones driven_ho_exact(const SystemParams& params, double x0, double p0);

}  // namespace duffloq::classical
