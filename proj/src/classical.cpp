#include "duffloq/classical.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "duffloq/ode.hpp"

namespace duffloq::classical {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_tol(double tol) {
    if (!(tol > 1e-14) || !(tol < 1e-3))
        throw std::invalid_argument("classical: tol must lie in (1e-14, 1e-3)");
}

ode::Options make_options(double tol) {
    // The per-step tolerance carries a safety divisor so that secular error
    // growth over ~10^3 periods stays an order below the requested tol.
    ode::Options opt;
    opt.rtol = tol / 32.0;
    opt.atol = 1e-3 * tol / 32.0;
    return opt;
}
}  // namespace

void Trajectory::validate() const {
    if (t.size() != x.size() || t.size() != p.size() || t.size() < 2)
        throw std::invalid_argument("Trajectory: t, x, p must share length >= 2");
    for (Eigen::Index i = 1; i < t.size(); ++i)
        if (!(t(i) > t(i - 1)))
            throw std::invalid_argument("Trajectory: times must be strictly increasing");
}

Eigen::Vector2d duffing_rhs(const Eigen::Vector2d& state, double t, const SystemParams& params) {
    const double x = state(0), p = state(1);
    Eigen::Vector2d d;
    d(0) = p / params.m;
    d(1) = -params.m * params.omega0 * params.omega0 * x - params.alpha * x * x * x -
           params.gamma * p + params.F * std::cos(params.omega * t);
    return d;
}

double energy(const SystemParams& params, double x, double p) {
    return p * p / (2.0 * params.m) +
           0.5 * params.m * params.omega0 * params.omega0 * x * x +
           0.25 * params.alpha * x * x * x * x;
}

Trajectory integrate(const Eigen::Vector2d& initial, double t0, double t1,
                     const SystemParams& params, double tol, int samples_per_period) {
    params.validate();
    check_tol(tol);
    if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must exceed t0");
    if (samples_per_period < 32)
        throw std::invalid_argument("integrate: need >= 32 samples per drive period");
    if (!initial.allFinite()) throw std::invalid_argument("integrate: non-finite initial state");

    const double dt = kTwoPi / params.omega / samples_per_period;
    const double span = t1 - t0;
    Eigen::Index n_grid = static_cast<Eigen::Index>(std::floor(span / dt + 1e-9)) + 1;

    Trajectory traj;
    traj.t.resize(n_grid);
    traj.x.resize(n_grid);
    traj.p.resize(n_grid);

    auto rhs = [&params](double t, const Eigen::Vector2d& y) {
        return duffing_rhs(y, t, params);
    };

    ode::Options opt = make_options(tol);
    opt.dense = true;
    opt.hmax = kTwoPi / params.omega;  // at least one step per period

    Eigen::Index next = 0;
    auto observer = [&](const ode::DenseStep<Eigen::Vector2d>& ds, double t_new,
                        const Eigen::Vector2d& y_new) {
        while (next < n_grid) {
            const double tg = t0 + next * dt;
            if (tg > t_new + 1e-12 * std::max(1.0, std::abs(t_new))) break;
            Eigen::Vector2d yg = (ds.h == 0.0 || tg >= t_new) ? y_new : ds.eval(tg);
            traj.t(next) = tg;
            traj.x(next) = yg(0);
            traj.p(next) = yg(1);
            ++next;
        }
    };

    ode::integrate(rhs, Eigen::Vector2d(initial), t0, t1, opt, observer);
    if (next != n_grid) throw std::runtime_error("integrate: grid sampling incomplete");
    return traj;
}

Eigen::Vector2d evolve_state(const Eigen::Vector2d& initial, double t0, double t1,
                             const SystemParams& params, double tol) {
    params.validate();
    check_tol(tol);
    auto rhs = [&params](double t, const Eigen::Vector2d& y) {
        return duffing_rhs(y, t, params);
    };
    ode::Options opt = make_options(tol);
    opt.hmax = kTwoPi / params.omega;
    return ode::integrate(rhs, Eigen::Vector2d(initial), t0, t1, opt);
}

LockInResult lockin_amplitude(const Trajectory& traj, double omega, int n_periods) {
    traj.validate();
    if (!(omega > 0.0)) throw std::invalid_argument("lockin: omega must be > 0");
    if (n_periods < 4) throw std::invalid_argument("lockin: need n_periods >= 4");

    const double dt = traj.dt();
    const double window = n_periods * kTwoPi / omega;
    const Eigen::Index n = traj.t.size();
    const double span = traj.t(n - 1) - traj.t(0);
    if (window > span * (1.0 + 1e-9))
        throw std::invalid_argument("lockin: window longer than trajectory");

    const auto steps = static_cast<Eigen::Index>(std::llround(window / dt));
    if (std::abs(steps * dt - window) > 1e-6 * window)
        throw std::invalid_argument("lockin: window not commensurate with the sample grid");
    const Eigen::Index i0 = n - 1 - steps;

    double su = 0.0, sv = 0.0;
    for (Eigen::Index i = i0; i < n; ++i) {
        const double w = (i == i0 || i == n - 1) ? 0.5 : 1.0;
        const double phase = omega * traj.t(i);
        su += w * traj.x(i) * std::cos(phase);
        sv += w * traj.x(i) * std::sin(phase);
    }
    LockInResult r;
    r.u = 2.0 / window * su * dt;
    r.v = 2.0 / window * sv * dt;
    r.X = std::hypot(r.u, r.v);
    return r;
}

SweepResult sweep_response(const SystemParams& base, const std::vector<double>& delta_grid,
                           const SweepOptions& opts) {
    base.validate();
    if (delta_grid.size() < 1) throw std::invalid_argument("sweep: empty grid");
    for (std::size_t i = 1; i < delta_grid.size(); ++i) {
        const bool ok = opts.direction == SweepDirection::Up
                            ? delta_grid[i] > delta_grid[i - 1]
                            : delta_grid[i] < delta_grid[i - 1];
        if (!ok) throw std::invalid_argument("sweep: grid not monotone in the sweep direction");
    }
    if (opts.measure_periods < 4)
        throw std::invalid_argument("sweep: need measure_periods >= 4");

    SweepResult result;
    Eigen::Vector2d state = Eigen::Vector2d::Zero();
    double t = 0.0;

    for (std::size_t i = 0; i < delta_grid.size(); ++i) {
        SystemParams p = base;
        p.omega = base.omega0 + delta_grid[i];
        p.validate();
        const double period = kTwoPi / p.omega;

        int settle = opts.settle_periods;
        if (p.gamma > 0.0) {
            const int floor_periods =
                static_cast<int>(std::ceil(5.0 / (p.gamma * period)));
            settle = std::max(settle, floor_periods);
        }

        try {
            if (settle > 0) state = evolve_state(state, t, t + settle * period, p, opts.tol);
            t += settle * period;
            Trajectory traj = integrate(state, t, t + opts.measure_periods * period, p, opts.tol,
                                        opts.samples_per_period);
            t += opts.measure_periods * period;
            state(0) = traj.x(traj.t.size() - 1);
            state(1) = traj.p(traj.t.size() - 1);
            result.points.push_back({delta_grid[i],
                                     lockin_amplitude(traj, p.omega, opts.measure_periods)});
        } catch (const ode::NonConvergence&) {
            result.failed_index = i;
            return result;
        }
    }
    return result;
}

Spectrum periodogram(const Trajectory& traj, WindowKind window) {
    traj.validate();
    const Eigen::Index n = traj.t.size();
    const double dt = traj.dt();
    for (Eigen::Index i = 1; i < n; ++i)
        if (std::abs(traj.t(i) - traj.t(i - 1) - dt) > 1e-9 * dt)
            throw std::invalid_argument("periodogram: non-uniform sample grid");

    const Eigen::Index m = n - 1;  // the final sample duplicates the periodic endpoint
    if (m < 1024) throw std::invalid_argument("periodogram: need >= 2^10 samples");
    const double span = m * dt;

    Eigen::VectorXd w(m);
    if (window == WindowKind::Rectangular) {
        w.setOnes();
    } else {
        for (Eigen::Index i = 0; i < m; ++i)
            w(i) = 0.5 * (1.0 - std::cos(kTwoPi * i / static_cast<double>(m)));
    }
    const double power_norm = w.squaredNorm() / static_cast<double>(m);

    const Eigen::Index n_bins = m / 2 + 1;
    Spectrum spec;
    spec.omega.resize(n_bins);
    spec.psd.resize(n_bins);

    for (Eigen::Index j = 0; j < n_bins; ++j) {
        const double dphi = -kTwoPi * static_cast<double>(j) / static_cast<double>(m);
        const std::complex<double> rot = std::polar(1.0, dphi);
        std::complex<double> phase(1.0, 0.0);
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index i = 0; i < m; ++i) {
            acc += w(i) * traj.x(i) * phase;
            phase *= rot;
        }
        acc *= dt;
        const bool one_sided_double = j != 0 && !(m % 2 == 0 && j == m / 2);
        spec.omega(j) = kTwoPi * static_cast<double>(j) / span;
        spec.psd(j) = (one_sided_double ? 2.0 : 1.0) * std::norm(acc) / (span * power_norm);
    }
    return spec;
}

double DrivenHOTones::eval(double t) const {
    return A_omega * std::cos(omega * t) + C * std::cos(omega0 * t) + S * std::sin(omega0 * t);
}

DrivenHOTones driven_ho_exact(const SystemParams& params, double x0, double p0) {
    params.validate();
    if (params.alpha != 0.0 || params.gamma != 0.0)
        throw std::invalid_argument("driven_ho_exact: requires alpha = 0 and gamma = 0");
    if (params.omega == params.omega0)
        throw std::invalid_argument("driven_ho_exact: resonant drive has secular growth");

    DrivenHOTones tones;
    tones.omega = params.omega;
    tones.omega0 = params.omega0;
    tones.A_omega = params.F /
                    (params.m * (params.omega0 * params.omega0 - params.omega * params.omega));
    tones.C = x0 - tones.A_omega;
    tones.S = p0 / (params.m * params.omega0);
    return tones;
}

}  // namespace duffloq::classical
