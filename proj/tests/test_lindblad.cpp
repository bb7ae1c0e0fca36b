#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "duffloq/lindblad.hpp"
#include "duffloq/meanfield.hpp"

using namespace duffloq;
namespace lb = duffloq::lindblad;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace {
Eigen::VectorXcd vec_of(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / double(n - 1);
    return out;
}

SystemParams quantum_params(double u_a, double f_a_over_ua, double delta_a) {
    SystemParams p;
    p.alpha = 4.0 * u_a / 3.0;
    p.omega = p.omega0 + delta_a;
    p.F = 2.0 * std::sqrt(2.0) * f_a_over_ua * u_a;
    return p;
}
}  // namespace

TEST_CASE("pure decay has the vacuum as unique steady state") {
    const Eigen::Index n = 10;
    const auto l_op = lb::liouvillian(Eigen::MatrixXcd::Zero(n, n), 0.7, 1.0);

    // trace preservation: vec(identity) is a left null vector
    Eigen::VectorXcd tr_row = vec_of(Eigen::MatrixXcd::Identity(n, n));
    CHECK((tr_row.adjoint() * l_op).cwiseAbs().maxCoeff() < 1e-12);

    const auto ss = lb::steady_state_direct(l_op);
    CHECK(!ss.degenerate());
    CHECK(ss.residual < 1e-10);
    CHECK(std::abs(ss.rho().data(0, 0).real() - 1.0) < 1e-12);
    CHECK(ss.rho().data.cwiseAbs().sum() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("liouvillian rejects a non-Hermitian Hamiltonian") {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
    h(0, 1) = 1.0;  // no conjugate partner
    CHECK_THROWS_AS(lb::liouvillian(h, 0.1, 1.0), std::invalid_argument);
}

TEST_CASE("single-photon decay follows the exponential law") {
    const Eigen::Index n = 6;
    const double kappa = 1.0;
    const auto l_op = lb::liouvillian(Eigen::MatrixXcd::Zero(n, n), kappa, 1.0);
    const auto rho0 = fock::fock_state(n, 1);

    std::vector<double> ts = linspace(0.0, 8.0, 65);
    const auto res = lb::evolve(rho0, l_op, ts);
    CHECK(res.max_trace_drift < 1e-8);
    CHECK(res.max_hermiticity_defect < 1e-9);
    CHECK(res.min_eigenvalue > -1e-6);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double n_mean =
            fock::expectation(res.states[k], fock::number(n)).real();
        CHECK(n_mean == doctest::Approx(std::exp(-ts[k])).epsilon(1e-8));
    }
}

TEST_CASE("number-conserving Hamiltonian leaves the decay law untouched") {
    const Eigen::Index n = 6;
    const double w0 = 1.0, kappa = 0.35;
    const auto l_op =
        lb::liouvillian(Eigen::MatrixXcd((w0 * fock::number(n))), kappa, 1.0);
    const auto rho0 = fock::fock_state(n, 2);
    std::vector<double> ts = linspace(0.0, 6.0, 49);
    const auto res = lb::evolve(rho0, l_op, ts);
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double n_mean = fock::expectation(res.states[k], fock::number(n)).real();
        CHECK(n_mean == doctest::Approx(2.0 * std::exp(-kappa * ts[k])).epsilon(1e-8));
    }
}

TEST_CASE("detuned linear mode reaches the coherent steady state") {
    const Eigen::Index n = 24;
    const double delta = 0.23, f = 0.1, kappa = 0.4, hbar = 1.0;
    const Eigen::MatrixXcd a = fock::annihilation(n);
    const Eigen::MatrixXcd h =
        hbar * (-delta) * fock::number(n) - hbar * f * (a + a.adjoint());
    const auto l_op = lb::liouvillian(h, kappa, hbar);
    const auto ss = lb::steady_state_direct(l_op);

    const double expect = f * f / (delta * delta + 0.25 * kappa * kappa);
    const auto a_mean = fock::expectation(ss.rho(), a);
    CHECK(std::norm(a_mean) == doctest::Approx(expect).epsilon(1e-8));
    CHECK(fock::expectation(ss.rho(), fock::number(n)).real() ==
          doctest::Approx(expect).epsilon(1e-8));

    // long-time evolution lands on the same state in trace distance
    std::vector<double> ts = linspace(0.0, 50.0 / kappa, 512);
    const auto res = lb::evolve(fock::fock_state(n, 0), l_op, ts);
    CHECK(lb::trace_distance(res.states.back(), ss.rho()) < 1e-8);
}

TEST_CASE("pair-loss generator exposes a degenerate null space") {
    const Eigen::Index n = 4;
    const Eigen::MatrixXcd a = fock::annihilation(n);
    const auto l_op =
        lb::liouvillian_with_jump(Eigen::MatrixXcd::Zero(n, n), (a * a).eval(), 0.8, 1.0);
    const auto ss = lb::steady_state_direct(l_op);
    CHECK(ss.degenerate());
    CHECK(ss.states.size() >= 2);
    for (const auto& rho : ss.states)
        CHECK((l_op * vec_of(rho.data)).norm() < 1e-9 * l_op.norm());
}

TEST_CASE("periodic generator matches the instantaneous dense Liouvillian") {
    const SystemParams p = quantum_params(0.05, 0.6, 0.02);
    const double kappa = 0.01;
    const Eigen::Index n = 12;
    const auto basis = BasisChoice::pump_photons(p);
    lb::PeriodicGenerator gen(vanvleck::fourier_components(p, basis, n), kappa);

    Eigen::VectorXcd v = vec_of(fock::coherent_state(n, {0.4, 0.3}).data);
    for (double t : {0.0, 0.31, 2.9}) {
        const auto dense = lb::liouvillian(gen.hamiltonian(t), kappa, p.hbar);
        CHECK(((gen.apply(t, v) - dense * v)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("trace-average of a sampled observable") {
    std::vector<double> ts = linspace(0.0, 10.0, 321);
    std::vector<double> ys(ts.size(), 2.5);
    CHECK(lb::photon_number_average(ts, ys, 1.0, 4) == doctest::Approx(2.5).epsilon(1e-14));
    std::vector<double> coarse_t = linspace(0.0, 10.0, 21);
    std::vector<double> coarse_y(coarse_t.size(), 1.0);
    CHECK_THROWS_AS(lb::photon_number_average(coarse_t, coarse_y, 1.0, 4),
                    std::invalid_argument);
}

TEST_CASE("periodic steady state agrees with brute-force long-time evolution") {
    const SystemParams p = quantum_params(0.02, 0.8, 0.01);
    const double u_a = 0.02, kappa = 0.25 * u_a;
    const Eigen::Index n = 16;
    const auto basis = BasisChoice::pump_photons(p);
    lb::PeriodicGenerator gen(vanvleck::fourier_components(p, basis, n), kappa);

    const auto direct = lb::floquet_steady_state(gen);
    CHECK(direct.converged);
    CHECK(direct.residual < 1e-7);
    CHECK(direct.rho.is_valid(1e-8, 1e-8, 1e-6));

    lb::EvolveStationaryOptions eo;
    eo.rel_tol = 1e-7;
    eo.tol = 1e-9;
    const auto evolved = lb::stationary_by_evolution(gen, fock::fock_state(n, 0), eo);
    CHECK(evolved.converged);
    CHECK(direct.n_avg == doctest::Approx(evolved.n_avg).epsilon(2e-4));
}

TEST_CASE("effective and exact stationary photon numbers agree at weak nonlinearity") {
    // away from resonance peaks, first order suffices at U_a/w0 = 1e-3
    const double u_a = 1e-3;
    const SystemParams p = quantum_params(u_a, 0.8, 7.0 * u_a);
    const double kappa = 0.1 * u_a;
    const Eigen::Index n = 16;

    const auto exact = lb::run_stationary(p, lb::Model::ExactRotated, kappa, n);
    const auto rwa = lb::run_stationary(p, lb::Model::EffectiveOrder1B, kappa, n);
    CHECK(exact.converged);
    CHECK(rwa.converged);
    CHECK(exact.n_avg == doctest::Approx(rwa.n_avg).epsilon(0.05));
}

TEST_CASE("truncation robustness of the effective stationary state") {
    const double u_a = 1e-2;
    const SystemParams p = quantum_params(u_a, 0.8, 0.5 * u_a);
    const double kappa = 0.1 * u_a;
    const auto small = lb::run_stationary(p, lb::Model::EffectiveOrder1B, kappa, 24);
    const auto large = lb::run_stationary(p, lb::Model::EffectiveOrder1B, kappa, 32);
    CHECK(small.tail_occupation < 1e-6);
    CHECK(std::abs(small.n_avg - large.n_avg) / large.n_avg < 1e-4);
}

TEST_CASE("undriven scan column is exactly empty") {
    SystemParams p = quantum_params(1e-2, 0.8, 0.0);
    const auto res = lb::mpr_scan(p, linspace(0.0, 0.01, 3), {0.0},
                                  lb::Model::EffectiveOrder1B, 1e-3, 12);
    for (const auto& pt : res.points) {
        CHECK(pt.n_avg == 0.0);
        CHECK(pt.converged);
    }
}

TEST_CASE("scan is deterministic across thread counts") {
    SystemParams p = quantum_params(1e-2, 0.8, 0.0);
    lb::ScanOptions one, two;
    one.n_threads = 1;
    two.n_threads = 2;
    const auto deltas = linspace(0.0, 0.012, 5);
    const auto a = lb::mpr_scan(p, deltas, {p.F}, lb::Model::EffectiveOrder1B, 1e-3, 16, one);
    const auto b = lb::mpr_scan(p, deltas, {p.F}, lb::Model::EffectiveOrder1B, 1e-3, 16, two);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        CHECK(a.points[i].n_avg == b.points[i].n_avg);
}

TEST_CASE("peak extraction") {
    // single parabola: interpolated vertex is exact
    std::vector<double> xs = linspace(-1.0, 1.0, 21), ys(xs.size());
    const double x_true = 0.07;
    for (std::size_t i = 0; i < xs.size(); ++i)
        ys[i] = 1.0 - (xs[i] - x_true) * (xs[i] - x_true);
    const auto peaks = lb::mpr_peaks(xs, ys);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0] == doctest::Approx(x_true).epsilon(1e-12));

    // monotone curve: empty
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = xs[i];
    CHECK(lb::mpr_peaks(xs, ys).empty());

    // small ripples below the prominence floor are discarded
    for (std::size_t i = 0; i < xs.size(); ++i)
        ys[i] = 1.0 - (xs[i] - x_true) * (xs[i] - x_true) + 0.01 * std::sin(40.0 * xs[i]);
    CHECK(lb::mpr_peaks(xs, ys, 0.05).size() == 1);
}

TEST_CASE("resonance-position predictions") {
    SystemParams p = quantum_params(1e-2, 0.8, 0.0);
    const auto ba = BasisChoice::system_photons(p);
    const auto bb = BasisChoice::pump_photons(p);
    const double u_a = compute_rwa_coefficients(p, ba).u_c;

    CHECK(lb::mpr_predicted(p, ba, 1, lb::MPRConvention::NMinusOneHalf).delta_a == 0.0);
    CHECK(std::abs(lb::mpr_predicted(p, bb, 1, lb::MPRConvention::NMinusOneHalf).delta_a) <
          1e-12);

    // canonical basis: equidistant ladder with spacing U_a / 2
    double prev = 0.0;
    for (int n = 2; n <= 6; ++n) {
        const double d = lb::mpr_predicted(p, ba, n, lb::MPRConvention::NMinusOneHalf).delta_a;
        CHECK(d - prev == doctest::Approx(0.5 * u_a).epsilon(1e-12));
        prev = d;
    }

    // diagonal-degeneracy convention is the same ladder shifted by one rung
    for (int n = 1; n <= 4; ++n) {
        const double d1 =
            lb::mpr_predicted(p, ba, n, lb::MPRConvention::DiagonalDegeneracy).delta_a;
        const double d2 =
            lb::mpr_predicted(p, ba, n + 2, lb::MPRConvention::NMinusOneHalf).delta_a;
        CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
    }

    // pump-photon basis: spacings strictly decreasing, all below the canonical ones
    prev = 0.0;
    double prev_spacing = 1e300;
    for (int n = 2; n <= 8; ++n) {
        const double d = lb::mpr_predicted(p, bb, n, lb::MPRConvention::NMinusOneHalf).delta_a;
        const double spacing = d - prev;
        CHECK(spacing > 0.0);
        CHECK(spacing < prev_spacing);
        CHECK(spacing < 0.5 * u_a);
        prev = d;
        prev_spacing = spacing;
    }

    CHECK_THROWS_AS(lb::mpr_predicted(p, bb, 0, lb::MPRConvention::NMinusOneHalf),
                    std::invalid_argument);
}

TEST_CASE("evolve aborts on a trace-breaking generator") {
    const Eigen::Index n = 4;
    Eigen::MatrixXcd l_bad = -Eigen::MatrixXcd::Identity(n * n, n * n);
    std::vector<double> ts = linspace(0.0, 1.0, 33);
    CHECK_THROWS_AS(lb::evolve(fock::fock_state(n, 0), l_bad, ts), std::runtime_error);
}
