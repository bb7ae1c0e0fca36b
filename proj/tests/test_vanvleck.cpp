#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "duffloq/fock.hpp"
#include "duffloq/params.hpp"
#include "duffloq/vanvleck.hpp"

using namespace duffloq;
namespace vv = duffloq::vanvleck;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace {
SystemParams generic_params() {
    SystemParams p;
    p.m = 1.0;
    p.omega0 = 1.0;
    p.omega = 1.2;
    p.alpha = 0.01;
    p.F = 0.015;
    p.hbar = 1.0;
    return p;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("free oscillator in its own rotating frame is a constant") {
    SystemParams p;
    p.alpha = 0.0;
    p.F = 0.0;
    p.omega = p.omega0;
    const auto basis = BasisChoice::pump_photons(p);
    const auto h0 = vv::rotated_hamiltonian(p, basis, 0.0, 16);
    const auto h1 = vv::rotated_hamiltonian(p, basis, 0.37, 16);
    CHECK(max_abs(h1 - h0) < 1e-13);
    // zero detuning leaves only the constant offset hbar w0 / 2 (quadratures
    // corrupt the outermost truncation rows, so compare the interior block)
    CHECK(max_abs((h0 - 0.5 * p.hbar * p.omega0 * Eigen::MatrixXcd::Identity(16, 16))
                      .topLeftCorner(12, 12)) < 1e-12);
}

TEST_CASE("phases are unity at t = 0 and the frame is drive-periodic") {
    const SystemParams p = generic_params();
    const Eigen::Index n = 24;
    const auto basis = BasisChoice::pump_photons(p);

    const auto x = fock::position(n, p.m, basis.omega_c, p.hbar);
    const auto pm = fock::momentum(n, p.m, basis.omega_c, p.hbar);
    const Eigen::MatrixXcd x2 = x * x;
    const Eigen::MatrixXcd lab0 = pm * pm / (2.0 * p.m) +
                                  0.5 * p.m * p.omega0 * p.omega0 * x2 +
                                  0.25 * p.alpha * x2 * x2 - p.F * x;
    const Eigen::MatrixXcd expect = lab0 - p.hbar * p.omega * fock::number(n);
    CHECK(max_abs(vv::rotated_hamiltonian(p, basis, 0.0, n) - expect) < 1e-13);

    const double period = kTwoPi / p.omega;
    for (double t : {0.21, 1.7, 4.4})
        CHECK(max_abs(vv::rotated_hamiltonian(p, basis, t + period, n) -
                      vv::rotated_hamiltonian(p, basis, t, n)) < 1e-12);
}

TEST_CASE("canonical basis of the undriven linear oscillator has only the static component") {
    SystemParams p;
    p.alpha = 0.0;
    p.F = 0.0;
    p.omega = 1.3;
    const auto fa = vv::fourier_components(p, BasisChoice::system_photons(p), 12);
    for (int l = -4; l <= 4; ++l)
        if (l != 0) CHECK(max_abs(fa.at(l)) < 1e-14);
    CHECK(max_abs(fa.at(0)) > 0.0);

    // the pump-photon frame keeps counter-rotating quadratic terms at l = +-2
    const auto fb = vv::fourier_components(p, BasisChoice::pump_photons(p), 12);
    CHECK(max_abs(fb.at(2)) > 1e-3);
    CHECK(max_abs(fb.at(1)) < 1e-14);
}

TEST_CASE("drive enters the l = +-2 components linearly with single-ladder structure") {
    SystemParams p = generic_params();
    p.alpha = 0.0;
    const auto basis = BasisChoice::system_photons(p);
    const auto fc = vv::fourier_components(p, basis, 16);
    CHECK(max_abs(fc.at(2)) > 0.0);
    for (Eigen::Index i = 0; i < 16; ++i)
        for (Eigen::Index j = 0; j < 16; ++j)
            if (std::abs(i - j) != 1) {
                CHECK(std::abs(fc.at(2)(i, j)) < 1e-14);
                CHECK(std::abs(fc.at(-2)(i, j)) < 1e-14);
            }

    SystemParams p2 = p;
    p2.F = 2.0 * p.F;
    const auto fc2 = vv::fourier_components(p2, BasisChoice::system_photons(p2), 16);
    CHECK(max_abs(fc2.at(2) - 2.0 * fc.at(2)) < 1e-14);
}

TEST_CASE("component structure: hermitian pairs, even harmonics, band limit") {
    const SystemParams p = generic_params();
    const auto basis = BasisChoice::pump_photons(p);
    // oversampled with extended harmonic range
    const auto fc = vv::fourier_components(p, basis, 20, 64, 8);
    for (int l = 1; l <= 8; ++l)
        CHECK(max_abs(fc.at(-l) - fc.at(l).adjoint()) < 1e-12);
    for (int l : {-7, -5, -3, -1, 1, 3, 5, 7}) CHECK(max_abs(fc.at(l)) < 1e-12);
    for (int l : {-8, -7, -6, -5, 5, 6, 7, 8}) CHECK(max_abs(fc.at(l)) < 1e-12);
}

TEST_CASE("16-point sampling is exact for the band-limited integrand") {
    const SystemParams p = generic_params();
    const auto basis = BasisChoice::pump_photons(p);
    const auto fc16 = vv::fourier_components(p, basis, 20, 16);
    const auto fc32 = vv::fourier_components(p, basis, 20, 32);
    for (int l = -4; l <= 4; ++l) CHECK(max_abs(fc16.at(l) - fc32.at(l)) < 1e-13);
}

TEST_CASE("first-order effective Hamiltonian matches the analytic Kerr model inside") {
    const SystemParams p = generic_params();
    for (const auto& basis :
         {BasisChoice::system_photons(p), BasisChoice::pump_photons(p)}) {
        const Eigen::Index n = 32;
        const auto fc = vv::fourier_components(p, basis, n);
        const auto eff = vv::effective_hamiltonian(fc, 1, basis);
        const auto coeffs = compute_rwa_coefficients(p, basis);
        Eigen::MatrixXcd analytic = vv::rwa_analytic(coeffs, p.hbar, n).matrix;
        // constant offsets are dropped by convention; align them
        analytic.diagonal().array() += eff.matrix(0, 0) - analytic(0, 0);
        const Eigen::Index keep = n - 4;
        CHECK((eff.matrix.topLeftCorner(keep, keep) - analytic.topLeftCorner(keep, keep))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
    }
}

TEST_CASE("nonlinearity read back from the assembled diagonal") {
    SystemParams p;
    p.omega = 1.2;
    p.alpha = 0.01;
    const auto basis = BasisChoice::pump_photons(p);
    const auto fc = vv::fourier_components(p, basis, 24);
    const auto fit = vv::fit_rwa_coefficients(vv::effective_hamiltonian(fc, 1, basis).matrix,
                                              p.hbar);
    const auto coeffs = compute_rwa_coefficients(p, basis);
    CHECK(fit.u == doctest::Approx(coeffs.u_c).epsilon(1e-10));
    CHECK(fit.delta == doctest::Approx(coeffs.delta_c).epsilon(1e-10));
}

TEST_CASE("second order: hermitian, vanishing without counter-rotating terms") {
    const SystemParams p = generic_params();
    for (const auto& basis :
         {BasisChoice::system_photons(p), BasisChoice::pump_photons(p)}) {
        const auto fc = vv::fourier_components(p, basis, 24);
        const auto e2 = vv::effective_hamiltonian(fc, 2, basis);
        CHECK(max_abs(e2.matrix - e2.matrix.adjoint()) < 1e-12);
    }

    // alpha = F = 0: the canonical frame is static at any drive frequency,
    // the pump-photon frame once the detuning vanishes
    SystemParams lin = generic_params();
    lin.alpha = 0.0;
    lin.F = 0.0;
    {
        const auto basis = BasisChoice::system_photons(lin);
        const auto fc = vv::fourier_components(lin, basis, 24);
        const auto diff = vv::effective_hamiltonian(fc, 2, basis).matrix -
                          vv::effective_hamiltonian(fc, 1, basis).matrix;
        CHECK(max_abs(diff) < 1e-14);
    }
    lin.omega = lin.omega0;
    {
        const auto basis = BasisChoice::pump_photons(lin);
        const auto fc = vv::fourier_components(lin, basis, 24);
        const auto diff = vv::effective_hamiltonian(fc, 2, basis).matrix -
                          vv::effective_hamiltonian(fc, 1, basis).matrix;
        CHECK(max_abs(diff) < 1e-14);
    }

    const auto fc = vv::fourier_components(p, BasisChoice::pump_photons(p), 24);
    CHECK_THROWS_AS(vv::effective_hamiltonian(fc, 3, BasisChoice::pump_photons(p)),
                    std::invalid_argument);
}

TEST_CASE("basis consistency at resonant drive") {
    SystemParams p = generic_params();
    p.omega = p.omega0;
    const auto fa = vv::fourier_components(p, BasisChoice::system_photons(p), 24);
    const auto fb = vv::fourier_components(p, BasisChoice::pump_photons(p), 24);
    const auto ha = vv::effective_hamiltonian(fa, 1, BasisChoice::system_photons(p));
    const auto hb = vv::effective_hamiltonian(fb, 1, BasisChoice::pump_photons(p));
    CHECK(max_abs(ha.matrix - hb.matrix) < 1e-12);
}

TEST_CASE("diagonal of the static component is gauge independent") {
    const SystemParams p = generic_params();
    const auto basis = BasisChoice::pump_photons(p);
    const auto f0 = vv::fourier_components(p, basis, 20, 16, 4, 0.0);
    const auto f1 = vv::fourier_components(p, basis, 20, 16, 4, 0.731);
    CHECK((f0.at(0).diagonal() - f1.at(0).diagonal()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("analytic Kerr matrix structure") {
    RWACoefficients c;
    c.delta_c = 0.0;
    c.u_c = 0.0;
    c.f_c = 1.0;
    c.omega_c = 1.0;
    const auto eff = vv::rwa_analytic(c, 1.0, 2);
    CHECK(eff.matrix(0, 0) == std::complex<double>(0, 0));
    CHECK(eff.matrix(0, 1) == std::complex<double>(-1, 0));
    CHECK(eff.matrix(1, 0) == std::complex<double>(-1, 0));
    CHECK(eff.matrix(1, 1) == std::complex<double>(0, 0));

    c.delta_c = 0.3;
    c.u_c = 0.05;
    c.f_c = 0.0;
    const auto diag = vv::rwa_analytic(c, 2.0, 8);
    for (Eigen::Index n = 0; n < 8; ++n) {
        const double expect =
            2.0 * ((-c.delta_c + c.u_c) * double(n) + 0.5 * c.u_c * double(n) * (double(n) - 1.0));
        CHECK(diag.matrix(n, n).real() == doctest::Approx(expect).epsilon(1e-14));
    }

    const auto fit = vv::fit_rwa_coefficients(vv::rwa_analytic(c, 2.0, 8).matrix, 2.0);
    CHECK(fit.delta == doctest::Approx(c.delta_c).epsilon(1e-13));
    CHECK(fit.u == doctest::Approx(c.u_c).epsilon(1e-13));
}
