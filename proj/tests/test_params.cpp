#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "duffloq/params.hpp"

using namespace duffloq;

TEST_CASE("parameter validation") {
    SystemParams p;
    CHECK_NOTHROW(p.validate());
    p.m = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.m = 1.0;
    p.gamma = -1e-3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.gamma = 0.0;
    p.alpha = -0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("coefficients coincide when drive meets the bare frequency") {
    SystemParams p;
    p.m = 1.3;
    p.omega0 = p.omega = 0.9;
    p.alpha = 0.05;
    p.F = 0.02;
    p.hbar = 0.7;
    const auto a = compute_rwa_coefficients(p, BasisChoice::system_photons(p));
    const auto b = compute_rwa_coefficients(p, BasisChoice::pump_photons(p));
    CHECK(a.delta_c == b.delta_c);
    CHECK(a.u_c == b.u_c);
    CHECK(a.f_c == b.f_c);
    CHECK(a.delta_c == 0.0);
}

TEST_CASE("detuning formulas at omega = 1.1") {
    SystemParams p;
    p.omega = 1.1;
    const auto a = compute_rwa_coefficients(p, BasisChoice::system_photons(p));
    const auto b = compute_rwa_coefficients(p, BasisChoice::pump_photons(p));
    CHECK(a.delta_c == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(b.delta_c == doctest::Approx(0.21 / 2.2).epsilon(1e-14));
}

TEST_CASE("pump-photon coefficients are rescalings of the canonical ones") {
    SystemParams p;
    p.m = 0.8;
    p.omega0 = 1.2;
    p.omega = 1.7;
    p.alpha = 0.03;
    p.F = 0.05;
    p.hbar = 2.0;
    const auto a = compute_rwa_coefficients(p, BasisChoice::system_photons(p));
    const auto b = compute_rwa_coefficients(p, BasisChoice::pump_photons(p));
    const double r = p.omega0 / p.omega;
    CHECK(b.u_c == doctest::Approx(a.u_c * r * r).epsilon(1e-14));
    CHECK(b.f_c == doctest::Approx(a.f_c * std::sqrt(r)).epsilon(1e-14));
    // reduced factors track the hbar scalings exactly
    CHECK(b.u_over_hbar * p.hbar == doctest::Approx(b.u_c).epsilon(1e-15));
    CHECK(b.f_times_sqrt_hbar == doctest::Approx(b.f_c * std::sqrt(p.hbar)).epsilon(1e-15));
}

TEST_CASE("coefficient continuity in the drive frequency") {
    SystemParams p;
    p.alpha = 0.02;
    p.F = 0.01;
    for (double w = 0.2; w < 3.0; w += 0.1) {
        SystemParams q = p;
        q.omega = w;
        SystemParams q2 = p;
        q2.omega = w + 1e-9;
        const auto b1 = compute_rwa_coefficients(q, BasisChoice::pump_photons(q));
        const auto b2 = compute_rwa_coefficients(q2, BasisChoice::pump_photons(q2));
        CHECK(std::abs(b1.delta_c - b2.delta_c) < 1e-7);
        CHECK(std::abs(b1.u_c - b2.u_c) < 1e-7);
        CHECK(std::abs(b1.f_c - b2.f_c) < 1e-7);
    }
}

TEST_CASE("non-positive reference frequency rejected") {
    CHECK_THROWS_AS(BasisChoice::custom(0.0), std::invalid_argument);
    CHECK_THROWS_AS(BasisChoice::custom(-1.0), std::invalid_argument);
}

TEST_CASE("Bogoliubov coefficients: identity and direct values") {
    const auto id = bogoliubov_coefficients(1.0, 1.0);
    CHECK(id.mu == 1.0);
    CHECK(id.nu == 0.0);
    CHECK(id.z == 0.0);

    const auto b = bogoliubov_coefficients(1.0, 4.0);
    CHECK(b.mu == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(b.nu == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(b.mu * b.mu - b.nu * b.nu == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(bogoliubov_coefficients(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("Bogoliubov hyperbolic identity over random frequency pairs") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> dist(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double w0 = dist(rng), w = dist(rng);
        const auto b = bogoliubov_coefficients(w0, w);
        CHECK(std::abs(b.mu * b.mu - b.nu * b.nu - 1.0) < 1e-12);
        CHECK(std::cosh(std::abs(b.z)) == doctest::Approx(b.mu).epsilon(1e-12));
        const double sign = b.z > 0 ? 1.0 : (b.z < 0 ? -1.0 : 0.0);
        CHECK(sign * std::sinh(std::abs(b.z)) == doctest::Approx(b.nu).epsilon(1e-10));
    }
}

TEST_CASE("validity terms") {
    SystemParams p;
    p.alpha = 0.0;
    auto eps = validity_epsilon(p, 2.0);
    CHECK(eps[0] == 0.0);
    CHECK(eps[2] == 0.0);

    p.alpha = 0.01;
    p.omega = p.omega0;
    eps = validity_epsilon(p, 1.0);
    CHECK(eps[1] == 0.0);

    p.omega = 1.1;
    p.F = 0.02;
    eps = validity_epsilon(p, 1.0);
    CHECK(eps[0] == doctest::Approx(0.01 / 1.21).epsilon(1e-15));
    CHECK(eps[1] == doctest::Approx(0.21 / 1.21).epsilon(1e-15));
    CHECK(eps[2] == doctest::Approx(std::sqrt(0.01 * 4e-4 / std::pow(1.1, 6))).epsilon(1e-14));

    CHECK_THROWS_AS(validity_epsilon(p, -1.0), std::invalid_argument);
}
