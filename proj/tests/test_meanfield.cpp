#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "duffloq/meanfield.hpp"

using namespace duffloq;
namespace mf = duffloq::meanfield;

namespace {
mf::QuadratureVF kb_lossless(const SystemParams& p) {
    kb::ResponseCoefficients c = kb::kb_coefficients(p);
    c.gamma = 0.0;
    return mf::QuadratureVF::from_response_coefficients(c);
}
}  // namespace

TEST_CASE("equation-of-motion monomials") {
    SystemParams p;
    p.omega = 1.2;
    p.alpha = 0.0;
    p.F = 0.0;
    const auto basis = BasisChoice::pump_photons(p);
    auto vf = mf::meanfield_eom(compute_rwa_coefficients(p, basis), p.hbar);
    REQUIRE(vf.monomials.size() == 1);  // free rotation i Delta beta
    CHECK(vf.monomials[0].beta_pow == 1);
    CHECK(vf.monomials[0].conj_pow == 0);

    p.alpha = 0.02;
    p.F = 0.03;
    p.omega = p.omega0;  // Delta = 0
    auto vf2 = mf::meanfield_eom(compute_rwa_coefficients(p, BasisChoice::pump_photons(p)),
                                 p.hbar);
    bool has_const = false;
    for (const auto& m : vf2.monomials)
        if (m.beta_pow == 0 && m.conj_pow == 0) has_const = true;
    CHECK(has_const);

    // the cubic monomial carries exactly -i U_c
    p.omega = 1.15;
    const auto coeffs = compute_rwa_coefficients(p, BasisChoice::pump_photons(p));
    auto vf3 = mf::meanfield_eom(coeffs, p.hbar);
    for (const auto& m : vf3.monomials)
        if (m.beta_pow == 2 && m.conj_pow == 1) {
            const auto c = m.numeric_coefficient(p.hbar);
            CHECK(c.real() == 0.0);
            CHECK(c.imag() == doctest::Approx(-coeffs.u_c).epsilon(1e-15));
        }
}

TEST_CASE("pump-photon classical limit reproduces the averaged flow exactly") {
    std::mt19937_64 rng(987651234);
    std::uniform_real_distribution<double> freq(0.5, 2.0), amp(0.0, 0.1), mass(0.5, 2.0);
    const double hbars[] = {1e-3, 1.0, 1e3};
    for (int k = 0; k < 100; ++k) {
        SystemParams p;
        p.omega = freq(rng);
        p.omega0 = freq(rng);
        p.alpha = amp(rng);
        p.F = amp(rng);
        p.m = mass(rng);
        p.hbar = hbars[k % 3];
        const auto basis = BasisChoice::pump_photons(p);
        const auto limit = mf::classical_limit(
            mf::meanfield_eom(compute_rwa_coefficients(p, basis), p.hbar), p, basis);
        CHECK(mf::compare_vector_fields(limit, kb_lossless(p)) < 1e-12);
    }
}

TEST_CASE("the classical limit is independent of hbar to the bit") {
    SystemParams base;
    base.omega = 1.37;
    base.alpha = 0.04;
    base.F = 0.06;
    base.m = 1.4;

    mf::QuadratureVF ref;
    bool first = true;
    for (double hbar : {1e-3, 1.0, 1e3}) {
        SystemParams p = base;
        p.hbar = hbar;
        const auto basis = BasisChoice::pump_photons(p);
        const auto q = mf::classical_limit(
            mf::meanfield_eom(compute_rwa_coefficients(p, basis), p.hbar), p, basis);
        if (first) {
            ref = q;
            first = false;
            continue;
        }
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                CHECK(q.linear[r][c] == ref.linear[r][c]);
                CHECK(q.cubic[r][c] == ref.cubic[r][c]);
            }
            CHECK(q.drive[r] == ref.drive[r]);
        }
    }
}

TEST_CASE("the Kerr frequency-pull monomial drops out of the limit") {
    SystemParams p;
    p.omega = 1.2;
    p.alpha = 0.05;
    const auto basis = BasisChoice::pump_photons(p);
    const auto coeffs = compute_rwa_coefficients(p, basis);
    const auto q = mf::classical_limit(mf::meanfield_eom(coeffs, p.hbar), p, basis);
    // linear block is the bare antisymmetric detuning block; no U_c trace
    CHECK(q.linear[0][0] == 0.0);
    CHECK(q.linear[1][1] == 0.0);
    CHECK(q.linear[1][0] == doctest::Approx(coeffs.delta_c).epsilon(1e-15));
    CHECK(q.linear[0][1] == doctest::Approx(-coeffs.delta_c).epsilon(1e-15));
}

TEST_CASE("canonical-basis limit agrees only at resonant drive") {
    SystemParams p;
    p.alpha = 0.03;
    p.F = 0.02;

    p.omega = p.omega0;
    {
        const auto basis = BasisChoice::system_photons(p);
        const auto limit = mf::classical_limit(
            mf::meanfield_eom(compute_rwa_coefficients(p, basis), p.hbar), p, basis);
        CHECK(mf::compare_vector_fields(limit, kb_lossless(p)) < 1e-14);
    }

    p.omega = 1.1;
    {
        const auto basis = BasisChoice::system_photons(p);
        const auto limit = mf::classical_limit(
            mf::meanfield_eom(compute_rwa_coefficients(p, basis), p.hbar), p, basis);
        CHECK(mf::compare_vector_fields(limit, kb_lossless(p)) > 1e-3);
        const double expect = (p.omega - p.omega0) * (p.omega - p.omega0) / (2.0 * p.omega);
        CHECK(mf::linear_block_deviation(limit, kb_lossless(p)) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("detuning mismatch shrinks quadratically toward resonance") {
    SystemParams p;
    p.alpha = 0.03;
    p.F = 0.02;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double d = 1e-3; d <= 1e-1 * 1.0001; d *= std::pow(100.0, 1.0 / 12.0)) {
        SystemParams q = p;
        q.omega = q.omega0 + d;
        const auto basis = BasisChoice::system_photons(q);
        const auto limit = mf::classical_limit(
            mf::meanfield_eom(compute_rwa_coefficients(q, basis), q.hbar), q, basis);
        const double dev = mf::linear_block_deviation(limit, kb_lossless(q));
        const double x = std::log(d), y = std::log(dev);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("lossless undriven limit conserves the quadrature norm") {
    SystemParams p;
    p.omega = 1.25;
    p.alpha = 0.04;
    p.F = 0.0;
    const auto basis = BasisChoice::pump_photons(p);
    const auto q = mf::classical_limit(
        mf::meanfield_eom(compute_rwa_coefficients(p, basis), p.hbar), p, basis);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uv(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        const double u = uv(rng), v = uv(rng);
        const double x2 = u * u + v * v;
        const double du = q.linear[0][0] * u + q.linear[0][1] * v +
                          x2 * (q.cubic[0][0] * u + q.cubic[0][1] * v) + q.drive[0];
        const double dv = q.linear[1][0] * u + q.linear[1][1] * v +
                          x2 * (q.cubic[1][0] * u + q.cubic[1][1] * v) + q.drive[1];
        CHECK(std::abs(u * du + v * dv) < 1e-14);
    }
}

TEST_CASE("comparison utility") {
    SystemParams p;
    p.omega = 1.3;
    p.alpha = 0.02;
    p.F = 0.01;
    const auto a = kb_lossless(p);
    CHECK(mf::compare_vector_fields(a, a) == 0.0);
}

TEST_CASE("scaling bookkeeping rejects divergent monomials") {
    SystemParams p;
    mf::ComplexPolynomialVF bad;
    bad.monomials.push_back({2, 1, {0.0, -1.0}, 0});  // cubic without the hbar factor
    CHECK_THROWS_AS(mf::classical_limit(bad, p, BasisChoice::pump_photons(p)),
                    std::runtime_error);

    mf::ComplexPolynomialVF dup;
    dup.monomials.push_back({1, 0, {0.0, 1.0}, 0});
    dup.monomials.push_back({1, 0, {0.0, 2.0}, 0});
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
}
