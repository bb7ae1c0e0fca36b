#include "duffloq/meanfield.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <tuple>

namespace duffloq::meanfield {

Complex Monomial::numeric_coefficient(double hbar) const {
    return coeff * std::pow(hbar, 0.5 * hbar_half_exponent);
}

Complex ComplexPolynomialVF::eval(Complex beta, double hbar) const {
    Complex out{0.0, 0.0};
    for (const auto& m : monomials)
        out += m.numeric_coefficient(hbar) * std::pow(beta, m.beta_pow) *
               std::pow(std::conj(beta), m.conj_pow);
    return out;
}

void ComplexPolynomialVF::validate() const {
    std::set<std::tuple<int, int, int>> keys;
    for (const auto& m : monomials) {
        if (m.beta_pow < 0 || m.conj_pow < 0 || m.beta_pow + m.conj_pow > 3)
            throw std::invalid_argument("ComplexPolynomialVF: monomial degree out of range");
        if (!keys.insert(std::make_tuple(m.beta_pow, m.conj_pow, m.hbar_half_exponent)).second)
            throw std::invalid_argument("ComplexPolynomialVF: duplicate monomial key");
    }
}

QuadratureVF QuadratureVF::from_response_coefficients(const kb::ResponseCoefficients& c) {
    QuadratureVF q;
    q.linear[0][0] = -0.5 * c.gamma;
    q.linear[0][1] = -c.delta_tilde;
    q.linear[1][0] = c.delta_tilde;
    q.linear[1][1] = -0.5 * c.gamma;
    q.cubic[0][1] = c.cubic;
    q.cubic[1][0] = -c.cubic;
    q.drive[1] = c.drive;
    return q;
}

ComplexPolynomialVF meanfield_eom(const RWACoefficients& coeffs, double hbar) {
    if (!(hbar > 0.0)) throw std::invalid_argument("meanfield_eom: hbar must be > 0");
    const Complex i{0.0, 1.0};

    // [c, H] with H = hbar(-D + U) c'c + (hbar U/2) c'c'cc - hbar F (c + c')
    // gives hbar(-D + U) c + hbar U c'cc - hbar F, hence
    //   d(beta)/dt = i(D - U) beta - i U |beta|^2 beta + i F.
    ComplexPolynomialVF vf;
    auto push = [&vf](int p, int q, Complex c, int half_exp) {
        if (c != Complex{0.0, 0.0}) vf.monomials.push_back({p, q, c, half_exp});
    };
    push(1, 0, i * coeffs.delta_c, 0);
    push(1, 0, -i * coeffs.u_over_hbar, 2);
    push(2, 1, -i * coeffs.u_over_hbar, 2);
    push(0, 0, i * coeffs.f_times_sqrt_hbar, -1);
    vf.validate();
    return vf;
}

QuadratureVF classical_limit(const ComplexPolynomialVF& vf, const SystemParams& params,
                             const BasisChoice& basis) {
    params.validate();
    vf.validate();

    QuadratureVF q;
    const double mwc_half = 0.5 * params.m * basis.omega_c;

    for (const auto& mono : vf.monomials) {
        const int degree_shift = mono.beta_pow + mono.conj_pow - 1;
        const int net_half = mono.hbar_half_exponent - degree_shift;
        if (net_half > 0) continue;  // vanishes as hbar -> 0
        if (net_half < 0)
            throw std::runtime_error(
                "classical_limit: monomial diverges as hbar -> 0 (malformed scaling)");

        const Complex c = mono.coeff * std::pow(mwc_half, 0.5 * degree_shift);
        const int p = mono.beta_pow, qq = mono.conj_pow;
        if (p == 0 && qq == 0) {
            q.drive[0] += c.real();
            q.drive[1] += c.imag();
        } else if (p == 1 && qq == 0) {
            q.linear[0][0] += c.real();
            q.linear[0][1] += -c.imag();
            q.linear[1][0] += c.imag();
            q.linear[1][1] += c.real();
        } else if (p == 0 && qq == 1) {
            q.linear[0][0] += c.real();
            q.linear[0][1] += c.imag();
            q.linear[1][0] += c.imag();
            q.linear[1][1] += -c.real();
        } else if (p == 2 && qq == 1) {
            q.cubic[0][0] += c.real();
            q.cubic[0][1] += -c.imag();
            q.cubic[1][0] += c.imag();
            q.cubic[1][1] += c.real();
        } else if (p == 1 && qq == 2) {
            q.cubic[0][0] += c.real();
            q.cubic[0][1] += c.imag();
            q.cubic[1][0] += c.imag();
            q.cubic[1][1] += -c.real();
        } else {
            throw std::runtime_error("classical_limit: unsupported surviving monomial shape");
        }
    }
    return q;
}

namespace {
double rel_dev(double a, double b) {
    const double mag = std::max(std::abs(a), std::abs(b));
    if (mag < 1e-300) return 0.0;
    return std::abs(a - b) / mag;
}
}  // namespace

double compare_vector_fields(const QuadratureVF& a, const QuadratureVF& b) {
    double dev = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            dev = std::max(dev, rel_dev(a.linear[r][c], b.linear[r][c]));
            dev = std::max(dev, rel_dev(a.cubic[r][c], b.cubic[r][c]));
        }
        dev = std::max(dev, rel_dev(a.drive[r], b.drive[r]));
    }
    return dev;
}

double linear_block_deviation(const QuadratureVF& a, const QuadratureVF& b) {
    double dev = 0.0;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            dev = std::max(dev, std::abs(a.linear[r][c] - b.linear[r][c]));
    return dev;
}

kb::ResponseCoefficients rotating_frame_response(const SystemParams& params,
                                                 const BasisChoice& basis) {
    const RWACoefficients coeffs = compute_rwa_coefficients(params, basis);
    const QuadratureVF q = classical_limit(meanfield_eom(coeffs, params.hbar), params, basis);
    kb::ResponseCoefficients rc;
    rc.delta_tilde = q.linear[1][0];
    rc.cubic = q.cubic[0][1];
    rc.drive = q.drive[1];
    rc.gamma = params.gamma;
    return rc;
}

}  // namespace duffloq::meanfield
