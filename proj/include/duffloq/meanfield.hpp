// meanfield.hpp — Mean-field Heisenberg equation of motion of the effective
// Kerr model as a polynomial vector field in (beta, beta*), its hbar -> 0
// classical limit via the quadrature map, and coefficient-wise comparison
// against the averaged classical flow.
//
// The limit is exact symbolic hbar-power bookkeeping on monomials: every
// monomial carries a half-integer hbar exponent; the quadrature substitution
// beta = sqrt(m w_c / (2 hbar)) (u + i v) shifts it by -(p + q - 1)/2;
// strictly positive net powers vanish and negative ones are construction
// errors. The surviving coefficients involve no hbar arithmetic at all, so
// the limit is bit-identical across hbar values.

#pragma once

#include <complex>
#include <vector>

#include "duffloq/params.hpp"
#include "duffloq/slowflow.hpp"

namespace duffloq::meanfield {

using Complex = std::complex<double>;

// One term coeff * hbar^(hbar_half_exponent/2) * beta^p * conj(beta)^q of
// d(beta)/dt. The coefficient carries no hidden hbar.
struct Monomial {
    int beta_pow = 0;       // p
    int conj_pow = 0;       // q
    Complex coeff{0.0, 0.0};
    int hbar_half_exponent = 0;

    Complex numeric_coefficient(double hbar) const;
};

struct ComplexPolynomialVF {
    std::vector<Monomial> monomials;  // unique (p, q, hbar_half_exponent) keys

    Complex eval(Complex beta, double hbar) const;
    void validate() const;  // key uniqueness, total degree <= 3
};

// Polynomial vector field of (u, v):
//   du/dt = linear[0][.] (u,v) + X^2 cubic[0][.] (u,v) + drive[0]
//   dv/dt = linear[1][.] (u,v) + X^2 cubic[1][.] (u,v) + drive[1]
struct QuadratureVF {
    double linear[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double cubic[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    double drive[2] = {0.0, 0.0};

    static QuadratureVF from_response_coefficients(const kb::ResponseCoefficients& c);
};

// d<c>/dt from the first-order effective Hamiltonian with mean-field closure:
//   i(Delta_c - U_c) beta - i U_c |beta|^2 beta + i F_c,
// emitted as monomials with tracked hbar scalings (U_c ~ hbar, F_c ~
// hbar^{-1/2}, Delta_c ~ hbar^0).
ComplexPolynomialVF meanfield_eom(const RWACoefficients& coeffs, double hbar);

// hbar -> 0 limit under beta = sqrt(m w_c/(2 hbar)) (u + i v), fixed by
// <x>(t) = u cos(w t) + v sin(w t) in the rotating frame.
QuadratureVF classical_limit(const ComplexPolynomialVF& vf, const SystemParams& params,
                             const BasisChoice& basis);

// Coefficient-wise maximum relative deviation; absolute fallback below
// 1e-300 magnitude.
double compare_vector_fields(const QuadratureVF& a, const QuadratureVF& b);

// Largest absolute entry difference of the linear blocks (used for the
// detuning-convention mismatch, which is (w - w0)^2 / (2 w) between bases).
double linear_block_deviation(const QuadratureVF& a, const QuadratureVF& b);

// Response-cubic coefficients of the classical limit in the given basis,
// with the damping terms attached; feeds kb::response_steady_states.
kb::ResponseCoefficients rotating_frame_response(const SystemParams& params,
                                                 const BasisChoice& basis);

}  // namespace duffloq::meanfield
