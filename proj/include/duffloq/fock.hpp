// fock.hpp — Truncated-Fock-space linear algebra: ladder operators,
// quadratures, squeeze operator, Bogoliubov basis change, expectations.
//
// Truncation policy: operations that are exact only on an interior block
// report the guaranteed-exact block size; callers keep physical support
// inside it. Storage is dense (N <= ~128 in all intended runs).

#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace duffloq::fock {

using Complex = std::complex<double>;
using FockOperator = Eigen::MatrixXcd;

// Density matrix on the truncated space. Hermiticity/trace/positivity are
// validated on demand, not on every mutation.
struct DensityMatrix {
    Eigen::MatrixXcd data;

    Eigen::Index dim() const { return data.rows(); }
    double trace_real() const { return data.trace().real(); }

    double hermiticity_defect() const { return (data - data.adjoint()).norm(); }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            0.5 * (data + data.adjoint()), Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    // herm defect <= 1e-10, |trace - 1| <= 1e-10, min eigenvalue >= -1e-8
    bool is_valid(double herm_tol = 1e-10, double trace_tol = 1e-10,
                  double neg_tol = 1e-8) const;
};

void check_dim(Eigen::Index n);

FockOperator annihilation(Eigen::Index n);
FockOperator number(Eigen::Index n);
FockOperator position(Eigen::Index n, double m, double omega_c, double hbar);
FockOperator momentum(Eigen::Index n, double m, double omega_c, double hbar);

DensityMatrix fock_state(Eigen::Index n, Eigen::Index level);
DensityMatrix coherent_state(Eigen::Index n, Complex amplitude);

// S(z) = exp((z/2)(a^2 - a'^2)), real z. Unitary on the interior block;
// the exact-block width shrinks as ceil(4 |z| sqrt(N)). Throws when the
// requested (z, N) pair fails the interior unitarity check.
FockOperator squeeze_operator(double z, Eigen::Index n);

// Number of rows/cols to discard at the high-n end for squeeze-based results.
Eigen::Index squeeze_guard_band(double z, Eigen::Index n);

// Conjugation by S(z): X -> S'(z) X S(z). With z from
// bogoliubov_coefficients(omega0, omega) this realizes a = mu b - nu b' on
// the interior block. Density matrices stay Hermitian and trace-one.
FockOperator transform_basis(const FockOperator& op, double z);
DensityMatrix transform_basis(const DensityMatrix& rho, double z);

Complex expectation(const DensityMatrix& rho, const FockOperator& op);

}  // namespace duffloq::fock
