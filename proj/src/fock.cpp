#include "duffloq/fock.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace duffloq::fock {

void check_dim(Eigen::Index n) {
    if (n < 2) throw std::invalid_argument("fock: dimension must be >= 2");
}

bool DensityMatrix::is_valid(double herm_tol, double trace_tol, double neg_tol) const {
    if (hermiticity_defect() > herm_tol) return false;
    if (std::abs(data.trace() - Complex(1.0, 0.0)) > trace_tol) return false;
    return min_eigenvalue() >= -neg_tol;
}

FockOperator annihilation(Eigen::Index n) {
    check_dim(n);
    FockOperator a = FockOperator::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

FockOperator number(Eigen::Index n) {
    check_dim(n);
    FockOperator nn = FockOperator::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) nn(k, k) = static_cast<double>(k);
    return nn;
}

FockOperator position(Eigen::Index n, double m, double omega_c, double hbar) {
    if (!(m > 0.0) || !(omega_c > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("fock::position: m, omega_c, hbar must be > 0");
    const FockOperator a = annihilation(n);
    return std::sqrt(hbar / (2.0 * m * omega_c)) * (a + a.adjoint());
}

FockOperator momentum(Eigen::Index n, double m, double omega_c, double hbar) {
    if (!(m > 0.0) || !(omega_c > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("fock::momentum: m, omega_c, hbar must be > 0");
    const FockOperator a = annihilation(n);
    return Complex(0.0, 1.0) * std::sqrt(m * hbar * omega_c / 2.0) * (a.adjoint() - a);
}

DensityMatrix fock_state(Eigen::Index n, Eigen::Index level) {
    check_dim(n);
    if (level < 0 || level >= n) throw std::invalid_argument("fock_state: level out of range");
    DensityMatrix rho{Eigen::MatrixXcd::Zero(n, n)};
    rho.data(level, level) = 1.0;
    return rho;
}

DensityMatrix coherent_state(Eigen::Index n, Complex amplitude) {
    check_dim(n);
    Eigen::VectorXcd psi(n);
    psi(0) = 1.0;
    for (Eigen::Index k = 1; k < n; ++k)
        psi(k) = psi(k - 1) * amplitude / std::sqrt(static_cast<double>(k));
    psi *= std::exp(-0.5 * std::norm(amplitude));
    psi.normalize();  // absorbs the truncated tail
    return DensityMatrix{psi * psi.adjoint()};
}

Eigen::Index squeeze_guard_band(double z, Eigen::Index n) {
    return static_cast<Eigen::Index>(
        std::ceil(4.0 * std::abs(z) * std::sqrt(static_cast<double>(n))));
}

FockOperator squeeze_operator(double z, Eigen::Index n) {
    check_dim(n);
    if (std::abs(z) > 2.0)
        throw std::invalid_argument("squeeze_operator: |z| > 2 exceeds truncation guard");

    const FockOperator a = annihilation(n);
    const FockOperator gen = 0.5 * z * (a * a - (a * a).adjoint().eval());
    const FockOperator s = gen.exp();

    // Interior unitarity check on the guaranteed-exact block.
    const Eigen::Index k = squeeze_guard_band(z, n);
    const Eigen::Index nb = n - k;
    if (nb < 2)
        throw std::runtime_error("squeeze_operator: |z| too large for requested dimension");
    const FockOperator block = (s.adjoint() * s).topLeftCorner(nb, nb);
    const double defect = (block - FockOperator::Identity(nb, nb)).cwiseAbs().maxCoeff();
    if (defect > 1e-8)
        throw std::runtime_error(
            "squeeze_operator: interior unitarity defect " + std::to_string(defect) +
            " exceeds 1e-8; increase dimension or reduce |z|");
    return s;
}

FockOperator transform_basis(const FockOperator& op, double z) {
    const FockOperator s = squeeze_operator(z, op.rows());
    return s.adjoint() * op * s;
}

DensityMatrix transform_basis(const DensityMatrix& rho, double z) {
    const FockOperator s = squeeze_operator(z, rho.data.rows());
    return DensityMatrix{s.adjoint() * rho.data * s};
}

Complex expectation(const DensityMatrix& rho, const FockOperator& op) {
    if (rho.data.rows() != op.rows() || rho.data.cols() != op.cols())
        throw std::invalid_argument("expectation: dimension mismatch");
    return (rho.data * op).trace();
}

}  // namespace duffloq::fock
