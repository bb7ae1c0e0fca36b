#include "duffloq/vanvleck.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace duffloq::vanvleck {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct LabParts {
    Eigen::MatrixXcd h_static;  // p^2/2m + m w0^2 x^2/2 + (alpha/4) x^4
    Eigen::MatrixXcd h_drive;   // -F x (multiplied by cos(w t) at run time)
    Eigen::MatrixXcd shift;     // hbar w n
};

LabParts lab_parts(const SystemParams& p, const BasisChoice& basis, Eigen::Index dim) {
    p.validate();
    if (dim < 6) throw std::invalid_argument("vanvleck: dim must be >= 6 for quartic headroom");

    const Eigen::MatrixXcd x = fock::position(dim, p.m, basis.omega_c, p.hbar);
    const Eigen::MatrixXcd pm = fock::momentum(dim, p.m, basis.omega_c, p.hbar);
    const Eigen::MatrixXcd x2 = x * x;

    LabParts parts;
    parts.h_static = pm * pm / (2.0 * p.m) +
                     (0.5 * p.m * p.omega0 * p.omega0) * x2 + (0.25 * p.alpha) * (x2 * x2);
    parts.h_drive = -p.F * x;
    parts.shift = p.hbar * p.omega * fock::number(dim);
    return parts;
}

void rotate_in_place(Eigen::MatrixXcd& h, double omega, double t) {
    const Eigen::Index n = h.rows();
    Eigen::VectorXcd phase(n);
    for (Eigen::Index j = 0; j < n; ++j)
        phase(j) = std::polar(1.0, omega * t * static_cast<double>(j));
    // (j, k) picks up exp(i w t (j - k))
    h = phase.asDiagonal() * h * phase.conjugate().asDiagonal();
}
}  // namespace

Eigen::MatrixXcd rotated_hamiltonian(const SystemParams& params, const BasisChoice& basis,
                                     double t, Eigen::Index dim) {
    const LabParts parts = lab_parts(params, basis, dim);
    Eigen::MatrixXcd h = parts.h_static + std::cos(params.omega * t) * parts.h_drive;
    rotate_in_place(h, params.omega, t);
    return h - parts.shift;
}

FourierComponents fourier_components(const SystemParams& params, const BasisChoice& basis,
                                     Eigen::Index dim, int n_samples, int l_max, double t0) {
    if (n_samples < 2 * l_max + 1)
        throw std::invalid_argument("fourier_components: n_samples below the band limit");
    const LabParts parts = lab_parts(params, basis, dim);
    const double period = kTwoPi / params.omega;

    FourierComponents fc;
    fc.l_max = l_max;
    fc.omega = params.omega;
    fc.hbar = params.hbar;
    fc.dim = dim;
    fc.data.assign(static_cast<std::size_t>(2 * l_max + 1), Eigen::MatrixXcd::Zero(dim, dim));

    for (int k = 0; k < n_samples; ++k) {
        const double t = t0 + period * k / static_cast<double>(n_samples);
        Eigen::MatrixXcd h = parts.h_static + std::cos(params.omega * t) * parts.h_drive;
        rotate_in_place(h, params.omega, t);
        h -= parts.shift;
        for (int l = -l_max; l <= l_max; ++l) {
            const std::complex<double> w =
                std::polar(1.0 / n_samples, -params.omega * t * static_cast<double>(l));
            fc.at(l) += w * h;
        }
    }
    return fc;
}

EffectiveHamiltonian effective_hamiltonian(const FourierComponents& fc, int order,
                                           const BasisChoice& basis) {
    if (order != 1 && order != 2)
        throw std::invalid_argument("effective_hamiltonian: only orders 1 and 2 are supported");

    EffectiveHamiltonian eff;
    eff.order = order;
    eff.basis = basis;
    eff.matrix = fc.at(0);
    if (order == 2) {
        for (int l = 1; l <= fc.l_max; ++l) {
            const double denom = static_cast<double>(l) * fc.hbar * fc.omega;
            // l and -l pair into the Hermitian commutator [H_l, H_l'].
            eff.matrix += (fc.at(l) * fc.at(-l) - fc.at(-l) * fc.at(l)) / denom;
        }
    }
    return eff;
}

EffectiveHamiltonian rwa_analytic(const RWACoefficients& coeffs, double hbar, Eigen::Index dim) {
    fock::check_dim(dim);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) {
        const auto nd = static_cast<double>(n);
        h(n, n) = hbar * ((-coeffs.delta_c + coeffs.u_c) * nd +
                          0.5 * coeffs.u_c * nd * (nd - 1.0));
    }
    for (Eigen::Index n = 1; n < dim; ++n) {
        const double el = -hbar * coeffs.f_c * std::sqrt(static_cast<double>(n));
        h(n - 1, n) = el;
        h(n, n - 1) = el;
    }
    EffectiveHamiltonian eff;
    eff.order = 1;
    eff.basis = BasisChoice::custom(coeffs.omega_c);
    eff.matrix = std::move(h);
    return eff;
}

FittedCoefficients fit_rwa_coefficients(const Eigen::MatrixXcd& h, double hbar) {
    if (h.rows() < 3 || h.rows() != h.cols())
        throw std::invalid_argument("fit_rwa_coefficients: need a square matrix, dim >= 3");
    const double e0 = h(0, 0).real();
    const double d1 = h(1, 1).real() - e0;
    const double d2 = h(2, 2).real() - e0;
    FittedCoefficients fit;
    fit.u = (d2 - 2.0 * d1) / hbar;
    fit.delta = fit.u - d1 / hbar;
    fit.f = -h(0, 1).real() / hbar;
    return fit;
}

}  // namespace duffloq::vanvleck
