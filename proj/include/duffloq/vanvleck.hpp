// vanvleck.hpp — Rotating-frame Hamiltonian on the truncated Fock space, its
// Fourier components, and the time-independent effective Hamiltonian at
// first and second order in either operator basis.
//
// The rotated Hamiltonian is band-limited: the quartic term reaches |l| = 4,
// so a 16-point DFT over one drive period is exact. Quartic operators
// corrupt the outer 4 rows/columns of the truncation; interior-block
// comparisons use n <= N - 4.

#pragma once

#include <Eigen/Dense>
#include <array>

#include "duffloq/fock.hpp"
#include "duffloq/params.hpp"

namespace duffloq::vanvleck {

inline constexpr int kBandLimit = 4;

struct FourierComponents {
    int l_max = kBandLimit;
    double omega = 0.0;
    double hbar = 0.0;
    Eigen::Index dim = 0;
    std::vector<Eigen::MatrixXcd> data;  // index l + l_max

    const Eigen::MatrixXcd& at(int l) const { return data.at(static_cast<std::size_t>(l + l_max)); }
    Eigen::MatrixXcd& at(int l) { return data.at(static_cast<std::size_t>(l + l_max)); }
};

struct EffectiveHamiltonian {
    int order = 1;
    BasisChoice basis;
    Eigen::MatrixXcd matrix;
};

// Lab-frame Hamiltonian quantized at the basis reference frequency,
// conjugated by exp(-i w t n) and shifted by -hbar w n; element (j, k)
// acquires the phase exp(i w t (j - k)).
Eigen::MatrixXcd rotated_hamiltonian(const SystemParams& params, const BasisChoice& basis,
                                     double t, Eigen::Index dim);

// DFT of the rotated Hamiltonian over one full period. n_samples and l_max
// are overridable for refinement checks; defaults are exact for the quartic
// band limit. t0 shifts the sampling origin (the result must not depend on
// it for the l = 0 diagonal).
FourierComponents fourier_components(const SystemParams& params, const BasisChoice& basis,
                                     Eigen::Index dim, int n_samples = 16,
                                     int l_max = kBandLimit, double t0 = 0.0);

// order 1: H_0.  order 2: H_0 + sum_{l != 0} H_l H_{-l} / (l hbar w).
// Orders >= 3 are unsupported.
EffectiveHamiltonian effective_hamiltonian(const FourierComponents& components, int order,
                                           const BasisChoice& basis);

// hbar(-Delta + U) n + (hbar U/2) c'c'cc - hbar F (c + c') as a dense matrix.
EffectiveHamiltonian rwa_analytic(const RWACoefficients& coeffs, double hbar, Eigen::Index dim);

// (Delta, U, F) read back from the matrix structure: U and Delta from the
// lowest diagonal elements, F from the (0,1) element.
struct FittedCoefficients {
    double delta = 0.0;
    double u = 0.0;
    double f = 0.0;
};
FittedCoefficients fit_rwa_coefficients(const Eigen::MatrixXcd& h_eff, double hbar);

}  // namespace duffloq::vanvleck
