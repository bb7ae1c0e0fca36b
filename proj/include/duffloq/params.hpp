// params.hpp — Physical parameter set, operator-basis choice, rotating-frame
// coefficients, Bogoliubov coefficients, and validity-condition estimators.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace duffloq {

// Lab-frame parameters of the driven Duffing oscillator
//   H = p^2/(2m) + m w0^2 x^2 / 2 + (alpha/4) x^4 - F cos(w t) x,
// with linear damping gamma (force -gamma*p on the momentum) and an explicit
// hbar carried as a runtime parameter. All quantities in coherent arbitrary
// units; no unit conversion layer.
struct SystemParams {
    double m = 1.0;       // mass
    double omega0 = 1.0;  // bare angular frequency
    double alpha = 0.0;   // quartic (Duffing/Kerr) coefficient, >= 0
    double F = 0.0;       // drive amplitude
    double omega = 1.0;   // drive angular frequency
    double gamma = 0.0;   // linear damping rate, >= 0
    double hbar = 1.0;    // reduced Planck constant, > 0

    void validate() const {
        if (!(m > 0.0)) throw std::invalid_argument("SystemParams: m must be > 0");
        if (!(omega0 > 0.0)) throw std::invalid_argument("SystemParams: omega0 must be > 0");
        if (!(omega > 0.0)) throw std::invalid_argument("SystemParams: omega must be > 0");
        if (!(hbar > 0.0)) throw std::invalid_argument("SystemParams: hbar must be > 0");
        if (alpha < 0.0) throw std::invalid_argument("SystemParams: alpha must be >= 0");
        if (gamma < 0.0) throw std::invalid_argument("SystemParams: gamma must be >= 0");
    }
};

// Reference frequency for the second quantization. SystemPhotons counts
// quanta at the bare frequency w0 (canonical a-operators); PumpPhotons
// counts quanta at the drive frequency w (b-operators).
struct BasisChoice {
    enum class Kind { SystemPhotons, PumpPhotons, Custom };

    Kind kind = Kind::SystemPhotons;
    double omega_c = 1.0;

    static BasisChoice system_photons(const SystemParams& p) {
        p.validate();
        return {Kind::SystemPhotons, p.omega0};
    }
    static BasisChoice pump_photons(const SystemParams& p) {
        p.validate();
        return {Kind::PumpPhotons, p.omega};
    }
    static BasisChoice custom(double omega_c) {
        if (!(omega_c > 0.0)) throw std::invalid_argument("BasisChoice: omega_c must be > 0");
        return {Kind::Custom, omega_c};
    }

    char label() const {
        switch (kind) {
            case Kind::SystemPhotons: return 'a';
            case Kind::PumpPhotons: return 'b';
            default: return 'c';
        }
    }
};

// Rotating-frame coefficient triple of the first-order effective Hamiltonian
//   hbar(-Delta_c + U_c) c'c + (hbar U_c / 2) c'c'cc - hbar F_c (c + c').
// The reduced fields u_over_hbar and f_times_sqrt_hbar cache the hbar-free
// factors (U_c scales as hbar^1, F_c as hbar^-1/2); they are computed directly
// from the parameters so the classical limit can cancel hbar exactly.
struct RWACoefficients {
    double delta_c = 0.0;  // detuning
    double u_c = 0.0;      // Kerr nonlinearity
    double f_c = 0.0;      // pump strength
    double omega_c = 1.0;  // reference frequency

    double u_over_hbar = 0.0;
    double f_times_sqrt_hbar = 0.0;
    double hbar = 1.0;
};

// mu^2 - nu^2 = 1; z = arccosh(mu) * sign(nu)
struct BogoliubovCoefficients {
    double mu = 1.0;
    double nu = 0.0;
    double z = 0.0;
};

RWACoefficients compute_rwa_coefficients(const SystemParams& params, const BasisChoice& basis);

BogoliubovCoefficients bogoliubov_coefficients(double omega0, double omega);

// The three dimensionless smallness terms of the averaging expansion:
//   alpha X^2/(m w^2),  |w^2 - w0^2|/w^2,  sqrt(alpha F^2/(m^3 w^6)).
// Caller decides the smallness threshold.
std::array<double, 3> validity_epsilon(const SystemParams& params, double X);

}  // namespace duffloq
