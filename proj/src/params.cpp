#include "duffloq/params.hpp"

namespace duffloq {

RWACoefficients compute_rwa_coefficients(const SystemParams& params, const BasisChoice& basis) {
    params.validate();
    if (!(basis.omega_c > 0.0))
        throw std::invalid_argument("compute_rwa_coefficients: omega_c must be > 0");

    const double m = params.m;
    const double w0 = params.omega0;
    const double w = params.omega;
    const double wc = basis.omega_c;
    const double hb = params.hbar;

    RWACoefficients c;
    c.omega_c = wc;
    c.hbar = hb;

    // Detuning of the rotating frame at reference frequency wc:
    //   Delta_c = w - (wc^2 + w0^2)/(2 wc),
    // which reduces to w - w0 for wc = w0 and to (w^2 - w0^2)/(2w) for wc = w.
    switch (basis.kind) {
        case BasisChoice::Kind::SystemPhotons:
            c.delta_c = w - w0;
            break;
        case BasisChoice::Kind::PumpPhotons:
            // factored to cancel exactly at w = w0
            c.delta_c = (w - w0) * (w + w0) / (2.0 * w);
            break;
        case BasisChoice::Kind::Custom:
            c.delta_c = w - (wc * wc + w0 * w0) / (2.0 * wc);
            break;
    }

    // Normal ordering (alpha/4) x^4 under the rotating-wave average fixes the
    // c'c'cc coefficient to hbar U_c / 2 with U_c = 3 alpha hbar/(4 m^2 wc^2).
    c.u_over_hbar = 3.0 * params.alpha / (4.0 * m * m * wc * wc);
    c.u_c = c.u_over_hbar * hb;

    c.f_times_sqrt_hbar = params.F / (2.0 * std::sqrt(2.0 * m * wc));
    c.f_c = c.f_times_sqrt_hbar / std::sqrt(hb);

    return c;
}

BogoliubovCoefficients bogoliubov_coefficients(double omega0, double omega) {
    if (!(omega0 > 0.0) || !(omega > 0.0))
        throw std::invalid_argument("bogoliubov_coefficients: frequencies must be > 0");

    const double r = std::sqrt(omega / omega0);
    BogoliubovCoefficients b;
    b.mu = 0.5 * (r + 1.0 / r);
    b.nu = 0.5 * (r - 1.0 / r);
    b.z = std::acosh(b.mu) * (b.nu > 0.0 ? 1.0 : (b.nu < 0.0 ? -1.0 : 0.0));
    return b;
}

std::array<double, 3> validity_epsilon(const SystemParams& params, double X) {
    params.validate();
    if (X < 0.0) throw std::invalid_argument("validity_epsilon: X must be >= 0");

    const double m = params.m;
    const double w = params.omega;
    const double w2 = w * w;
    const double eps1 = params.alpha * X * X / (m * w2);
    const double eps2 = std::abs(w2 - params.omega0 * params.omega0) / w2;
    const double eps3 =
        std::sqrt(params.alpha * params.F * params.F / (m * m * m * w2 * w2 * w2));
    return {eps1, eps2, eps3};
}

}  // namespace duffloq
