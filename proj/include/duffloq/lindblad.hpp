// lindblad.hpp — Open-system evolution under the photon-loss master equation
//   d rho/dt = -(i/hbar)[H, rho] + kappa (a rho a' - 1/2 {a'a, rho}),
// with either the full time-periodic rotated Hamiltonian or a
// time-independent effective Hamiltonian. Provides direct steady states,
// periodic (Floquet) steady states, stationary photon-number scans,
// peak extraction, and resonance-position predictions.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <optional>
#include <vector>

#include "duffloq/fock.hpp"
#include "duffloq/params.hpp"
#include "duffloq/vanvleck.hpp"

namespace duffloq::lindblad {

using Complex = std::complex<double>;
using SuperOperator = Eigen::MatrixXcd;     // dense N^2 x N^2, column-stacking vec
using SparseSuper = Eigen::SparseMatrix<Complex>;

enum class Model { ExactRotated, EffectiveOrder1A, EffectiveOrder1B, EffectiveOrder2B };

const char* model_name(Model m);
std::optional<Model> model_from_name(const std::string& name);

// Vectorized generator with jump operator = annihilation. H must be
// Hermitian to 1e-10 (relative to its largest element) and kappa >= 0.
SuperOperator liouvillian(const Eigen::MatrixXcd& h, double kappa, double hbar);
SuperOperator liouvillian_with_jump(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& jump,
                                    double rate, double hbar);

// Null space of a time-independent generator. The regular path solves the
// trace-normalized bordered system; a degenerate null space (dim > 1) is
// detected by rank analysis and reported with all basis vectors.
struct SteadyStateResult {
    std::vector<fock::DensityMatrix> states;
    double residual = 0.0;  // max ||L rho||_F / ||L||_F over returned states

    bool degenerate() const { return states.size() > 1; }
    const fock::DensityMatrix& rho() const { return states.front(); }
};
SteadyStateResult steady_state_direct(const SuperOperator& l_op);

// Time-periodic generator cached as Fourier components of the rotated
// Hamiltonian plus the static dissipator; band-limited reconstruction at
// arbitrary times is exact.
class PeriodicGenerator {
public:
    PeriodicGenerator(vanvleck::FourierComponents components, double kappa);

    Eigen::Index dim() const { return dim_; }
    double omega() const { return omega_; }
    double period() const;
    double hbar() const { return hbar_; }
    double kappa() const { return kappa_; }

    Eigen::MatrixXcd hamiltonian(double t) const;
    // d vec(rho)/dt at time t
    Eigen::VectorXcd apply(double t, const Eigen::VectorXcd& v) const;

private:
    Eigen::Index dim_ = 0;
    double omega_ = 0.0, hbar_ = 1.0, kappa_ = 0.0;
    vanvleck::FourierComponents fc_;
    SparseSuper static_part_;                          // l = 0 Hamiltonian + dissipator
    std::vector<std::pair<int, SparseSuper>> harmonics_;  // nonzero l != 0 parts
};

struct EvolveOptions {
    double tol = 1e-9;            // per-step relative tolerance, (1e-12, 1e-4)
    double trace_tol = 1e-8;      // abort threshold on |tr rho - 1|
    double negativity_tol = 1e-6; // abort threshold on -min eigenvalue (at samples)
    bool check_positivity = true;
};

struct EvolveResult {
    std::vector<double> times;
    std::vector<fock::DensityMatrix> states;
    double max_trace_drift = 0.0;
    double max_hermiticity_defect = 0.0;
    double min_eigenvalue = 0.0;
};

// Trace renormalization is never applied; drift is monitored and excessive
// drift or negativity aborts with diagnostics.
EvolveResult evolve(const fock::DensityMatrix& rho0, const SuperOperator& l_op,
                    const std::vector<double>& sample_times, const EvolveOptions& opts = {});
EvolveResult evolve(const fock::DensityMatrix& rho0, const PeriodicGenerator& gen,
                    const std::vector<double>& sample_times, const EvolveOptions& opts = {});

// Trapezoidal time average of a sampled observable over the last k_periods
// full periods; needs >= 16 samples per period.
double photon_number_average(const std::vector<double>& times, const std::vector<double>& values,
                             double period, int k_periods);

struct FloquetOptions {
    double unitary_tol = 1e-11;
    int quad_panels = 64;        // Simpson panels for the averaged dissipator
    double matvec_tol = 3e-8;    // per-step tolerance of one-period evolutions
    double gmres_tol = 1e-9;
    int max_matvecs = 160;
};

struct StationaryResult {
    fock::DensityMatrix rho;     // periodic state at stroboscopic time 0
    double n_avg = 0.0;          // one-period time average of <a'a>
    double tail_occupation = 0.0;  // max_t sum_{n >= N-4} rho_nn(t)
    bool converged = false;
    double residual = 0.0;       // ||rho(T) - rho(0)||_F of the verification pass
    int matvecs = 0;
};

// Periodic steady state of the time-periodic master equation: fixed point of
// the one-period propagator, solved by preconditioned GMRES. The
// preconditioner is the exact one-period unitary map corrected by the
// time-averaged dissipator in the interaction picture.
StationaryResult floquet_steady_state(const PeriodicGenerator& gen,
                                      const FloquetOptions& opts = {});

// Long-time evolution with stationarity detection: averages over successive
// windows of window_periods must agree to rel_tol before reporting; the
// horizon is capped at max_periods with a flagged result.
struct EvolveStationaryOptions {
    int window_periods = 8;
    double rel_tol = 1e-5;
    int max_periods = 20000;
    int samples_per_period = 16;
    double tol = 1e-8;
};
StationaryResult stationary_by_evolution(const PeriodicGenerator& gen,
                                         const fock::DensityMatrix& rho0,
                                         const EvolveStationaryOptions& opts = {});

struct LindbladRun {
    Model model = Model::ExactRotated;
    double kappa = 0.0;
    Eigen::Index dim = 0;
    double t_final = 0.0;
    double n_avg = 0.0;
    fock::DensityMatrix rho_final;
    bool converged = false;
    double tail_occupation = 0.0;
};

// Stationary observables of one model at one parameter point. ExactRotated
// integrates the time-periodic rotated Hamiltonian in the pump-photon basis;
// the effective models use their time-independent generators (loss attached
// to the annihilation operator of the evolution basis in both cases).
LindbladRun run_stationary(const SystemParams& params, Model model, double kappa,
                           Eigen::Index dim, const FloquetOptions& opts = {});

struct ScanPoint {
    double delta = 0.0;   // omega - omega0
    double force = 0.0;   // physical drive amplitude F
    double n_avg = 0.0;
    bool converged = false;
    double tail_occupation = 0.0;
};

struct ScanResult {
    std::vector<ScanPoint> points;  // row-major: delta index major, force index minor
    std::size_t n_delta = 0;
    std::size_t n_force = 0;
};

struct ScanOptions {
    FloquetOptions floquet;
    int n_threads = 0;       // 0: hardware concurrency (capped by grid size)
    double tail_tol = 1e-6;  // convergence flag threshold on tail occupation
};

// Stationary photon number over a detuning x drive grid. Grid points are
// independent; execution is parallel with results ordered by grid index and
// bitwise independent of scheduling.
ScanResult mpr_scan(const SystemParams& base, const std::vector<double>& delta_grid,
                    const std::vector<double>& force_grid, Model model, double kappa,
                    Eigen::Index dim, const ScanOptions& opts = {});

// Local maxima refined by three-point parabolic interpolation; peaks with
// topographic prominence below prominence_frac of the curve maximum are
// discarded. A monotone curve yields an empty list.
std::vector<double> mpr_peaks(const std::vector<double>& delta,
                              const std::vector<double>& n_avg,
                              double prominence_frac = 0.05);

// Resonance-position conventions: Delta_c/U_c = (n-1)/2, and the bare
// diagonal degeneracy E_n = E_0 giving Delta_c/U_c = (n+1)/2.
enum class MPRConvention { NMinusOneHalf, DiagonalDegeneracy };

struct MPRPrediction {
    int n = 1;
    double delta_a = 0.0;  // omega - omega0 at the predicted resonance
    MPRConvention convention = MPRConvention::NMinusOneHalf;
};

// Solves Delta_c(w) = U_c(w) * s(n) for the drive frequency w and reports
// delta_a = w - omega0. Closed form when omega_c does not track the drive;
// a monotone bracketed root find on (0, 4 omega0] otherwise.
MPRPrediction mpr_predicted(const SystemParams& params, const BasisChoice& basis, int n,
                            MPRConvention convention);

// 0.5 * sum of singular values of (rho1 - rho2)
double trace_distance(const fock::DensityMatrix& a, const fock::DensityMatrix& b);

}  // namespace duffloq::lindblad
