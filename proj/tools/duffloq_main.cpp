// duffloq_main.cpp — unified command-line entry point: configuration
// ingestion, subcommand dispatch, deterministic CSV/JSON emission.
//
// Exit codes: 0 success, 1 validation error, 2 numerical non-convergence,
// 3 I/O failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <string>

#include "duffloq/classical.hpp"
#include "duffloq/config.hpp"
#include "duffloq/lindblad.hpp"
#include "duffloq/meanfield.hpp"
#include "duffloq/ode.hpp"
#include "duffloq/params.hpp"
#include "duffloq/slowflow.hpp"
#include "duffloq/vanvleck.hpp"

namespace {

using duffloq::BasisChoice;
using duffloq::SystemParams;
using Json = duffloq::config::Json;
namespace classical = duffloq::classical;
namespace config = duffloq::config;
namespace kb = duffloq::kb;
namespace lindblad = duffloq::lindblad;
namespace meanfield = duffloq::meanfield;
namespace vanvleck = duffloq::vanvleck;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct OutputSink {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit OutputSink(const std::string& path) {
        if (path.empty() || path == "-") return;
        file.open(path);
        if (!file) throw std::ios_base::failure("cannot open output file: " + path);
        os = &file;
    }
    std::ostream& stream() { return *os; }
};

struct CommonOpts {
    std::string config_path;
    std::string output_path;
    long seed = 0;

    SystemParams params(Json* resolved = nullptr) const {
        Json j = config_path.empty() ? Json::object() : config::load_json_file(config_path);
        const SystemParams p = config::system_params_from_json(j);
        if (resolved) *resolved = config::to_json(p);
        return p;
    }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "JSON parameter file");
    cmd->add_option("-o,--output", opts.output_path, "output path (default: stdout)");
    cmd->add_option("--seed", opts.seed, "seed recorded for randomized suites");
}

Json run_header(const std::string& subcommand, const CommonOpts& opts, Json params_json,
                Json extra = Json::object()) {
    Json j;
    j["subcommand"] = subcommand;
    j["seed"] = opts.seed;
    j["params"] = std::move(params_json);
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

BasisChoice parse_basis(const SystemParams& p, const std::string& name) {
    if (name == "a") return BasisChoice::system_photons(p);
    if (name == "b") return BasisChoice::pump_photons(p);
    throw std::invalid_argument("basis must be 'a' or 'b'");
}

Json coefficients_json(const duffloq::RWACoefficients& c) {
    return Json{{"delta_c", c.delta_c}, {"u_c", c.u_c}, {"f_c", c.f_c}, {"omega_c", c.omega_c}};
}

// F_a <-> F conversion at the bare frequency reference
double force_from_fa(const SystemParams& p, double f_a) {
    return f_a * 2.0 * std::sqrt(2.0 * p.m * p.omega0 * p.hbar);
}

// canonical figure parameters: m = omega0 = hbar = 1
SystemParams figure_params(double u_a_over_w0, double f_a_over_ua, double gamma_over_w0) {
    SystemParams p;
    p.m = p.omega0 = p.hbar = 1.0;
    p.alpha = 4.0 * u_a_over_w0 / 3.0;  // U_a = 3 alpha hbar/(4 m^2 w0^2)
    p.gamma = gamma_over_w0;
    const double u_a = u_a_over_w0;
    p.F = force_from_fa(p, f_a_over_ua * u_a);
    return p;
}

int cmd_coeffs(const CommonOpts& opts) {
    Json pj;
    const SystemParams p = opts.params(&pj);
    const auto ca = duffloq::compute_rwa_coefficients(p, BasisChoice::system_photons(p));
    const auto cb = duffloq::compute_rwa_coefficients(p, BasisChoice::pump_photons(p));
    const auto bog = duffloq::bogoliubov_coefficients(p.omega0, p.omega);

    Json out;
    out["config"] = run_header("coeffs", opts, pj);
    out["a"] = coefficients_json(ca);
    out["b"] = coefficients_json(cb);
    out["bogoliubov"] = Json{{"mu", bog.mu}, {"nu", bog.nu}, {"z", bog.z}};

    OutputSink sink(opts.output_path);
    sink.stream() << out.dump(2) << "\n";
    return 0;
}

struct GridOpts {
    double delta_min = -0.2;
    double delta_max = 1.0;
    int n_points = 61;
};

std::vector<double> make_grid(const GridOpts& g, bool descending) {
    if (g.n_points < 1) throw std::invalid_argument("grid needs n_points >= 1");
    std::vector<double> grid(g.n_points);
    for (int i = 0; i < g.n_points; ++i) {
        const double f = g.n_points == 1 ? 0.0 : double(i) / (g.n_points - 1);
        grid[i] = g.delta_min + f * (g.delta_max - g.delta_min);
    }
    if (descending) std::reverse(grid.begin(), grid.end());
    return grid;
}

int cmd_classical_sweep(const CommonOpts& opts, GridOpts grid, std::string direction,
                        int settle_periods, int measure_periods, double tol, int spp) {
    Json pj;
    const SystemParams p = opts.params(&pj);

    // sweep keys may also come from the config document
    if (!opts.config_path.empty()) {
        const Json j = config::load_json_file(opts.config_path);
        // ignore parameter keys; read sweep keys when present
        if (j.contains("delta_min")) grid.delta_min = j["delta_min"].get<double>();
        if (j.contains("delta_max")) grid.delta_max = j["delta_max"].get<double>();
        if (j.contains("n_points")) grid.n_points = j["n_points"].get<int>();
        if (j.contains("direction")) direction = j["direction"].get<std::string>();
        if (j.contains("settle_periods")) settle_periods = j["settle_periods"].get<int>();
        if (j.contains("measure_periods")) measure_periods = j["measure_periods"].get<int>();
    }

    classical::SweepOptions so;
    if (direction == "up")
        so.direction = classical::SweepDirection::Up;
    else if (direction == "down")
        so.direction = classical::SweepDirection::Down;
    else
        throw std::invalid_argument("direction must be 'up' or 'down'");
    if (settle_periods < 0) {
        // default settle time 10/gamma
        if (p.gamma > 0.0)
            settle_periods = static_cast<int>(
                std::ceil(10.0 / p.gamma * p.omega0 / kTwoPi));
        else
            settle_periods = 256;
    }
    so.settle_periods = settle_periods;
    so.measure_periods = measure_periods;
    so.tol = tol;
    so.samples_per_period = spp;

    const auto grid_values = make_grid(grid, so.direction == classical::SweepDirection::Down);
    const classical::SweepResult res = classical::sweep_response(p, grid_values, so);

    OutputSink sink(opts.output_path);
    config::CsvWriter csv(sink.stream());
    csv.comment("duffloq classical-sweep");
    csv.embed_config(run_header("classical-sweep", opts, pj,
                                Json{{"delta_min", grid.delta_min},
                                     {"delta_max", grid.delta_max},
                                     {"n_points", grid.n_points},
                                     {"direction", direction},
                                     {"settle_periods", settle_periods},
                                     {"measure_periods", measure_periods},
                                     {"tol", tol},
                                     {"samples_per_period", spp}}));
    csv.columns({"delta", "u", "v", "X"});
    for (const auto& pt : res.points)
        csv.row({pt.delta, pt.lockin.u, pt.lockin.v, pt.lockin.X});
    if (res.failed_index) {
        std::cerr << "classical-sweep: non-convergence at grid index " << *res.failed_index
                  << "\n";
        return 2;
    }
    return 0;
}

int cmd_kb_steady(const CommonOpts& opts, const GridOpts& grid) {
    Json pj;
    const SystemParams p = opts.params(&pj);
    const auto grid_values = make_grid(grid, false);

    OutputSink sink(opts.output_path);
    config::CsvWriter csv(sink.stream());
    csv.comment("duffloq kb-steady");
    csv.embed_config(run_header("kb-steady", opts, pj,
                                Json{{"delta_min", grid.delta_min},
                                     {"delta_max", grid.delta_max},
                                     {"n_points", grid.n_points}}));
    csv.columns({"delta", "X", "stable"});
    for (double delta : grid_values) {
        SystemParams q = p;
        q.omega = p.omega0 + delta;
        for (const auto& st : kb::steady_states(q))
            csv.row({delta, st.X(), st.stable ? 1.0 : 0.0});
    }
    return 0;
}

int cmd_psd(const CommonOpts& opts, int periods, int spp, const std::string& window, double x0,
            double p0, double tol) {
    Json pj;
    const SystemParams p = opts.params(&pj);
    const double period = kTwoPi / p.omega;
    const auto traj = classical::integrate({x0, p0}, 0.0, periods * period, p, tol, spp);
    const auto win = window == "hann" ? classical::WindowKind::Hann
                                      : classical::WindowKind::Rectangular;
    if (window != "hann" && window != "rect")
        throw std::invalid_argument("window must be 'rect' or 'hann'");
    const classical::Spectrum spec = classical::periodogram(traj, win);

    OutputSink sink(opts.output_path);
    config::CsvWriter csv(sink.stream());
    csv.comment("duffloq psd");
    csv.comment("one-sided periodogram: S(Omega) = 2 |dt sum x_n exp(-i Omega t_n)|^2 / span;");
    csv.comment("a tone of amplitude A on an integer-period span carries A^2/2 * span in its bin;");
    csv.comment("sum of S over bins times (bin spacing / 2 pi) equals the mean square of x.");
    csv.embed_config(run_header("psd", opts, pj,
                                Json{{"periods", periods},
                                     {"samples_per_period", spp},
                                     {"window", window},
                                     {"x0", x0},
                                     {"p0", p0},
                                     {"tol", tol}}));
    csv.columns({"omega_response", "psd"});
    for (Eigen::Index i = 0; i < spec.omega.size(); ++i)
        csv.row({spec.omega(i), spec.psd(i)});
    return 0;
}

int cmd_vv(const CommonOpts& opts, const std::string& basis_name, int order, int dim) {
    Json pj;
    const SystemParams p = opts.params(&pj);
    const BasisChoice basis = parse_basis(p, basis_name);
    const auto fc = vanvleck::fourier_components(p, basis, dim);
    const auto eff = vanvleck::effective_hamiltonian(fc, order, basis);
    const auto fit = vanvleck::fit_rwa_coefficients(eff.matrix, p.hbar);

    Json out;
    out["config"] = run_header("vv", opts, pj,
                               Json{{"basis", basis_name}, {"order", order}, {"dim", dim}});
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index i = 0; i < eff.matrix.rows(); ++i) {
        Json rrow = Json::array(), irow = Json::array();
        for (Eigen::Index j = 0; j < eff.matrix.cols(); ++j) {
            rrow.push_back(eff.matrix(i, j).real());
            irow.push_back(eff.matrix(i, j).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    out["matrix_re"] = std::move(re);
    out["matrix_im"] = std::move(im);
    out["fitted"] = Json{{"delta", fit.delta}, {"u", fit.u}, {"f", fit.f}};

    OutputSink sink(opts.output_path);
    sink.stream() << out.dump(2) << "\n";
    return 0;
}

Json quadrature_vf_json(const meanfield::QuadratureVF& q) {
    return Json{{"linear", {{q.linear[0][0], q.linear[0][1]}, {q.linear[1][0], q.linear[1][1]}}},
                {"cubic", {{q.cubic[0][0], q.cubic[0][1]}, {q.cubic[1][0], q.cubic[1][1]}}},
                {"drive", {q.drive[0], q.drive[1]}}};
}

int cmd_meanfield_check(const CommonOpts& opts, const std::string& basis_name) {
    Json pj;
    const SystemParams p = opts.params(&pj);
    const BasisChoice basis = parse_basis(p, basis_name);

    const auto coeffs = duffloq::compute_rwa_coefficients(p, basis);
    const auto vf = meanfield::meanfield_eom(coeffs, p.hbar);
    const auto limit = meanfield::classical_limit(vf, p, basis);

    kb::ResponseCoefficients kbc = kb::kb_coefficients(p);
    kbc.gamma = 0.0;
    const auto kb_vf = meanfield::QuadratureVF::from_response_coefficients(kbc);

    Json out;
    out["config"] = run_header("meanfield-check", opts, pj, Json{{"basis", basis_name}});
    out["classical_limit"] = quadrature_vf_json(limit);
    out["averaged_flow"] = quadrature_vf_json(kb_vf);
    out["max_relative_deviation"] = meanfield::compare_vector_fields(limit, kb_vf);
    out["linear_block_deviation"] = meanfield::linear_block_deviation(limit, kb_vf);

    OutputSink sink(opts.output_path);
    sink.stream() << out.dump(2) << "\n";
    return 0;
}

int cmd_lindblad_scan(const CommonOpts& opts, double delta_min, double delta_max,
                      int delta_steps, double fa_min, double fa_max, int force_steps,
                      double fa_single, double kappa, int dim, const std::string& model_name,
                      double tol, int threads) {
    Json pj;
    const SystemParams p = opts.params(&pj);
    const auto model = lindblad::model_from_name(model_name);
    if (!model) throw std::invalid_argument("unknown model '" + model_name + "'");

    std::vector<double> deltas = make_grid({delta_min, delta_max, delta_steps}, false);
    std::vector<double> forces;
    if (fa_single >= 0.0)
        forces.push_back(force_from_fa(p, fa_single));
    else
        for (double fa : make_grid({fa_min, fa_max, force_steps}, false))
            forces.push_back(force_from_fa(p, fa));

    lindblad::ScanOptions so;
    so.floquet.matvec_tol = tol;
    so.n_threads = threads;
    const auto res = lindblad::mpr_scan(p, deltas, forces, *model, kappa, dim, so);

    OutputSink sink(opts.output_path);
    config::CsvWriter csv(sink.stream());
    csv.comment("duffloq lindblad-scan");
    csv.embed_config(run_header("lindblad-scan", opts, pj,
                                Json{{"delta_min", delta_min},
                                     {"delta_max", delta_max},
                                     {"delta_steps", delta_steps},
                                     {"fa_min", fa_min},
                                     {"fa_max", fa_max},
                                     {"force_steps", force_steps},
                                     {"fa", fa_single},
                                     {"kappa", kappa},
                                     {"dim", dim},
                                     {"model", model_name},
                                     {"tol", tol}}));
    csv.columns({"delta", "force", "n_avg", "converged"});
    for (const auto& pt : res.points)
        csv.row({pt.delta, pt.force, pt.n_avg, pt.converged ? 1.0 : 0.0});
    return 0;
}

int cmd_mpr(const CommonOpts& opts, const std::string& basis_name,
            const std::string& convention, int n_max) {
    Json pj;
    const SystemParams p = opts.params(&pj);
    const BasisChoice basis = parse_basis(p, basis_name);
    lindblad::MPRConvention conv;
    if (convention == "eq6")
        conv = lindblad::MPRConvention::NMinusOneHalf;
    else if (convention == "degeneracy")
        conv = lindblad::MPRConvention::DiagonalDegeneracy;
    else
        throw std::invalid_argument("convention must be 'eq6' or 'degeneracy'");

    OutputSink sink(opts.output_path);
    config::CsvWriter csv(sink.stream());
    csv.comment("duffloq mpr");
    csv.embed_config(run_header("mpr", opts, pj,
                                Json{{"basis", basis_name},
                                     {"convention", convention},
                                     {"n_max", n_max}}));
    csv.columns({"n", "delta_a"});
    for (int n = 1; n <= n_max; ++n)
        csv.row({double(n), lindblad::mpr_predicted(p, basis, n, conv).delta_a});
    return 0;
}

int cmd_figure(const CommonOpts& opts, const std::string& which, int dim, int n_points,
               int threads) {
    OutputSink sink(opts.output_path);
    config::CsvWriter csv(sink.stream());

    if (which == "2a") {
        const SystemParams p = figure_params(1e-2, 1e-2, 2.5e-3);
        const double u_a = duffloq::compute_rwa_coefficients(
                               p, BasisChoice::system_photons(p)).u_c;

        GridOpts grid{-0.2 * 100.0 * u_a, 100.0 * u_a, n_points > 0 ? n_points : 61};
        const auto deltas = make_grid(grid, true);

        classical::SweepOptions so;
        so.settle_periods = -1;  // raised to the 5/gamma floor inside sweep_response
        so.settle_periods = static_cast<int>(std::ceil(10.0 / p.gamma / kTwoPi));
        so.measure_periods = 64;
        so.tol = 1e-9;
        const auto sweep = classical::sweep_response(p, deltas, so);

        csv.comment("duffloq figure 2a: stationary amplitude vs detuning");
        csv.embed_config(run_header("figure", opts, config::to_json(p),
                                    Json{{"figure", "2a"}, {"n_points", grid.n_points}}));
        csv.columns({"delta", "X_exact", "X_kb", "X_rwa_a", "X_rwa_b"});
        for (const auto& pt : sweep.points) {
            SystemParams q = p;
            q.omega = p.omega0 + pt.delta;
            auto largest_stable = [](const std::vector<kb::SteadyState>& ss) {
                double best = 0.0;
                for (const auto& s : ss)
                    if (s.stable) best = std::max(best, s.X());
                return best;
            };
            const double x_kb = largest_stable(kb::steady_states(q));
            const double x_a = largest_stable(kb::response_steady_states(
                meanfield::rotating_frame_response(q, BasisChoice::system_photons(q))));
            const double x_b = largest_stable(kb::response_steady_states(
                meanfield::rotating_frame_response(q, BasisChoice::pump_photons(q))));
            csv.row({pt.delta, pt.lockin.X, x_kb, x_a, x_b});
        }
        if (sweep.failed_index) return 2;
        return 0;
    }

    if (which == "2c") {
        SystemParams p;
        p.m = p.omega0 = p.hbar = 1.0;
        p.alpha = 0.0;
        p.gamma = 0.0;
        p.omega = 1.4;  // delta_a / omega0 = 0.4; 7 drive periods = 5 bare periods
        p.F = force_from_fa(p, 3.5e-3);

        const double common_period = 10.0 * std::numbers::pi;
        const int n_common = n_points > 0 ? n_points : 20;
        const auto traj =
            classical::integrate({0.0, 0.0}, 0.0, n_common * common_period, p, 1e-10, 64);
        const auto spec = classical::periodogram(traj, classical::WindowKind::Rectangular);
        const auto tones = classical::driven_ho_exact(p, 0.0, 0.0);

        const double pred_b = p.F / (p.m * std::abs(p.omega * p.omega - p.omega0 * p.omega0));
        const double pred_a =
            p.F / (2.0 * p.m * p.omega0 * std::abs(p.omega - p.omega0));

        csv.comment("duffloq figure 2c: power spectral density of the closed driven oscillator");
        csv.comment("exact tones: A(omega) = " + config::format_double(std::abs(tones.A_omega)) +
                    ", A(omega0) = " + config::format_double(std::hypot(tones.C, tones.S)));
        csv.comment("first-order amplitude at omega: pump-photon basis " +
                    config::format_double(pred_b) + ", system-photon basis " +
                    config::format_double(pred_a));
        csv.embed_config(run_header("figure", opts, config::to_json(p),
                                    Json{{"figure", "2c"}, {"common_periods", n_common}}));
        csv.columns({"omega_response", "psd"});
        for (Eigen::Index i = 0; i < spec.omega.size(); ++i)
            csv.row({spec.omega(i), spec.psd(i)});
        return 0;
    }

    if (which == "3b") {
        const SystemParams p = figure_params(1e-2, 0.8, 0.0);
        const double u_a = duffloq::compute_rwa_coefficients(
                               p, BasisChoice::system_photons(p)).u_c;
        const int nd = n_points > 0 ? n_points : 61;
        const auto deltas = make_grid({-1.0 * u_a, 3.0 * u_a, nd}, false);
        std::vector<double> forces;
        for (double fa : make_grid({0.05 * u_a, 1.2 * u_a, 24}, false))
            forces.push_back(force_from_fa(p, fa));

        lindblad::ScanOptions so;
        so.n_threads = threads;
        const int n = dim > 0 ? dim : 24;
        const auto res = lindblad::mpr_scan(p, deltas, forces,
                                            lindblad::Model::EffectiveOrder1B, 0.1 * u_a, n, so);

        csv.comment("duffloq figure 3b: stationary photon number map (first-order pump-photon model)");
        csv.embed_config(run_header("figure", opts, config::to_json(p),
                                    Json{{"figure", "3b"}, {"dim", n}, {"n_delta", nd}}));
        csv.columns({"delta", "force", "n_avg", "converged"});
        for (const auto& pt : res.points)
            csv.row({pt.delta, pt.force, pt.n_avg, pt.converged ? 1.0 : 0.0});
        return 0;
    }

    if (which == "3c") {
        const SystemParams p = figure_params(1e-2, 0.8, 0.0);
        const double u_a = duffloq::compute_rwa_coefficients(
                               p, BasisChoice::system_photons(p)).u_c;
        const double kappa = 0.1 * u_a;
        const int n = dim > 0 ? dim : 40;
        const int nd = n_points > 0 ? n_points : 46;
        const auto deltas = make_grid({-0.1 * u_a, 2.15 * u_a, nd}, false);

        lindblad::ScanOptions so;
        so.n_threads = threads;
        const auto res = lindblad::mpr_scan(p, deltas, {p.F},
                                            lindblad::Model::ExactRotated, kappa, n, so);

        csv.comment("duffloq figure 3c: exact rotated-frame scan with resonance predictions");
        for (int k = 1; k <= 5; ++k) {
            const auto pa = lindblad::mpr_predicted(p, BasisChoice::system_photons(p), k,
                                                    lindblad::MPRConvention::NMinusOneHalf);
            const auto pb = lindblad::mpr_predicted(p, BasisChoice::pump_photons(p), k,
                                                    lindblad::MPRConvention::NMinusOneHalf);
            csv.comment("prediction n=" + std::to_string(k) +
                        ": a-basis " + config::format_double(pa.delta_a) +
                        ", b-basis " + config::format_double(pb.delta_a));
        }
        csv.embed_config(run_header("figure", opts, config::to_json(p),
                                    Json{{"figure", "3c"},
                                         {"dim", n},
                                         {"kappa", kappa},
                                         {"n_delta", nd}}));
        csv.columns({"delta", "n_avg", "converged"});
        for (const auto& pt : res.points)
            csv.row({pt.delta, pt.n_avg, pt.converged ? 1.0 : 0.0});
        return 0;
    }

    throw std::invalid_argument("figure must be one of 2a, 2c, 3b, 3c");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"driven Duffing oscillator: averaging, rotating-frame expansions, "
                 "and open-system scans"};
    app.require_subcommand(1);

    CommonOpts common;

    auto* coeffs = app.add_subcommand("coeffs", "rotating-frame coefficients in both bases");
    add_common(coeffs, common);

    auto* sweep = app.add_subcommand("classical-sweep", "stationary amplitude vs detuning");
    add_common(sweep, common);
    GridOpts sweep_grid;
    std::string direction = "down";
    int settle_periods = -1, measure_periods = 64, spp = 64;
    double sweep_tol = 1e-9;
    sweep->add_option("--delta-min", sweep_grid.delta_min);
    sweep->add_option("--delta-max", sweep_grid.delta_max);
    sweep->add_option("--n-points", sweep_grid.n_points);
    sweep->add_option("--direction", direction, "up|down");
    sweep->add_option("--settle-periods", settle_periods, "-1: default 10/gamma");
    sweep->add_option("--measure-periods", measure_periods);
    sweep->add_option("--tol", sweep_tol);
    sweep->add_option("--spp", spp, "samples per drive period");

    auto* kbs = app.add_subcommand("kb-steady", "averaged-flow steady states vs detuning");
    add_common(kbs, common);
    GridOpts kb_grid;
    kbs->add_option("--delta-min", kb_grid.delta_min);
    kbs->add_option("--delta-max", kb_grid.delta_max);
    kbs->add_option("--n-points", kb_grid.n_points);

    auto* psd = app.add_subcommand("psd", "periodogram of the lab-frame trajectory");
    add_common(psd, common);
    int psd_periods = 128, psd_spp = 64;
    std::string psd_window = "rect";
    double psd_x0 = 0.0, psd_p0 = 0.0, psd_tol = 1e-10;
    psd->add_option("--periods", psd_periods, "drive periods to integrate");
    psd->add_option("--spp", psd_spp);
    psd->add_option("--window", psd_window, "rect|hann");
    psd->add_option("--x0", psd_x0);
    psd->add_option("--p0", psd_p0);
    psd->add_option("--tol", psd_tol);

    auto* vv = app.add_subcommand("vv", "effective Hamiltonian matrix and fitted coefficients");
    add_common(vv, common);
    std::string vv_basis = "b";
    int vv_order = 1, vv_dim = 32;
    vv->add_option("--basis", vv_basis, "a|b");
    vv->add_option("--order", vv_order, "1|2");
    vv->add_option("--dim", vv_dim);

    auto* mf = app.add_subcommand("meanfield-check",
                                  "classical limit vs averaged flow coefficients");
    add_common(mf, common);
    std::string mf_basis = "b";
    mf->add_option("--basis", mf_basis, "a|b");

    auto* scan = app.add_subcommand("lindblad-scan", "stationary photon number scan");
    add_common(scan, common);
    double sc_dmin = 0.0, sc_dmax = 0.02, sc_famin = 8e-3, sc_famax = 8e-3, sc_fa = -1.0;
    int sc_dsteps = 41, sc_fsteps = 1, sc_dim = 40, sc_threads = 0;
    double sc_kappa = 1e-3, sc_tol = 3e-8;
    std::string sc_model = "exact-rotated";
    scan->add_option("--delta-min", sc_dmin);
    scan->add_option("--delta-max", sc_dmax);
    scan->add_option("--delta-steps", sc_dsteps);
    scan->add_option("--force-min", sc_famin, "drive in F_a units");
    scan->add_option("--force-max", sc_famax);
    scan->add_option("--force-steps", sc_fsteps);
    scan->add_option("--force", sc_fa, "single drive value in F_a units");
    scan->add_option("--kappa", sc_kappa);
    scan->add_option("--dim", sc_dim);
    scan->add_option("--model", sc_model,
                     "exact-rotated|effective-order1-a|effective-order1-b|effective-order2-b");
    scan->add_option("--tol", sc_tol);
    scan->add_option("--threads", sc_threads, "0: hardware concurrency");

    auto* mpr = app.add_subcommand("mpr", "predicted multiphoton resonance positions");
    add_common(mpr, common);
    std::string mpr_basis = "b", mpr_conv = "eq6";
    int mpr_nmax = 5;
    mpr->add_option("--basis", mpr_basis, "a|b");
    mpr->add_option("--convention", mpr_conv, "eq6|degeneracy");
    mpr->add_option("--n-max", mpr_nmax);

    auto* fig = app.add_subcommand("figure", "canonical parameter sets, plot-ready output");
    add_common(fig, common);
    std::string fig_which;
    int fig_dim = 0, fig_points = 0, fig_threads = 0;
    fig->add_option("which", fig_which, "2a|2c|3b|3c")->required();
    fig->add_option("--dim", fig_dim);
    fig->add_option("--n-points", fig_points);
    fig->add_option("--threads", fig_threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    // environment override for parallel scans
    if (const char* env = std::getenv("DUFFLOQ_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) {
            sc_threads = n;
            fig_threads = n;
        }
    }

    try {
        if (coeffs->parsed()) return cmd_coeffs(common);
        if (sweep->parsed())
            return cmd_classical_sweep(common, sweep_grid, direction, settle_periods,
                                       measure_periods, sweep_tol, spp);
        if (kbs->parsed()) return cmd_kb_steady(common, kb_grid);
        if (psd->parsed())
            return cmd_psd(common, psd_periods, psd_spp, psd_window, psd_x0, psd_p0, psd_tol);
        if (vv->parsed()) return cmd_vv(common, vv_basis, vv_order, vv_dim);
        if (mf->parsed()) return cmd_meanfield_check(common, mf_basis);
        if (scan->parsed())
            return cmd_lindblad_scan(common, sc_dmin, sc_dmax, sc_dsteps, sc_famin, sc_famax,
                                     sc_fsteps, sc_fa, sc_kappa, sc_dim, sc_model, sc_tol,
                                     sc_threads);
        if (mpr->parsed()) return cmd_mpr(common, mpr_basis, mpr_conv, mpr_nmax);
        if (fig->parsed()) return cmd_figure(common, fig_which, fig_dim, fig_points, fig_threads);
    } catch (const duffloq::ode::NonConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
