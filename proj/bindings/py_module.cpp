// py_module.cpp — python bindings for the main operations.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "duffloq/classical.hpp"
#include "duffloq/lindblad.hpp"
#include "duffloq/meanfield.hpp"
#include "duffloq/params.hpp"
#include "duffloq/slowflow.hpp"
#include "duffloq/vanvleck.hpp"

namespace py = pybind11;
using namespace duffloq;

namespace {

BasisChoice basis_from_string(const SystemParams& p, const std::string& name) {
    if (name == "a") return BasisChoice::system_photons(p);
    if (name == "b") return BasisChoice::pump_photons(p);
    throw std::invalid_argument("basis must be 'a' or 'b'");
}

lindblad::MPRConvention convention_from_string(const std::string& name) {
    if (name == "eq6") return lindblad::MPRConvention::NMinusOneHalf;
    if (name == "degeneracy") return lindblad::MPRConvention::DiagonalDegeneracy;
    throw std::invalid_argument("convention must be 'eq6' or 'degeneracy'");
}

classical::Trajectory trajectory_from_arrays(const Eigen::VectorXd& t, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& p) {
    classical::Trajectory traj;
    traj.t = t;
    traj.x = x;
    traj.p = p.size() ? p : Eigen::VectorXd::Zero(x.size());
    traj.validate();
    return traj;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "driven Duffing oscillator: averaging, rotating-frame expansions, "
              "open-system scans";

    py::class_<SystemParams>(m, "SystemParams")
        .def(py::init([](double mass, double omega0, double alpha, double F, double omega,
                         double gamma, double hbar) {
                 SystemParams p{mass, omega0, alpha, F, omega, gamma, hbar};
                 p.validate();
                 return p;
             }),
             py::arg("m") = 1.0, py::arg("omega0") = 1.0, py::arg("alpha") = 0.0,
             py::arg("F") = 0.0, py::arg("omega") = 1.0, py::arg("gamma") = 0.0,
             py::arg("hbar") = 1.0)
        .def_readwrite("m", &SystemParams::m)
        .def_readwrite("omega0", &SystemParams::omega0)
        .def_readwrite("alpha", &SystemParams::alpha)
        .def_readwrite("F", &SystemParams::F)
        .def_readwrite("omega", &SystemParams::omega)
        .def_readwrite("gamma", &SystemParams::gamma)
        .def_readwrite("hbar", &SystemParams::hbar)
        .def("__repr__", [](const SystemParams& p) {
            return "SystemParams(m=" + std::to_string(p.m) +
                   ", omega0=" + std::to_string(p.omega0) + ", alpha=" + std::to_string(p.alpha) +
                   ", F=" + std::to_string(p.F) + ", omega=" + std::to_string(p.omega) +
                   ", gamma=" + std::to_string(p.gamma) + ", hbar=" + std::to_string(p.hbar) +
                   ")";
        });

    m.def(
        "rwa_coefficients",
        [](const SystemParams& p, const std::string& basis) {
            const auto c = compute_rwa_coefficients(p, basis_from_string(p, basis));
            py::dict d;
            d["delta_c"] = c.delta_c;
            d["u_c"] = c.u_c;
            d["f_c"] = c.f_c;
            d["omega_c"] = c.omega_c;
            return d;
        },
        py::arg("params"), py::arg("basis"));

    m.def(
        "bogoliubov_coefficients",
        [](double omega0, double omega) {
            const auto b = bogoliubov_coefficients(omega0, omega);
            return py::make_tuple(b.mu, b.nu, b.z);
        },
        py::arg("omega0"), py::arg("omega"));

    m.def("validity_epsilon", &validity_epsilon, py::arg("params"), py::arg("X"));

    // classical
    m.def(
        "integrate",
        [](const SystemParams& p, double x0, double p0, double t0, double t1, double tol,
           int spp) {
            const auto traj = classical::integrate({x0, p0}, t0, t1, p, tol, spp);
            py::dict d;
            d["t"] = traj.t;
            d["x"] = traj.x;
            d["p"] = traj.p;
            return d;
        },
        py::arg("params"), py::arg("x0"), py::arg("p0"), py::arg("t0"), py::arg("t1"),
        py::arg("tol") = 1e-9, py::arg("samples_per_period") = 64);

    m.def(
        "lockin_amplitude",
        [](const Eigen::VectorXd& t, const Eigen::VectorXd& x, double omega, int n_periods) {
            const auto r = classical::lockin_amplitude(
                trajectory_from_arrays(t, x, Eigen::VectorXd()), omega, n_periods);
            return py::make_tuple(r.u, r.v, r.X);
        },
        py::arg("t"), py::arg("x"), py::arg("omega"), py::arg("n_periods"));

    m.def(
        "periodogram",
        [](const Eigen::VectorXd& t, const Eigen::VectorXd& x, const std::string& window) {
            const auto w = window == "hann" ? classical::WindowKind::Hann
                                            : classical::WindowKind::Rectangular;
            const auto s =
                classical::periodogram(trajectory_from_arrays(t, x, Eigen::VectorXd()), w);
            return py::make_tuple(s.omega, s.psd);
        },
        py::arg("t"), py::arg("x"), py::arg("window") = "rect");

    m.def(
        "sweep_response",
        [](const SystemParams& p, const std::vector<double>& deltas, const std::string& direction,
           int settle_periods, int measure_periods, double tol) {
            classical::SweepOptions so;
            so.direction = direction == "up" ? classical::SweepDirection::Up
                                             : classical::SweepDirection::Down;
            so.settle_periods = settle_periods;
            so.measure_periods = measure_periods;
            so.tol = tol;
            const auto res = classical::sweep_response(p, deltas, so);
            py::list out;
            for (const auto& pt : res.points) {
                py::dict d;
                d["delta"] = pt.delta;
                d["u"] = pt.lockin.u;
                d["v"] = pt.lockin.v;
                d["X"] = pt.lockin.X;
                out.append(d);
            }
            return out;
        },
        py::arg("params"), py::arg("deltas"), py::arg("direction") = "down",
        py::arg("settle_periods") = 0, py::arg("measure_periods") = 64, py::arg("tol") = 1e-9);

    // averaged flow
    m.def(
        "kb_steady_states",
        [](const SystemParams& p) {
            py::list out;
            for (const auto& st : kb::steady_states(p)) {
                py::dict d;
                d["u"] = st.state.u;
                d["v"] = st.state.v;
                d["X"] = st.X();
                d["stable"] = st.stable;
                d["eigenvalues"] = py::make_tuple(st.eigenvalues[0], st.eigenvalues[1]);
                out.append(d);
            }
            return out;
        },
        py::arg("params"));

    m.def(
        "slow_flow_rhs",
        [](const SystemParams& p, double u, double v) {
            const auto r = kb::slow_flow_rhs({u, v}, p);
            return py::make_tuple(r.u, r.v);
        },
        py::arg("params"), py::arg("u"), py::arg("v"));

    // Fock space
    m.def("annihilation", &fock::annihilation, py::arg("dim"));
    m.def("number_operator", &fock::number, py::arg("dim"));
    m.def("position_operator", &fock::position, py::arg("dim"), py::arg("m"), py::arg("omega_c"),
          py::arg("hbar"));
    m.def("momentum_operator", &fock::momentum, py::arg("dim"), py::arg("m"), py::arg("omega_c"),
          py::arg("hbar"));
    m.def("squeeze_operator", &fock::squeeze_operator, py::arg("z"), py::arg("dim"));

    // rotating-frame expansion
    m.def(
        "rotated_hamiltonian",
        [](const SystemParams& p, const std::string& basis, double t, int dim) {
            return vanvleck::rotated_hamiltonian(p, basis_from_string(p, basis), t, dim);
        },
        py::arg("params"), py::arg("basis"), py::arg("t"), py::arg("dim"));

    m.def(
        "effective_hamiltonian",
        [](const SystemParams& p, const std::string& basis, int order, int dim) {
            const auto b = basis_from_string(p, basis);
            return vanvleck::effective_hamiltonian(vanvleck::fourier_components(p, b, dim), order,
                                                   b)
                .matrix;
        },
        py::arg("params"), py::arg("basis"), py::arg("order"), py::arg("dim"));

    m.def(
        "rwa_hamiltonian",
        [](const SystemParams& p, const std::string& basis, int dim) {
            const auto b = basis_from_string(p, basis);
            return vanvleck::rwa_analytic(compute_rwa_coefficients(p, b), p.hbar, dim).matrix;
        },
        py::arg("params"), py::arg("basis"), py::arg("dim"));

    // mean-field classical limit
    m.def(
        "classical_limit",
        [](const SystemParams& p, const std::string& basis) {
            const auto b = basis_from_string(p, basis);
            const auto q =
                meanfield::classical_limit(meanfield::meanfield_eom(
                                               compute_rwa_coefficients(p, b), p.hbar),
                                           p, b);
            kb::ResponseCoefficients kbc = kb::kb_coefficients(p);
            kbc.gamma = 0.0;
            const auto ref = meanfield::QuadratureVF::from_response_coefficients(kbc);
            py::dict d;
            d["linear"] = py::make_tuple(py::make_tuple(q.linear[0][0], q.linear[0][1]),
                                         py::make_tuple(q.linear[1][0], q.linear[1][1]));
            d["cubic"] = py::make_tuple(py::make_tuple(q.cubic[0][0], q.cubic[0][1]),
                                        py::make_tuple(q.cubic[1][0], q.cubic[1][1]));
            d["drive"] = py::make_tuple(q.drive[0], q.drive[1]);
            d["deviation_from_averaged_flow"] = meanfield::compare_vector_fields(q, ref);
            return d;
        },
        py::arg("params"), py::arg("basis"));

    // open system
    m.def("liouvillian", &lindblad::liouvillian, py::arg("hamiltonian"), py::arg("kappa"),
          py::arg("hbar"));

    m.def(
        "stationary_photon_number",
        [](const SystemParams& p, const std::string& model, double kappa, int dim) {
            const auto mm = lindblad::model_from_name(model);
            if (!mm) throw std::invalid_argument("unknown model '" + model + "'");
            const auto run = lindblad::run_stationary(p, *mm, kappa, dim);
            py::dict d;
            d["n_avg"] = run.n_avg;
            d["converged"] = run.converged;
            d["tail_occupation"] = run.tail_occupation;
            return d;
        },
        py::arg("params"), py::arg("model"), py::arg("kappa"), py::arg("dim"));

    m.def(
        "mpr_predicted",
        [](const SystemParams& p, const std::string& basis, int n, const std::string& convention) {
            return lindblad::mpr_predicted(p, basis_from_string(p, basis), n,
                                           convention_from_string(convention))
                .delta_a;
        },
        py::arg("params"), py::arg("basis"), py::arg("n"), py::arg("convention") = "eq6");

    m.def("mpr_peaks", &lindblad::mpr_peaks, py::arg("delta"), py::arg("n_avg"),
          py::arg("prominence_frac") = 0.05);
}
