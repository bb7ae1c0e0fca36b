#include "duffloq/lindblad.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "duffloq/ode.hpp"

namespace duffloq::lindblad {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI{0.0, 1.0};

Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho) {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index n) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n, n);
}

Complex vec_trace(const Eigen::VectorXcd& v, Eigen::Index n) {
    Complex tr{0.0, 0.0};
    for (Eigen::Index k = 0; k < n; ++k) tr += v(k + n * k);
    return tr;
}

double vec_number_expectation(const Eigen::VectorXcd& v, Eigen::Index n) {
    double out = 0.0;
    for (Eigen::Index k = 1; k < n; ++k) out += static_cast<double>(k) * v(k + n * k).real();
    return out;
}

double vec_tail_occupation(const Eigen::VectorXcd& v, Eigen::Index n) {
    double out = 0.0;
    for (Eigen::Index k = std::max<Eigen::Index>(0, n - 4); k < n; ++k)
        out += v(k + n * k).real();
    return out;
}

void check_hermitian(const Eigen::MatrixXcd& h) {
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("liouvillian: Hamiltonian is not Hermitian to 1e-10");
}
}  // namespace

const char* model_name(Model m) {
    switch (m) {
        case Model::ExactRotated: return "exact-rotated";
        case Model::EffectiveOrder1A: return "effective-order1-a";
        case Model::EffectiveOrder1B: return "effective-order1-b";
        case Model::EffectiveOrder2B: return "effective-order2-b";
    }
    return "?";
}

std::optional<Model> model_from_name(const std::string& name) {
    if (name == "exact-rotated" || name == "exact") return Model::ExactRotated;
    if (name == "effective-order1-a" || name == "rwa-a") return Model::EffectiveOrder1A;
    if (name == "effective-order1-b" || name == "rwa-b") return Model::EffectiveOrder1B;
    if (name == "effective-order2-b" || name == "order2-b") return Model::EffectiveOrder2B;
    return std::nullopt;
}

SuperOperator liouvillian_with_jump(const Eigen::MatrixXcd& h, const Eigen::MatrixXcd& jump,
                                    double rate, double hbar) {
    check_hermitian(h);
    if (rate < 0.0) throw std::invalid_argument("liouvillian: rate must be >= 0");
    if (!(hbar > 0.0)) throw std::invalid_argument("liouvillian: hbar must be > 0");
    if (h.rows() != jump.rows() || h.cols() != jump.cols())
        throw std::invalid_argument("liouvillian: dimension mismatch");

    const Eigen::Index n = h.rows();
    SuperOperator l_op = SuperOperator::Zero(n * n, n * n);
    const Eigen::MatrixXcd jj = jump.adjoint() * jump;

    // vec(rho)(i + n j) = rho(i, j):
    //   -(i/hbar)(H rho - rho H) + rate (J rho J' - 1/2 {J'J, rho})
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::Index row = i + n * j;
            for (Eigen::Index k = 0; k < n; ++k) {
                l_op(row, k + n * j) += -kI / hbar * h(i, k) - 0.5 * rate * jj(i, k);
                l_op(row, i + n * k) += kI / hbar * h(k, j) - 0.5 * rate * jj(k, j);
                for (Eigen::Index l = 0; l < n; ++l)
                    l_op(row, k + n * l) += rate * jump(i, k) * std::conj(jump(j, l));
            }
        }
    }
    return l_op;
}

SuperOperator liouvillian(const Eigen::MatrixXcd& h, double kappa, double hbar) {
    return liouvillian_with_jump(h, fock::annihilation(h.rows()), kappa, hbar);
}

// ---------------------------------------------------------------------------
// steady_state_direct

namespace {
fock::DensityMatrix hermitized(const Eigen::MatrixXcd& m) {
    fock::DensityMatrix rho{0.5 * (m + m.adjoint())};
    const double tr = rho.data.trace().real();
    if (std::abs(tr) > 1e-10)
        rho.data /= tr;
    else
        rho.data /= rho.data.norm();
    return rho;
}
}  // namespace

SteadyStateResult steady_state_direct(const SuperOperator& l_op) {
    const Eigen::Index n2 = l_op.rows();
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(double(n2))));
    if (n * n != n2 || l_op.cols() != n2)
        throw std::invalid_argument("steady_state_direct: superoperator must be N^2 x N^2");

    const double l_norm = l_op.norm();
    const double resid_tol = 1e-10 * std::max(l_norm, 1e-300);

    // Rank analysis first: a null space of dimension > 1 must be reported
    // with all its basis vectors.
    Eigen::FullPivLU<SuperOperator> flu(l_op);
    flu.setThreshold(1e-9);
    const Eigen::Index null_dim = n2 - flu.rank();

    if (null_dim > 1) {
        const Eigen::MatrixXcd kernel = flu.kernel();
        SteadyStateResult out;
        double worst = 0.0;
        for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
            fock::DensityMatrix rho = hermitized(unvec(kernel.col(c), n));
            worst = std::max(worst, (l_op * vec(rho.data)).norm());
            out.states.push_back(std::move(rho));
        }
        out.residual = l_norm > 0.0 ? worst / l_norm : worst;
        return out;
    }

    // Unique null vector: solve the trace-normalized bordered system, with
    // the d rho_00/dt row (redundant for a trace-preserving generator)
    // replaced by the trace constraint.
    SuperOperator a = l_op;
    a.row(0).setZero();
    for (Eigen::Index k = 0; k < n; ++k) a(0, k + n * k) = 1.0;
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n2);
    rhs(0) = 1.0;
    Eigen::VectorXcd x = a.partialPivLu().solve(rhs);
    if (!x.allFinite())
        throw std::runtime_error("steady_state_direct: bordered solve failed");

    fock::DensityMatrix rho = hermitized(unvec(x, n));
    const double resid = (l_op * vec(rho.data)).norm();
    if (resid >= resid_tol)
        throw std::runtime_error("steady_state_direct: null-vector residual " +
                                 std::to_string(resid) + " exceeds tolerance");
    SteadyStateResult out;
    out.states.push_back(std::move(rho));
    out.residual = l_norm > 0.0 ? resid / l_norm : resid;
    return out;
}

// ---------------------------------------------------------------------------
// PeriodicGenerator

namespace {
using Triplets = std::vector<Eigen::Triplet<Complex>>;

void add_left_mult(Triplets& tri, const Eigen::MatrixXcd& m, Complex scale, double drop) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index k = 0; k < n; ++k)
        for (Eigen::Index i = 0; i < n; ++i)
            if (std::abs(m(i, k)) > drop)
                for (Eigen::Index j = 0; j < n; ++j)
                    tri.emplace_back(i + n * j, k + n * j, scale * m(i, k));
}

void add_right_mult(Triplets& tri, const Eigen::MatrixXcd& m, Complex scale, double drop) {
    const Eigen::Index n = m.rows();
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index l = 0; l < n; ++l)
            if (std::abs(m(l, j)) > drop)
                for (Eigen::Index i = 0; i < n; ++i)
                    tri.emplace_back(i + n * j, i + n * l, scale * m(l, j));
}

SparseSuper build_sparse(Eigen::Index n, const Triplets& tri) {
    SparseSuper s(n * n, n * n);
    s.setFromTriplets(tri.begin(), tri.end());
    s.makeCompressed();
    return s;
}
}  // namespace

PeriodicGenerator::PeriodicGenerator(vanvleck::FourierComponents components, double kappa)
    : dim_(components.dim),
      omega_(components.omega),
      hbar_(components.hbar),
      kappa_(kappa),
      fc_(std::move(components)) {
    if (kappa < 0.0) throw std::invalid_argument("PeriodicGenerator: kappa must be >= 0");
    const Eigen::Index n = dim_;

    double scale = 0.0;
    for (const auto& m : fc_.data) scale = std::max(scale, m.cwiseAbs().maxCoeff());
    const double drop = 1e-15 * std::max(scale, 1.0);

    {
        Triplets tri;
        add_left_mult(tri, fc_.at(0), -kI / hbar_, drop);
        add_right_mult(tri, fc_.at(0), kI / hbar_, drop);
        // photon-loss dissipator on the evolution basis
        const Eigen::MatrixXcd a = fock::annihilation(n);
        for (Eigen::Index k = 1; k < n; ++k)
            for (Eigen::Index l = 1; l < n; ++l)
                tri.emplace_back((k - 1) + n * (l - 1), k + n * l,
                                 kappa_ * std::sqrt(double(k) * double(l)));
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                tri.emplace_back(i + n * j, i + n * j,
                                 -0.5 * kappa_ * (double(i) + double(j)));
        static_part_ = build_sparse(n, tri);
    }

    for (int l = -fc_.l_max; l <= fc_.l_max; ++l) {
        if (l == 0) continue;
        if (fc_.at(l).cwiseAbs().maxCoeff() <= drop) continue;
        Triplets tri;
        add_left_mult(tri, fc_.at(l), -kI / hbar_, drop);
        add_right_mult(tri, fc_.at(l), kI / hbar_, drop);
        harmonics_.emplace_back(l, build_sparse(n, tri));
    }
}

double PeriodicGenerator::period() const { return kTwoPi / omega_; }

Eigen::MatrixXcd PeriodicGenerator::hamiltonian(double t) const {
    Eigen::MatrixXcd h = fc_.at(0);
    for (int l = 1; l <= fc_.l_max; ++l) {
        const Eigen::MatrixXcd term = std::polar(1.0, omega_ * t * l) * fc_.at(l);
        h += term + term.adjoint();
    }
    return h;
}

Eigen::VectorXcd PeriodicGenerator::apply(double t, const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out = static_part_ * v;
    for (const auto& [l, s] : harmonics_)
        out += std::polar(1.0, omega_ * t * l) * (s * v).eval();
    return out;
}

// ---------------------------------------------------------------------------
// evolve

namespace {
template <class Rhs>
EvolveResult evolve_impl(const fock::DensityMatrix& rho0, Rhs&& rhs, Eigen::Index n,
                         const std::vector<double>& sample_times, const EvolveOptions& opts) {
    if (!(opts.tol > 1e-12) || !(opts.tol < 1e-4))
        throw std::invalid_argument("evolve: tol must lie in (1e-12, 1e-4)");
    if (sample_times.size() < 2)
        throw std::invalid_argument("evolve: need at least two sample times");
    for (std::size_t i = 1; i < sample_times.size(); ++i)
        if (!(sample_times[i] > sample_times[i - 1]))
            throw std::invalid_argument("evolve: sample times must be strictly increasing");
    if (rho0.data.rows() != n)
        throw std::invalid_argument("evolve: state dimension mismatch");

    EvolveResult res;
    res.min_eigenvalue = rho0.min_eigenvalue();

    ode::Options oo;
    oo.rtol = opts.tol;
    oo.atol = 1e-3 * opts.tol;
    oo.dense = true;

    std::size_t next = 0;
    auto record = [&](double t, const Eigen::VectorXcd& v) {
        fock::DensityMatrix rho{unvec(v, n)};
        res.max_trace_drift =
            std::max(res.max_trace_drift, std::abs(rho.data.trace() - Complex(1.0, 0.0)));
        res.max_hermiticity_defect = std::max(res.max_hermiticity_defect, rho.hermiticity_defect());
        if (opts.check_positivity) {
            const double mev = rho.min_eigenvalue();
            res.min_eigenvalue = std::min(res.min_eigenvalue, mev);
            if (mev < -opts.negativity_tol)
                throw std::runtime_error("evolve: negativity " + std::to_string(-mev) +
                                         " beyond tolerance at t = " + std::to_string(t));
        }
        res.times.push_back(t);
        res.states.push_back(std::move(rho));
    };

    auto observer = [&](const ode::DenseStep<Eigen::VectorXcd>& ds, double t_new,
                        const Eigen::VectorXcd& y_new) {
        const double drift = std::abs(vec_trace(y_new, n) - Complex(1.0, 0.0));
        if (drift > opts.trace_tol)
            throw std::runtime_error("evolve: trace drift " + std::to_string(drift) +
                                     " beyond tolerance at t = " + std::to_string(t_new));
        while (next < sample_times.size()) {
            const double ts = sample_times[next];
            if (ts > t_new + 1e-12 * std::max(1.0, std::abs(t_new))) break;
            record(ts, (ds.h == 0.0 || ts >= t_new) ? y_new : ds.eval(ts));
            ++next;
        }
    };

    const double t0 = sample_times.front(), t1 = sample_times.back();
    Eigen::VectorXcd v0 = vec(rho0.data);
    ode::integrate(rhs, std::move(v0), t0, t1, oo, observer);
    if (next != sample_times.size()) throw std::runtime_error("evolve: sampling incomplete");
    return res;
}
}  // namespace

EvolveResult evolve(const fock::DensityMatrix& rho0, const SuperOperator& l_op,
                    const std::vector<double>& sample_times, const EvolveOptions& opts) {
    const Eigen::Index n = rho0.data.rows();
    if (l_op.rows() != n * n)
        throw std::invalid_argument("evolve: superoperator/state dimension mismatch");
    auto rhs = [&l_op](double, const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        return l_op * v;
    };
    return evolve_impl(rho0, rhs, n, sample_times, opts);
}

EvolveResult evolve(const fock::DensityMatrix& rho0, const PeriodicGenerator& gen,
                    const std::vector<double>& sample_times, const EvolveOptions& opts) {
    auto rhs = [&gen](double t, const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        return gen.apply(t, v);
    };
    return evolve_impl(rho0, rhs, gen.dim(), sample_times, opts);
}

double photon_number_average(const std::vector<double>& times, const std::vector<double>& values,
                             double period, int k_periods) {
    if (times.size() != values.size() || times.size() < 2)
        throw std::invalid_argument("photon_number_average: bad series");
    if (k_periods < 4) throw std::invalid_argument("photon_number_average: need k >= 4 periods");

    const double window = k_periods * period;
    const double t1 = times.back();
    const double t0 = t1 - window;
    std::size_t i0 = 0;
    while (i0 < times.size() && times[i0] < t0 - 1e-9 * period) ++i0;
    if (i0 >= times.size() - 1 || times[i0] > t0 + 1e-6 * period)
        throw std::invalid_argument("photon_number_average: window not covered by samples");

    double min_dt = std::numeric_limits<double>::infinity();
    double acc = 0.0;
    for (std::size_t i = i0 + 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        min_dt = std::min(min_dt, dt);
        acc += 0.5 * (values[i] + values[i - 1]) * dt;
    }
    if (min_dt * 16.0 > period * (1.0 + 1e-9))
        throw std::invalid_argument("photon_number_average: need >= 16 samples per period");
    return acc / (times.back() - times[i0]);
}

// ---------------------------------------------------------------------------
// Floquet steady state

namespace {
struct GmresOutcome {
    Eigen::VectorXcd x;
    bool converged = false;
    int matvecs = 0;
};

template <class Op>
GmresOutcome gmres(const Op& op, const Eigen::VectorXcd& b, double tol, int max_it) {
    const Eigen::Index n = b.size();
    GmresOutcome out;
    const double beta = b.norm();
    if (beta == 0.0) {
        out.x = Eigen::VectorXcd::Zero(n);
        out.converged = true;
        return out;
    }

    const int m = max_it;
    Eigen::MatrixXcd v(n, m + 1);
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 1, m);
    Eigen::VectorXcd cs(m), sn(m), g = Eigen::VectorXcd::Zero(m + 1);
    v.col(0) = b / beta;
    g(0) = beta;

    int j = 0;
    for (; j < m; ++j) {
        Eigen::VectorXcd w = op(v.col(j));
        ++out.matvecs;
        for (int i = 0; i <= j; ++i) {
            h(i, j) = v.col(i).dot(w);
            w -= h(i, j) * v.col(i);
        }
        const double h_next = w.norm();
        h(j + 1, j) = h_next;

        // plane rotations [c, s; -conj(s), c] with real c
        for (int i = 0; i < j; ++i) {
            const Complex tmp = cs(i) * h(i, j) + sn(i) * h(i + 1, j);
            h(i + 1, j) = -std::conj(sn(i)) * h(i, j) + cs(i) * h(i + 1, j);
            h(i, j) = tmp;
        }
        {
            const Complex a = h(j, j), bb = h(j + 1, j);
            const double r = std::hypot(std::abs(a), std::abs(bb));
            if (r == 0.0) {
                cs(j) = 1.0;
                sn(j) = 0.0;
            } else if (std::abs(a) == 0.0) {
                cs(j) = 0.0;
                sn(j) = 1.0;
            } else {
                cs(j) = std::abs(a) / r;
                sn(j) = (a / std::abs(a)) * std::conj(bb) / r;
            }
            h(j, j) = cs(j) * a + sn(j) * bb;
            h(j + 1, j) = 0.0;
            const Complex tmp = cs(j) * g(j) + sn(j) * g(j + 1);
            g(j + 1) = -std::conj(sn(j)) * g(j) + cs(j) * g(j + 1);
            g(j) = tmp;
        }

        const double res = std::abs(g(j + 1));
        const bool breakdown = h_next < 1e-300;
        if (res <= tol * beta || breakdown) {
            ++j;
            out.converged = true;
            break;
        }
        v.col(j + 1) = w / h_next;
    }

    const int used = std::min(j, m);
    Eigen::VectorXcd y = h.topLeftCorner(used, used)
                             .triangularView<Eigen::Upper>()
                             .solve(g.head(used));
    out.x = v.leftCols(used) * y;
    return out;
}

// Reshuffle S[(i + N k), (j + N l)] -> T[(i + N j), (k + N l)]; maps the
// outer-product form vec(B) vec(B)^dag onto the superoperator of
// rho -> B rho B^dag.
Eigen::MatrixXcd reshuffle(const Eigen::MatrixXcd& s, Eigen::Index n) {
    Eigen::MatrixXcd t(n * n, n * n);
    for (Eigen::Index l = 0; l < n; ++l)
        for (Eigen::Index k = 0; k < n; ++k)
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i)
                    t(i + n * j, k + n * l) = s(i + n * k, j + n * l);
    return t;
}
}  // namespace

StationaryResult floquet_steady_state(const PeriodicGenerator& gen, const FloquetOptions& opts) {
    const Eigen::Index n = gen.dim();
    const Eigen::Index n2 = n * n;
    const double t_period = gen.period();
    const double hbar = gen.hbar();

    // One-period unitary of the Hamiltonian part, sampled on the Simpson grid.
    const int panels = std::max(8, opts.quad_panels);
    const int nodes = 2 * panels + 1;
    const double hnode = t_period / (nodes - 1);
    std::vector<Eigen::MatrixXcd> u_nodes(nodes);
    {
        auto rhs = [&](double t, const Eigen::MatrixXcd& u) -> Eigen::MatrixXcd {
            return (-kI / hbar) * (gen.hamiltonian(t) * u);
        };
        ode::Options oo;
        oo.rtol = opts.unitary_tol;
        oo.atol = 1e-2 * opts.unitary_tol;
        oo.dense = true;
        int next = 0;
        auto observer = [&](const ode::DenseStep<Eigen::MatrixXcd>& ds, double t_new,
                            const Eigen::MatrixXcd& y_new) {
            while (next < nodes) {
                const double tg = next * hnode;
                if (tg > t_new + 1e-12 * std::max(1.0, t_new)) break;
                u_nodes[next] = (ds.h == 0.0 || tg >= t_new) ? y_new : ds.eval(tg);
                ++next;
            }
        };
        ode::integrate(rhs, Eigen::MatrixXcd(Eigen::MatrixXcd::Identity(n, n)), 0.0, t_period,
                       oo, observer);
        if (next != nodes) throw std::runtime_error("floquet: unitary sampling incomplete");
    }
    const Eigen::MatrixXcd& u_final = u_nodes.back();

    // Time-averaged dissipator in the interaction picture of the unitary,
    //   T1 = kappa int_0^T D[ U'(t) a U(t) ] dt,
    // assembled from the Simpson-weighted stack of vec(b~(t)).
    const Eigen::MatrixXcd a_op = fock::annihilation(n);
    Eigen::MatrixXcd t1;
    {
        Eigen::MatrixXcd b_stack(n2, nodes);
        Eigen::MatrixXcd n_bar = Eigen::MatrixXcd::Zero(n, n);
        for (int k = 0; k < nodes; ++k) {
            const double w = hnode / 3.0 * (k == 0 || k == nodes - 1 ? 1.0 : (k % 2 ? 4.0 : 2.0));
            const Eigen::MatrixXcd bt = u_nodes[k].adjoint() * (a_op * u_nodes[k]);
            b_stack.col(k) = std::sqrt(gen.kappa() * w) * vec(bt);
            n_bar += (gen.kappa() * w) * (bt.adjoint() * bt);
        }
        t1 = reshuffle(b_stack * b_stack.adjoint(), n);
        for (Eigen::Index jb = 0; jb < n; ++jb)
            t1.block(n * jb, n * jb, n, n) -= 0.5 * n_bar;
        for (Eigen::Index lb = 0; lb < n; ++lb)
            for (Eigen::Index jb = 0; jb < n; ++jb)
                t1.block(n * jb, n * lb, n, n).diagonal().array() -= 0.5 * n_bar(lb, jb);
    }

    // Preconditioner: P~ = Ucal (I + T1) with Ucal rho = U rho U'. Solving
    // (P~ - I + w tr) x = y reduces to A x = Ucal' y with
    // A = I + T1 - Ucal' + w vec(I)^T  (Ucal' w = w since w ~ identity).
    Eigen::MatrixXcd a_mat;
    {
        Eigen::VectorXcd u_dag_vec = vec(Eigen::MatrixXcd(u_final.adjoint()));
        a_mat = -reshuffle(u_dag_vec * u_dag_vec.adjoint(), n);
        a_mat += t1;
        a_mat.diagonal().array() += 1.0;
        const double inv_n = 1.0 / static_cast<double>(n);
        for (Eigen::Index jr = 0; jr < n; ++jr)
            for (Eigen::Index jc = 0; jc < n; ++jc)
                a_mat(jr + n * jr, jc + n * jc) += inv_n;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(std::move(a_mat));

    ode::Options prop_opts;
    prop_opts.rtol = opts.matvec_tol;
    prop_opts.atol = 1e-3 * opts.matvec_tol;
    auto propagate = [&](const Eigen::VectorXcd& v0) {
        auto rhs = [&gen](double t, const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
            return gen.apply(t, v);
        };
        return ode::integrate(rhs, Eigen::VectorXcd(v0), 0.0, t_period, prop_opts);
    };

    Eigen::VectorXcd w_vec = Eigen::VectorXcd::Zero(n2);
    for (Eigen::Index k = 0; k < n; ++k) w_vec(k + n * k) = 1.0 / static_cast<double>(n);

    auto precond = [&](const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
        const Eigen::MatrixXcd m = unvec(y, n);
        return lu.solve(vec(Eigen::MatrixXcd(u_final.adjoint() * m * u_final)));
    };
    auto op = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
        Eigen::VectorXcd cx = propagate(x) - x + w_vec * vec_trace(x, n);
        return precond(cx);
    };

    GmresOutcome sol = gmres(op, precond(w_vec).eval(), opts.gmres_tol, opts.max_matvecs);

    StationaryResult res;
    res.matvecs = sol.matvecs;
    res.rho = hermitized(unvec(sol.x, n));

    // Verification pass: one more period, sampling <n> and the tail.
    const int n_samples = 33;
    std::vector<double> ts(n_samples), nval(n_samples);
    double tail = 0.0;
    {
        ode::Options oo = prop_opts;
        oo.dense = true;
        int next = 0;
        auto rhs = [&gen](double t, const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
            return gen.apply(t, v);
        };
        auto observer = [&](const ode::DenseStep<Eigen::VectorXcd>& ds, double t_new,
                            const Eigen::VectorXcd& y_new) {
            while (next < n_samples) {
                const double tg = t_period * next / (n_samples - 1);
                if (tg > t_new + 1e-12 * std::max(1.0, t_new)) break;
                const Eigen::VectorXcd yg =
                    (ds.h == 0.0 || tg >= t_new) ? y_new : ds.eval(tg);
                ts[next] = tg;
                nval[next] = vec_number_expectation(yg, n);
                tail = std::max(tail, vec_tail_occupation(yg, n));
                ++next;
            }
        };
        const Eigen::VectorXcd v_end =
            ode::integrate(rhs, vec(res.rho.data).eval(), 0.0, t_period, oo, observer);
        if (next != n_samples) throw std::runtime_error("floquet: verification sampling incomplete");
        res.residual = (v_end - vec(res.rho.data)).norm();
    }

    double acc = 0.0;
    for (int k = 1; k < n_samples; ++k)
        acc += 0.5 * (nval[k] + nval[k - 1]) * (ts[k] - ts[k - 1]);
    res.n_avg = acc / t_period;
    res.tail_occupation = tail;
    res.converged = sol.converged && res.residual < 1e-6 * std::max(1.0, sol.x.norm());
    return res;
}

StationaryResult stationary_by_evolution(const PeriodicGenerator& gen,
                                         const fock::DensityMatrix& rho0,
                                         const EvolveStationaryOptions& opts) {
    const double t_period = gen.period();
    const int spp = std::max(16, opts.samples_per_period);

    EvolveOptions eo;
    eo.tol = opts.tol;
    eo.check_positivity = false;
    eo.trace_tol = 1e-6;  // drift accumulates over the long horizon

    StationaryResult res;
    fock::DensityMatrix rho = rho0;
    double t = 0.0;
    double prev_avg = std::numeric_limits<double>::quiet_NaN();
    const Eigen::Index n = gen.dim();

    while (t < opts.max_periods * t_period) {
        const int n_steps = opts.window_periods * spp;
        std::vector<double> ts(n_steps + 1);
        for (int k = 0; k <= n_steps; ++k)
            ts[k] = t + t_period * k / static_cast<double>(spp);
        EvolveResult er = evolve(rho, gen, ts, eo);

        std::vector<double> nv(er.states.size());
        double tail = 0.0;
        for (std::size_t k = 0; k < er.states.size(); ++k) {
            nv[k] = vec_number_expectation(vec(er.states[k].data), n);
            tail = std::max(tail, vec_tail_occupation(vec(er.states[k].data), n));
        }
        const double avg =
            photon_number_average(ts, nv, t_period, opts.window_periods);

        rho = er.states.back();
        t = ts.back();
        res.matvecs += 1;
        res.tail_occupation = tail;

        if (std::isfinite(prev_avg)) {
            const double rel = std::abs(avg - prev_avg) / std::max(std::abs(avg), 1e-300);
            res.residual = rel;
            if (rel <= opts.rel_tol) {
                res.rho = rho;
                res.n_avg = avg;
                res.converged = true;
                return res;
            }
        }
        prev_avg = avg;
    }
    res.rho = rho;
    res.n_avg = prev_avg;
    res.converged = false;  // horizon cap reached
    return res;
}

// ---------------------------------------------------------------------------
// Model runs and scans

LindbladRun run_stationary(const SystemParams& params, Model model, double kappa,
                           Eigen::Index dim, const FloquetOptions& opts) {
    params.validate();
    if (dim < 6) throw std::invalid_argument("run_stationary: dim must be >= 6");

    LindbladRun run;
    run.model = model;
    run.kappa = kappa;
    run.dim = dim;

    if (model == Model::ExactRotated) {
        const BasisChoice basis = BasisChoice::pump_photons(params);
        PeriodicGenerator gen(vanvleck::fourier_components(params, basis, dim), kappa);
        const StationaryResult st = floquet_steady_state(gen, opts);
        run.t_final = gen.period();
        run.n_avg = st.n_avg;
        run.rho_final = st.rho;
        run.converged = st.converged;
        run.tail_occupation = st.tail_occupation;
        return run;
    }

    Eigen::MatrixXcd h_eff;
    if (model == Model::EffectiveOrder1A) {
        const BasisChoice basis = BasisChoice::system_photons(params);
        h_eff = vanvleck::rwa_analytic(compute_rwa_coefficients(params, basis), params.hbar, dim)
                    .matrix;
    } else if (model == Model::EffectiveOrder1B) {
        const BasisChoice basis = BasisChoice::pump_photons(params);
        h_eff = vanvleck::rwa_analytic(compute_rwa_coefficients(params, basis), params.hbar, dim)
                    .matrix;
    } else {
        const BasisChoice basis = BasisChoice::pump_photons(params);
        h_eff = vanvleck::effective_hamiltonian(vanvleck::fourier_components(params, basis, dim),
                                                2, basis)
                    .matrix;
    }

    const SteadyStateResult ss = steady_state_direct(liouvillian(h_eff, kappa, params.hbar));
    run.t_final = 0.0;
    run.rho_final = ss.rho();
    run.n_avg = fock::expectation(ss.rho(), fock::number(dim)).real();
    run.tail_occupation =
        vec_tail_occupation(vec(ss.rho().data), dim);
    run.converged = !ss.degenerate();
    return run;
}

ScanResult mpr_scan(const SystemParams& base, const std::vector<double>& delta_grid,
                    const std::vector<double>& force_grid, Model model, double kappa,
                    Eigen::Index dim, const ScanOptions& opts) {
    base.validate();
    if (delta_grid.empty() || force_grid.empty())
        throw std::invalid_argument("mpr_scan: empty grid");

    ScanResult result;
    result.n_delta = delta_grid.size();
    result.n_force = force_grid.size();
    result.points.resize(delta_grid.size() * force_grid.size());

    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> failed{false};
    std::string first_error;
    std::mutex error_mutex;

    auto work = [&]() {
        for (;;) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= result.points.size() || failed.load()) return;
            const std::size_t di = idx / force_grid.size();
            const std::size_t fi = idx % force_grid.size();

            SystemParams p = base;
            p.omega = base.omega0 + delta_grid[di];
            p.F = force_grid[fi];
            ScanPoint& pt = result.points[idx];
            pt.delta = delta_grid[di];
            pt.force = force_grid[fi];
            try {
                if (p.F == 0.0) {
                    // undriven loss: vacuum steady state
                    pt.n_avg = 0.0;
                    pt.tail_occupation = 0.0;
                    pt.converged = true;
                } else {
                    const LindbladRun run =
                        run_stationary(p, model, kappa, dim, opts.floquet);
                    pt.n_avg = run.n_avg;
                    pt.tail_occupation = run.tail_occupation;
                    pt.converged = run.converged && run.tail_occupation < opts.tail_tol;
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!failed.exchange(true)) first_error = e.what();
                return;
            }
        }
    };

    int n_threads = opts.n_threads;
    if (n_threads <= 0)
        n_threads = static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(result.points.size())));

    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int k = 0; k < n_threads; ++k) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw std::runtime_error("mpr_scan: " + first_error);
    return result;
}

std::vector<double> mpr_peaks(const std::vector<double>& delta, const std::vector<double>& n_avg,
                              double prominence_frac) {
    if (delta.size() != n_avg.size() || delta.size() < 5)
        throw std::invalid_argument("mpr_peaks: need >= 5 grid points");
    const std::size_t n = delta.size();
    const double y_max = *std::max_element(n_avg.begin(), n_avg.end());
    const double prom_min = prominence_frac * y_max;

    std::vector<double> peaks;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(n_avg[i] > n_avg[i - 1] && n_avg[i] >= n_avg[i + 1])) continue;

        // topographic prominence: lowest saddle toward higher ground each side
        double left_min = n_avg[i];
        for (std::size_t k = i; k-- > 0;) {
            left_min = std::min(left_min, n_avg[k]);
            if (n_avg[k] > n_avg[i]) break;
        }
        double right_min = n_avg[i];
        for (std::size_t k = i + 1; k < n; ++k) {
            right_min = std::min(right_min, n_avg[k]);
            if (n_avg[k] > n_avg[i]) break;
        }
        if (n_avg[i] - std::max(left_min, right_min) < prom_min) continue;

        const double x0 = delta[i - 1], x1 = delta[i], x2 = delta[i + 1];
        const double y0 = n_avg[i - 1], y1 = n_avg[i], y2 = n_avg[i + 1];
        const double num = x0 * x0 * (y1 - y2) + x1 * x1 * (y2 - y0) + x2 * x2 * (y0 - y1);
        const double den = x0 * (y1 - y2) + x1 * (y2 - y0) + x2 * (y0 - y1);
        peaks.push_back(std::abs(den) > 1e-300 ? 0.5 * num / den : x1);
    }
    return peaks;
}

MPRPrediction mpr_predicted(const SystemParams& params, const BasisChoice& basis, int n,
                            MPRConvention convention) {
    params.validate();
    if (n < 1) throw std::invalid_argument("mpr_predicted: n must be >= 1");

    const double s = convention == MPRConvention::NMinusOneHalf ? 0.5 * (n - 1) : 0.5 * (n + 1);
    MPRPrediction pred;
    pred.n = n;
    pred.convention = convention;

    if (basis.kind == BasisChoice::Kind::PumpPhotons) {
        // Delta_b(w) = U_b(w) s with both sides monotone; bracketed bisection.
        auto g = [&](double w) {
            SystemParams p = params;
            p.omega = w;
            const RWACoefficients c = compute_rwa_coefficients(p, BasisChoice::pump_photons(p));
            return c.delta_c - c.u_c * s;
        };
        double lo = params.omega0;
        double hi = 4.0 * params.omega0;
        if (g(lo) > 0.0 || g(hi) < 0.0)
            throw std::runtime_error("mpr_predicted: root not bracketed in (omega0, 4 omega0]");
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (g(mid) <= 0.0 ? lo : hi) = mid;
        }
        pred.delta_a = 0.5 * (lo + hi) - params.omega0;
        return pred;
    }

    // Fixed reference frequency: Delta_c is linear in the drive frequency.
    SystemParams p = params;
    p.omega = basis.omega_c;  // placeholder; the coefficients need only omega_c
    const RWACoefficients c = compute_rwa_coefficients(p, basis);
    const double pivot = basis.kind == BasisChoice::Kind::SystemPhotons
                             ? params.omega0
                             : (basis.omega_c * basis.omega_c +
                                params.omega0 * params.omega0) /
                                   (2.0 * basis.omega_c);
    pred.delta_a = (pivot + c.u_c * s) - params.omega0;
    return pred;
}

double trace_distance(const fock::DensityMatrix& a, const fock::DensityMatrix& b) {
    if (a.data.rows() != b.data.rows())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * ((a.data - b.data) + (a.data - b.data).adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace duffloq::lindblad
