#include "rbh/fom.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/IterativeSolvers>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <string>

#include "rbh/binary_io.hpp"
#include "rbh/errors.hpp"

namespace rbh {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Applies an existing Cholesky factor as the preconditioner of a Krylov solver.
struct FactorPreconditioner {
    const Eigen::CholmodSupernodalLLT<SpMat>* factor = nullptr;

    template <typename M>
    FactorPreconditioner& analyzePattern(const M&) { return *this; }
    template <typename M>
    FactorPreconditioner& factorize(const M&) { return *this; }
    template <typename M>
    FactorPreconditioner& compute(const M&) { return *this; }
    Vector solve(const Vector& b) const { return factor->solve(b); }
    Eigen::ComputationInfo info() const { return Eigen::Success; }
};

struct Assembly {
    std::vector<double> residual;  // 3 per node
    double element_scale = 0.0;    // norm of element contributions before cancellation
};

}  // namespace

struct FomSolver::Impl {
    VoxelMicrostructure micro;
    VoxelMesh mesh;
    FomSettings settings;
    std::map<int, NeoHookean> laws;
    std::vector<const NeoHookean*> element_law;

    std::size_t free_dofs = 0;
    SpMat K;
    // value index of K for (element, a, b, i, k); -1 where a dof is pinned
    std::vector<int> block_pos;
    std::vector<int> diag_pos;
    Eigen::CholmodSupernodalLLT<SpMat> llt;
    bool analyzed = false;
    double last_shift = 1e-4;

    Impl(const VoxelMicrostructure& m, FomSettings s) : micro(m), mesh(m), settings(s) {
        for (const auto& [id, p] : micro.phases) laws.emplace(id, NeoHookean(p));
        element_law.resize(mesh.element_count());
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            element_law[e] = &laws.at(mesh.element_phase(e));
        }
        build_pattern();
    }

    // Node 0 is pinned to remove the rigid translation; the solution is
    // shifted to zero nodal mean afterwards.
    static int free_dof(std::size_t node, int comp) {
        return node == 0 ? -1 : static_cast<int>(3 * (node - 1)) + comp;
    }

    void build_pattern() {
        const std::size_t nn = mesh.node_count();
        free_dofs = 3 * (nn - 1);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(mesh.element_count() * 576);
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto& nodes = mesh.element_nodes(e);
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b)
                    for (int i = 0; i < 3; ++i)
                        for (int k = 0; k < 3; ++k) {
                            const int r = free_dof(nodes[static_cast<std::size_t>(a)], i);
                            const int c = free_dof(nodes[static_cast<std::size_t>(b)], k);
                            if (r >= 0 && c >= 0) trip.emplace_back(r, c, 0.0);
                        }
        }
        for (std::size_t d = 0; d < free_dofs; ++d) {
            trip.emplace_back(static_cast<int>(d), static_cast<int>(d), 0.0);
        }
        K.resize(static_cast<Eigen::Index>(free_dofs), static_cast<Eigen::Index>(free_dofs));
        K.setFromTriplets(trip.begin(), trip.end());
        K.makeCompressed();

        auto position = [&](int r, int c) {
            const int* inner = K.innerIndexPtr();
            const int begin = K.outerIndexPtr()[c];
            const int end = K.outerIndexPtr()[c + 1];
            const int* it = std::lower_bound(inner + begin, inner + end, r);
            return static_cast<int>(it - inner);
        };
        block_pos.assign(mesh.element_count() * 576, -1);
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto& nodes = mesh.element_nodes(e);
            for (int a = 0; a < 8; ++a)
                for (int b = 0; b < 8; ++b)
                    for (int i = 0; i < 3; ++i)
                        for (int k = 0; k < 3; ++k) {
                            const int r = free_dof(nodes[static_cast<std::size_t>(a)], i);
                            const int c = free_dof(nodes[static_cast<std::size_t>(b)], k);
                            if (r >= 0 && c >= 0) {
                                block_pos[e * 576 + static_cast<std::size_t>(((a * 8 + b) * 3 + i) * 3 + k)] =
                                    position(r, c);
                            }
                        }
        }
        diag_pos.resize(free_dofs);
        for (std::size_t d = 0; d < free_dofs; ++d) {
            diag_pos[d] = position(static_cast<int>(d), static_cast<int>(d));
        }
    }

    Tensor2 qp_defgrad(const Tensor2& Fbar, const std::array<Vec3, 8>& we, int q) const {
        Tensor2 F = Fbar;
        for (int a = 0; a < 8; ++a) {
            const Vec3& g = mesh.shape_gradient(q, a);
            const Vec3& wa = we[static_cast<std::size_t>(a)];
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) F[3 * i + j] += wa[i] * g[j];
        }
        return F;
    }

    std::array<Vec3, 8> gather(std::span<const Vec3> w, std::size_t e) const {
        std::array<Vec3, 8> we{};
        const auto& nodes = mesh.element_nodes(e);
        for (std::size_t a = 0; a < 8; ++a) we[a] = w[nodes[a]];
        return we;
    }

    double energy(const Tensor2& Fbar, std::span<const Vec3> w) const {
        const double wq = mesh.qp_weight();
        double total = 0.0;
        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto we = gather(w, e);
            for (int q = 0; q < 8; ++q) {
                const Tensor2 F = qp_defgrad(Fbar, we, q);
                if (!(det(F) > 0.0)) return kInf;
                total += element_law[e]->energy(DefGrad(F)) * wq;
            }
        }
        return total;
    }

    // Residual and, when with_tangent, the stiffness values written into K.
    // Returns std::nullopt-like empty residual when a point is inverted.
    bool assemble(const Tensor2& Fbar, std::span<const Vec3> w, bool with_tangent, Assembly& out) {
        const std::size_t nn = mesh.node_count();
        out.residual.assign(3 * nn, 0.0);
        out.element_scale = 0.0;
        if (with_tangent) std::fill(K.valuePtr(), K.valuePtr() + K.nonZeros(), 0.0);
        const double wq = mesh.qp_weight();

        for (std::size_t e = 0; e < mesh.element_count(); ++e) {
            const auto& nodes = mesh.element_nodes(e);
            const auto we = gather(w, e);
            std::array<double, 24> re{};
            std::array<double, 576> ke{};
            for (int q = 0; q < 8; ++q) {
                const Tensor2 F = qp_defgrad(Fbar, we, q);
                if (!(det(F) > 0.0)) return false;
                const DefGrad f(F);
                const Tensor2 P = element_law[e]->stress(f);
                for (int a = 0; a < 8; ++a) {
                    const Vec3& g = mesh.shape_gradient(q, a);
                    for (int i = 0; i < 3; ++i) {
                        re[static_cast<std::size_t>(3 * a + i)] +=
                            wq * (P(i, 0) * g[0] + P(i, 1) * g[1] + P(i, 2) * g[2]);
                    }
                }
                if (!with_tangent) continue;
                const Tensor4 C = element_law[e]->stiffness(f);
                // T_b(i,j,k) = sum_l C_ijkl g_b,l
                std::array<std::array<double, 27>, 8> T{};
                for (int b = 0; b < 8; ++b) {
                    const Vec3& g = mesh.shape_gradient(q, b);
                    for (int ijk = 0; ijk < 27; ++ijk) {
                        const std::size_t base = static_cast<std::size_t>(ijk) * 3;
                        T[static_cast<std::size_t>(b)][static_cast<std::size_t>(ijk)] =
                            C.c[base] * g[0] + C.c[base + 1] * g[1] + C.c[base + 2] * g[2];
                    }
                }
                for (int a = 0; a < 8; ++a) {
                    const Vec3& ga = mesh.shape_gradient(q, a);
                    for (int b = 0; b < 8; ++b) {
                        const auto& Tb = T[static_cast<std::size_t>(b)];
                        for (int i = 0; i < 3; ++i)
                            for (int k = 0; k < 3; ++k) {
                                double s = 0.0;
                                for (int j = 0; j < 3; ++j) {
                                    s += ga[static_cast<std::size_t>(j)] *
                                         Tb[static_cast<std::size_t>((i * 3 + j) * 3 + k)];
                                }
                                ke[static_cast<std::size_t>(((a * 8 + b) * 3 + i) * 3 + k)] += wq * s;
                            }
                    }
                }
            }
            for (std::size_t a = 0; a < 8; ++a)
                for (std::size_t i = 0; i < 3; ++i) {
                    const double v = re[3 * a + i];
                    out.residual[3 * nodes[a] + i] += v;
                    out.element_scale += v * v;
                }
            if (with_tangent) {
                double* values = K.valuePtr();
                const int* pos = &block_pos[e * 576];
                for (std::size_t t = 0; t < 576; ++t)
                    if (pos[t] >= 0) values[pos[t]] += ke[t];
            }
        }
        out.element_scale = std::sqrt(out.element_scale);
        return true;
    }

    Vector free_part(const std::vector<double>& full) const {
        Vector v(static_cast<Eigen::Index>(free_dofs));
        for (std::size_t d = 0; d < free_dofs; ++d) v[static_cast<Eigen::Index>(d)] = full[d + 3];
        return v;
    }

    static double norm_free(const std::vector<double>& full) {
        double s = 0.0;
        for (std::size_t d = 3; d < full.size(); ++d) s += full[d] * full[d];
        return std::sqrt(s);
    }

    Vector solve_linear(const Vector& rhs) {
        if (settings.linear_solver == LinearSolverKind::conjugate_gradient) {
            Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
            cg.setTolerance(settings.cg_tol);
            cg.setMaxIterations(static_cast<Eigen::Index>(20 * free_dofs));
            cg.compute(K);
            Vector x = cg.solve(rhs);
            if (cg.info() != Eigen::Success) throw ConvergenceError("FOM: CG did not converge");
            return x;
        }
        if (!analyzed) {
            llt.cholmod().print = 0;
            llt.analyzePattern(K);
            analyzed = true;
        }
        llt.factorize(K);
        if (llt.info() == Eigen::Success) return llt.solve(rhs);

        // Indefinite tangent (near-incompressible phases under load): factor a
        // diagonally shifted copy and use it to precondition MINRES on K itself,
        // which keeps the Newton step exact.
        std::vector<double> shift(free_dofs);
        double* values = K.valuePtr();
        for (double mu = std::max(1e-8, last_shift * 0.1); mu < 1e6; mu *= 10.0) {
            for (std::size_t d = 0; d < free_dofs; ++d) {
                shift[d] = mu * std::abs(values[diag_pos[d]]);
                values[diag_pos[d]] += shift[d];
            }
            llt.factorize(K);
            for (std::size_t d = 0; d < free_dofs; ++d) values[diag_pos[d]] -= shift[d];
            if (llt.info() != Eigen::Success) continue;
            last_shift = mu;
            Eigen::MINRES<SpMat, Eigen::Lower | Eigen::Upper, FactorPreconditioner> minres;
            minres.setTolerance(1e-12);
            minres.setMaxIterations(500);
            minres.compute(K);
            minres.preconditioner().factor = &llt;
            Vector x = minres.solve(rhs);
            return x;
        }
        throw ConvergenceError("FOM: tangent factorization failed");
    }

    enum class StepResult { converged, diverged, inverted };

    // Newton on one load level, w is updated in place.
    StepResult newton(const Tensor2& Fbar, std::vector<Vec3>& w, FomStats& stats) {
        Assembly as;
        if (!assemble(Fbar, w, true, as)) return StepResult::inverted;
        double rnorm = norm_free(as.residual);
        const double first = rnorm;
        double E = energy(Fbar, w);

        for (int it = 0;; ++it) {
            if (rnorm <= settings.rel_tol * first || rnorm <= 1e-13 * as.element_scale) {
                const double rel = first > 0.0 ? rnorm / first : 0.0;
                stats.worst_relative_residual = std::max(stats.worst_relative_residual, rel);
                return StepResult::converged;
            }
            if (it >= settings.max_newton) return StepResult::diverged;
            ++stats.newton_iterations;

            const Vector R = free_part(as.residual);
            const Vector dw = solve_linear(-R);
            const double slope = R.dot(dw);

            // Backtracking, +inf energy for inverted points. A step is taken on
            // sufficient energy decrease, or on residual decrease since the
            // equilibrium of a locking-prone mesh may be a saddle point.
            std::vector<Vec3> trial(w.size());
            double alpha = 1.0;
            bool accepted = false;
            bool saw_inversion = false;
            Assembly next;
            for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
                trial[0] = w[0];
                for (std::size_t n = 1; n < w.size(); ++n)
                    for (std::size_t i = 0; i < 3; ++i)
                        trial[n][i] = w[n][i] + alpha * dw[static_cast<Eigen::Index>(3 * (n - 1) + i)];
                const double Et = energy(Fbar, trial);
                if (!std::isfinite(Et)) {
                    saw_inversion = true;
                    continue;
                }
                if ((slope < 0.0 && Et <= E + 1e-4 * alpha * slope) ||
                    (assemble(Fbar, trial, false, next) && norm_free(next.residual) < (1.0 - 1e-4 * alpha) * rnorm)) {
                    accepted = true;
                    E = Et;
                    break;
                }
            }
            if (!accepted) return saw_inversion ? StepResult::inverted : StepResult::diverged;
            w = trial;
            if (!assemble(Fbar, w, true, as)) return StepResult::inverted;
            rnorm = norm_free(as.residual);
        }
    }

    Snapshot solve(const DefGrad& target, FomStats* stats_out) {
        FomStats stats;
        // Each solve starts from the same solver state, so results do not
        // depend on which boundary conditions this instance solved before.
        last_shift = 1e-4;
        const std::size_t nn = mesh.node_count();
        const Tensor2 I = Tensor2::identity();
        const Tensor2 H = target.value() - I;

        std::vector<Vec3> w(nn, Vec3{0.0, 0.0, 0.0});
        std::vector<Vec3> w_prev = w;
        double lambda = 0.0;
        double lambda_prev = 0.0;
        const double nominal = 1.0 / std::max(1, settings.increments);
        double step = nominal;
        int consecutive_cutbacks = 0;
        int easy_steps = 0;
        StepResult last_failure = StepResult::diverged;

        while (lambda < 1.0) {
            const double next = std::min(1.0, lambda + step);
            const Tensor2 Fbar = I + H * next;
            if (!(det(Fbar) > 0.0)) {
                throw ElementInversionError("FOM: det of the intermediate macroscopic load is not positive");
            }
            // linear extrapolation predictor from the last two converged levels
            std::vector<Vec3> trial = w;
            if (lambda > lambda_prev) {
                const double s = (next - lambda) / (lambda - lambda_prev);
                for (std::size_t n = 0; n < nn; ++n)
                    for (std::size_t i = 0; i < 3; ++i) trial[n][i] += s * (w[n][i] - w_prev[n][i]);
                if (!std::isfinite(energy(Fbar, trial))) trial = w;
            }
            const StepResult r = newton(Fbar, trial, stats);
            if (r == StepResult::converged) {
                w_prev = std::move(w);
                w = std::move(trial);
                lambda_prev = lambda;
                lambda = next;
                ++stats.load_steps;
                consecutive_cutbacks = 0;
                if (++easy_steps >= 2) step = std::min(nominal, 2.0 * step);
                continue;
            }
            last_failure = r;
            if (++consecutive_cutbacks > settings.max_cutbacks) {
                if (stats_out) *stats_out = stats;
                if (last_failure == StepResult::inverted) {
                    throw ElementInversionError("FOM: det F <= 0 persists after " +
                                                std::to_string(settings.max_cutbacks) + " cutbacks");
                }
                throw ConvergenceError("FOM: Newton failed after " + std::to_string(settings.max_cutbacks) +
                                       " cutbacks");
            }
            ++stats.cutbacks;
            easy_steps = 0;
            step *= 0.5;
        }

        const Vec3 mean = nodal_mean(w);
        for (Vec3& v : w)
            for (std::size_t i = 0; i < 3; ++i) v[i] -= mean[i];

        Snapshot s;
        s.bc = target.value();
        s.fluct = fluctuation_gradient(mesh, w);
        s.disp_fluct = std::move(w);
        if (stats_out) *stats_out = stats;
        return s;
    }
};

FomSolver::FomSolver(const VoxelMicrostructure& m, FomSettings settings)
    : impl_(std::make_unique<Impl>(m, settings)) {
    if (settings.increments < 1) throw InvalidArgument("FOM: increments must be positive");
}

FomSolver::~FomSolver() = default;

const VoxelMesh& FomSolver::mesh() const { return impl_->mesh; }
const FomSettings& FomSolver::settings() const { return impl_->settings; }

Snapshot FomSolver::solve(const DefGrad& Fbar, FomStats* stats) { return impl_->solve(Fbar, stats); }

double FomSolver::energy(const Tensor2& Fbar, std::span<const Vec3> w) const {
    return impl_->energy(Fbar, w);
}

std::vector<double> FomSolver::residual(const Tensor2& Fbar, std::span<const Vec3> w) const {
    Assembly as;
    if (!const_cast<Impl&>(*impl_).assemble(Fbar, w, false, as)) {
        throw ElementInversionError("FOM residual: det F <= 0 at a quadrature point");
    }
    return as.residual;
}

Snapshot solve_fom(const VoxelMicrostructure& m, const DefGrad& Fbar, const FomSettings& settings,
                   FomStats* stats) {
    FomSolver solver(m, settings);
    return solver.solve(Fbar, stats);
}

EffectiveFom effective_fom(const VoxelMicrostructure& m, const Snapshot& s) {
    if (s.fluct.size() != 8 * m.voxel_count()) {
        throw LayoutMismatch("effective_fom: snapshot does not match the microstructure");
    }
    std::map<int, NeoHookean> laws;
    for (const auto& [id, p] : m.phases) laws.emplace(id, NeoHookean(p));
    double W = 0.0;
    Tensor2 P;
    double vol = 0.0;
    for (std::size_t p = 0; p < s.fluct.size(); ++p) {
        const NeoHookean& law = laws.at(m.phase[p / 8]);
        const DefGrad f(s.bc + s.fluct.values[p]);
        const double w = s.fluct.weights[p];
        W += law.energy(f) * w;
        P += law.stress(f) * w;
        vol += w;
    }
    return EffectiveFom{W / vol, P * (1.0 / vol)};
}

void write_snapshot(const std::filesystem::path& path, const Snapshot& s) {
    io::write_atomically(path, true, [&](std::ostream& out) {
        io::put_magic(out, "MRB1");
        io::put_u64(out, s.fluct.size());
        io::put_u64(out, s.disp_fluct.size());
        io::put_f64s(out, s.bc.c);
        for (const Tensor2& t : s.fluct.values) io::put_f64s(out, t.c);
        io::put_f64s(out, s.fluct.weights);
        for (const Vec3& v : s.disp_fluct) io::put_f64s(out, v);
    });
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot " + path.string());
    io::expect_magic(in, "MRB1");
    const std::uint64_t nqp = io::get_u64(in);
    const std::uint64_t nodes = io::get_u64(in);
    Snapshot s;
    io::get_f64s(in, s.bc.c);
    s.fluct.values.resize(nqp);
    for (Tensor2& t : s.fluct.values) io::get_f64s(in, t.c);
    s.fluct.weights.resize(nqp);
    io::get_f64s(in, s.fluct.weights);
    s.disp_fluct.resize(nodes);
    for (Vec3& v : s.disp_fluct) io::get_f64s(in, v);
    return s;
}

}  // namespace rbh
