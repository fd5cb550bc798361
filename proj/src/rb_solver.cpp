#include "rbh/rb_solver.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>

#include "rbh/errors.hpp"

namespace rbh {

namespace {

using Mat9 = Eigen::Matrix<double, 9, 9, Eigen::RowMajor>;
using Mat9N = Eigen::Matrix<double, 9, Eigen::Dynamic>;
using Vec9 = Eigen::Matrix<double, 9, 1>;

enum Need : unsigned {
    kEnergy = 1u,
    kResidual = 2u,
    kJacobian = 4u,
    kTangent = 8u,
};

struct Sums {
    double phi_weight = 0.0;
    double total_weight = 0.0;
    double W = 0.0;
    Tensor2 P;
    Eigen::VectorXd r;
    Eigen::MatrixXd D;
    Mat9 C_avg = Mat9::Zero();
    Mat9N CB;
    int c_qp = 0;
};

// One pass over the quadrature points. Points with phi = 0 are skipped, so
// the material law is never evaluated at strongly compressed or inverted points.
Sums accumulate(const RBModel& model, const Tensor2& Fbar, const Eigen::VectorXd& xi, unsigned need) {
    const std::size_t N = model.size();
    const auto n = static_cast<Eigen::Index>(N);
    Sums s;
    if (need & kResidual) s.r = Eigen::VectorXd::Zero(n);
    if (need & (kJacobian | kTangent)) s.D = Eigen::MatrixXd::Zero(n, n);
    if (need & kTangent) s.CB = Mat9N::Zero(9, n);
    Mat9N CBp(9, n);

    const auto& w = model.weights();
    for (std::size_t p = 0; p < model.qp_count(); ++p) {
        const Tensor2 F = model.local_defgrad(Fbar, xi, p);
        const double J = det(F);
        const double phi = cutoff(model.cutoff(), J);
        s.total_weight += w[p];
        if (phi < 1.0) ++s.c_qp;
        if (phi == 0.0) continue;
        if (!(J > 0.0)) throw ElementInversionError("reduced model: det F <= 0 at a quadrature point");
        const double fw = phi * w[p];
        s.phi_weight += fw;

        const DefGrad f(F);
        const NeoHookeParams& law = model.law_at(p);
        const Eigen::Map<const Mat9N> B(model.modes_at(p), 9, n);
        if (need & kEnergy) s.W += energy(law, f) * fw;
        if (need & (kResidual | kTangent)) {
            const Tensor2 P = stress(law, f);
            s.P += P * fw;
            if (need & kResidual) s.r.noalias() += B.transpose() * (Eigen::Map<const Vec9>(P.c.data()) * fw);
        }
        if (need & (kJacobian | kTangent)) {
            const Tensor4 C = stiffness(law, f);
            const Eigen::Map<const Mat9> C9(C.c.data());
            CBp.noalias() = C9 * B;
            s.D.noalias() += (B.transpose() * CBp) * fw;
            if (need & kTangent) {
                s.C_avg.noalias() += C9 * fw;
                s.CB.noalias() += CBp * fw;
            }
        }
    }
    if (!(s.phi_weight > 0.0)) throw AllPointsExcluded("reduced model: every quadrature point is cut off");
    const double inv = 1.0 / s.phi_weight;
    s.W *= inv;
    s.P *= inv;
    if (need & kResidual) s.r *= inv;
    if (need & (kJacobian | kTangent)) s.D *= inv;
    if (need & kTangent) {
        s.C_avg *= inv;
        s.CB *= inv;
    }
    return s;
}

Tensor4 to_tensor4(const Mat9& m) {
    Tensor4 t;
    Eigen::Map<Mat9>(t.c.data()) = m;
    return t;
}

EffectiveResponse response_from(const Sums& s) {
    EffectiveResponse out;
    out.W = s.W;
    out.P = s.P;
    out.C_avg = to_tensor4(s.C_avg);
    Mat9 C = s.C_avg;
    if (s.D.rows() > 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(s.D);
        C.noalias() -= s.CB * ldlt.solve(s.CB.transpose());
    }
    out.C = to_tensor4(C);
    out.c_qp = s.c_qp;
    out.V_excl = (s.total_weight - s.phi_weight) / s.total_weight;
    return out;
}

struct LineSearchResult {
    double alpha;
    Eigen::VectorXd r;
};

// Exact line search: root of g(a) = d . r(xi + a d) by bracketing and
// Illinois regula falsi. States the model cannot evaluate count as overshoot.
LineSearchResult line_search(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi,
                             const Eigen::VectorXd& d, double g0) {
    const double tol = model.settings().line_search_tol * std::abs(g0);
    auto eval = [&](double a, Eigen::VectorXd& r) -> std::optional<double> {
        try {
            r = residual(model, Fbar, xi + a * d);
            return d.dot(r);
        } catch (const ElementInversionError&) {
            return std::nullopt;
        } catch (const AllPointsExcluded&) {
            return std::nullopt;
        } catch (const InvalidArgument&) {
            return std::nullopt;
        }
    };

    double lo = 0.0, glo = g0;
    double hi = 1.0;
    std::optional<double> ghi;
    Eigen::VectorXd r_hi, r_lo;
    bool have_lo = false;

    // expand until the derivative changes sign or the state becomes invalid
    for (int k = 0; k < 40; ++k) {
        ghi = eval(hi, r_hi);
        if (!ghi || *ghi >= 0.0) break;
        if (std::abs(*ghi) <= tol) return {hi, r_hi};
        lo = hi;
        glo = *ghi;
        r_lo = r_hi;
        have_lo = true;
        hi *= 2.0;
    }
    if (ghi && *ghi < 0.0) return {lo, r_lo};
    if (ghi && *ghi <= tol) return {hi, r_hi};

    int side = 0;
    for (int k = 0; k < 100 && hi - lo > 1e-10 * hi; ++k) {
        double a;
        if (ghi) {
            a = (lo * *ghi - hi * glo) / (*ghi - glo);
            if (!(a > lo && a < hi)) a = 0.5 * (lo + hi);
        } else {
            a = 0.5 * (lo + hi);
        }
        Eigen::VectorXd r;
        const std::optional<double> g = eval(a, r);
        if (g && std::abs(*g) <= tol) return {a, r};
        if (g && *g < 0.0) {
            lo = a;
            glo = *g;
            r_lo = r;
            have_lo = true;
            if (side == -1 && ghi) ghi = *ghi * 0.5;
            side = -1;
        } else {
            hi = a;
            ghi = g;
            r_hi = r;
            if (side == 1) glo *= 0.5;
            side = 1;
        }
    }
    if (have_lo) return {lo, r_lo};
    if (ghi) return {hi, r_hi};
    throw ConvergenceError("reduced model: line search found no admissible step");
}

// Newton direction for an indefinite D: negative curvatures are mirrored to
// |lambda| (floored at 1e-8 lambda_max), so the step keeps Newton scaling and
// is a descent direction.
Eigen::VectorXd modified_newton_direction(const Eigen::MatrixXd& D, const Eigen::VectorXd& r) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
    if (es.info() != Eigen::Success) return -r;
    const Eigen::VectorXd& lambda = es.eigenvalues();
    const double floor = 1e-8 * lambda.cwiseAbs().maxCoeff();
    if (!(floor > 0.0)) return -r;
    Eigen::VectorXd q = es.eigenvectors().transpose() * r;
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] /= std::max(std::abs(lambda[i]), floor);
    return -(es.eigenvectors() * q);
}

}  // namespace

RBModel::RBModel(const ReducedBasis& basis, const VoxelMicrostructure& m, CutoffConfig cutoff, RBSettings settings)
    : basis_(basis), mesh_(m), cutoff_(cutoff), settings_(settings), N_(basis.size()) {
    validate(cutoff_);
    if (N_ == 0) throw RankError("reduced model: empty basis");
    const std::size_t nqp = mesh_.qp_count();
    for (const QuadField& b : basis_.modes) {
        if (b.size() != nqp) throw LayoutMismatch("reduced model: basis layout does not match the microstructure");
    }
    if (!basis_.disp_modes.empty() && basis_.disp_modes.front().size() != mesh_.node_count()) {
        throw LayoutMismatch("reduced model: displacement modes do not match the mesh");
    }
    weights_ = basis_.modes.front().weights;
    modes_.resize(nqp * 9 * N_);
    for (std::size_t p = 0; p < nqp; ++p)
        for (std::size_t i = 0; i < N_; ++i)
            for (std::size_t a = 0; a < 9; ++a) modes_[(p * N_ + i) * 9 + a] = basis_.modes[i].values[p][a];

    law_index_.resize(nqp);
    for (std::size_t p = 0; p < nqp; ++p) {
        const NeoHookeParams& law = m.phases.at(mesh_.qp_phase(p));
        std::size_t k = 0;
        while (k < laws_.size() && !(laws_[k] == law)) ++k;
        if (k == laws_.size()) laws_.push_back(law);
        law_index_[p] = k;
    }
}

Tensor2 RBModel::local_defgrad(const Tensor2& Fbar, const Eigen::VectorXd& xi, std::size_t p) const {
    Tensor2 F = Fbar;
    if (xi.size() == 0) return F;
    const double* b = modes_at(p);
    for (std::size_t i = 0; i < N_; ++i) {
        const double x = xi[static_cast<Eigen::Index>(i)];
        for (std::size_t a = 0; a < 9; ++a) F[a] += x * b[i * 9 + a];
    }
    return F;
}

double weighted_average(std::span<const double> values, std::span<const double> J, std::span<const double> w,
                        const CutoffConfig& cutoff) {
    if (values.size() != J.size() || values.size() != w.size()) {
        throw LayoutMismatch("weighted_average: length mismatch");
    }
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < values.size(); ++p) {
        const double fw = rbh::cutoff(cutoff, J[p]) * w[p];
        if (fw == 0.0) continue;
        num += values[p] * fw;
        den += fw;
    }
    if (!(den > 0.0)) throw AllPointsExcluded("weighted_average: every point is cut off");
    return num * (1.0 / den);
}

Tensor2 weighted_average(std::span<const Tensor2> values, std::span<const double> J, std::span<const double> w,
                         const CutoffConfig& cutoff) {
    if (values.size() != J.size() || values.size() != w.size()) {
        throw LayoutMismatch("weighted_average: length mismatch");
    }
    Tensor2 num;
    double den = 0.0;
    for (std::size_t p = 0; p < values.size(); ++p) {
        const double fw = rbh::cutoff(cutoff, J[p]) * w[p];
        if (fw == 0.0) continue;
        num += values[p] * fw;
        den += fw;
    }
    if (!(den > 0.0)) throw AllPointsExcluded("weighted_average: every point is cut off");
    return num * (1.0 / den);
}

double reduced_energy(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi) {
    return accumulate(model, Fbar.value(), xi, kEnergy).W;
}

Eigen::VectorXd residual(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi) {
    return accumulate(model, Fbar.value(), xi, kResidual).r;
}

Eigen::MatrixXd jacobian(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi) {
    return accumulate(model, Fbar.value(), xi, kJacobian).D;
}

EffectiveResponse evaluate_at(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi) {
    return response_from(accumulate(model, Fbar.value(), xi, kEnergy | kTangent));
}

RBResult solve(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi0) {
    const RBSettings& cfg = model.settings();
    const auto n = static_cast<Eigen::Index>(model.size());
    RBState state;
    state.xi = xi0.size() == 0 ? Eigen::VectorXd::Zero(n) : xi0;
    if (state.xi.size() != n) throw InvalidArgument("reduced solve: xi0 has the wrong length");

    const Tensor2 I = Tensor2::identity();
    const int increments = std::max(1, cfg.increments);
    for (int k = 1; k <= increments; ++k) {
        const DefGrad Fk(k == increments ? Fbar.value() : I + (Fbar.value() - I) * (double(k) / increments));
        Eigen::VectorXd r = residual(model, Fk, state.xi);
        const double tol = cfg.rel_tol * std::max(1.0, r.norm());

        Eigen::MatrixXd D;
        Eigen::LDLT<Eigen::MatrixXd> ldlt;
        int assemblies = 0;
        auto assemble = [&] {
            D = jacobian(model, Fk, state.xi);
            ldlt.compute(D);
            ++assemblies;
            ++state.assemblies;
        };
        assemble();

        bool converged = false;
        for (int it = 0; it < cfg.max_iterations; ++it) {
            if (r.norm() < tol) {
                converged = true;
                break;
            }
            Eigen::VectorXd d = ldlt.info() == Eigen::Success && ldlt.isPositive() ? Eigen::VectorXd(-ldlt.solve(r))
                                                                                    : modified_newton_direction(D, r);
            if (!(d.dot(r) < 0.0)) d = -r;  // last resort: steepest descent

            const LineSearchResult ls = line_search(model, Fk, state.xi, d, d.dot(r));
            const Eigen::VectorXd step = ls.alpha * d;
            const Eigen::VectorXd y = ls.r - r;
            state.xi += step;
            ++state.iterations;
            const double previous = r.norm();
            r = ls.r;
            if (step.norm() < cfg.step_tol) {
                converged = true;
                break;
            }
            if (r.norm() > cfg.reassembly_factor * previous && assemblies < cfg.max_assemblies) {
                assemble();
            } else if (ldlt.isPositive() && y.dot(step) > 1e-12 * y.norm() * step.norm()) {
                // BFGS secant update between assemblies; y . s > 0 keeps D
                // positive definite.
                const Eigen::VectorXd Ds = D * step;
                D += y * y.transpose() / y.dot(step) - Ds * Ds.transpose() / step.dot(Ds);
                ldlt.compute(D);
            }
        }
        if (!converged && r.norm() < tol) converged = true;
        state.residual_norm = r.norm();
        if (!converged) {
            throw ConvergenceError("reduced solve: no convergence within " + std::to_string(cfg.max_iterations) +
                                   " iterations (|r| = " + std::to_string(r.norm()) + ")");
        }
    }
    state.converged = true;
    RBResult out{state, evaluate_at(model, Fbar, state.xi)};
    ++out.state.assemblies;
    return out;
}

RBResult evaluate_general(const RBModel& model, const DefGrad& Fbar) {
    const PolarDecomposition pd = polar(Fbar);
    RBResult res = solve(model, DefGrad(pd.U.value()), {});
    const Tensor2& R = pd.R;
    const Tensor2& U = pd.U.value();
    const Tensor2& F = Fbar.value();
    const EffectiveResponse at_U = res.response;

    const SymEigen e = eigen_sym(U);
    const Tensor2& Q = e.vectors;
    const Tensor2 U_inv = inverse(U);

    EffectiveResponse& out = res.response;
    out.P = R * at_U.P;
    out.C = Tensor4{};
    out.C_avg = Tensor4{};
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
            const Tensor2 dF = Tensor2::unit(k, l);
            // derivative of U = sqrt(F^T F) in the eigenbasis of U
            const Tensor2 dC = transpose(dF) * F + transpose(F) * dF;
            Tensor2 dUp = transpose(Q) * dC * Q;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) dUp(a, b) /= e.values[static_cast<std::size_t>(a)] + e.values[static_cast<std::size_t>(b)];
            const Tensor2 dU = Q * dUp * transpose(Q);
            const Tensor2 dR = (dF - R * dU) * U_inv;
            const Tensor2 dP = dR * at_U.P + R * contract42(at_U.C, dU);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) out.C(i, j, k, l) = dP(i, j);
        }
    // <C> of the rotated fields: R_im R_kn C_mjnl
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double s = 0.0;
                    for (int m = 0; m < 3; ++m)
                        for (int q = 0; q < 3; ++q) s += R(i, m) * R(k, q) * at_U.C_avg(m, j, q, l);
                    out.C_avg(i, j, k, l) = s;
                }
    return res;
}

std::vector<Vec3> reconstruct_fluctuation(const RBModel& model, const RBState& state) {
    const auto& modes = model.basis().disp_modes;
    if (modes.empty()) throw InvalidArgument("reconstruct: basis carries no displacement modes");
    std::vector<Vec3> u(modes.front().size(), Vec3{0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const double x = state.xi[static_cast<Eigen::Index>(i)];
        for (std::size_t n = 0; n < u.size(); ++n)
            for (std::size_t k = 0; k < 3; ++k) u[n][k] += x * modes[i][n][k];
    }
    return u;
}

std::vector<Vec3> reconstruct_displacement(const RBModel& model, const RBState& state, const Tensor2& Fbar) {
    std::vector<Vec3> u = reconstruct_fluctuation(model, state);
    const Tensor2 H = Fbar - Tensor2::identity();
    for (std::size_t n = 0; n < u.size(); ++n) {
        const Vec3 X = model.mesh().node_position(n);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) u[n][static_cast<std::size_t>(i)] += H(i, j) * X[static_cast<std::size_t>(j)];
    }
    return u;
}

void write_record_header(std::ostream& out) {
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) out << 'F' << i << j << ',';
    out << "W,";
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) out << 'P' << i << j << ',';
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            for (int k = 1; k <= 3; ++k)
                for (int l = 1; l <= 3; ++l) out << 'C' << i << j << k << l << ',';
    out << "iterations,assemblies,wall_time_s,c_qp,V_excl\n";
}

void write_record(std::ostream& out, const Tensor2& Fbar, const RBResult& result, double wall_time_s) {
    char buf[40];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g,", v);
        out << buf;
    };
    for (double v : Fbar.c) put(v);
    put(result.response.W);
    for (double v : result.response.P.c) put(v);
    for (double v : result.response.C.c) put(v);
    out << result.state.iterations << ',' << result.state.assemblies << ',';
    put(wall_time_s);
    out << result.response.c_qp << ',';
    std::snprintf(buf, sizeof buf, "%.17g\n", result.response.V_excl);
    out << buf;
}

}  // namespace rbh
