#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "rbh/material.hpp"
#include "rbh/microstructure.hpp"
#include "rbh/pod.hpp"
#include "rbh/tensor.hpp"
#include "rbh/voxel_mesh.hpp"

namespace rbh {

struct RBSettings {
    /// Converged once |r| < rel_tol max(1, |r(xi0)|) ...
    double rel_tol = 1e-10;
    /// ... or once a step changes xi by less than step_tol.
    double step_tol = 1e-12;
    int max_iterations = 50;
    /// Quasi-Newton: D is reassembled when a step reduces |r| by less than
    /// this factor, at most max_assemblies times per load increment. Other
    /// steps update D by BFGS. An indefinite D is replaced by its eigen
    /// decomposition with |lambda|.
    double reassembly_factor = 0.5;
    int max_assemblies = 4;
    /// Line search stops once |d . r(xi + a d)| <= line_search_tol |d . r(xi)|
    /// or the bracket is narrower than 1e-10 a.
    double line_search_tol = 1e-4;
    /// Equal load increments from I to Fbar, each warm-started from the last.
    int increments = 1;
};

/// Reduced basis bound to a material map. Mode values are stored point-major
/// so that one quadrature point's N modes are contiguous.
class RBModel {
public:
    RBModel(const ReducedBasis& basis, const VoxelMicrostructure& m, CutoffConfig cutoff = {},
            RBSettings settings = {});

    std::size_t size() const { return N_; }
    std::size_t qp_count() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    const ReducedBasis& basis() const { return basis_; }
    const VoxelMesh& mesh() const { return mesh_; }

    const CutoffConfig& cutoff() const { return cutoff_; }
    CutoffConfig& cutoff() { return cutoff_; }
    const RBSettings& settings() const { return settings_; }
    RBSettings& settings() { return settings_; }

    /// 9 x N column-major block: column i holds B_i at point p (row-major 3x3).
    const double* modes_at(std::size_t p) const { return &modes_[p * 9 * N_]; }
    const NeoHookeParams& law_at(std::size_t p) const { return laws_[law_index_[p]]; }

    /// Fbar + sum_i xi_i B_i at point p.
    Tensor2 local_defgrad(const Tensor2& Fbar, const Eigen::VectorXd& xi, std::size_t p) const;

private:
    ReducedBasis basis_;
    VoxelMesh mesh_;
    CutoffConfig cutoff_;
    RBSettings settings_;
    std::size_t N_;
    std::vector<double> modes_;
    std::vector<double> weights_;
    std::vector<NeoHookeParams> laws_;
    std::vector<std::size_t> law_index_;
};

/// (sum_p v_p phi(J_p) w_p) / (sum_p phi(J_p) w_p). Throws AllPointsExcluded
/// when the denominator vanishes and LayoutMismatch on length mismatch.
double weighted_average(std::span<const double> values, std::span<const double> J, std::span<const double> w,
                        const CutoffConfig& cutoff);
Tensor2 weighted_average(std::span<const Tensor2> values, std::span<const double> J, std::span<const double> w,
                         const CutoffConfig& cutoff);

/// Cutoff-weighted <W(F_xi)>.
double reduced_energy(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi);
/// r_i = <P(F_xi) . B_i>, cutoff weighted.
Eigen::VectorXd residual(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi);
/// D_ij = <B_i . C(F_xi) . B_j>, cutoff weighted.
Eigen::MatrixXd jacobian(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi);

struct RBState {
    Eigen::VectorXd xi;
    bool converged = false;
    int iterations = 0;
    int assemblies = 0;
    double residual_norm = 0.0;
};

struct EffectiveResponse {
    double W = 0.0;
    Tensor2 P;
    /// Consistent tangent <C> - <C B_i> D^-1_ij <B_j C>.
    Tensor4 C;
    /// Volume average <C> (Voigt-type upper estimate).
    Tensor4 C_avg;
    /// Points with phi < 1 and the relative excluded volume.
    int c_qp = 0;
    double V_excl = 0.0;
};

struct RBResult {
    RBState state;
    EffectiveResponse response;
};

/// Effective quantities at a fixed xi (no minimization).
EffectiveResponse evaluate_at(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi);

/// Minimizes the reduced energy by quasi-Newton iteration with exact line
/// searches. An empty xi0 starts from zero. Throws ConvergenceError when the
/// iteration limit is hit and AllPointsExcluded for hopeless states.
RBResult solve(const RBModel& model, const DefGrad& Fbar, const Eigen::VectorXd& xi0 = {});

/// Solves at the stretch U of Fbar = R U and pushes the response forward:
/// W(F) = W(U), P(F) = R P(U) and C(F) the exact derivative of F -> R(F) P(U(F)).
/// The returned state belongs to U.
RBResult evaluate_general(const RBModel& model, const DefGrad& Fbar);

/// sum_i xi_i u_B_i at the mesh nodes. Throws InvalidArgument when the basis
/// carries no displacement modes.
std::vector<Vec3> reconstruct_fluctuation(const RBModel& model, const RBState& state);
/// (Fbar - I) X + sum_i xi_i u_B_i at the mesh nodes.
std::vector<Vec3> reconstruct_displacement(const RBModel& model, const RBState& state, const Tensor2& Fbar);

/// CSV per-solve records: F11..F33, W, P11..P33, C1111..C3333, iterations,
/// assemblies, wall_time_s, c_qp, V_excl.
void write_record_header(std::ostream& out);
void write_record(std::ostream& out, const Tensor2& Fbar, const RBResult& result, double wall_time_s);

}  // namespace rbh
