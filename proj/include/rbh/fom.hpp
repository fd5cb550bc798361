#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "rbh/material.hpp"
#include "rbh/microstructure.hpp"
#include "rbh/quad_field.hpp"
#include "rbh/tensor.hpp"
#include "rbh/voxel_mesh.hpp"

namespace rbh {

/// One full-order solution: the macroscopic boundary condition, the
/// deformation gradient fluctuation at quadrature points and the nodal
/// displacement fluctuation (zero nodal mean).
struct Snapshot {
    Tensor2 bc;
    QuadField fluct;
    std::vector<Vec3> disp_fluct;
};

enum class LinearSolverKind { cholesky, conjugate_gradient };

struct FomSettings {
    /// Equal load steps from F = I to the target.
    int increments = 1;
    /// Newton stops once |R| <= rel_tol |R_first| for the increment.
    double rel_tol = 1e-10;
    int max_newton = 40;
    /// Consecutive halvings of a failing load step.
    int max_cutbacks = 8;
    LinearSolverKind linear_solver = LinearSolverKind::cholesky;
    /// Relative tolerance of the Jacobi-preconditioned CG, when selected.
    double cg_tol = 1e-10;
};

struct FomStats {
    int load_steps = 0;
    int newton_iterations = 0;
    int cutbacks = 0;
    /// Largest |R_final| / |R_first| over all accepted load steps.
    double worst_relative_residual = 0.0;
};

/// Periodic full-order micro solver bound to one microstructure. Reusing one
/// instance across boundary conditions reuses the sparsity pattern and the
/// symbolic factorization.
class FomSolver {
public:
    explicit FomSolver(const VoxelMicrostructure& m, FomSettings settings = {});
    ~FomSolver();
    FomSolver(const FomSolver&) = delete;
    FomSolver& operator=(const FomSolver&) = delete;

    const VoxelMesh& mesh() const;
    const FomSettings& settings() const;

    /// Throws ConvergenceError (load too large for mesh/material) or
    /// ElementInversionError after the cutback limit.
    Snapshot solve(const DefGrad& Fbar, FomStats* stats = nullptr);

    /// Global energy sum_p W(F_p) w_p for F = Fbar + grad(w); +inf if any
    /// quadrature point has det F <= 0.
    double energy(const Tensor2& Fbar, std::span<const Vec3> w) const;
    /// Nodal residual dE/dw (3 per node, periodic nodes included).
    std::vector<double> residual(const Tensor2& Fbar, std::span<const Vec3> w) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper constructing a FomSolver for a single solve.
Snapshot solve_fom(const VoxelMicrostructure& m, const DefGrad& Fbar, const FomSettings& settings = {},
                   FomStats* stats = nullptr);

struct EffectiveFom {
    double W;
    Tensor2 P;
};

/// <W> and <P> of the snapshot's deformation gradient field bc + fluct.
EffectiveFom effective_fom(const VoxelMicrostructure& m, const Snapshot& s);

/// MRB1 container, little-endian: magic "MRB1", u64 N_qp, u64 node count,
/// 9 f64 bc components (row-major), 9 N_qp f64 fluctuation values, N_qp f64
/// weights, 3 node-count f64 displacement fluctuations.
void write_snapshot(const std::filesystem::path& path, const Snapshot& s);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace rbh
