#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rbh/fom.hpp"
#include "rbh/quad_field.hpp"

namespace rbh {

/// L2-orthonormal, zero-mean deformation gradient modes with the matching
/// displacement fluctuation modes.
struct ReducedBasis {
    std::vector<QuadField> modes;
    /// Correlation eigenvalues of the retained modes, descending.
    std::vector<double> eigenvalues;
    /// Empty when the snapshots carried no displacement fields.
    std::vector<std::vector<Vec3>> disp_modes;
    /// Full correlation spectrum, descending (not persisted).
    std::vector<double> spectrum;
    std::vector<std::string> warnings;

    std::size_t size() const { return modes.size(); }
};

/// C_ij = <F~_i . F~_j>. Throws LayoutMismatch when the snapshots differ in
/// quadrature layout.
Eigen::MatrixXd correlation_matrix(std::span<const Snapshot> snapshots);

struct PodOptions {
    /// Number of modes; 0 selects N from energy_tol.
    int N = 0;
    /// Smallest N with sum_{i<=N} lambda_i / sum lambda_i >= 1 - energy_tol.
    double energy_tol = 1e-8;
};

/// Snapshot POD. Modes with lambda_i / lambda_1 < 1e-12 are always dropped.
/// Throws RankError when the snapshots span nothing or N exceeds the rank.
ReducedBasis build_basis(std::span<const Snapshot> snapshots, const PodOptions& options = {});

/// The first N modes (nested bases share their leading modes).
ReducedBasis truncated(const ReducedBasis& basis, std::size_t N);

/// MRB2 container, little-endian: magic "MRB2", u64 N_qp, u64 node count,
/// u64 N, N f64 eigenvalues, 9 N_qp N f64 mode values (mode-major), N_qp f64
/// weights, 3 node-count N f64 displacement mode values.
void write_basis(const std::filesystem::path& path, const ReducedBasis& basis);
ReducedBasis read_basis(const std::filesystem::path& path);

}  // namespace rbh
