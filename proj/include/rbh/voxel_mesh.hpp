#pragma once

#include <array>
#include <span>
#include <vector>

#include "rbh/microstructure.hpp"
#include "rbh/quad_field.hpp"

namespace rbh {

using Vec3 = std::array<double, 3>;

/// Trilinear hexahedral discretization of a periodic voxel cell with 2x2x2
/// Gauss quadrature. Nodes on the + faces are identified with the - faces, so
/// there are nx*ny*nz nodes, one per voxel corner (i, j, k).
///
/// Quadrature point q of element e has global index 8 e + q with
/// q = qx + 2 qy + 4 qz; element node a = ax + 2 ay + 4 az.
class VoxelMesh {
public:
    explicit VoxelMesh(const VoxelMicrostructure& m);

    std::size_t node_count() const { return node_count_; }
    std::size_t element_count() const { return node_count_; }
    std::size_t qp_count() const { return 8 * node_count_; }
    double volume() const { return qp_weight_ * static_cast<double>(qp_count()); }
    double qp_weight() const { return qp_weight_; }
    std::vector<double> weights() const;

    const std::array<std::size_t, 8>& element_nodes(std::size_t e) const { return connectivity_[e]; }
    /// Physical gradient of shape function a at local quadrature point q.
    const Vec3& shape_gradient(int q, int a) const {
        return grads_[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
    }
    /// Reference position of node n (periodic image in [0, L)).
    Vec3 node_position(std::size_t n) const;
    /// Phase id of the element owning quadrature point p.
    int qp_phase(std::size_t p) const { return phase_[p / 8]; }
    int element_phase(std::size_t e) const { return phase_[e]; }

    const std::array<int, 3>& dims() const { return dims_; }
    const std::array<double, 3>& cell_size() const { return h_; }

private:
    std::array<int, 3> dims_;
    std::array<double, 3> h_;
    std::size_t node_count_;
    double qp_weight_;
    std::vector<std::array<std::size_t, 8>> connectivity_;
    std::array<std::array<Vec3, 8>, 8> grads_{};
    std::vector<int> phase_;
};

/// Discrete gradient w (x) nabla of a periodic nodal field, evaluated at every
/// quadrature point.
QuadField fluctuation_gradient(const VoxelMesh& mesh, std::span<const Vec3> w);

/// Arithmetic mean over nodes; pinned to zero for displacement fluctuations.
Vec3 nodal_mean(std::span<const Vec3> w);

}  // namespace rbh
