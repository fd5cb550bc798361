#include "rbh/voxel_mesh.hpp"

#include <cmath>

#include "rbh/errors.hpp"

namespace rbh {

VoxelMesh::VoxelMesh(const VoxelMicrostructure& m)
    : dims_(m.dims), h_(m.cell_size), node_count_(m.voxel_count()) {
    validate(m);
    qp_weight_ = h_[0] * h_[1] * h_[2] / 8.0;
    phase_ = m.phase;

    const int nx = dims_[0];
    const int ny = dims_[1];
    const int nz = dims_[2];
    connectivity_.resize(node_count_);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const auto e = static_cast<std::size_t>(i + nx * (j + ny * k));
                for (int a = 0; a < 8; ++a) {
                    const int ii = (i + (a & 1)) % nx;
                    const int jj = (j + ((a >> 1) & 1)) % ny;
                    const int kk = (k + ((a >> 2) & 1)) % nz;
                    connectivity_[e][static_cast<std::size_t>(a)] =
                        static_cast<std::size_t>(ii + nx * (jj + ny * kk));
                }
            }

    // reference element [0,1]^3, Gauss points at (1 -+ 1/sqrt(3)) / 2
    const double gp[2] = {0.5 * (1.0 - 1.0 / std::sqrt(3.0)), 0.5 * (1.0 + 1.0 / std::sqrt(3.0))};
    for (int q = 0; q < 8; ++q) {
        const double xi[3] = {gp[q & 1], gp[(q >> 1) & 1], gp[(q >> 2) & 1]};
        for (int a = 0; a < 8; ++a) {
            const int bit[3] = {a & 1, (a >> 1) & 1, (a >> 2) & 1};
            double n1d[3];
            double d1d[3];
            for (int d = 0; d < 3; ++d) {
                n1d[d] = bit[d] ? xi[d] : 1.0 - xi[d];
                d1d[d] = bit[d] ? 1.0 : -1.0;
            }
            auto& g = grads_[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
            g[0] = d1d[0] * n1d[1] * n1d[2] / h_[0];
            g[1] = n1d[0] * d1d[1] * n1d[2] / h_[1];
            g[2] = n1d[0] * n1d[1] * d1d[2] / h_[2];
        }
    }
}

std::vector<double> VoxelMesh::weights() const { return std::vector<double>(qp_count(), qp_weight_); }

Vec3 VoxelMesh::node_position(std::size_t n) const {
    const auto nx = static_cast<std::size_t>(dims_[0]);
    const auto ny = static_cast<std::size_t>(dims_[1]);
    const std::size_t i = n % nx;
    const std::size_t j = (n / nx) % ny;
    const std::size_t k = n / (nx * ny);
    return Vec3{static_cast<double>(i) * h_[0], static_cast<double>(j) * h_[1],
                static_cast<double>(k) * h_[2]};
}

QuadField fluctuation_gradient(const VoxelMesh& mesh, std::span<const Vec3> w) {
    if (w.size() != mesh.node_count()) {
        throw LayoutMismatch("fluctuation_gradient: nodal field does not match the mesh");
    }
    QuadField out;
    out.values.resize(mesh.qp_count());
    out.weights = mesh.weights();
    for (std::size_t e = 0; e < mesh.element_count(); ++e) {
        const auto& nodes = mesh.element_nodes(e);
        for (int q = 0; q < 8; ++q) {
            Tensor2 g;
            for (int a = 0; a < 8; ++a) {
                const Vec3& wa = w[nodes[static_cast<std::size_t>(a)]];
                const Vec3& dn = mesh.shape_gradient(q, a);
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j) g(i, j) += wa[static_cast<std::size_t>(i)] * dn[static_cast<std::size_t>(j)];
            }
            out.values[8 * e + static_cast<std::size_t>(q)] = g;
        }
    }
    return out;
}

Vec3 nodal_mean(std::span<const Vec3> w) {
    Vec3 m{0.0, 0.0, 0.0};
    for (const Vec3& v : w)
        for (int d = 0; d < 3; ++d) m[static_cast<std::size_t>(d)] += v[static_cast<std::size_t>(d)];
    if (!w.empty())
        for (double& v : m) v /= static_cast<double>(w.size());
    return m;
}

}  // namespace rbh
