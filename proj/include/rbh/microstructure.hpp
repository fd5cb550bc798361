#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include "rbh/material.hpp"

namespace rbh {

/// Periodic unit cell on a structured voxel grid. Voxel (i, j, k) has linear
/// index i + nx (j + ny k) (x fastest); fields are periodic modulo dims.
struct VoxelMicrostructure {
    std::array<int, 3> dims{1, 1, 1};
    /// Voxel edge lengths.
    std::array<double, 3> cell_size{1.0, 1.0, 1.0};
    std::vector<int> phase;
    std::map<int, NeoHookeParams> phases;

    std::size_t voxel_count() const {
        return static_cast<std::size_t>(dims[0]) * static_cast<std::size_t>(dims[1]) *
               static_cast<std::size_t>(dims[2]);
    }
    double volume() const;
    /// Volume fraction of the given phase id.
    double fraction(int phase_id) const;
};

/// Throws InvalidArgument on non-positive dims / sizes, wrong voxel count or
/// a voxel referencing a phase without parameters.
void validate(const VoxelMicrostructure& m);

/// Voxel text format:
///   nx ny nz
///   hx hy hz
///   P
///   id K G        (P lines)
///   id            (nx*ny*nz lines, x fastest)
/// Lines starting with '#' are comments.
VoxelMicrostructure read_voxel(std::istream& in);
VoxelMicrostructure read_voxel_file(const std::filesystem::path& path);
void write_voxel(std::ostream& out, const VoxelMicrostructure& m);
void write_voxel_file(const std::filesystem::path& path, const VoxelMicrostructure& m);

VoxelMicrostructure make_homogeneous(std::array<int, 3> dims, NeoHookeParams p,
                                     std::array<double, 3> cell_size = {1.0, 1.0, 1.0});

/// Rank-1 laminate with layers normal to x: voxels with i < layer_voxels get
/// phase 1, the rest phase 2.
VoxelMicrostructure make_laminate(std::array<int, 3> dims, int layer_voxels, NeoHookeParams phase1,
                                  NeoHookeParams phase2,
                                  std::array<double, 3> cell_size = {1.0, 1.0, 1.0});

/// Matrix (phase 1) with a centered cubic inclusion (phase 2) of edge
/// `inclusion_voxels` voxels.
VoxelMicrostructure make_cubic_inclusion(int n, int inclusion_voxels, NeoHookeParams matrix,
                                         NeoHookeParams inclusion, double cell_size = 1.0);

}  // namespace rbh
