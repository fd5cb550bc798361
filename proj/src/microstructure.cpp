#include "rbh/microstructure.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "rbh/errors.hpp"

namespace rbh {

double VoxelMicrostructure::volume() const {
    return static_cast<double>(voxel_count()) * cell_size[0] * cell_size[1] * cell_size[2];
}

double VoxelMicrostructure::fraction(int phase_id) const {
    std::size_t n = 0;
    for (int p : phase) n += (p == phase_id) ? 1 : 0;
    return phase.empty() ? 0.0 : static_cast<double>(n) / static_cast<double>(phase.size());
}

void validate(const VoxelMicrostructure& m) {
    for (int d = 0; d < 3; ++d) {
        if (m.dims[d] <= 0) throw InvalidArgument("voxel microstructure: dims must be positive");
        if (!(m.cell_size[d] > 0.0)) {
            throw InvalidArgument("voxel microstructure: cell sizes must be positive");
        }
    }
    if (m.phase.size() != m.voxel_count()) {
        throw InvalidArgument("voxel microstructure: expected " + std::to_string(m.voxel_count()) +
                              " phase ids, got " + std::to_string(m.phase.size()));
    }
    for (const auto& [id, p] : m.phases) validate(p);
    for (int id : m.phase) {
        if (!m.phases.contains(id)) {
            throw InvalidArgument("voxel microstructure: phase " + std::to_string(id) +
                                  " has no material parameters");
        }
    }
}

namespace {

// Next non-empty, non-comment line.
bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        return true;
    }
    return false;
}

std::istringstream expect_line(std::istream& in, const char* what) {
    std::string line;
    if (!next_line(in, line)) throw IoError(std::string("voxel file: missing ") + what);
    return std::istringstream(line);
}

}  // namespace

VoxelMicrostructure read_voxel(std::istream& in) {
    VoxelMicrostructure m;
    {
        auto ls = expect_line(in, "dimensions");
        if (!(ls >> m.dims[0] >> m.dims[1] >> m.dims[2])) throw IoError("voxel file: bad dimensions");
    }
    {
        auto ls = expect_line(in, "cell sizes");
        if (!(ls >> m.cell_size[0] >> m.cell_size[1] >> m.cell_size[2])) {
            throw IoError("voxel file: bad cell sizes");
        }
    }
    int nphases = 0;
    {
        auto ls = expect_line(in, "phase count");
        if (!(ls >> nphases) || nphases <= 0) throw IoError("voxel file: bad phase count");
    }
    for (int p = 0; p < nphases; ++p) {
        auto ls = expect_line(in, "phase table entry");
        int id = 0;
        NeoHookeParams params;
        if (!(ls >> id >> params.K >> params.G)) throw IoError("voxel file: bad phase table entry");
        m.phases[id] = params;
    }
    for (int d = 0; d < 3; ++d) {
        if (m.dims[d] <= 0) throw IoError("voxel file: dimensions must be positive");
    }
    m.phase.reserve(m.voxel_count());
    std::string line;
    while (m.phase.size() < m.voxel_count() && next_line(in, line)) {
        std::istringstream ls(line);
        int id = 0;
        while (ls >> id) m.phase.push_back(id);
    }
    validate(m);
    return m;
}

VoxelMicrostructure read_voxel_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open voxel file " + path.string());
    return read_voxel(in);
}

void write_voxel(std::ostream& out, const VoxelMicrostructure& m) {
    out << std::setprecision(17);
    out << m.dims[0] << ' ' << m.dims[1] << ' ' << m.dims[2] << '\n';
    out << m.cell_size[0] << ' ' << m.cell_size[1] << ' ' << m.cell_size[2] << '\n';
    out << m.phases.size() << '\n';
    for (const auto& [id, p] : m.phases) out << id << ' ' << p.K << ' ' << p.G << '\n';
    for (int id : m.phase) out << id << '\n';
}

void write_voxel_file(const std::filesystem::path& path, const VoxelMicrostructure& m) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write voxel file " + path.string());
    write_voxel(out, m);
}

VoxelMicrostructure make_homogeneous(std::array<int, 3> dims, NeoHookeParams p,
                                     std::array<double, 3> cell_size) {
    VoxelMicrostructure m;
    m.dims = dims;
    m.cell_size = cell_size;
    m.phases[1] = p;
    m.phase.assign(m.voxel_count(), 1);
    validate(m);
    return m;
}

VoxelMicrostructure make_laminate(std::array<int, 3> dims, int layer_voxels, NeoHookeParams phase1,
                                  NeoHookeParams phase2, std::array<double, 3> cell_size) {
    VoxelMicrostructure m;
    m.dims = dims;
    m.cell_size = cell_size;
    m.phases[1] = phase1;
    m.phases[2] = phase2;
    m.phase.resize(m.voxel_count());
    for (int k = 0; k < dims[2]; ++k)
        for (int j = 0; j < dims[1]; ++j)
            for (int i = 0; i < dims[0]; ++i) {
                m.phase[static_cast<std::size_t>(i + dims[0] * (j + dims[1] * k))] =
                    i < layer_voxels ? 1 : 2;
            }
    validate(m);
    return m;
}

VoxelMicrostructure make_cubic_inclusion(int n, int inclusion_voxels, NeoHookeParams matrix,
                                         NeoHookeParams inclusion, double cell_size) {
    VoxelMicrostructure m;
    m.dims = {n, n, n};
    m.cell_size = {cell_size, cell_size, cell_size};
    m.phases[1] = matrix;
    m.phases[2] = inclusion;
    m.phase.resize(m.voxel_count());
    const int lo = (n - inclusion_voxels) / 2;
    const int hi = lo + inclusion_voxels;
    auto inside = [&](int x) { return x >= lo && x < hi; };
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                m.phase[static_cast<std::size_t>(i + n * (j + n * k))] =
                    (inside(i) && inside(j) && inside(k)) ? 2 : 1;
            }
    validate(m);
    return m;
}

}  // namespace rbh
