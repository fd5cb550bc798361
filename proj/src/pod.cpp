#include "rbh/pod.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "rbh/binary_io.hpp"
#include "rbh/errors.hpp"

namespace rbh {

namespace {

void check_layout(std::span<const Snapshot> snapshots) {
    if (snapshots.empty()) throw RankError("POD: no snapshots");
    const auto& w = snapshots.front().fluct.weights;
    const std::size_t nodes = snapshots.front().disp_fluct.size();
    for (const Snapshot& s : snapshots) {
        if (s.fluct.size() != w.size() || s.fluct.weights != w || s.disp_fluct.size() != nodes) {
            throw LayoutMismatch("POD: snapshots do not share one quadrature layout");
        }
    }
}

// Gram matrix of the modes.
Eigen::MatrixXd gram(const std::vector<QuadField>& modes) {
    const auto n = static_cast<Eigen::Index>(modes.size());
    Eigen::MatrixXd G(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            G(i, j) = G(j, i) = l2_inner(modes[static_cast<std::size_t>(i)], modes[static_cast<std::size_t>(j)]);
        }
    return G;
}

// B <- B L^{-T} with G = L L^T; triangular, so leading modes stay nested.
void cholesky_qr(ReducedBasis& b) {
    const Eigen::MatrixXd G = gram(b.modes);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw RankError("POD: modes are numerically dependent");
    const auto n = static_cast<Eigen::Index>(b.modes.size());
    const Eigen::MatrixXd T = llt.matrixL().solve(Eigen::MatrixXd::Identity(n, n)).transpose();

    std::vector<QuadField> modes(b.modes.size());
    std::vector<std::vector<Vec3>> disp(b.disp_modes.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto si = static_cast<std::size_t>(i);
        modes[si].weights = b.modes[si].weights;
        modes[si].values.assign(b.modes[si].size(), Tensor2{});
        if (!disp.empty()) disp[si].assign(b.disp_modes[si].size(), Vec3{});
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double c = T(j, i);
            const auto sj = static_cast<std::size_t>(j);
            for (std::size_t p = 0; p < modes[si].size(); ++p) modes[si].values[p] += b.modes[sj].values[p] * c;
            if (!disp.empty()) {
                for (std::size_t n2 = 0; n2 < disp[si].size(); ++n2)
                    for (std::size_t k = 0; k < 3; ++k) disp[si][n2][k] += c * b.disp_modes[sj][n2][k];
            }
        }
    }
    b.modes = std::move(modes);
    b.disp_modes = std::move(disp);
}

}  // namespace

Eigen::MatrixXd correlation_matrix(std::span<const Snapshot> snapshots) {
    check_layout(snapshots);
    const auto n = static_cast<Eigen::Index>(snapshots.size());
    Eigen::MatrixXd C(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) {
            C(i, j) = C(j, i) = l2_inner(snapshots[static_cast<std::size_t>(i)].fluct,
                                         snapshots[static_cast<std::size_t>(j)].fluct);
        }
    return C;
}

ReducedBasis build_basis(std::span<const Snapshot> snapshots, const PodOptions& options) {
    const Eigen::MatrixXd C = correlation_matrix(snapshots);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success) throw ConvergenceError("POD: eigen solve failed");

    ReducedBasis b;
    const Eigen::Index ns = C.rows();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(ns));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index a, Eigen::Index c) { return es.eigenvalues()[a] > es.eigenvalues()[c]; });
    for (Eigen::Index k : order) b.spectrum.push_back(es.eigenvalues()[k]);

    const double l1 = b.spectrum.front();
    if (!(l1 > 0.0)) throw RankError("POD: snapshots have zero fluctuation, basis would be empty");
    std::size_t rank = 0;
    while (rank < b.spectrum.size() && b.spectrum[rank] / l1 >= 1e-12) ++rank;

    std::size_t N = 0;
    if (options.N > 0) {
        N = static_cast<std::size_t>(options.N);
        if (N > rank) {
            throw RankError("POD: requested " + std::to_string(N) + " modes but numerical rank is " +
                            std::to_string(rank));
        }
    } else {
        if (!(options.energy_tol > 0.0 && options.energy_tol < 1.0)) {
            throw InvalidArgument("POD: energy_tol must lie in (0, 1)");
        }
        double total = 0.0;
        for (double l : b.spectrum) total += std::max(l, 0.0);
        double acc = 0.0;
        while (N < rank) {
            acc += b.spectrum[N++];
            if (acc >= (1.0 - options.energy_tol) * total) break;
        }
    }
    if (rank < b.spectrum.size()) {
        b.warnings.push_back("POD: " + std::to_string(b.spectrum.size() - rank) +
                             " modes with lambda/lambda_1 < 1e-12 discarded");
    }

    const bool with_disp = !snapshots.front().disp_fluct.empty();
    const std::size_t nqp = snapshots.front().fluct.size();
    for (std::size_t i = 0; i < N; ++i) {
        const Eigen::Index col = order[i];
        const double scale = 1.0 / std::sqrt(b.spectrum[i]);
        QuadField m;
        m.weights = snapshots.front().fluct.weights;
        m.values.assign(nqp, Tensor2{});
        std::vector<Vec3> u(with_disp ? snapshots.front().disp_fluct.size() : 0, Vec3{});
        for (Eigen::Index j = 0; j < ns; ++j) {
            const double c = es.eigenvectors()(j, col) * scale;
            const Snapshot& s = snapshots[static_cast<std::size_t>(j)];
            for (std::size_t p = 0; p < nqp; ++p) m.values[p] += s.fluct.values[p] * c;
            for (std::size_t n = 0; n < u.size(); ++n)
                for (std::size_t k = 0; k < 3; ++k) u[n][k] += c * s.disp_fluct[n][k];
        }
        b.modes.push_back(std::move(m));
        if (with_disp) b.disp_modes.push_back(std::move(u));
        b.eigenvalues.push_back(b.spectrum[i]);
    }
    // The 1/sqrt(lambda) scaling amplifies round-off in trailing modes; two
    // Cholesky-QR passes restore orthonormality to machine precision.
    cholesky_qr(b);
    cholesky_qr(b);
    return b;
}

ReducedBasis truncated(const ReducedBasis& basis, std::size_t N) {
    if (N > basis.size()) throw RankError("truncated: basis has only " + std::to_string(basis.size()) + " modes");
    ReducedBasis b;
    b.modes.assign(basis.modes.begin(), basis.modes.begin() + static_cast<std::ptrdiff_t>(N));
    b.eigenvalues.assign(basis.eigenvalues.begin(), basis.eigenvalues.begin() + static_cast<std::ptrdiff_t>(N));
    if (!basis.disp_modes.empty()) {
        b.disp_modes.assign(basis.disp_modes.begin(), basis.disp_modes.begin() + static_cast<std::ptrdiff_t>(N));
    }
    b.spectrum = basis.spectrum;
    return b;
}

void write_basis(const std::filesystem::path& path, const ReducedBasis& basis) {
    if (basis.size() == 0) throw RankError("write_basis: empty basis");
    const std::size_t nqp = basis.modes.front().size();
    const std::size_t nodes = basis.disp_modes.empty() ? 0 : basis.disp_modes.front().size();
    io::write_atomically(path, true, [&](std::ostream& out) {
        io::put_magic(out, "MRB2");
        io::put_u64(out, nqp);
        io::put_u64(out, nodes);
        io::put_u64(out, basis.size());
        io::put_f64s(out, basis.eigenvalues);
        for (const QuadField& m : basis.modes)
            for (const Tensor2& t : m.values) io::put_f64s(out, t.c);
        io::put_f64s(out, basis.modes.front().weights);
        for (const auto& u : basis.disp_modes)
            for (const Vec3& v : u) io::put_f64s(out, v);
    });
}

ReducedBasis read_basis(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open basis " + path.string());
    io::expect_magic(in, "MRB2");
    const std::uint64_t nqp = io::get_u64(in);
    const std::uint64_t nodes = io::get_u64(in);
    const std::uint64_t N = io::get_u64(in);
    ReducedBasis b;
    b.eigenvalues.resize(N);
    io::get_f64s(in, b.eigenvalues);
    b.modes.resize(N);
    for (QuadField& m : b.modes) {
        m.values.resize(nqp);
        for (Tensor2& t : m.values) io::get_f64s(in, t.c);
    }
    std::vector<double> w(nqp);
    io::get_f64s(in, w);
    for (QuadField& m : b.modes) m.weights = w;
    if (nodes > 0) {
        b.disp_modes.assign(N, std::vector<Vec3>(nodes));
        for (auto& u : b.disp_modes)
            for (Vec3& v : u) io::get_f64s(in, v);
    }
    b.spectrum = b.eigenvalues;
    return b;
}

}  // namespace rbh
