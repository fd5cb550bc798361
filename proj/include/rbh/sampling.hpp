#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rbh/tensor.hpp"

namespace rbh {

using Vec5 = std::array<double, 5>;

/// Orthonormal basis of the symmetric traceless tensors.
using TangentBasis = std::array<Tensor2, 5>;

TangentBasis tangent_basis();

/// sum_k n_k X_k
Tensor2 tangent_tensor(const Vec5& n);

enum class DirectionMethod {
    /// Riesz (s = 2) energy minimization of the points and their antipodes on
    /// the unit sphere, from seeded starts.
    riesz,
    /// i.i.d. uniform points, kept for comparison.
    random,
};

/// n approximately uniformly distributed unit vectors in R^5. Deterministic for
/// a fixed seed.
std::vector<Vec5> uniform_directions(int n, std::uint64_t seed, DirectionMethod method = DirectionMethod::riesz);

enum class AmplitudeSpacing { uniform, adaptive };

/// Deviatoric amplitudes in (0, t_max], the last one equal to t_max.
/// Uniform: t_p = p t_max / n. Adaptive: geometric intervals growing from a
/// first interval of a quarter of the uniform one. With include_zero the
/// first amplitude is 0 and the remaining n - 1 follow the same rule.
std::vector<double> deviatoric_amplitudes(double t_max, int n, AmplitudeSpacing spacing, bool include_zero = false);

/// n levels evenly spaced in [J_min, J_max]; a single level is 1.
std::vector<double> determinant_levels(double J_min, double J_max, int n);

/// J^{1/3} exp(t sum_k N_k X_k)
Stretch stretch_from(double J, double t, const Vec5& N);

struct PlanEntry {
    double J;
    double t;
    Vec5 N;
    Stretch U;
};

struct SamplingPlan {
    std::vector<double> J_levels;
    std::vector<Vec5> directions;
    std::vector<double> amplitudes;
    /// Ordered with the determinant outermost and the amplitude innermost.
    std::vector<PlanEntry> entries;
};

struct PlanInputs {
    double J_min = 1.0;
    double J_max = 1.0;
    double t_max = 0.3;
    int N_det = 1;
    int N_dir = 16;
    int N_amp = 4;
    AmplitudeSpacing spacing = AmplitudeSpacing::uniform;
    bool include_zero = false;
    std::uint64_t seed = 0;
    DirectionMethod directions = DirectionMethod::riesz;
};

/// Product set of determinant levels, directions and amplitudes. Throws
/// InvalidArgument unless t_max > 0, all counts are positive and
/// J_min <= 1 <= J_max with J_min < J_max when N_det > 1.
SamplingPlan build_plan(const PlanInputs& in);

/// Purely dilatational samples J^{1/3} I for N_det levels in [J_min, J_max].
SamplingPlan volumetric_plan(double J_min, double J_max, int N_det);

/// Entries of a followed by entries of b; the level/direction/amplitude lists
/// are merged without duplicates.
SamplingPlan concat(const SamplingPlan& a, const SamplingPlan& b);

struct LoadCase {
    Vec5 N;
    double t;
    double J;
};

/// Inverse of stretch_from. For an isotropic stretch N is the zero vector.
LoadCase load_case(const Stretch& U);

/// One line per entry: J t N1..N5 U11 U22 U33 U12 U13 U23, lines starting
/// with '#' are comments.
void write_plan(std::ostream& out, const SamplingPlan& plan);
SamplingPlan read_plan(std::istream& in);
void write_plan_file(const std::filesystem::path& path, const SamplingPlan& plan);
SamplingPlan read_plan_file(const std::filesystem::path& path);

}  // namespace rbh
