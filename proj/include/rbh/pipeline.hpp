#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rbh/fom.hpp"
#include "rbh/microstructure.hpp"
#include "rbh/pod.hpp"
#include "rbh/rb_solver.hpp"
#include "rbh/sampling.hpp"

namespace rbh {

/// <dir>/entry_<k>.mrb1 with k zero-padded to six digits.
std::filesystem::path snapshot_path(const std::filesystem::path& dir, std::size_t k);

/// True for the identity stretch (t = 0 and J = 1), whose snapshot is zero.
bool is_identity_entry(const PlanEntry& e);

struct TrainingOutcome {
    std::size_t solved = 0;
    /// Entries whose snapshot file already existed.
    std::size_t reused = 0;
    std::size_t identity_skipped = 0;
    /// (entry index, message) of failed FOM solves.
    std::vector<std::pair<std::size_t, std::string>> failures;
};

/// One FOM solve per plan entry, written atomically to snapshot_path(dir, k).
/// Existing files are kept, so an interrupted campaign resumes where it stopped.
/// Failures are recorded and the campaign continues.
TrainingOutcome generate_snapshots(const VoxelMicrostructure& m, const SamplingPlan& plan,
                                   const FomSettings& settings, const std::filesystem::path& dir, int threads,
                                   std::ostream* log = nullptr);

/// Snapshots present on disk for the plan, in plan order.
std::vector<Snapshot> load_snapshots(const SamplingPlan& plan, const std::filesystem::path& dir);

/// Index, eigenvalue and relative cumulative energy per line.
void write_spectrum(std::ostream& out, const ReducedBasis& basis);

struct ValidationRow {
    std::size_t case_index = 0;
    int N = 0;
    double J = 1.0;
    double t = 0.0;
    Vec5 direction{};
    double err_W = 0.0;
    double err_P = 0.0;
    double fom_time_s = 0.0;
    double rb_time_s = 0.0;
    int iterations = 0;
    int assemblies = 0;
    int c_qp = 0;
    double V_excl = 0.0;
    /// "ok" or a short error description.
    std::string status = "ok";
};

/// FOM reference and RB solve for every (case, N); one row per pair, ordered
/// by case and then N. Per-case failures are recorded in the status column.
std::vector<ValidationRow> run_validation(const VoxelMicrostructure& m, const ReducedBasis& basis,
                                          const SamplingPlan& cases, const std::vector<int>& Ns,
                                          const FomSettings& fom, const RBSettings& rb, const CutoffConfig& cutoff,
                                          int threads, std::ostream* log = nullptr);

void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows);
/// Max and median of err_W and err_P and mean runtimes per N.
void write_validation_summary(std::ostream& out, const std::vector<ValidationRow>& rows);

}  // namespace rbh
