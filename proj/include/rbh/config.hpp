#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rbh/fom.hpp"
#include "rbh/material.hpp"
#include "rbh/pod.hpp"
#include "rbh/rb_solver.hpp"
#include "rbh/sampling.hpp"

namespace rbh {

/// Settings of a training/validation campaign, read from a key = value file.
/// Keys are listed in the README; unknown keys are rejected.
struct RunConfig {
    std::filesystem::path microstructure;
    std::filesystem::path output_dir = "out";

    PlanInputs sampling;
    /// Extra purely dilatational cases J in [J_min, J_max] appended to the plan.
    int volumetric_levels = 0;

    FomSettings fom;
    PodOptions pod;

    int validation_N_dir = 8;
    std::uint64_t validation_seed = 1;
    /// Validation stretches are scaled to det U = 1 - validation_compression.
    double validation_compression = 0.0;
    std::vector<int> validation_N = {4, 8, 16};

    RBSettings rb;
    CutoffConfig cutoff;
};

/// Throws ConfigError naming the offending key and line.
RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
/// Checks value ranges and that the microstructure file exists.
void validate(const RunConfig& cfg);

SamplingPlan training_plan(const RunConfig& cfg);
/// Held-out directions at the training amplitudes.
SamplingPlan validation_plan(const RunConfig& cfg);

}  // namespace rbh
