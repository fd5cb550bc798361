#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "rbh/config.hpp"
#include "rbh/errors.hpp"
#include "rbh/pipeline.hpp"

using namespace rbh;
namespace fs = std::filesystem;

namespace {

const NeoHookeParams kSoft{19.867, 0.4};
const NeoHookeParams kStiff{800.0, 240.0};

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("rbh_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

SamplingPlan small_plan() {
    PlanInputs in;
    in.N_dir = 3;
    in.N_amp = 3;
    in.t_max = 0.15;
    in.seed = 4;
    in.include_zero = true;
    return build_plan(in);
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
    std::istringstream in(
        "# comment\n"
        "microstructure = cell.vox\n"
        "t_max = 0.25   # trailing comment\n"
        "N_dir = 12\n"
        "spacing = adaptive\n"
        "include_zero = on\n"
        "volumetric_levels = 5\n"
        "J_max = 1.02\n"
        "fom_linear_solver = cg\n"
        "validation_N = 2, 4,8\n"
        "cutoff = off\n");
    const RunConfig c = parse_config(in, "/data");
    EXPECT_EQ(c.microstructure, fs::path("/data/cell.vox"));
    EXPECT_EQ(c.sampling.t_max, 0.25);
    EXPECT_EQ(c.sampling.N_dir, 12);
    EXPECT_EQ(c.sampling.spacing, AmplitudeSpacing::adaptive);
    EXPECT_TRUE(c.sampling.include_zero);
    EXPECT_EQ(c.volumetric_levels, 5);
    EXPECT_EQ(c.fom.linear_solver, LinearSolverKind::conjugate_gradient);
    EXPECT_EQ(c.validation_N, (std::vector<int>{2, 4, 8}));
    EXPECT_FALSE(c.cutoff.enabled);
}

TEST(Config, ErrorsNameKeyAndLine) {
    auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            parse_config(in);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message("N_dir = 4\nbogus = 1\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("bogus = 1\n").find("bogus"), std::string::npos);
    EXPECT_NE(message("t_max = abc\n").find("t_max"), std::string::npos);
    EXPECT_NE(message("N_dir = 4.5\n").find("N_dir"), std::string::npos);
    EXPECT_NE(message("spacing = weird\n").find("spacing"), std::string::npos);
    EXPECT_NE(message("just text\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("seed =\n").find("missing value"), std::string::npos);
}

TEST(Config, ValidateRejectsBadRanges) {
    const fs::path dir = fresh_dir("config");
    write_voxel_file(dir / "cell.vox", make_homogeneous({2, 2, 2}, kSoft));
    RunConfig c;
    c.microstructure = dir / "cell.vox";
    EXPECT_NO_THROW(validate(c));
    RunConfig bad = c;
    bad.sampling.t_max = -1;
    EXPECT_THROW(validate(bad), ConfigError);
    bad = c;
    bad.microstructure = dir / "missing.vox";
    EXPECT_THROW(validate(bad), ConfigError);
    bad = c;
    bad.validation_N = {};
    EXPECT_THROW(validate(bad), ConfigError);
    bad = c;
    bad.sampling.J_min = 1.1;
    EXPECT_THROW(validate(bad), ConfigError);
    fs::remove_all(dir);
}

TEST(Config, PlansFromConfig) {
    RunConfig c;
    c.sampling.N_dir = 3;
    c.sampling.N_amp = 2;
    c.sampling.J_max = 1.02;
    c.volumetric_levels = 4;
    c.validation_N_dir = 2;
    c.validation_compression = 0.01;
    EXPECT_EQ(training_plan(c).entries.size(), 6u + 4u);
    const SamplingPlan v = validation_plan(c);
    ASSERT_EQ(v.entries.size(), 4u);
    for (const PlanEntry& e : v.entries) EXPECT_NEAR(det(e.U.value()), 0.99, 1e-12);
}

TEST(Config, ShippedExampleIsValid) {
    const RunConfig c = load_config(fs::path(RBH_DATA_DIR) / "example.cfg");
    EXPECT_NO_THROW(validate(c));
    EXPECT_EQ(c.sampling.N_dir, 8);
}

TEST(Pipeline, ResumedCampaignGivesIdenticalBasis) {
    const VoxelMicrostructure m = make_cubic_inclusion(4, 2, kSoft, kStiff, 0.25);
    const SamplingPlan plan = small_plan();
    const fs::path a = fresh_dir("campaign_a"), b = fresh_dir("campaign_b");

    const TrainingOutcome full = generate_snapshots(m, plan, {}, a, 1);
    EXPECT_EQ(full.solved, 6u);
    EXPECT_EQ(full.identity_skipped, 3u);
    EXPECT_TRUE(full.failures.empty());

    // Interrupted run: only the first half of the plan, then a restart.
    SamplingPlan head = plan;
    head.entries.erase(head.entries.begin() + 4, head.entries.end());
    generate_snapshots(m, head, {}, b, 1);
    const TrainingOutcome resumed = generate_snapshots(m, plan, {}, b, 2);
    EXPECT_EQ(resumed.reused, 2u);
    EXPECT_EQ(resumed.solved, 4u);

    for (const fs::path& dir : {a, b}) write_basis(dir / "basis.mrb2", build_basis(load_snapshots(plan, dir)));
    EXPECT_EQ(slurp(a / "basis.mrb2"), slurp(b / "basis.mrb2"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Pipeline, HomogeneousCampaignHasRankZero) {
    const VoxelMicrostructure m = make_homogeneous({3, 3, 3}, kStiff);
    const fs::path dir = fresh_dir("homogeneous");
    const SamplingPlan plan = small_plan();
    generate_snapshots(m, plan, {}, dir, 1);
    EXPECT_THROW(build_basis(load_snapshots(plan, dir)), RankError);
    fs::remove_all(dir);
}

TEST(Pipeline, ValidationRowsAndReports) {
    const VoxelMicrostructure m = make_cubic_inclusion(4, 2, kSoft, kStiff, 0.25);
    const SamplingPlan plan = small_plan();
    const fs::path dir = fresh_dir("validation");
    generate_snapshots(m, plan, {}, dir, 1);
    const ReducedBasis basis = build_basis(load_snapshots(plan, dir));

    SamplingPlan cases;
    for (std::size_t k = 1; k < plan.entries.size(); k += 3) cases.entries.push_back(plan.entries[k]);
    const std::vector<int> Ns = {1, static_cast<int>(basis.size()), 1000};
    const auto rows = run_validation(m, basis, cases, Ns, {}, {}, {}, 1);
    ASSERT_EQ(rows.size(), cases.entries.size() * 3);
    for (const ValidationRow& r : rows) {
        if (r.N == 1000) {
            EXPECT_NE(r.status, "ok");
            continue;
        }
        EXPECT_EQ(r.status, "ok");
        // Training load cases are reproduced by the full basis.
        if (r.N == static_cast<int>(basis.size())) EXPECT_LT(r.err_P, 1e-6);
    }
    std::ostringstream csv, summary;
    write_validation_csv(csv, rows);
    write_validation_summary(summary, rows);
    const std::string text = csv.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(rows.size() + 1));
    EXPECT_NE(summary.str().find("median_err_W"), std::string::npos);

    std::ostringstream spectrum;
    write_spectrum(spectrum, basis);
    EXPECT_NE(spectrum.str().find("cumulative"), std::string::npos);
    fs::remove_all(dir);
}
