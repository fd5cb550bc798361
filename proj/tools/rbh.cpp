// Command line driver: sampling, snapshot training, validation, single solves
// and basis inspection.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "rbh/config.hpp"
#include "rbh/errors.hpp"
#include "rbh/microstructure.hpp"
#include "rbh/pipeline.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kPartial = 2;
constexpr int kFatal = 3;

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    int threads = 1;
};

rbh::RunConfig load(const std::string& path, const Globals& g) {
    rbh::RunConfig cfg = rbh::load_config(path);
    if (g.seed) cfg.sampling.seed = *g.seed;
    if (g.out) cfg.output_dir = *g.out;
    rbh::validate(cfg);
    return cfg;
}

int cmd_sample(const std::string& config, const Globals& g) {
    const rbh::RunConfig cfg = load(config, g);
    std::filesystem::create_directories(cfg.output_dir);
    const rbh::SamplingPlan plan = rbh::training_plan(cfg);
    rbh::write_plan_file(cfg.output_dir / "plan.txt", plan);
    rbh::write_plan_file(cfg.output_dir / "validation_plan.txt", rbh::validation_plan(cfg));
    std::cout << "wrote " << plan.entries.size() << " training entries to " << (cfg.output_dir / "plan.txt") << '\n';
    return kOk;
}

int cmd_train(const std::string& config, const std::string& plan_file, const Globals& g) {
    const rbh::RunConfig cfg = load(config, g);
    const rbh::VoxelMicrostructure m = rbh::read_voxel_file(cfg.microstructure);
    const rbh::SamplingPlan plan = plan_file.empty() ? rbh::training_plan(cfg) : rbh::read_plan_file(plan_file);
    const auto dir = cfg.output_dir / "snapshots";
    const rbh::TrainingOutcome outcome = rbh::generate_snapshots(m, plan, cfg.fom, dir, g.threads, &std::cout);
    std::cout << "snapshots: " << outcome.solved << " solved, " << outcome.reused << " reused, "
              << outcome.identity_skipped << " identity skipped, " << outcome.failures.size() << " failed\n";

    const std::vector<rbh::Snapshot> snaps = rbh::load_snapshots(plan, dir);
    rbh::ReducedBasis basis;
    try {
        basis = rbh::build_basis(snaps, cfg.pod);
    } catch (const rbh::RankError& e) {
        std::cerr << "training aborted: " << e.what() << '\n';
        return kFatal;
    }
    for (const auto& w : basis.warnings) std::cerr << "warning: " << w << '\n';
    rbh::write_basis(cfg.output_dir / "basis.mrb2", basis);
    std::ofstream spectrum(cfg.output_dir / "spectrum.txt");
    rbh::write_spectrum(spectrum, basis);
    std::cout << "basis: N = " << basis.size() << " from " << snaps.size() << " snapshots\n";
    return outcome.failures.empty() ? kOk : kPartial;
}

int cmd_validate(const std::string& config, const std::string& basis_file, const std::string& plan_file,
                 const Globals& g) {
    const rbh::RunConfig cfg = load(config, g);
    const rbh::VoxelMicrostructure m = rbh::read_voxel_file(cfg.microstructure);
    const rbh::ReducedBasis basis =
        rbh::read_basis(basis_file.empty() ? cfg.output_dir / "basis.mrb2" : std::filesystem::path(basis_file));
    const rbh::SamplingPlan cases = plan_file.empty() ? rbh::validation_plan(cfg) : rbh::read_plan_file(plan_file);
    const auto rows =
        rbh::run_validation(m, basis, cases, cfg.validation_N, cfg.fom, cfg.rb, cfg.cutoff, g.threads, &std::cout);
    std::filesystem::create_directories(cfg.output_dir);
    {
        std::ofstream csv(cfg.output_dir / "validation.csv");
        rbh::write_validation_csv(csv, rows);
        std::ofstream summary(cfg.output_dir / "validation_summary.txt");
        rbh::write_validation_summary(summary, rows);
    }
    rbh::write_validation_summary(std::cout, rows);
    const bool any_failed = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.status != "ok"; });
    return any_failed ? kPartial : kOk;
}

int cmd_solve(const std::string& config, const std::vector<double>& F, const std::string& basis_file, int N,
              const Globals& g) {
    const rbh::RunConfig cfg = load(config, g);
    const rbh::VoxelMicrostructure m = rbh::read_voxel_file(cfg.microstructure);
    rbh::ReducedBasis basis =
        rbh::read_basis(basis_file.empty() ? cfg.output_dir / "basis.mrb2" : std::filesystem::path(basis_file));
    if (N > 0) basis = rbh::truncated(basis, static_cast<std::size_t>(N));
    const rbh::RBModel model(basis, m, cfg.cutoff, cfg.rb);
    rbh::Tensor2 Fbar;
    std::copy(F.begin(), F.end(), Fbar.c.begin());
    const auto t0 = std::chrono::steady_clock::now();
    const rbh::RBResult res = rbh::evaluate_general(model, rbh::DefGrad(Fbar));
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rbh::write_record_header(std::cout);
    rbh::write_record(std::cout, Fbar, res, dt);
    return kOk;
}

int cmd_inspect(const std::string& basis_file) {
    const rbh::ReducedBasis b = rbh::read_basis(basis_file);
    const std::size_t N = b.size();
    double ortho = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        mean = std::max(mean, rbh::norm(rbh::volume_average(b.modes[i])));
        for (std::size_t j = 0; j < N; ++j) {
            ortho = std::max(ortho, std::abs(rbh::l2_inner(b.modes[i], b.modes[j]) - (i == j ? 1.0 : 0.0)));
        }
    }
    std::printf("modes: %zu\nquadrature points: %zu\nnodes: %zu\n", N, N ? b.modes.front().size() : 0,
                b.disp_modes.empty() ? std::size_t{0} : b.disp_modes.front().size());
    std::printf("max |<B_i . B_j> - delta_ij|: %.3e\nmax |<B_i>|: %.3e\n", ortho, mean);
    std::printf("eigenvalues:\n");
    for (std::size_t i = 0; i < N; ++i) std::printf("%4zu %.10e\n", i + 1, b.eigenvalues[i]);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reduced basis homogenization of hyperelastic voxel microstructures"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    std::uint64_t seed = 0;
    std::string out;
    auto* seed_opt = app.add_option("--seed", seed, "Override the sampling seed")->expected(1);
    auto* out_opt = app.add_option("--out", out, "Override the output directory");
    app.add_option("--threads", g.threads, "Worker threads for campaigns")->check(CLI::PositiveNumber);

    std::string config, plan_file, basis_file;
    std::vector<double> F;
    int N = 0;

    auto* sample = app.add_subcommand("sample", "Write the training and validation plans");
    sample->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);

    auto* train = app.add_subcommand("train", "Solve snapshots (resumable) and build the basis");
    train->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    train->add_option("--plan", plan_file, "Plan file instead of the config's sampling")->check(CLI::ExistingFile);

    auto* val = app.add_subcommand("validate", "Compare RB and FOM on held-out cases");
    val->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    val->add_option("--basis", basis_file, "Basis file (default <out>/basis.mrb2)");
    val->add_option("--plan", plan_file, "Validation plan file")->check(CLI::ExistingFile);

    auto* slv = app.add_subcommand("solve", "Evaluate the RB model at one macroscopic F (row-major)");
    slv->add_option("config", config, "Config file")->required()->check(CLI::ExistingFile);
    slv->add_option("F", F, "Nine components F11 F12 ... F33")->required()->expected(9);
    slv->add_option("--basis", basis_file, "Basis file (default <out>/basis.mrb2)");
    slv->add_option("--N", N, "Use the first N modes");

    auto* insp = app.add_subcommand("inspect", "Print basis statistics and spectrum");
    insp->add_option("basis", basis_file, "Basis file")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }
    if (*seed_opt) g.seed = seed;
    if (*out_opt) g.out = out;

    try {
        if (*sample) return cmd_sample(config, g);
        if (*train) return cmd_train(config, plan_file, g);
        if (*val) return cmd_validate(config, basis_file, plan_file, g);
        if (*slv) return cmd_solve(config, F, basis_file, N, g);
        if (*insp) return cmd_inspect(basis_file);
    } catch (const rbh::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "fatal: " << e.what() << '\n';
        return kFatal;
    }
    return kFatal;
}
