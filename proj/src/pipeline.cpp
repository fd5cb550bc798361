#include "rbh/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include "rbh/errors.hpp"

namespace rbh {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs body(k, worker) for k in [0, n) on up to `threads` workers.
template <class Body>
void parallel_for(std::size_t n, int threads, Body&& body) {
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), 1, std::max<std::size_t>(n, 1));
    std::atomic<std::size_t> next{0};
    auto run = [&](std::size_t worker) {
        for (std::size_t k = next++; k < n; k = next++) body(k, worker);
    };
    if (workers == 1) {
        run(0);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::filesystem::path snapshot_path(const std::filesystem::path& dir, std::size_t k) {
    char name[32];
    std::snprintf(name, sizeof name, "entry_%06zu.mrb1", k);
    return dir / name;
}

bool is_identity_entry(const PlanEntry& e) { return e.t == 0.0 && e.J == 1.0; }

TrainingOutcome generate_snapshots(const VoxelMicrostructure& m, const SamplingPlan& plan,
                                   const FomSettings& settings, const std::filesystem::path& dir, int threads,
                                   std::ostream* log) {
    std::filesystem::create_directories(dir);
    TrainingOutcome out;
    std::mutex mu;
    std::vector<std::unique_ptr<FomSolver>> solvers(static_cast<std::size_t>(std::max(1, threads)));

    parallel_for(plan.entries.size(), threads, [&](std::size_t k, std::size_t worker) {
        const PlanEntry& e = plan.entries[k];
        const auto path = snapshot_path(dir, k);
        if (is_identity_entry(e)) {
            std::lock_guard lock(mu);
            ++out.identity_skipped;
            return;
        }
        if (std::filesystem::exists(path)) {
            std::lock_guard lock(mu);
            ++out.reused;
            return;
        }
        try {
            if (!solvers[worker]) solvers[worker] = std::make_unique<FomSolver>(m, settings);
            const auto t0 = std::chrono::steady_clock::now();
            FomStats stats;
            const Snapshot s = solvers[worker]->solve(DefGrad(e.U.value()), &stats);
            write_snapshot(path, s);
            std::lock_guard lock(mu);
            ++out.solved;
            if (log) {
                char buf[160];
                std::snprintf(buf, sizeof buf, "entry %zu: J=%.6g t=%.6g newton=%d cutbacks=%d time=%.2fs\n", k, e.J,
                              e.t, stats.newton_iterations, stats.cutbacks, seconds_since(t0));
                *log << buf << std::flush;
            }
        } catch (const Error& err) {
            std::lock_guard lock(mu);
            out.failures.emplace_back(k, err.what());
            if (log) *log << "entry " << k << ": FAILED " << err.what() << '\n' << std::flush;
        }
    });
    std::sort(out.failures.begin(), out.failures.end());
    return out;
}

std::vector<Snapshot> load_snapshots(const SamplingPlan& plan, const std::filesystem::path& dir) {
    std::vector<Snapshot> out;
    for (std::size_t k = 0; k < plan.entries.size(); ++k) {
        const auto path = snapshot_path(dir, k);
        if (std::filesystem::exists(path)) out.push_back(read_snapshot(path));
    }
    return out;
}

void write_spectrum(std::ostream& out, const ReducedBasis& basis) {
    double total = 0.0;
    for (double l : basis.spectrum) total += std::max(l, 0.0);
    out << "# index eigenvalue cumulative_energy_fraction\n";
    double acc = 0.0;
    char buf[96];
    for (std::size_t i = 0; i < basis.spectrum.size(); ++i) {
        acc += std::max(basis.spectrum[i], 0.0);
        std::snprintf(buf, sizeof buf, "%zu %.17g %.17g\n", i + 1, basis.spectrum[i], total > 0.0 ? acc / total : 0.0);
        out << buf;
    }
}

std::vector<ValidationRow> run_validation(const VoxelMicrostructure& m, const ReducedBasis& basis,
                                          const SamplingPlan& cases, const std::vector<int>& Ns,
                                          const FomSettings& fom, const RBSettings& rb, const CutoffConfig& cutoff,
                                          int threads, std::ostream* log) {
    std::map<int, std::unique_ptr<RBModel>> models;
    for (int N : Ns) {
        if (N >= 1 && static_cast<std::size_t>(N) <= basis.size() && !models.count(N)) {
            models[N] = std::make_unique<RBModel>(truncated(basis, static_cast<std::size_t>(N)), m, cutoff, rb);
        }
    }

    std::vector<ValidationRow> rows(cases.entries.size() * Ns.size());
    std::mutex mu;
    std::vector<std::unique_ptr<FomSolver>> solvers(static_cast<std::size_t>(std::max(1, threads)));

    parallel_for(cases.entries.size(), threads, [&](std::size_t c, std::size_t worker) {
        const PlanEntry& e = cases.entries[c];
        for (std::size_t j = 0; j < Ns.size(); ++j) {
            ValidationRow& r = rows[c * Ns.size() + j];
            r.case_index = c;
            r.N = Ns[j];
            r.J = e.J;
            r.t = e.t;
            r.direction = e.N;
        }
        EffectiveFom ref{};
        double fom_time = 0.0;
        try {
            if (!solvers[worker]) solvers[worker] = std::make_unique<FomSolver>(m, fom);
            const auto t0 = std::chrono::steady_clock::now();
            const Snapshot s = solvers[worker]->solve(DefGrad(e.U.value()));
            fom_time = seconds_since(t0);
            ref = effective_fom(m, s);
        } catch (const Error& err) {
            for (std::size_t j = 0; j < Ns.size(); ++j) rows[c * Ns.size() + j].status = std::string("fom_failed: ") + err.what();
            return;
        }
        for (std::size_t j = 0; j < Ns.size(); ++j) {
            ValidationRow& r = rows[c * Ns.size() + j];
            r.fom_time_s = fom_time;
            const auto it = models.find(r.N);
            if (it == models.end()) {
                r.status = "N exceeds basis size " + std::to_string(basis.size());
                continue;
            }
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const RBResult res = solve(*it->second, DefGrad(e.U.value()));
                r.rb_time_s = seconds_since(t0);
                r.err_W = std::abs(res.response.W - ref.W) / std::abs(ref.W);
                r.err_P = norm(res.response.P - ref.P) / norm(ref.P);
                r.iterations = res.state.iterations;
                r.assemblies = res.state.assemblies;
                r.c_qp = res.response.c_qp;
                r.V_excl = res.response.V_excl;
            } catch (const Error& err) {
                r.status = std::string("rb_failed: ") + err.what();
            }
        }
        if (log) {
            std::lock_guard lock(mu);
            *log << "case " << c << " done (fom " << fom_time << " s)\n" << std::flush;
        }
    });
    return rows;
}

void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows) {
    out << "case,N,J,t,N1,N2,N3,N4,N5,err_W,err_P,fom_time_s,rb_time_s,iterations,assemblies,c_qp,V_excl,status\n";
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g,", v);
        out << buf;
    };
    for (const ValidationRow& r : rows) {
        out << r.case_index << ',' << r.N << ',';
        put(r.J);
        put(r.t);
        for (double d : r.direction) put(d);
        put(r.err_W);
        put(r.err_P);
        put(r.fom_time_s);
        put(r.rb_time_s);
        out << r.iterations << ',' << r.assemblies << ',' << r.c_qp << ',';
        put(r.V_excl);
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '\n', ' ');
        out << status << '\n';
    }
}

void write_validation_summary(std::ostream& out, const std::vector<ValidationRow>& rows) {
    std::map<int, std::vector<const ValidationRow*>> by_N;
    for (const auto& r : rows) by_N[r.N].push_back(&r);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%6s %6s %6s %12s %12s %12s %12s %10s %10s\n", "N", "ok", "failed", "max_err_W",
                  "median_err_W", "max_err_P", "median_err_P", "mean_rb_s", "mean_fom_s");
    out << buf;
    for (const auto& [N, list] : by_N) {
        std::vector<double> eW, eP;
        double rb_t = 0.0, fom_t = 0.0;
        for (const ValidationRow* r : list) {
            if (r->status != "ok") continue;
            eW.push_back(r->err_W);
            eP.push_back(r->err_P);
            rb_t += r->rb_time_s;
            fom_t += r->fom_time_s;
        }
        const std::size_t ok = eW.size();
        const double denom = ok ? static_cast<double>(ok) : 1.0;
        std::snprintf(buf, sizeof buf, "%6d %6zu %6zu %12.4e %12.4e %12.4e %12.4e %10.3f %10.3f\n", N, ok,
                      list.size() - ok, ok ? *std::max_element(eW.begin(), eW.end()) : 0.0, median(eW),
                      ok ? *std::max_element(eP.begin(), eP.end()) : 0.0, median(eP), rb_t / denom, fom_t / denom);
        out << buf;
    }
}

}  // namespace rbh
