// Acceptance suite. Usage: rbh_acceptance [criterion ...]; without arguments
// every criterion runs. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any criterion fails.
//
// Suites 3 to 6 record the Galerkin orthogonality measure of every converged
// reduced solve in acceptance_galerkin_<n>.txt (working directory); criterion
// 9 checks those records.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "rbh/errors.hpp"
#include "rbh/fom.hpp"
#include "rbh/pod.hpp"
#include "rbh/rb_solver.hpp"
#include "rbh/sampling.hpp"
#include "support.hpp"

using namespace rbh;
using namespace rbh::testing;

namespace {

const NeoHookeParams kMatrix{400.0, 0.4};
const NeoHookeParams kFiber{800.0, 240.0};
// Matrix with the same shear modulus and nu = 0.49 (see README).
const NeoHookeParams kMatrixModerate{19.867, 0.4};

constexpr double kGalerkinTol = 1e-8;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Galerkin records of the current suite: max_i |<P . B_i>| / ||P||_L2 over
// the model's quadrature (cutoff weights included, all 1 on benign states).
struct GalerkinLog {
    int solves = 0;
    double worst = 0.0;
    // False when the suite aborted before all of its solves ran.
    bool complete = true;

    void record(const RBModel& model, const Tensor2& Fbar, const Eigen::VectorXd& xi) {
        const std::size_t N = model.size();
        std::vector<double> r(N, 0.0);
        double pp = 0.0, wsum = 0.0;
        for (std::size_t p = 0; p < model.qp_count(); ++p) {
            const Tensor2 F = model.local_defgrad(Fbar, xi, p);
            const double fw = cutoff(model.cutoff(), det(F)) * model.weights()[p];
            if (fw == 0.0) continue;
            const Tensor2 P = stress(model.law_at(p), DefGrad(F));
            const double* B = model.modes_at(p);
            for (std::size_t i = 0; i < N; ++i) {
                double s = 0.0;
                for (std::size_t a = 0; a < 9; ++a) s += P[a] * B[i * 9 + a];
                r[i] += s * fw;
            }
            pp += contract2(P, P) * fw;
            wsum += fw;
        }
        double rmax = 0.0;
        for (double v : r) rmax = std::max(rmax, std::abs(v / wsum));
        const double Pl2 = std::sqrt(pp / wsum);
        worst = std::max(worst, Pl2 > 0.0 ? rmax / Pl2 : rmax);
        ++solves;
    }
};

std::map<int, GalerkinLog> g_galerkin;

std::string galerkin_file(int suite) { return "acceptance_galerkin_" + std::to_string(suite) + ".txt"; }

void save_galerkin(int suite) {
    const GalerkinLog& g = g_galerkin[suite];
    std::ofstream out(galerkin_file(suite));
    out << g.solves << ' ' << fmt("%.17g", g.worst) << ' ' << g.complete << '\n';
}

std::vector<Snapshot> train(FomSolver& fom, const SamplingPlan& plan) {
    std::vector<Snapshot> out;
    for (const PlanEntry& e : plan.entries) out.push_back(fom.solve(DefGrad(e.U.value())));
    return out;
}

// Full numerical rank (every mode above the 1e-12 relative cut).
ReducedBasis full_rank_basis(const std::vector<Snapshot>& snaps) {
    PodOptions all;
    all.energy_tol = 1e-300;
    return build_basis(snaps, all);
}

// Criterion 1 ---------------------------------------------------------------

Outcome material_gradients() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    double es = 0.0, ec = 0.0;
    for (const NeoHookeParams& p : {kMatrix, kFiber}) {
        for (int n = 0; n < 100; ++n) {
            const Tensor2 F = random_defgrad(rng, 0.7, 1.5);
            const Tensor2 Pfd = fd_gradient([&](const Tensor2& G) { return energy(p, DefGrad(G)); }, F, 1e-6);
            const Tensor4 Cfd = fd_jacobian([&](const Tensor2& G) { return stress(p, DefGrad(G)); }, F, 1e-6);
            es = std::max(es, rel_err(stress(p, DefGrad(F)), Pfd));
            ec = std::max(ec, rel_err(stiffness(p, DefGrad(F)), Cfd));
        }
    }
    const double t = seconds_since(t0);
    return {es < 1e-6 && ec < 1e-5 && t < 5.0,
            fmt("200 random F, det in [0.7, 1.5]: max stress err %.2e (< 1e-6), max stiffness err %.2e (< 1e-5), %.2f s",
                es, ec, t)};
}

// Criterion 2 ---------------------------------------------------------------

Outcome kinematics() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(7);
    double polar_err = 0.0;
    for (int n = 0; n < 1000; ++n) {
        const Tensor2 F = random_defgrad(rng, 0.5, 2.0, 0.6);
        const PolarDecomposition pd = polar(DefGrad(F));
        polar_err = std::max(polar_err, norm(pd.R * pd.U.value() - F) / norm(F));
    }
    double det_err = 0.0;
    for (int n = 0; n < 1000; ++n) {
        Tensor2 X = sym(random_tensor(rng, 0.5));
        X -= Tensor2::identity() * (trace(X) / 3.0);
        det_err = std::max(det_err, std::abs(det(expm_sym(X).value()) - 1.0));
    }
    const TangentBasis B = tangent_basis();
    double gram_err = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            gram_err = std::max(gram_err, std::abs(contract2(B[i], B[j]) - (i == j ? 1.0 : 0.0)));
    const double t = seconds_since(t0);
    return {polar_err < 1e-10 && det_err < 1e-12 && gram_err < 1e-14 && t < 5.0,
            fmt("polar round trip %.2e (< 1e-10), |det expm - 1| %.2e (< 1e-12), Gram - I %.2e (< 1e-14), %.2f s",
                polar_err, det_err, gram_err, t)};
}

// Criterion 3 ---------------------------------------------------------------

// N orthonormal zero-mean random fields on the mesh of m.
ReducedBasis random_basis(const VoxelMicrostructure& m, int N, std::uint64_t seed) {
    const VoxelMesh mesh(m);
    std::mt19937_64 rng(seed);
    std::vector<Snapshot> snaps(static_cast<std::size_t>(N));
    for (Snapshot& s : snaps) {
        s.fluct.weights = mesh.weights();
        s.fluct.values.resize(mesh.qp_count());
        for (Tensor2& v : s.fluct.values) v = random_tensor(rng, 1.0);
        const Tensor2 mean = volume_average(s.fluct);
        for (Tensor2& v : s.fluct.values) v -= mean;
    }
    PodOptions o;
    o.N = N;
    return build_basis(snaps, o);
}

Outcome homogeneous_exactness() {
    const auto t0 = std::chrono::steady_clock::now();
    GalerkinLog& gal = g_galerkin[3];

    // Two kinds of zero-mean bases: random fields and modes trained on a
    // two-phase cell, both applied to a single-phase cell.
    const auto two_phase = make_cubic_inclusion(6, 2, kMatrixModerate, kFiber, 1.0 / 6);
    FomSolver fom(two_phase);
    PlanInputs in;
    in.N_dir = 4;
    in.N_amp = 2;
    in.seed = 3;
    const ReducedBasis trained = build_basis(train(fom, build_plan(in)));
    const ReducedBasis random = random_basis(two_phase, 6, 11);

    std::mt19937_64 rng(5);
    int cases = 0, max_it = 0;
    double xi_max = 0.0, eP = 0.0, eC = 0.0;
    for (const NeoHookeParams& p : {kMatrix, kFiber}) {
        const auto hom = make_homogeneous({6, 6, 6}, p, {1.0 / 6, 1.0 / 6, 1.0 / 6});
        for (const ReducedBasis* basis : {&trained, &random}) {
            const RBModel model(*basis, hom);
            for (int k = 0; k < 20; ++k) {
                const Tensor2 F = random_defgrad(rng, 0.8, 1.3, 0.25);
                const RBResult res = solve(model, DefGrad(F));
                gal.record(model, F, res.state.xi);
                max_it = std::max(max_it, res.state.iterations);
                xi_max = std::max(xi_max, res.state.xi.lpNorm<Eigen::Infinity>());
                eP = std::max(eP, rel_err(res.response.P, stress(p, DefGrad(F))));
                eC = std::max(eC, rel_err(res.response.C, stiffness(p, DefGrad(F))));
                ++cases;
            }
        }
    }
    const double t = seconds_since(t0);
    return {max_it <= 1 && xi_max < 1e-10 && eP < 1e-10 && eC < 1e-10 && t < 10.0,
            fmt("%d solves (trained N=%zu and random N=6 bases, two materials): max iterations %d (<= 1), "
                "max |xi| %.1e, P err %.2e, C err %.2e (< 1e-10), %.2f s",
                cases, trained.size(), max_it, xi_max, eP, eC, t)};
}

// Criterion 4 ---------------------------------------------------------------

Outcome laminate() {
    const auto t0 = std::chrono::steady_clock::now();
    GalerkinLog& gal = g_galerkin[4];
    const int layer = 3;
    const auto m = make_laminate({8, 8, 8}, layer, kMatrix, kFiber, {0.125, 0.125, 0.125});
    FomSolver fom(m);

    const double lbar = 1.1;
    const Snapshot s = fom.solve(DefGrad(Tensor2::diag(lbar, 1, 1)));
    const double Pxx = effective_fom(m, s).P(0, 0);
    const LaminateSolution ref = laminate_oracle(kMatrix, kFiber, layer / 8.0, lbar);
    const double e_oracle = std::abs(Pxx - ref.Pxx) / std::abs(ref.Pxx);

    PlanInputs in;
    in.N_dir = 8;
    in.N_amp = 3;
    in.t_max = 0.3;
    in.seed = 21;
    const SamplingPlan plan = build_plan(in);
    const std::vector<Snapshot> snaps = train(fom, plan);
    const ReducedBasis basis = full_rank_basis(snaps);
    const RBModel model(basis, m);
    double e_rb = 0.0;
    for (const Snapshot& sn : snaps) {
        const RBResult res = solve(model, DefGrad(sn.bc));
        gal.record(model, sn.bc, res.state.xi);
        e_rb = std::max(e_rb, rel_err(res.response.P, effective_fom(m, sn).P));
    }
    const double t = seconds_since(t0);
    return {e_oracle < 1e-6 && e_rb < 1e-4 && t < 120.0,
            fmt("FOM P_xx %.10g vs 1-D oracle %.10g: rel err %.2e (< 1e-6); RB (N=%zu) on %zu training BCs: "
                "max rel P err %.2e (< 1e-4), %.1f s",
                Pxx, ref.Pxx, e_oracle, basis.size(), snaps.size(), e_rb, t)};
}

// Criterion 5 ---------------------------------------------------------------

Outcome monotonicity_and_bounds() {
    const auto t0 = std::chrono::steady_clock::now();
    GalerkinLog& gal = g_galerkin[5];
    const auto m = make_cubic_inclusion(12, 6, kMatrixModerate, kFiber, 1.0 / 12);
    FomSolver fom(m);
    PlanInputs in;
    in.N_dir = 16;
    in.N_amp = 4;
    in.t_max = 0.3;
    in.seed = 7;
    const SamplingPlan plan = build_plan(in);
    const std::vector<Snapshot> snaps = train(fom, plan);
    const double t_train = seconds_since(t0);

    const std::vector<int> Ns = {4, 8, 16, 32};
    PodOptions po;
    po.N = Ns.back();
    const ReducedBasis full = build_basis(snaps, po);
    std::vector<RBModel> models;
    for (int N : Ns) models.emplace_back(truncated(full, static_cast<std::size_t>(N)), m);

    // (a) minimized training energy non-increasing in N (independent solves from xi = 0)
    int violations = 0;
    double worst_increase = 0.0;
    for (const Snapshot& s : snaps) {
        double prev = 0.0;
        for (std::size_t k = 0; k < models.size(); ++k) {
            const RBResult res = solve(models[k], DefGrad(s.bc));
            gal.record(models[k], s.bc, res.state.xi);
            if (k > 0 && res.response.W > prev) {
                ++violations;
                worst_increase = std::max(worst_increase, (res.response.W - prev) / prev);
            }
            prev = res.response.W;
        }
    }

    // (b) Voigt bound and (c) validation error on held-out directions
    const std::vector<Vec5> held_out = uniform_directions(8, 12345);
    std::map<int, std::vector<double>> errW;
    std::mt19937_64 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int voigt_checks = 0, voigt_bad = 0, states = 0;
    for (const Vec5& d : held_out)
        for (double t : plan.amplitudes) {
            const Tensor2 U = stretch_from(1.0, t, d).value();
            const EffectiveFom ref = effective_fom(m, fom.solve(DefGrad(U)));
            for (std::size_t k = 0; k < models.size(); ++k) {
                const RBResult res = solve(models[k], DefGrad(U));
                gal.record(models[k], U, res.state.xi);
                ++states;
                errW[Ns[k]].push_back(std::abs(res.response.W - ref.W) / std::abs(ref.W));
                const double scale = norm(res.response.C_avg);
                for (int q = 0; q < 100; ++q) {
                    Tensor2 x;
                    for (double& c : x.c) c = gauss(rng);
                    const double upper = contract2(x, contract42(res.response.C_avg, x));
                    const double rb = contract2(x, contract42(res.response.C, x));
                    ++voigt_checks;
                    if (upper < rb - 1e-12 * scale * contract2(x, x)) ++voigt_bad;
                }
            }
        }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
    };
    const double med8 = median(errW[8]), med32 = median(errW[32]);
    const double t = seconds_since(t0);
    return {violations == 0 && voigt_bad == 0 && med32 < med8 && t < 900.0,
            fmt("(a) %zu training BCs x N in {4,8,16,32}: %d energy increases (worst %.1e); "
                "(b) %d/%d Voigt violations over %d states; (c) median err_W N=8 %.3e, N=32 %.3e; "
                "training %.0f s, total %.0f s (< 900 s)",
                snaps.size(), violations, worst_increase, voigt_bad, voigt_checks, states, med8, med32, t_train, t)};
}

// Criterion 6 ---------------------------------------------------------------

struct SmallTrained {
    VoxelMicrostructure m;
    SamplingPlan plan;
    std::vector<Snapshot> snaps;
    ReducedBasis basis;
};

SmallTrained small_trained() {
    SmallTrained out;
    out.m = make_cubic_inclusion(8, 4, kMatrixModerate, kFiber, 0.125);
    FomSolver fom(out.m);
    PlanInputs in;
    in.N_dir = 8;
    in.N_amp = 3;
    in.t_max = 0.3;
    in.seed = 7;
    out.plan = build_plan(in);
    out.snaps = train(fom, out.plan);
    out.basis = full_rank_basis(out.snaps);
    return out;
}

Outcome objectivity() {
    const auto t0 = std::chrono::steady_clock::now();
    GalerkinLog& gal = g_galerkin[6];
    const SmallTrained st = small_trained();
    const RBModel model(st.basis, st.m);

    const std::vector<Vec5> dirs = uniform_directions(10, 99);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> amp(0.05, 0.3);
    int W_mismatch = 0;
    double eW_orig = 0.0, eP = 0.0, eC = 0.0;
    for (int k = 0; k < 50; ++k) {
        const Tensor2 R = random_rotation(rng);
        const Tensor2 U = stretch_from(1.0, amp(rng), dirs[static_cast<std::size_t>(k) % dirs.size()]).value();
        const Tensor2 F = R * U;
        const RBResult gen = evaluate_general(model, DefGrad(F));
        gal.record(model, polar(DefGrad(F)).U.value(), gen.state.xi);

        // W(F) is the energy of the solve at the stretch of F, bit for bit.
        const RBResult at_polar = solve(model, DefGrad(polar(DefGrad(F)).U.value()));
        if (gen.response.W != at_polar.response.W) ++W_mismatch;
        const RBResult at_U = solve(model, DefGrad(U));
        gal.record(model, U, at_U.state.xi);
        eW_orig = std::max(eW_orig, std::abs(gen.response.W - at_U.response.W) / std::abs(at_U.response.W));
        eP = std::max(eP, rel_err(gen.response.P, R * at_U.response.P));

        // h = 1e-5 balances truncation (h^2) against the solver tolerance (1e-10 / h).
        const Tensor4 Cfd = fd_jacobian([&](const Tensor2& G) { return evaluate_general(model, DefGrad(G)).response.P; },
                                        F, 1e-5);
        eC = std::max(eC, rel_err(gen.response.C, Cfd));
    }
    const double t = seconds_since(t0);
    return {W_mismatch == 0 && eW_orig < 1e-10 && eP < 1e-10 && eC < 1e-4 && t < 300.0,
            fmt("50 rotations, N=%zu: W(RU) != W(U) bitwise in %d cases, |W(RU) - W(U_input)| rel %.1e; "
                "P vs R P(U) %.2e (< 1e-10); C vs FD %.2e (< 1e-4), %.1f s",
                st.basis.size(), W_mismatch, eW_orig, eP, eC, t)};
}

// Criterion 7 ---------------------------------------------------------------

Outcome cutoff_behavior() {
    const auto t0 = std::chrono::steady_clock::now();

    // Construction: a 2x2x2 cell whose voxel 0 is soft and a single zero-mean
    // mode that compresses quadrature point 0 by -a along x while stretching
    // the other 63 points by a/63. Under Fbar = diag(lambda, 1, 1) with
    // lambda - a = 0.3 and lambda + a/63 = 1 the minimizer relieves the rest
    // of the cell completely once point 0 (J = 0.3) drops out of the average.
    auto m = make_homogeneous({2, 2, 2}, kFiber, {0.5, 0.5, 0.5});
    m.phases[2] = NeoHookeParams{0.05, 0.01};
    m.phase[0] = 2;
    const VoxelMesh mesh(m);
    const std::size_t nqp = mesh.qp_count();
    const double a = 0.7 / (1.0 + 1.0 / (nqp - 1.0));
    const double lambda = 0.3 + a;
    Snapshot s;
    s.fluct.weights = mesh.weights();
    s.fluct.values.assign(nqp, Tensor2::diag(a / (nqp - 1.0), 0, 0));
    s.fluct.values[0] = Tensor2::diag(-a, 0, 0);
    const ReducedBasis basis = build_basis(std::vector<Snapshot>{s});
    const RBModel model(basis, m);
    const Tensor2 Fbar = Tensor2::diag(lambda, 1.0, 1.0);

    bool completed = false;
    RBResult res;
    std::string error;
    try {
        res = solve(model, DefGrad(Fbar));
        completed = res.state.converged;
    } catch (const Error& e) {
        error = e.what();
    }
    const double J0 = completed ? det(model.local_defgrad(Fbar, res.state.xi, 0)) : 0.0;
    const bool cut_ok = completed && res.response.c_qp >= 1 && res.response.V_excl > 0.0;

    // Benign states (converged training solves): quadrature with the cutoff
    // on and off agrees bit for bit, and both equal a plain average computed
    // here. Whole solves may still differ in the last bits because line
    // search trial states can leave the benign range.
    const SmallTrained st = small_trained();
    CutoffConfig off;
    off.enabled = false;
    const RBModel with(st.basis, st.m), without(st.basis, st.m, off);
    int benign = 0, differ = 0, plain_differ = 0, not_benign = 0;
    double path_dxi = 0.0;
    for (std::size_t k = 0; k < st.snaps.size(); k += 2) {
        const Tensor2 F = st.snaps[k].bc;
        const RBResult r1 = solve(with, DefGrad(F));
        if (r1.response.c_qp != 0) {
            ++not_benign;
            continue;
        }
        ++benign;
        path_dxi = std::max(path_dxi, (solve(without, DefGrad(F)).state.xi - r1.state.xi).lpNorm<Eigen::Infinity>());
        const Eigen::VectorXd& xi = r1.state.xi;
        const EffectiveResponse e1 = evaluate_at(with, DefGrad(F), xi), e2 = evaluate_at(without, DefGrad(F), xi);
        if (e1.W != e2.W || !(e1.P == e2.P) || !(e1.C == e2.C) || !(e1.C_avg == e2.C_avg) || e2.c_qp != 0 ||
            !(residual(with, DefGrad(F), xi) == residual(without, DefGrad(F), xi)) ||
            !(jacobian(with, DefGrad(F), xi) == jacobian(without, DefGrad(F), xi)))
            ++differ;
        double Wsum = 0.0, wsum = 0.0;
        Tensor2 Psum;
        for (std::size_t p = 0; p < without.qp_count(); ++p) {
            const DefGrad f(without.local_defgrad(F, xi, p));
            const double w = without.weights()[p];
            Wsum += energy(without.law_at(p), f) * w;
            Psum += stress(without.law_at(p), f) * w;
            wsum += w;
        }
        const double inv = 1.0 / wsum;
        if (Wsum * inv != e2.W || !(Psum * inv == e2.P)) ++plain_differ;
    }
    const double t = seconds_since(t0);
    return {cut_ok && benign > 0 && not_benign == 0 && differ == 0 && plain_differ == 0 && t < 120.0,
            fmt("constructed state: solve %s%s, J at point 0 = %.4f, c_qp = %d, V_excl = %.4f; "
                "%d benign states: %d differ with cutoff off, %d differ from plain quadrature "
                "(whole solves off vs on: max |dxi| %.1e), %.1f s",
                completed ? "converged" : "failed: ", error.c_str(), J0, completed ? res.response.c_qp : 0,
                completed ? res.response.V_excl : 0.0, benign, differ, plain_differ, path_dxi, t)};
}

// Criterion 8 ---------------------------------------------------------------

Outcome reconstruction() {
    const auto t0 = std::chrono::steady_clock::now();
    const SmallTrained st = small_trained();
    const RBModel model(st.basis, st.m);
    double e_disp = 0.0, e_grad = 0.0;
    for (const Snapshot& s : st.snaps) {
        const RBResult res = solve(model, DefGrad(s.bc));
        const std::vector<Vec3> w = reconstruct_fluctuation(model, res.state);
        double d2 = 0.0, r2 = 0.0;
        for (std::size_t n = 0; n < w.size(); ++n)
            for (std::size_t c = 0; c < 3; ++c) {
                d2 += std::pow(w[n][c] - s.disp_fluct[n][c], 2);
                r2 += std::pow(s.disp_fluct[n][c], 2);
            }
        e_disp = std::max(e_disp, std::sqrt(d2 / r2));
        // discrete gradient against F_RB - Fbar
        const QuadField g = fluctuation_gradient(model.mesh(), w);
        double g2 = 0.0, f2 = 0.0;
        for (std::size_t p = 0; p < g.size(); ++p) {
            const Tensor2 Ft = model.local_defgrad(s.bc, res.state.xi, p) - s.bc;
            g2 += std::pow(norm(g.values[p] - Ft), 2);
            f2 += std::pow(norm(Ft), 2);
        }
        e_grad = std::max(e_grad, std::sqrt(g2 / f2));
    }
    const double t = seconds_since(t0);
    return {e_disp < 1e-6 && e_grad < 1e-8 && t < 120.0,
            fmt("%zu training BCs, N=%zu: displacement rel L2 err %.2e (< 1e-6), gradient rel L2 err %.2e (< 1e-8), "
                "%.1f s",
                st.snaps.size(), st.basis.size(), e_disp, e_grad, t)};
}

// Criterion 9 ---------------------------------------------------------------

Outcome galerkin() {
    int solves = 0;
    double worst = 0.0;
    std::string missing, incomplete;
    for (int suite = 3; suite <= 6; ++suite) {
        GalerkinLog g;
        if (g_galerkin.count(suite)) {
            g = g_galerkin[suite];
        } else {
            std::ifstream in(galerkin_file(suite));
            if (!(in >> g.solves >> g.worst >> g.complete)) {
                missing += (missing.empty() ? "" : ",") + std::to_string(suite);
                continue;
            }
        }
        if (!g.complete) incomplete += (incomplete.empty() ? "" : ",") + std::to_string(suite);
        solves += g.solves;
        worst = std::max(worst, g.worst);
    }
    if (!missing.empty()) return {false, "no Galerkin records from suite(s) " + missing};
    if (!incomplete.empty()) return {false, "suite(s) " + incomplete + " aborted before all solves ran"};
    return {worst < kGalerkinTol,
            fmt("%d converged solves in suites 3-6: max_i |<P.B_i>| / ||P||_L2 = %.2e (< 1e-8)", solves, worst)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria = {
        {1, {"material gradients", material_gradients}},
        {2, {"kinematics", kinematics}},
        {3, {"homogeneous exactness", homogeneous_exactness}},
        {4, {"laminate oracle", laminate}},
        {5, {"monotonicity and bounds", monotonicity_and_bounds}},
        {6, {"objectivity", objectivity}},
        {7, {"cutoff behavior", cutoff_behavior}},
        {8, {"reconstruction", reconstruction}},
        {9, {"Galerkin orthogonality", galerkin}},
    };
    std::vector<int> run;
    for (int i = 1; i < argc; ++i) {
        const int c = std::atoi(argv[i]);
        if (!criteria.count(c)) {
            std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
            return 2;
        }
        run.push_back(c);
    }
    if (run.empty())
        for (const auto& [c, _] : criteria) run.push_back(c);

    bool all = true;
    for (int c : run) {
        const auto& [name, fn] = criteria.at(c);
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
            if (c >= 3 && c <= 6) g_galerkin[c].complete = false;
        }
        if (c >= 3 && c <= 6) save_galerkin(c);
        std::printf("[%s] criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", c, name, o.detail.c_str());
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
