#include "rbh/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "rbh/errors.hpp"

namespace rbh {

namespace {

double norm5(const Vec5& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

Vec5 normalized(Vec5 v) {
    const double n = norm5(v);
    for (double& x : v) x /= n;
    return v;
}

Vec5 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec5 v{};
    do {
        for (double& x : v) x = gauss(rng);
    } while (norm5(v) < 1e-8);
    return normalized(v);
}

// s = 2 Riesz energy of the antipodally augmented set {x_i} u {-x_i}: each
// pair contributes 1/|x_i - x_j|^2 + 1/|x_i + x_j|^2, so points also repel
// the mirror images of the others.
double riesz_energy(const std::vector<Vec5>& x) {
    double e = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            double dm = 0.0, dp = 0.0;
            for (std::size_t k = 0; k < 5; ++k) {
                dm += (x[i][k] - x[j][k]) * (x[i][k] - x[j][k]);
                dp += (x[i][k] + x[j][k]) * (x[i][k] + x[j][k]);
            }
            e += 1.0 / dm + 1.0 / dp;
        }
    return e;
}

// Projected gradient descent on riesz_energy with step acceptance.
void minimize_riesz(std::vector<Vec5>& x, int iterations) {
    const std::size_t n = x.size();
    if (n < 2) return;
    double energy = riesz_energy(x);
    double step = 0.1 * std::pow(26.3 / static_cast<double>(n), 0.25);
    std::vector<Vec5> grad(n), trial(n);
    for (int it = 0; it < iterations; ++it) {
        for (auto& g : grad) g.fill(0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                Vec5 dm{}, dp{};
                double m2 = 0.0, p2 = 0.0;
                for (std::size_t k = 0; k < 5; ++k) {
                    dm[k] = x[i][k] - x[j][k];
                    dp[k] = x[i][k] + x[j][k];
                    m2 += dm[k] * dm[k];
                    p2 += dp[k] * dp[k];
                }
                const double fm = -2.0 / (m2 * m2);
                const double fp = -2.0 / (p2 * p2);
                for (std::size_t k = 0; k < 5; ++k) {
                    grad[i][k] += fm * dm[k] + fp * dp[k];
                    grad[j][k] += -fm * dm[k] + fp * dp[k];
                }
            }
        double gmax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double radial = 0.0;
            for (std::size_t k = 0; k < 5; ++k) radial += grad[i][k] * x[i][k];
            for (std::size_t k = 0; k < 5; ++k) grad[i][k] -= radial * x[i][k];
            gmax = std::max(gmax, norm5(grad[i]));
        }
        if (gmax == 0.0) break;
        for (std::size_t i = 0; i < n; ++i) {
            Vec5 v = x[i];
            for (std::size_t k = 0; k < 5; ++k) v[k] -= step * grad[i][k] / gmax;
            trial[i] = normalized(v);
        }
        const double e = riesz_energy(trial);
        if (e < energy) {
            x.swap(trial);
            energy = e;
            step *= 1.1;
        } else {
            step *= 0.5;
        }
    }
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] = n == 1 ? b : a + (b - a) * i / (n - 1);
    }
    return v;
}

// Ratio r > 1 with 1 + r + ... + r^{m-1} = 4 m.
double geometric_ratio(int m) {
    auto f = [m](double r) {
        double s = 0.0, p = 1.0;
        for (int k = 0; k < m; ++k, p *= r) s += p;
        return s - 4.0 * m;
    };
    double lo = 1.0, hi = 2.0;
    while (f(hi) < 0.0) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

template <class T, class Eq>
void append_unique(std::vector<T>& dst, const std::vector<T>& src, Eq eq) {
    for (const T& v : src) {
        if (std::none_of(dst.begin(), dst.end(), [&](const T& d) { return eq(d, v); })) dst.push_back(v);
    }
}

}  // namespace

TangentBasis tangent_basis() {
    const double a = std::sqrt(1.0 / 6.0);
    const double b = std::sqrt(0.5);
    TangentBasis x{};
    x[0] = Tensor2::diag(2.0 * a, -a, -a);
    x[1] = Tensor2::diag(0.0, b, -b);
    x[2] = (Tensor2::unit(0, 1) + Tensor2::unit(1, 0)) * b;
    x[3] = (Tensor2::unit(0, 2) + Tensor2::unit(2, 0)) * b;
    x[4] = (Tensor2::unit(1, 2) + Tensor2::unit(2, 1)) * b;
    return x;
}

Tensor2 tangent_tensor(const Vec5& n) {
    static const TangentBasis X = tangent_basis();
    Tensor2 out;
    for (std::size_t k = 0; k < 5; ++k) out += X[k] * n[k];
    return out;
}

std::vector<Vec5> uniform_directions(int n, std::uint64_t seed, DirectionMethod method) {
    if (n < 1) throw InvalidArgument("uniform_directions: n must be positive");
    std::mt19937_64 rng(seed);
    std::vector<Vec5> x(static_cast<std::size_t>(n));
    for (Vec5& v : x) v = random_unit(rng);
    if (method == DirectionMethod::riesz) minimize_riesz(x, 500);
    return x;
}

std::vector<double> deviatoric_amplitudes(double t_max, int n, AmplitudeSpacing spacing, bool include_zero) {
    if (!(t_max > 0.0)) throw InvalidArgument("deviatoric amplitudes: t_max must be positive");
    if (n < 1) throw InvalidArgument("deviatoric amplitudes: count must be positive");
    const int intervals = include_zero ? n - 1 : n;
    std::vector<double> t;
    if (include_zero) t.push_back(0.0);
    if (intervals == 0) return t;
    if (spacing == AmplitudeSpacing::uniform || intervals == 1) {
        for (int p = 1; p <= intervals; ++p) t.push_back(t_max * p / intervals);
    } else {
        const double r = geometric_ratio(intervals);
        const double first = 0.25 * t_max / intervals;
        double s = 0.0, d = first;
        for (int p = 1; p < intervals; ++p, d *= r) {
            s += d;
            t.push_back(s);
        }
        t.push_back(t_max);
    }
    return t;
}

std::vector<double> determinant_levels(double J_min, double J_max, int n) {
    if (n < 1) throw InvalidArgument("determinant levels: count must be positive");
    if (!(J_min > 0.0) || !(J_min <= 1.0) || !(1.0 <= J_max)) {
        throw InvalidArgument("determinant levels: need 0 < J_min <= 1 <= J_max");
    }
    if (n == 1) return {1.0};
    if (!(J_min < J_max)) throw InvalidArgument("determinant levels: need J_min < J_max for several levels");
    return linspace(J_min, J_max, n);
}

Stretch stretch_from(double J, double t, const Vec5& N) {
    if (!(J > 0.0)) throw InvalidArgument("stretch_from: J must be positive");
    const Stretch hat = expm_sym(tangent_tensor(N) * t);
    return Stretch(hat.value() * std::cbrt(J));
}

SamplingPlan build_plan(const PlanInputs& in) {
    if (in.N_dir < 1 || in.N_amp < 1 || in.N_det < 1) throw InvalidArgument("build_plan: counts must be positive");
    SamplingPlan plan;
    plan.J_levels = determinant_levels(in.J_min, in.J_max, in.N_det);
    plan.directions = uniform_directions(in.N_dir, in.seed, in.directions);
    plan.amplitudes = deviatoric_amplitudes(in.t_max, in.N_amp, in.spacing, in.include_zero);
    for (double J : plan.J_levels)
        for (const Vec5& N : plan.directions)
            for (double t : plan.amplitudes) plan.entries.push_back(PlanEntry{J, t, N, stretch_from(J, t, N)});
    return plan;
}

SamplingPlan volumetric_plan(double J_min, double J_max, int N_det) {
    SamplingPlan plan;
    plan.J_levels = determinant_levels(J_min, J_max, N_det);
    plan.amplitudes = {0.0};
    plan.directions = {Vec5{}};
    for (double J : plan.J_levels) plan.entries.push_back(PlanEntry{J, 0.0, Vec5{}, stretch_from(J, 0.0, Vec5{})});
    return plan;
}

SamplingPlan concat(const SamplingPlan& a, const SamplingPlan& b) {
    SamplingPlan out = a;
    append_unique(out.J_levels, b.J_levels, [](double x, double y) { return x == y; });
    append_unique(out.amplitudes, b.amplitudes, [](double x, double y) { return x == y; });
    append_unique(out.directions, b.directions, [](const Vec5& x, const Vec5& y) { return x == y; });
    out.entries.insert(out.entries.end(), b.entries.begin(), b.entries.end());
    return out;
}

LoadCase load_case(const Stretch& U) {
    const double J = det(U.value());
    const Stretch hat(U.value() * (1.0 / std::cbrt(J)));
    const Tensor2 L = logm_spd(hat);
    const double t = norm(L);
    LoadCase lc{Vec5{}, t, J};
    if (t > 1e-14) {
        static const TangentBasis X = tangent_basis();
        for (std::size_t k = 0; k < 5; ++k) lc.N[k] = contract2(L, X[k]) / t;
    } else {
        lc.t = 0.0;
    }
    return lc;
}

void write_plan(std::ostream& out, const SamplingPlan& plan) {
    out << "# J t N1 N2 N3 N4 N5 U11 U22 U33 U12 U13 U23\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
        out << buf;
    };
    for (const PlanEntry& e : plan.entries) {
        put(e.J, ' ');
        put(e.t, ' ');
        for (double n : e.N) put(n, ' ');
        const Tensor2& u = e.U.value();
        put(u(0, 0), ' ');
        put(u(1, 1), ' ');
        put(u(2, 2), ' ');
        put(u(0, 1), ' ');
        put(u(0, 2), ' ');
        put(u(1, 2), '\n');
    }
}

SamplingPlan read_plan(std::istream& in) {
    SamplingPlan plan;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ss(line);
        double J = 0.0, t = 0.0;
        Vec5 N{};
        std::array<double, 6> u{};
        ss >> J >> t;
        for (double& n : N) ss >> n;
        for (double& c : u) ss >> c;
        if (!ss) throw IoError("plan line " + std::to_string(lineno) + ": expected 13 numbers");
        Tensor2 U = Tensor2::diag(u[0], u[1], u[2]);
        U(0, 1) = U(1, 0) = u[3];
        U(0, 2) = U(2, 0) = u[4];
        U(1, 2) = U(2, 1) = u[5];
        plan.entries.push_back(PlanEntry{J, t, N, Stretch(U)});
        append_unique(plan.J_levels, std::vector<double>{J}, [](double x, double y) { return x == y; });
        append_unique(plan.amplitudes, std::vector<double>{t}, [](double x, double y) { return x == y; });
        append_unique(plan.directions, std::vector<Vec5>{N}, [](const Vec5& x, const Vec5& y) { return x == y; });
    }
    return plan;
}

void write_plan_file(const std::filesystem::path& path, const SamplingPlan& plan) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write plan " + path.string());
    write_plan(out, plan);
}

SamplingPlan read_plan_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open plan " + path.string());
    return read_plan(in);
}

}  // namespace rbh
