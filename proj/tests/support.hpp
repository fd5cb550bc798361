#pragma once

// Helpers and independent oracles shared by the unit tests and the
// acceptance binary.

#include <cmath>
#include <functional>
#include <random>

#include "rbh/material.hpp"
#include "rbh/tensor.hpp"

namespace rbh::testing {

inline Tensor2 random_tensor(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Tensor2 t;
    for (double& c : t.c) c = u(rng);
    return t;
}

/// Random F with det F in [det_lo, det_hi]: a random perturbation of the
/// identity rescaled to a determinant drawn uniformly from the range.
inline Tensor2 random_defgrad(std::mt19937_64& rng, double det_lo, double det_hi, double spread = 0.3) {
    std::uniform_real_distribution<double> u(det_lo, det_hi);
    for (;;) {
        const Tensor2 F = Tensor2::identity() + random_tensor(rng, spread);
        const double J = det(F);
        if (J < 0.2) continue;
        return F * std::cbrt(u(rng) / J);
    }
}

/// Rotation from a random unit quaternion.
inline Tensor2 random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    double q[4];
    double n = 0.0;
    for (double& x : q) {
        x = g(rng);
        n += x * x;
    }
    n = std::sqrt(n);
    const double w = q[0] / n, x = q[1] / n, y = q[2] / n, z = q[3] / n;
    Tensor2 R;
    R(0, 0) = 1 - 2 * (y * y + z * z);
    R(0, 1) = 2 * (x * y - z * w);
    R(0, 2) = 2 * (x * z + y * w);
    R(1, 0) = 2 * (x * y + z * w);
    R(1, 1) = 1 - 2 * (x * x + z * z);
    R(1, 2) = 2 * (y * z - x * w);
    R(2, 0) = 2 * (x * z - y * w);
    R(2, 1) = 2 * (y * z + x * w);
    R(2, 2) = 1 - 2 * (x * x + y * y);
    return R;
}

/// Central difference of a scalar function of F, one component per entry.
inline Tensor2 fd_gradient(const std::function<double(const Tensor2&)>& f, const Tensor2& F, double h) {
    Tensor2 g;
    for (std::size_t a = 0; a < 9; ++a) {
        Tensor2 Fp = F, Fm = F;
        Fp[a] += h;
        Fm[a] -= h;
        g[a] = (f(Fp) - f(Fm)) / (2.0 * h);
    }
    return g;
}

/// Central difference of a tensor function of F: result(ij, kl) = d f_ij / d F_kl.
inline Tensor4 fd_jacobian(const std::function<Tensor2(const Tensor2&)>& f, const Tensor2& F, double h) {
    Tensor4 C;
    for (std::size_t b = 0; b < 9; ++b) {
        Tensor2 Fp = F, Fm = F;
        Fp[b] += h;
        Fm[b] -= h;
        const Tensor2 d = (f(Fp) - f(Fm)) * (1.0 / (2.0 * h));
        for (std::size_t a = 0; a < 9; ++a) C.at9(a, b) = d[a];
    }
    return C;
}

/// Uniaxial energy W(lambda) of the Neo-Hookean law at F = diag(lambda, 1, 1),
/// written out by hand: J = lambda, I1(Fhat) = lambda^{-2/3} (lambda^2 + 2).
inline double uniaxial_energy(const NeoHookeParams& p, double l) {
    const double lnl = std::log(l);
    return 0.25 * p.K * ((l - 1.0) * (l - 1.0) + lnl * lnl) +
           0.5 * p.G * (std::pow(l, -2.0 / 3.0) * (l * l + 2.0) - 3.0);
}

/// P_xx = dW/dlambda of uniaxial_energy, differentiated by hand.
inline double uniaxial_stress(const NeoHookeParams& p, double l) {
    return 0.5 * p.K * ((l - 1.0) + std::log(l) / l) +
           0.5 * p.G * (-2.0 / 3.0 * std::pow(l, -5.0 / 3.0) * (l * l + 2.0) + 2.0 * std::pow(l, 1.0 / 3.0));
}

struct LaminateSolution {
    double lambda1;
    double lambda2;
    double Pxx;
};

/// Rank-1 laminate with layer normal e_x under Fbar = diag(lambda_bar, 1, 1):
/// phase k deforms homogeneously with F_k = diag(lambda_k, 1, 1), subject to
/// f1 lambda1 + f2 lambda2 = lambda_bar and equal P_xx in both phases.
/// The traction jump is monotone in lambda1, so bisection is safe.
inline LaminateSolution laminate_oracle(const NeoHookeParams& p1, const NeoHookeParams& p2, double f1,
                                        double lambda_bar) {
    const double f2 = 1.0 - f1;
    auto lambda2 = [&](double l1) { return (lambda_bar - f1 * l1) / f2; };
    auto jump = [&](double l1) { return uniaxial_stress(p1, l1) - uniaxial_stress(p2, lambda2(l1)); };
    double lo = 1e-6;
    double hi = lambda_bar / f1 - 1e-6;  // keeps lambda2 > 0
    for (int i = 0; i < 400 && hi - lo > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (jump(mid) < 0.0 ? lo : hi) = mid;
    }
    const double l1 = 0.5 * (lo + hi);
    return {l1, lambda2(l1), uniaxial_stress(p1, l1)};
}

inline double rel_err(const Tensor2& a, const Tensor2& ref) { return norm(a - ref) / norm(ref); }
inline double rel_err(const Tensor4& a, const Tensor4& ref) { return norm(a - ref) / norm(ref); }

}  // namespace rbh::testing
