#include "rbh/material.hpp"

#include <cmath>

#include "rbh/errors.hpp"

namespace rbh {

void validate(const NeoHookeParams& p) {
    if (!(p.K > 0.0) || !(p.G > 0.0)) {
        throw InvalidArgument("NeoHookeParams: K and G must be positive");
    }
}

namespace {

// Derivatives of the volumetric energy U(J) = K/4 [(J-1)^2 + ln(J)^2].
struct Volumetric {
    double value;
    double d1;
    double d2;
};

Volumetric volumetric(double K, double J) {
    const double lnJ = std::log(J);
    return Volumetric{0.25 * K * ((J - 1.0) * (J - 1.0) + lnJ * lnJ),
                      0.5 * K * ((J - 1.0) + lnJ / J),
                      0.5 * K * (1.0 + (1.0 - lnJ) / (J * J))};
}

}  // namespace

double energy(const NeoHookeParams& p, const DefGrad& f) {
    const double J = f.J();
    const double I1 = contract2(f.value(), f.value());
    return volumetric(p.K, J).value + 0.5 * p.G * (std::pow(J, -2.0 / 3.0) * I1 - 3.0);
}

Tensor2 stress(const NeoHookeParams& p, const DefGrad& f) {
    const Tensor2& F = f.value();
    const double J = f.J();
    const double I1 = contract2(F, F);
    const Tensor2 FinvT = transpose(inverse(F));
    const double g = p.G * std::pow(J, -2.0 / 3.0);
    // dJ/dF = J F^{-T};  d(J^{-2/3} I1)/dF = 2 J^{-2/3} (F - I1/3 F^{-T})
    return FinvT * (volumetric(p.K, J).d1 * J - g * I1 / 3.0) + F * g;
}

Tensor4 stiffness(const NeoHookeParams& p, const DefGrad& f) {
    const Tensor2& F = f.value();
    const double J = f.J();
    const double I1 = contract2(F, F);
    const Tensor2 Fi = transpose(inverse(F));  // F^{-T}
    const Volumetric v = volumetric(p.K, J);
    const double g = p.G * std::pow(J, -2.0 / 3.0);

    // d(F^{-T})_ij / dF_kl = -F^{-T}_il F^{-T}_kj
    const double a_vol = v.d1 * J;
    const double c_outer = (v.d2 * J + v.d1) * J + 2.0 / 9.0 * g * I1;
    const double c_twist = g * I1 / 3.0 - a_vol;
    const double c_mixed = -2.0 / 3.0 * g;

    Tensor4 C;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l) {
                    double val = c_outer * Fi(i, j) * Fi(k, l) + c_twist * Fi(i, l) * Fi(k, j) +
                                 c_mixed * (F(i, j) * Fi(k, l) + Fi(i, j) * F(k, l));
                    if (i == k && j == l) val += g;
                    C(i, j, k, l) = val;
                }
    return C;
}

NeoHookean::NeoHookean(NeoHookeParams p) : params_(p) { validate(params_); }

void validate(const CutoffConfig& cfg) {
    if (!(cfg.lower > 0.0) || !(cfg.lower < cfg.upper)) {
        throw InvalidArgument("CutoffConfig: require 0 < lower < upper");
    }
    if (!(cfg.steepness > 0.0)) throw InvalidArgument("CutoffConfig: steepness must be positive");
}

double cutoff(const CutoffConfig& cfg, double J) {
    if (!cfg.enabled || J > cfg.upper) return 1.0;
    if (J <= cfg.lower) return 0.0;
    return 0.5 * std::erf(cfg.steepness * (J - cfg.center)) + 0.5;
}

}  // namespace rbh
