#pragma once

#include "rbh/tensor.hpp"

namespace rbh {

/// Common interface of hyperelastic laws: stored energy density W(F), first
/// Piola-Kirchhoff stress P = dW/dF and tangent C = d^2W/dF dF.
class HyperelasticLaw {
public:
    virtual ~HyperelasticLaw() = default;

    virtual double energy(const DefGrad& f) const = 0;
    virtual Tensor2 stress(const DefGrad& f) const = 0;
    virtual Tensor4 stiffness(const DefGrad& f) const = 0;
};

/// Bulk and shear modulus (MPa).
struct NeoHookeParams {
    double K = 1.0;
    double G = 1.0;

    friend bool operator==(const NeoHookeParams&, const NeoHookeParams&) = default;
};

/// Throws InvalidArgument unless K > 0 and G > 0.
void validate(const NeoHookeParams& p);

/// W = K/4 [(J-1)^2 + ln(J)^2] + G/2 (tr(Fhat^T Fhat) - 3), Fhat = J^{-1/3} F.
double energy(const NeoHookeParams& p, const DefGrad& f);
Tensor2 stress(const NeoHookeParams& p, const DefGrad& f);
Tensor4 stiffness(const NeoHookeParams& p, const DefGrad& f);

class NeoHookean final : public HyperelasticLaw {
public:
    explicit NeoHookean(NeoHookeParams p);

    const NeoHookeParams& params() const { return params_; }

    double energy(const DefGrad& f) const override { return rbh::energy(params_, f); }
    Tensor2 stress(const DefGrad& f) const override { return rbh::stress(params_, f); }
    Tensor4 stiffness(const DefGrad& f) const override { return rbh::stiffness(params_, f); }

private:
    NeoHookeParams params_;
};

/// Reliability weight on quadrature points as a function of the local
/// determinant:
///   phi(J) = 1                                   for J > upper
///            0.5 erf(steepness (J - center)) + 0.5 for lower < J <= upper
///            0                                   for J <= lower
/// The defaults reproduce erf(30 J - 15) on (0.4, 0.6].
struct CutoffConfig {
    double lower = 0.4;
    double upper = 0.6;
    double steepness = 30.0;
    double center = 0.5;
    /// When false, phi == 1 everywhere (plain quadrature).
    bool enabled = true;
};

void validate(const CutoffConfig& cfg);

double cutoff(const CutoffConfig& cfg, double J);

}  // namespace rbh
