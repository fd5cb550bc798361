#pragma once

#include <vector>

#include "rbh/tensor.hpp"

namespace rbh {

/// Second order tensor field sampled at quadrature points, with the positive
/// quadrature weights (volume units). Sum of weights = |Omega_0|.
struct QuadField {
    std::vector<Tensor2> values;
    std::vector<double> weights;

    std::size_t size() const { return values.size(); }
    double volume() const;
};

/// (1/|Omega_0|) sum_p values_p w_p. Throws InvalidArgument on an empty field
/// and LayoutMismatch when values and weights differ in length.
Tensor2 volume_average(const QuadField& f);

/// L2 inner product <a . b> (volume averaged). Throws LayoutMismatch unless
/// both fields share one quadrature layout.
double l2_inner(const QuadField& a, const QuadField& b);

/// sqrt(<a . a>)
double l2_norm(const QuadField& a);

}  // namespace rbh
