#include "rbh/quad_field.hpp"

#include "rbh/errors.hpp"

namespace rbh {

double QuadField::volume() const {
    double v = 0.0;
    for (double w : weights) v += w;
    return v;
}

Tensor2 volume_average(const QuadField& f) {
    if (f.values.empty()) throw InvalidArgument("volume_average: empty field");
    if (f.values.size() != f.weights.size()) {
        throw LayoutMismatch("volume_average: values and weights differ in length");
    }
    Tensor2 num;
    double den = 0.0;
    for (std::size_t p = 0; p < f.values.size(); ++p) {
        const double w = f.weights[p];
        for (std::size_t k = 0; k < 9; ++k) num[k] += f.values[p][k] * w;
        den += w;
    }
    return num * (1.0 / den);
}

double l2_inner(const QuadField& a, const QuadField& b) {
    if (a.values.size() != b.values.size() || a.weights != b.weights) {
        throw LayoutMismatch("l2_inner: fields use different quadrature layouts");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t p = 0; p < a.values.size(); ++p) {
        num += contract2(a.values[p], b.values[p]) * a.weights[p];
        den += a.weights[p];
    }
    if (!(den > 0.0)) throw InvalidArgument("l2_inner: empty field");
    return num / den;
}

double l2_norm(const QuadField& a) { return std::sqrt(l2_inner(a, a)); }

}  // namespace rbh
