#include "rbh/tensor.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "rbh/errors.hpp"

namespace rbh {

Tensor2 operator*(const Tensor2& a, const Tensor2& b) {
    Tensor2 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

Tensor2 transpose(const Tensor2& a) {
    Tensor2 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(i, j) = a(j, i);
    return out;
}

double trace(const Tensor2& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

double norm(const Tensor2& a) { return std::sqrt(contract2(a, a)); }

Tensor2 sym(const Tensor2& a) { return 0.5 * (a + transpose(a)); }

double asymmetry(const Tensor2& a) {
    return std::max({std::abs(a(0, 1) - a(1, 0)), std::abs(a(0, 2) - a(2, 0)),
                     std::abs(a(1, 2) - a(2, 1))});
}

double norm(const Tensor4& a) {
    double s = 0.0;
    for (double v : a.c) s += v * v;
    return std::sqrt(s);
}

Tensor4 outer(const Tensor2& a, const Tensor2& b) {
    Tensor4 out;
    for (std::size_t p = 0; p < 9; ++p)
        for (std::size_t q = 0; q < 9; ++q) out.at9(p, q) = a[p] * b[q];
    return out;
}

double major_asymmetry(const Tensor4& c) {
    double m = 0.0;
    for (std::size_t p = 0; p < 9; ++p)
        for (std::size_t q = p + 1; q < 9; ++q) m = std::max(m, std::abs(c.at9(p, q) - c.at9(q, p)));
    return m;
}

double contract2(const Tensor2& a, const Tensor2& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < 9; ++k) s += a[k] * b[k];
    return s;
}

Tensor2 contract24(const Tensor2& a, const Tensor4& c) {
    Tensor2 out;
    for (std::size_t p = 0; p < 9; ++p) {
        const double ap = a[p];
        for (std::size_t q = 0; q < 9; ++q) out[q] += ap * c.at9(p, q);
    }
    return out;
}

Tensor2 contract42(const Tensor4& c, const Tensor2& b) {
    Tensor2 out;
    for (std::size_t p = 0; p < 9; ++p) {
        double s = 0.0;
        for (std::size_t q = 0; q < 9; ++q) s += c.at9(p, q) * b[q];
        out[p] = s;
    }
    return out;
}

Tensor4 contract44(const Tensor4& c, const Tensor4& cp) {
    Tensor4 out;
    for (std::size_t p = 0; p < 9; ++p)
        for (std::size_t m = 0; m < 9; ++m) {
            const double cpm = c.at9(p, m);
            for (std::size_t q = 0; q < 9; ++q) out.at9(p, q) += cpm * cp.at9(m, q);
        }
    return out;
}

double det(const Tensor2& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
           a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

Tensor2 inverse(const Tensor2& a) {
    const double d = det(a);
    const double n = norm(a);
    if (!(std::abs(d) > 1e3 * std::numeric_limits<double>::epsilon() * n * n * n) || n == 0.0) {
        throw SingularMatrixError("inverse: singular matrix, det = " + std::to_string(d));
    }
    Tensor2 inv;
    inv(0, 0) = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    inv(0, 1) = a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2);
    inv(0, 2) = a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1);
    inv(1, 0) = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    inv(1, 1) = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    inv(1, 2) = a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2);
    inv(2, 0) = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    inv(2, 1) = a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1);
    inv(2, 2) = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    return inv * (1.0 / d);
}

SymEigen eigen_sym(const Tensor2& input) {
    Tensor2 a = sym(input);
    Tensor2 v = Tensor2::identity();
    const double scale = std::max(norm(a), std::numeric_limits<double>::min());

    constexpr int max_sweeps = 64;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        const double off = std::sqrt(a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2));
        if (off <= 1e-14 * scale) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cs = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * cs;
                // A <- J^T A J with the rotation J acting in the (p, q) plane
                for (int k = 0; k < 3; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = cs * akp - sn * akq;
                    a(k, q) = sn * akp + cs * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = cs * apk - sn * aqk;
                    a(q, k) = sn * apk + cs * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = cs * vkp - sn * vkq;
                    v(k, q) = sn * vkp + cs * vkq;
                }
            }
        }
    }
    if (sweep == max_sweeps) throw ConvergenceError("eigen_sym: Jacobi sweeps did not converge");

    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });
    SymEigen out;
    for (int k = 0; k < 3; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        out.values[static_cast<std::size_t>(k)] = a(src, src);
        for (int i = 0; i < 3; ++i) out.vectors(i, k) = v(i, src);
    }
    return out;
}

DefGrad::DefGrad(const Tensor2& f) : value_(f), J_(det(f)) {
    if (!(J_ > 0.0)) {
        throw InvalidArgument("DefGrad: det F must be positive, got " + std::to_string(J_));
    }
}

Stretch::Stretch(const Tensor2& u) : value_(sym(u)) {
    if (asymmetry(u) > 1e-10 * std::max(1.0, norm(u))) {
        throw InvalidArgument("Stretch: tensor is not symmetric");
    }
    const SymEigen e = eigen_sym(value_);
    if (!(e.values[0] > 0.0)) {
        throw InvalidArgument("Stretch: tensor is not positive definite");
    }
}

PolarDecomposition polar(const DefGrad& f) {
    const Tensor2& F = f.value();
    const SymEigen e = eigen_sym(transpose(F) * F);
    if (!(e.values[0] > 0.0)) {
        throw ConvergenceError("polar: F^T F is not positive definite (near-singular F)");
    }
    const Tensor2 u = spectral_map(e, [](double l) { return std::sqrt(l); });
    const Tensor2 u_inv = spectral_map(e, [](double l) { return 1.0 / std::sqrt(l); });
    return PolarDecomposition{F * u_inv, Stretch(u)};
}

Stretch expm_sym(const Tensor2& x) {
    if (asymmetry(x) > 1e-12 * std::max(1.0, norm(x))) {
        throw InvalidArgument("expm_sym: argument is not symmetric");
    }
    const SymEigen e = eigen_sym(x);
    return Stretch(spectral_map(e, [](double l) { return std::exp(l); }));
}

Tensor2 logm_spd(const Stretch& u) {
    const SymEigen e = eigen_sym(u.value());
    return spectral_map(e, [](double l) { return std::log(l); });
}

Ddms ddms(const DefGrad& f) {
    return Ddms{f.J(), f.value() * std::pow(f.J(), -1.0 / 3.0)};
}

}  // namespace rbh
