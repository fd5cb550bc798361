#pragma once

// Small fixed-size tensor algebra in the Euclidean basis of R^3 and the
// kinematic decompositions built on top of it (polar split, dilatational-
// deviatoric split, symmetric matrix exponential / logarithm).

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

namespace rbh {

/// Second order tensor, components stored row-major (A(i,j) = c[3*i+j]).
struct Tensor2 {
    std::array<double, 9> c{};

    constexpr double& operator()(int i, int j) { return c[3 * i + j]; }
    constexpr double operator()(int i, int j) const { return c[3 * i + j]; }
    constexpr double& operator[](std::size_t k) { return c[k]; }
    constexpr double operator[](std::size_t k) const { return c[k]; }

    static constexpr Tensor2 zero() { return Tensor2{}; }
    static constexpr Tensor2 identity() {
        Tensor2 t;
        t.c[0] = t.c[4] = t.c[8] = 1.0;
        return t;
    }
    static constexpr Tensor2 diag(double a, double b, double d) {
        Tensor2 t;
        t.c[0] = a;
        t.c[4] = b;
        t.c[8] = d;
        return t;
    }
    /// Unit dyad e_i (x) e_j.
    static constexpr Tensor2 unit(int i, int j) {
        Tensor2 t;
        t.c[3 * i + j] = 1.0;
        return t;
    }

    Tensor2& operator+=(const Tensor2& o) {
        for (std::size_t k = 0; k < 9; ++k) c[k] += o.c[k];
        return *this;
    }
    Tensor2& operator-=(const Tensor2& o) {
        for (std::size_t k = 0; k < 9; ++k) c[k] -= o.c[k];
        return *this;
    }
    Tensor2& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }

    friend bool operator==(const Tensor2&, const Tensor2&) = default;
};

inline Tensor2 operator+(Tensor2 a, const Tensor2& b) { return a += b; }
inline Tensor2 operator-(Tensor2 a, const Tensor2& b) { return a -= b; }
inline Tensor2 operator-(Tensor2 a) { return a *= -1.0; }
inline Tensor2 operator*(Tensor2 a, double s) { return a *= s; }
inline Tensor2 operator*(double s, Tensor2 a) { return a *= s; }

/// Matrix product A.B.
Tensor2 operator*(const Tensor2& a, const Tensor2& b);

Tensor2 transpose(const Tensor2& a);
double trace(const Tensor2& a);
/// Frobenius norm.
double norm(const Tensor2& a);
Tensor2 sym(const Tensor2& a);
/// max_ij |A_ij - A_ji|
double asymmetry(const Tensor2& a);

/// Fourth order tensor, components indexed ijkl in row-major order.
struct Tensor4 {
    std::array<double, 81> c{};

    static constexpr std::size_t index(int i, int j, int k, int l) {
        return static_cast<std::size_t>(((i * 3 + j) * 3 + k) * 3 + l);
    }
    constexpr double& operator()(int i, int j, int k, int l) { return c[index(i, j, k, l)]; }
    constexpr double operator()(int i, int j, int k, int l) const { return c[index(i, j, k, l)]; }
    /// Access as a 9x9 matrix acting on row-major flattened second order tensors.
    constexpr double& at9(std::size_t a, std::size_t b) { return c[a * 9 + b]; }
    constexpr double at9(std::size_t a, std::size_t b) const { return c[a * 9 + b]; }

    static constexpr Tensor4 zero() { return Tensor4{}; }
    /// I_ijkl = delta_ik delta_jl, so that I . B = B.
    static constexpr Tensor4 identity() {
        Tensor4 t;
        for (std::size_t a = 0; a < 9; ++a) t.c[a * 9 + a] = 1.0;
        return t;
    }

    Tensor4& operator+=(const Tensor4& o) {
        for (std::size_t k = 0; k < 81; ++k) c[k] += o.c[k];
        return *this;
    }
    Tensor4& operator-=(const Tensor4& o) {
        for (std::size_t k = 0; k < 81; ++k) c[k] -= o.c[k];
        return *this;
    }
    Tensor4& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }

    friend bool operator==(const Tensor4&, const Tensor4&) = default;
};

inline Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }
inline Tensor4 operator-(Tensor4 a, const Tensor4& b) { return a -= b; }
inline Tensor4 operator*(Tensor4 a, double s) { return a *= s; }
inline Tensor4 operator*(double s, Tensor4 a) { return a *= s; }

double norm(const Tensor4& a);
/// (A (x) B)_ijkl = A_ij B_kl
Tensor4 outer(const Tensor2& a, const Tensor2& b);
/// max |C_ijkl - C_klij|
double major_asymmetry(const Tensor4& c);

/// A . B = sum_ij A_ij B_ij
double contract2(const Tensor2& a, const Tensor2& b);
/// (A . C)_kl = sum_ij A_ij C_ijkl
Tensor2 contract24(const Tensor2& a, const Tensor4& c);
/// (C . B)_ij = sum_kl C_ijkl B_kl
Tensor2 contract42(const Tensor4& c, const Tensor2& b);
/// (C . C')_ijkl = sum_mn C_ijmn C'_mnkl
Tensor4 contract44(const Tensor4& c, const Tensor4& cp);

double det(const Tensor2& a);
/// Throws SingularMatrixError when |det A| is below a norm-scaled threshold.
Tensor2 inverse(const Tensor2& a);

/// Eigen decomposition of a symmetric tensor: A = Q diag(values) Q^T, the
/// columns of Q are the eigenvectors. Eigenvalues are sorted ascending.
struct SymEigen {
    std::array<double, 3> values{};
    Tensor2 vectors;
};

/// Cyclic Jacobi rotations. Input is symmetrized first.
SymEigen eigen_sym(const Tensor2& a);

/// Q diag(f(lambda)) Q^T
template <class Fn>
Tensor2 spectral_map(const SymEigen& e, Fn&& f) {
    Tensor2 out;
    for (int k = 0; k < 3; ++k) {
        const double fk = f(e.values[static_cast<std::size_t>(k)]);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out(i, j) += fk * e.vectors(i, k) * e.vectors(j, k);
    }
    return out;
}

/// Deformation gradient with cached positive determinant.
class DefGrad {
public:
    /// Throws InvalidArgument unless det(f) > 0.
    explicit DefGrad(const Tensor2& f);

    const Tensor2& value() const { return value_; }
    double J() const { return J_; }

private:
    Tensor2 value_;
    double J_;
};

/// Symmetric positive definite stretch tensor.
class Stretch {
public:
    /// Throws InvalidArgument if u is not symmetric (relative 1e-10) or not
    /// positive definite. The stored value is the exact symmetric part.
    explicit Stretch(const Tensor2& u);

    const Tensor2& value() const { return value_; }

private:
    Tensor2 value_;
};

struct PolarDecomposition {
    Tensor2 R;
    Stretch U;
};

/// F = R U with U = sqrt(F^T F). Throws ConvergenceError when F^T F has a
/// non-positive eigenvalue (numerically singular F).
PolarDecomposition polar(const DefGrad& f);

/// Exponential of a symmetric tensor. Throws InvalidArgument if
/// max |X_ij - X_ji| > 1e-12 max(1, |X|).
Stretch expm_sym(const Tensor2& x);

/// Logarithm of an s.p.d. tensor.
Tensor2 logm_spd(const Stretch& u);

struct Ddms {
    double J;
    Tensor2 Fhat;
};

/// Dilatational-deviatoric multiplicative split F = J^{1/3} Fhat.
Ddms ddms(const DefGrad& f);

}  // namespace rbh
