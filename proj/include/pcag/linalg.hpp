#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pcag {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Dimensions are fixed at construction.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

inline Vector operator-(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("vector subtraction: length mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vector operator+(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("vector addition: length mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vector scaled(const Vector& v, double s) {
    Vector r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i] * s;
    return r;
}

inline Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols() != v.size())
        throw std::invalid_argument("matvec: dimension mismatch");
    Vector r(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double x : m.data()) s += x * x;
    return std::sqrt(s);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("max_abs_diff: shape mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            d = std::max(d, std::abs(a(i, j) - b(i, j)));
    return d;
}

inline bool is_symmetric(const Matrix& m, double tol = 1e-12) {
    if (m.rows() != m.cols()) return false;
    double scale = std::max(1.0, frobenius_norm(m));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol * scale) return false;
    return true;
}

/// Flips the vector in place so that its first nonzero element is positive.
inline void canonicalize_sign(Vector& v) {
    for (double x : v) {
        if (x != 0.0) {
            if (x < 0.0)
                for (double& e : v) e = -e;
            return;
        }
    }
}

/// Unit-norm eigenvector with its eigenvalue estimate. The stored vector is
/// sign-canonicalized (first nonzero element positive).
struct EigenPair {
    Vector vector;
    double value = 0.0;

    EigenPair() = default;
    EigenPair(Vector v, double val) : vector(std::move(v)), value(val) {
        double n = norm2(vector);
        if (std::abs(n - 1.0) > 1e-9)
            throw std::invalid_argument("EigenPair: vector norm " + std::to_string(n) +
                                        " not within 1e-9 of 1");
        canonicalize_sign(vector);
    }
};

/// Ordered PCA basis: eigenpairs sorted by nonincreasing eigenvalue plus the
/// training centroid used for centering at projection time. Eigenvalues must
/// be nonnegative; negative pairs are discarded by the builders before the
/// basis is assembled.
struct PcaBasis {
    std::vector<EigenPair> pairs;
    Vector mean;

    PcaBasis() = default;
    PcaBasis(std::vector<EigenPair> eigen_pairs, Vector centroid);

    std::size_t q() const { return pairs.size(); }
    std::size_t p() const { return mean.size(); }

    /// Column matrix W (p x q) of the basis vectors.
    Matrix matrix() const {
        Matrix w(p(), q());
        for (std::size_t k = 0; k < pairs.size(); ++k)
            for (std::size_t i = 0; i < mean.size(); ++i)
                w(i, k) = pairs[k].vector[i];
        return w;
    }

    std::vector<double> values() const {
        std::vector<double> v(pairs.size());
        for (std::size_t k = 0; k < pairs.size(); ++k) v[k] = pairs[k].value;
        return v;
    }
};

/// Initial-vector policy for the power iteration: seed-based random entries or
/// the covariance diagonal.
struct InitPolicy {
    enum class Kind { SeededRandom, Diagonal };
    Kind kind = Kind::SeededRandom;
    std::uint64_t seed = 1;

    static InitPolicy random(std::uint64_t seed) { return {Kind::SeededRandom, seed}; }
    static InitPolicy diagonal() { return {Kind::Diagonal, 0}; }
};

/// Builds v0 for component k (1-based) from the policy. `diag` holds C[i,i].
Vector initial_vector(const InitPolicy& policy, const Vector& diag, int component);

}  // namespace pcag
