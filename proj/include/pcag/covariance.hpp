#pragma once

#include <cstdint>
#include <span>

#include "pcag/linalg.hpp"

namespace pcag {

/// Covariance entry from the running sums: S_ij/t - S_i*S_j/t^2.
/// Every covariance path (batch, accumulator, per-node) evaluates this same
/// expression so that two endpoints of an edge produce bit-identical values.
inline double cov_entry(double s_ij, double s_i, double s_j, std::int64_t t) {
    const double td = static_cast<double>(t);
    return s_ij / td - (s_i * s_j) / (td * td);
}

/// Sample covariance (1/t) X X^T - mean mean^T over column vectors.
/// Requires at least two samples of equal length.
Matrix covariance_batch(std::span<const Vector> samples);

Vector mean_vector(std::span<const Vector> samples);

/// Streaming covariance state: t, per-coordinate sums S_i and cross sums S_ij.
class CovAccumulator {
public:
    explicit CovAccumulator(std::size_t dimension)
        : sums_(dimension, 0.0), cross_(dimension, dimension) {}

    void update(const Vector& x);

    std::int64_t count() const { return t_; }
    std::size_t dimension() const { return sums_.size(); }

    /// Current covariance estimate; all zeros while t < 2.
    Matrix covariance() const;

    Vector mean() const;

private:
    std::int64_t t_ = 0;
    Vector sums_;
    Matrix cross_;
};

}  // namespace pcag
