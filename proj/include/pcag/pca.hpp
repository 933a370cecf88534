#pragma once

#include <span>

#include "pcag/linalg.hpp"

namespace pcag {

/// Principal component scores z = W^T (x - mean). W is p x q with orthonormal
/// columns.
Vector project(const Matrix& w, const Vector& x, const Vector& mean);

/// Reconstruction x_hat = W z + mean. Row i is evaluated as
/// sum_k z[k] * w(i,k) + mean[i]; node-local reconstruction in the runtime
/// module uses the same expression so that both sides agree bit-for-bit.
Vector reconstruct(const Matrix& w, const Vector& z, const Vector& mean);

/// Proportion of variance retained by the first q eigenvalues.
double retained_variance(std::span<const double> values, int q);

/// Test-set retained variance of a basis:
/// 1 - sum_t ||x_t - x_hat_t||^2 / sum_t ||x_t - mean||^2, with centering by
/// the basis's training mean. Can be negative when the basis predicts worse
/// than the training centroid.
double empirical_retained_variance(const PcaBasis& basis, std::span<const Vector> test);

}  // namespace pcag
