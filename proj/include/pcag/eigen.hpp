#pragma once

#include "pcag/linalg.hpp"

namespace pcag {

struct PowerIterationResult {
    EigenPair pair;
    int iterations = 0;
};

/// Sign of an eigenvalue estimated from two successive iterates:
/// sign(sum_i sign(v_prev[i] * v_next[i])). Zero products contribute nothing;
/// a zero result means the sign is undetermined.
int eigen_sign(const Vector& v_prev, const Vector& v_next);

/// Power iteration on a symmetric matrix. Stops when the sign-aligned change
/// ||v_{t+1} - v_t|| drops to delta or the iteration budget is exhausted.
/// The eigenvalue estimate is ||C v|| at the last iterate, signed by
/// eigen_sign over the raw (un-aligned) iterate history.
PowerIterationResult power_iteration(const Matrix& c, Vector v0, double delta, int t_max);

struct BasisResult {
    std::vector<EigenPair> pairs;
    std::vector<int> iterations;  // per accepted (or budget-expired) component
};

/// Power iteration with deflation: candidate vectors are re-orthogonalized
/// against all accepted components in every iteration. Stops early when the
/// sign test reports a negative eigenvalue (that pair is not kept) or when the
/// deflated matrix-vector product collapses to numerical zero.
BasisResult compute_basis_pairs(const Matrix& c, int q, double delta, int t_max,
                                const InitPolicy& policy);

/// Same, packaged as a PcaBasis with the given training mean (zeros if empty).
PcaBasis compute_basis(const Matrix& c, int q, double delta, int t_max,
                       const InitPolicy& policy, Vector mean = {});

/// Full spectrum of a symmetric matrix via cyclic Jacobi rotations, sorted by
/// nonincreasing eigenvalue. Independent of the power-iteration path; used as
/// the test oracle and the centralized reference decomposition.
std::vector<EigenPair> reference_eigendecomposition(const Matrix& c);

/// Relative threshold below which a deflated iterate counts as numerically
/// zero (rank exhausted).
double zero_norm_threshold(const Matrix& c);

}  // namespace pcag
