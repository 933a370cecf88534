#include "pcag/eigen.hpp"

#include <algorithm>
#include <cmath>

namespace pcag {

int eigen_sign(const Vector& v_prev, const Vector& v_next) {
    if (v_prev.size() != v_next.size())
        throw std::invalid_argument("eigen_sign: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < v_prev.size(); ++i) {
        const double prod = v_prev[i] * v_next[i];
        if (prod > 0.0)
            s += 1.0;
        else if (prod < 0.0)
            s -= 1.0;
    }
    if (s > 0.0) return 1;
    if (s < 0.0) return -1;
    return 0;
}

double zero_norm_threshold(const Matrix& c) {
    return 1e-12 * std::max(1.0, frobenius_norm(c));
}

namespace {

void check_symmetric_square(const Matrix& c, const char* who) {
    if (c.rows() != c.cols())
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    if (!is_symmetric(c))
        throw std::invalid_argument(std::string(who) + ": matrix is not symmetric");
}

// Sign-aligned distance between successive iterates: flip `next` if it points
// away from `prev` so that negative-eigenvalue oscillation can still converge.
double aligned_delta(const Vector& prev, const Vector& next) {
    const bool flip = dot(next, prev) < 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        const double d = (flip ? -next[i] : next[i]) - prev[i];
        s += d * d;
    }
    return std::sqrt(s);
}

struct DeflatedIterationOutcome {
    Vector v;          // final iterate (normalized, raw sign history)
    Vector v_prev;     // iterate before the last update
    double magnitude;  // ||C v - deflation|| at the last iterate
    int iterations;
    bool rank_exhausted;  // deflated product collapsed to numerical zero
};

// Shared loop for power_iteration (no deflation) and compute_basis. `basis`
// holds the accepted components the candidate is re-orthogonalized against
// after every matrix-vector product. An exactly-zero C v0 is an error for the
// undeflated path; with deflation any collapse below zero_tol means the
// remaining rank is exhausted.
DeflatedIterationOutcome deflated_power_loop(const Matrix& c, Vector v0, double delta, int t_max,
                                             const std::vector<EigenPair>& basis,
                                             double zero_tol) {
    if (delta <= 0.0) throw std::invalid_argument("power iteration: delta must be positive");
    if (t_max < 1) throw std::invalid_argument("power iteration: t_max must be at least 1");
    if (v0.size() != c.rows())
        throw std::invalid_argument("power iteration: v0 length does not match matrix");
    if (norm2(v0) == 0.0) throw std::invalid_argument("power iteration: v0 has zero norm");

    Vector v = std::move(v0);
    Vector v_prev;
    double magnitude = 0.0;
    int t = 0;
    while (t < t_max) {
        Vector u = matvec(c, v);
        for (const EigenPair& w : basis) {
            const double coeff = dot(u, w.vector);
            for (std::size_t i = 0; i < u.size(); ++i) u[i] -= coeff * w.vector[i];
        }
        magnitude = norm2(u);
        if (basis.empty() && t == 0 && magnitude == 0.0)
            throw std::invalid_argument(
                "power_iteration: C v0 is exactly zero (v0 orthogonal to the range)");
        if (magnitude <= zero_tol || magnitude == 0.0)
            return {std::move(v), std::move(v_prev), magnitude, t, true};
        for (double& x : u) x /= magnitude;
        const double change = aligned_delta(v, u);
        v_prev = std::move(v);
        v = std::move(u);
        ++t;
        if (change <= delta) break;
    }
    return {std::move(v), std::move(v_prev), magnitude, t, false};
}

}  // namespace

PowerIterationResult power_iteration(const Matrix& c, Vector v0, double delta, int t_max) {
    check_symmetric_square(c, "power_iteration");
    auto out = deflated_power_loop(c, std::move(v0), delta, t_max, {}, 0.0);
    const int sign = eigen_sign(out.v_prev, out.v);
    const double value = sign == 0 ? 0.0 : sign * out.magnitude;
    return {EigenPair(std::move(out.v), value), out.iterations};
}

BasisResult compute_basis_pairs(const Matrix& c, int q, double delta, int t_max,
                                const InitPolicy& policy) {
    check_symmetric_square(c, "compute_basis");
    const auto p = static_cast<int>(c.rows());
    if (q < 1 || q > p) throw std::invalid_argument("compute_basis: q must be in [1, p]");

    Vector diag(c.rows());
    for (std::size_t i = 0; i < c.rows(); ++i) diag[i] = c(i, i);

    BasisResult result;
    const double zero_tol = zero_norm_threshold(c);
    for (int k = 1; k <= q; ++k) {
        Vector v0 = initial_vector(policy, diag, k);
        auto out = deflated_power_loop(c, std::move(v0), delta, t_max, result.pairs, zero_tol);
        if (out.rank_exhausted) break;
        const int sign = eigen_sign(out.v_prev, out.v);
        if (sign < 0) break;
        const double value = sign == 0 ? 0.0 : sign * out.magnitude;
        result.pairs.emplace_back(std::move(out.v), value);
        result.iterations.push_back(out.iterations);
    }
    return result;
}

PcaBasis compute_basis(const Matrix& c, int q, double delta, int t_max, const InitPolicy& policy,
                       Vector mean) {
    if (mean.empty()) mean.assign(c.rows(), 0.0);
    auto pairs = compute_basis_pairs(c, q, delta, t_max, policy);
    return PcaBasis(std::move(pairs.pairs), std::move(mean));
}

std::vector<EigenPair> reference_eigendecomposition(const Matrix& c) {
    check_symmetric_square(c, "reference_eigendecomposition");
    const std::size_t p = c.rows();
    Matrix a = c;
    Matrix v = Matrix::identity(p);

    auto off_norm = [&a, p]() {
        double s = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    const double tol = 1e-12 * std::max(1.0, frobenius_norm(c));
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
        for (std::size_t pi = 0; pi + 1 < p; ++pi) {
            for (std::size_t qi = pi + 1; qi < p; ++qi) {
                const double apq = a(pi, qi);
                if (apq == 0.0) continue;
                const double app = a(pi, pi);
                const double aqq = a(qi, qi);
                const double theta = (aqq - app) / (2.0 * apq);
                const double t_val = (theta >= 0.0 ? 1.0 : -1.0) /
                                     (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double cos_r = 1.0 / std::sqrt(t_val * t_val + 1.0);
                const double sin_r = t_val * cos_r;
                for (std::size_t i = 0; i < p; ++i) {
                    const double aip = a(i, pi);
                    const double aiq = a(i, qi);
                    a(i, pi) = cos_r * aip - sin_r * aiq;
                    a(i, qi) = sin_r * aip + cos_r * aiq;
                }
                for (std::size_t j = 0; j < p; ++j) {
                    const double apj = a(pi, j);
                    const double aqj = a(qi, j);
                    a(pi, j) = cos_r * apj - sin_r * aqj;
                    a(qi, j) = sin_r * apj + cos_r * aqj;
                }
                for (std::size_t i = 0; i < p; ++i) {
                    const double vip = v(i, pi);
                    const double viq = v(i, qi);
                    v(i, pi) = cos_r * vip - sin_r * viq;
                    v(i, qi) = sin_r * vip + cos_r * viq;
                }
            }
        }
    }

    std::vector<EigenPair> pairs;
    pairs.reserve(p);
    for (std::size_t k = 0; k < p; ++k) {
        Vector w(p);
        for (std::size_t i = 0; i < p; ++i) w[i] = v(i, k);
        const double n = norm2(w);
        for (double& x : w) x /= n;
        pairs.emplace_back(std::move(w), a(k, k));
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const EigenPair& x, const EigenPair& y) { return x.value > y.value; });
    return pairs;
}

}  // namespace pcag
