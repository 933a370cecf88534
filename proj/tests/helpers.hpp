#pragma once

#include <random>

#include "pcag/covariance.hpp"
#include "pcag/topology.hpp"

namespace pcag::test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Vector random_vector(std::mt19937_64& g, std::size_t n, double lo = -1.0,
                            double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Vector v(n);
    for (double& x : v) x = u(g);
    return v;
}

inline std::vector<Vector> random_samples(std::mt19937_64& g, std::size_t count,
                                          std::size_t dim) {
    std::vector<Vector> s;
    s.reserve(count);
    for (std::size_t i = 0; i < count; ++i) s.push_back(random_vector(g, dim, -2.0, 2.0));
    return s;
}

/// Two-pass textbook covariance: sum (x - mean)(x - mean)^T / t. Independent
/// of the sum-of-products route used by the library.
inline Matrix two_pass_covariance(const std::vector<Vector>& samples) {
    const std::size_t p = samples[0].size();
    Vector mean(p, 0.0);
    for (const auto& x : samples)
        for (std::size_t i = 0; i < p; ++i) mean[i] += x[i];
    for (double& m : mean) m /= static_cast<double>(samples.size());
    Matrix c(p, p);
    for (const auto& x : samples)
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                c(i, j) += (x[i] - mean[i]) * (x[j] - mean[j]);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) c(i, j) /= static_cast<double>(samples.size());
    return c;
}

inline Matrix random_symmetric(std::mt19937_64& g, std::size_t p, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            const double v = u(g);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

/// Random orthogonal matrix via Gram-Schmidt on Gaussian columns.
inline Matrix random_orthogonal(std::mt19937_64& g, std::size_t p) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix q(p, p);
    for (std::size_t k = 0; k < p; ++k) {
        Vector col(p);
        for (double& x : col) x = n(g);
        for (std::size_t l = 0; l < k; ++l) {
            double d = 0.0;
            for (std::size_t i = 0; i < p; ++i) d += col[i] * q(i, l);
            for (std::size_t i = 0; i < p; ++i) col[i] -= d * q(i, l);
        }
        double nn = 0.0;
        for (double x : col) nn += x * x;
        nn = std::sqrt(nn);
        for (std::size_t i = 0; i < p; ++i) q(i, k) = col[i] / nn;
    }
    return q;
}

/// Q diag(values) Q^T for a random orthogonal Q: symmetric matrix with a
/// chosen spectrum.
inline Matrix matrix_with_spectrum(std::mt19937_64& g, const Vector& values) {
    const std::size_t p = values.size();
    Matrix q = random_orthogonal(g, p);
    Matrix m(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < p; ++k) s += q(i, k) * values[k] * q(j, k);
            m(i, j) = s;
            m(j, i) = s;
        }
    return m;
}

/// Uniform random field, re-drawn until connected at the given range.
inline SensorField random_connected_field(std::mt19937_64& g, std::size_t p, double side,
                                          double range) {
    std::uniform_real_distribution<double> u(0.0, side);
    for (int attempt = 0; attempt < 200; ++attempt) {
        std::vector<Sensor> sensors(p);
        for (std::size_t i = 0; i < p; ++i)
            sensors[i] = {static_cast<SensorId>(i + 1), u(g), u(g)};
        SensorField field(std::move(sensors), 1);
        try {
            build_routing_tree(field, range, 1);
            return field;
        } catch (const std::invalid_argument&) {
            continue;
        }
    }
    throw std::runtime_error("random_connected_field: no connected layout found");
}

inline SensorField chain_field(std::size_t p, double spacing = 1.0) {
    std::vector<Sensor> sensors(p);
    for (std::size_t i = 0; i < p; ++i)
        sensors[i] = {static_cast<SensorId>(i + 1), spacing * static_cast<double>(i), 0.0};
    return SensorField(std::move(sensors), 1);
}

/// Chain tree rooted at the highest index: parent(i) = i + 1. Aggregating
/// along it reproduces an ascending left-to-right sum.
inline RoutingTree ascending_chain_tree(std::size_t p) {
    std::vector<std::optional<std::size_t>> parent(p);
    std::vector<std::size_t> depth(p);
    std::vector<SensorId> ids(p);
    for (std::size_t i = 0; i < p; ++i) {
        ids[i] = static_cast<SensorId>(i + 1);
        depth[i] = p - 1 - i;
        if (i + 1 < p) parent[i] = i + 1;
    }
    return RoutingTree(std::move(parent), std::move(depth), p - 1, std::move(ids));
}

inline const char* data_dir() { return PCAG_DATA_DIR; }

}  // namespace pcag::test
