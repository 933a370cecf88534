#include "pcag/covariance.hpp"

namespace pcag {

Vector mean_vector(std::span<const Vector> samples) {
    if (samples.empty()) throw std::invalid_argument("mean_vector: empty sample set");
    const std::size_t p = samples[0].size();
    Vector m(p, 0.0);
    for (const Vector& x : samples) {
        if (x.size() != p) throw std::invalid_argument("mean_vector: sample length mismatch");
        for (std::size_t i = 0; i < p; ++i) m[i] += x[i];
    }
    for (double& v : m) v /= static_cast<double>(samples.size());
    return m;
}

Matrix covariance_batch(std::span<const Vector> samples) {
    if (samples.size() < 2)
        throw std::invalid_argument("covariance_batch: need at least 2 samples");
    const std::size_t p = samples[0].size();
    const auto t = static_cast<std::int64_t>(samples.size());

    Vector sums(p, 0.0);
    Matrix cross(p, p);
    for (const Vector& x : samples) {
        if (x.size() != p)
            throw std::invalid_argument("covariance_batch: sample length mismatch");
        for (std::size_t i = 0; i < p; ++i) {
            sums[i] += x[i];
            for (std::size_t j = i; j < p; ++j) cross(i, j) += x[i] * x[j];
        }
    }
    Matrix c(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            const double v = cov_entry(cross(i, j), sums[i], sums[j], t);
            c(i, j) = v;
            c(j, i) = v;
        }
    return c;
}

void CovAccumulator::update(const Vector& x) {
    if (x.size() != sums_.size())
        throw std::invalid_argument("CovAccumulator: sample length mismatch");
    ++t_;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sums_[i] += x[i];
        for (std::size_t j = i; j < x.size(); ++j) cross_(i, j) += x[i] * x[j];
    }
}

Matrix CovAccumulator::covariance() const {
    const std::size_t p = sums_.size();
    Matrix c(p, p);
    if (t_ < 2) return c;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            const double v = cov_entry(cross_(i, j), sums_[i], sums_[j], t_);
            c(i, j) = v;
            c(j, i) = v;
        }
    return c;
}

Vector CovAccumulator::mean() const {
    Vector m(sums_.size(), 0.0);
    if (t_ == 0) return m;
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = sums_[i] / static_cast<double>(t_);
    return m;
}

}  // namespace pcag
