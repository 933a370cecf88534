#include "pcag/pca.hpp"

namespace pcag {

Vector project(const Matrix& w, const Vector& x, const Vector& mean) {
    if (x.size() != w.rows() || mean.size() != w.rows())
        throw std::invalid_argument("project: dimension mismatch");
    Vector z(w.cols(), 0.0);
    for (std::size_t k = 0; k < w.cols(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < w.rows(); ++i) s += w(i, k) * (x[i] - mean[i]);
        z[k] = s;
    }
    return z;
}

Vector reconstruct(const Matrix& w, const Vector& z, const Vector& mean) {
    if (z.size() != w.cols() || mean.size() != w.rows())
        throw std::invalid_argument("reconstruct: dimension mismatch");
    Vector x(w.rows(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < w.cols(); ++k) s += z[k] * w(i, k);
        x[i] = s + mean[i];
    }
    return x;
}

double retained_variance(std::span<const double> values, int q) {
    if (values.empty()) throw std::invalid_argument("retained_variance: empty eigenvalue list");
    if (q < 1 || static_cast<std::size_t>(q) > values.size())
        throw std::invalid_argument("retained_variance: q out of range");
    double total = 0.0;
    for (double v : values) total += v;
    if (total <= 0.0) throw std::invalid_argument("retained_variance: total variance is zero");
    double head = 0.0;
    for (int k = 0; k < q; ++k) head += values[k];
    return head / total;
}

double empirical_retained_variance(const PcaBasis& basis, std::span<const Vector> test) {
    if (test.empty())
        throw std::invalid_argument("empirical_retained_variance: empty test set");
    const Matrix w = basis.matrix();
    double residual = 0.0;
    double total = 0.0;
    for (const Vector& x : test) {
        if (x.size() != basis.p())
            throw std::invalid_argument("empirical_retained_variance: dimension mismatch");
        const Vector z = project(w, x, basis.mean);
        const Vector xh = reconstruct(w, z, basis.mean);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = x[i] - xh[i];
            const double c = x[i] - basis.mean[i];
            residual += r * r;
            total += c * c;
        }
    }
    if (total == 0.0)
        throw std::invalid_argument("empirical_retained_variance: zero test variance");
    return 1.0 - residual / total;
}

}  // namespace pcag
