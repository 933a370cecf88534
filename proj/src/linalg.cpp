#include "pcag/linalg.hpp"

#include <algorithm>
#include <random>

namespace pcag {

PcaBasis::PcaBasis(std::vector<EigenPair> eigen_pairs, Vector centroid)
    : pairs(std::move(eigen_pairs)), mean(std::move(centroid)) {
    for (const auto& pr : pairs) {
        if (pr.vector.size() != mean.size())
            throw std::invalid_argument("PcaBasis: eigenvector length differs from mean length");
        if (pr.value < 0.0)
            throw std::invalid_argument("PcaBasis: negative eigenvalue " +
                                        std::to_string(pr.value));
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const EigenPair& a, const EigenPair& b) { return a.value > b.value; });
    for (std::size_t k = 0; k < pairs.size(); ++k)
        for (std::size_t l = k + 1; l < pairs.size(); ++l)
            if (std::abs(dot(pairs[k].vector, pairs[l].vector)) > 1e-6)
                throw std::invalid_argument("PcaBasis: vectors are not pairwise orthogonal");
}

Vector initial_vector(const InitPolicy& policy, const Vector& diag, int component) {
    if (policy.kind == InitPolicy::Kind::Diagonal) return diag;
    // Decorrelate per-component streams while keeping the run reproducible.
    std::mt19937_64 rng(policy.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(component));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(diag.size());
    for (double& x : v) x = u(rng);
    return v;
}

}  // namespace pcag
