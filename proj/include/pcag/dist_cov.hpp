#pragma once

#include <map>

#include "pcag/aggregation.hpp"
#include "pcag/covariance.hpp"
#include "pcag/topology.hpp"

namespace pcag {

/// Streaming covariance state of one node under the local covariance
/// hypothesis: the node tracks t, its own sums, and per-neighbor sums only.
struct NodeCovState {
    std::size_t index = 0;
    std::int64_t t = 0;
    double s_self = 0.0;                 // sum of own measurements
    double s_self_sq = 0.0;              // sum of squared own measurements
    std::map<std::size_t, double> s_neighbors;  // neighbor -> sum of its measurements
    std::map<std::size_t, double> s_cross;      // neighbor -> sum of products

    NodeCovState() = default;
    NodeCovState(std::size_t node_index, const std::vector<std::size_t>& neighbors);

    /// Local covariance with neighbor j (or own variance for j == index) from
    /// the running sums; zero while t < 2.
    double covariance_with(std::size_t j) const;
};

/// One recursive update with the node's own measurement and exactly its
/// neighbors' values. Throws if the round is incomplete or carries strangers.
void node_cov_update(NodeCovState& state, double own,
                     const std::map<std::size_t, double>& neighbor_values);

std::vector<NodeCovState> make_cov_network(const Neighborhoods& nbh);

struct CovRoundResult {
    LoadReport loads;
};

/// One synchronized measurement-exchange round: every node broadcasts its
/// value once and hears each neighbor once (load 1 + |N_i|), then updates.
CovRoundResult run_cov_round(std::vector<NodeCovState>& network, const Neighborhoods& nbh,
                             const Vector& x);

/// Symmetric covariance matrix with zeros outside radio neighborhoods.
struct MaskedCovariance {
    Matrix matrix;
    Neighborhoods mask;

    /// Row i restricted to the mask, self entry included.
    std::map<std::size_t, double> row(std::size_t i) const;
};

/// Materializes the per-node states into the global masked matrix. Both
/// endpoints of an edge hold bit-identical values; entries are taken from the
/// lower-indexed endpoint.
MaskedCovariance assemble_masked(const std::vector<NodeCovState>& states,
                                 const Neighborhoods& nbh);

/// Applies a neighborhood mask to a dense covariance (test/reference helper).
MaskedCovariance mask_covariance(const Matrix& dense, const Neighborhoods& nbh);

void save_masked(const MaskedCovariance& cov, const std::vector<SensorId>& ids,
                 const std::filesystem::path& path);

}  // namespace pcag
