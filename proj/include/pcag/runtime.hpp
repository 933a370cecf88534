#pragma once

#include <optional>

#include "pcag/aggregation.hpp"
#include "pcag/pca.hpp"

namespace pcag {

/// What one node stores for steady-state operation: its rows of the basis,
/// its training mean, and the optional accuracy threshold for supervised
/// compression.
struct NodeBasisRow {
    SensorId sensor_id = 0;
    std::vector<double> coefficients;  // w_i1 .. w_iq
    double mean = 0.0;
    std::optional<double> epsilon;
};

/// Splits a basis into per-node rows in sensor-index order.
std::vector<NodeBasisRow> make_basis_rows(const PcaBasis& basis,
                                          const std::vector<SensorId>& ids,
                                          std::optional<double> epsilon = std::nullopt);

struct ScoreEpochResult {
    Vector z;
    LoadReport loads;
};

/// One PC-score epoch: each node initializes (w_i1 x~_i, .., w_iq x~_i) with
/// x~_i = x_i - mean_i and the records are summed along the tree (A operation
/// with record size q). Truncating to the first q_use components implements
/// the congestion policy of dropping the lowest-variance scores.
ScoreEpochResult score_epoch(const RoutingTree& tree, const std::vector<NodeBasisRow>& rows,
                             const Vector& x, std::optional<int> q_use = std::nullopt);

/// Evaluator at the base station: x_hat = W z + mean.
Vector sink_reconstruct(const PcaBasis& basis, const Vector& z);

struct Violation {
    SensorId sensor_id = 0;
    double error = 0.0;
};

/// Node-side accuracy check against the fed-back scores. The node rebuilds
/// its own reconstruction sum_k z_k w_ik + mean_i with the same expression the
/// sink evaluates, and reports a violation when it misses the actual
/// measurement by more than epsilon.
std::optional<Violation> supervised_check(const NodeBasisRow& row, const Vector& z_feedback,
                                          double x_actual);

struct SupervisedEpochResult {
    Vector z;
    Vector sink_view;                  // reconstruction with violator values patched in
    std::vector<Violation> violations;
    LoadReport loads;                  // A(q) + F(q) + violation retransmissions
};

/// Full supervised-compression epoch: scores are aggregated, fed back, checked
/// at every node, and each violator's raw measurement is retransmitted up the
/// tree (counted per forwarding hop). The sink view is then within epsilon of
/// the truth for every sensor.
SupervisedEpochResult run_supervised_epoch(const RoutingTree& tree,
                                           const std::vector<NodeBasisRow>& rows,
                                           const PcaBasis& basis, const Vector& x);

}  // namespace pcag
