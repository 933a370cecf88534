#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>

#include "pcag/topology.hpp"

namespace pcag {

/// Per-node packet counts for one network operation.
struct LoadReport {
    struct NodeLoad {
        std::int64_t rx = 0;
        std::int64_t tx = 0;
        std::int64_t total() const { return rx + tx; }
    };

    std::vector<NodeLoad> nodes;
    std::vector<SensorId> ids;

    explicit LoadReport(std::vector<SensorId> node_ids = {})
        : nodes(node_ids.size()), ids(std::move(node_ids)) {}

    std::int64_t total_rx() const;
    std::int64_t total_tx() const;
    std::int64_t total() const { return total_rx() + total_tx(); }
    std::int64_t max_node_load() const;
    double mean_node_load() const;

    /// Accumulates another report over the same node set.
    LoadReport& operator+=(const LoadReport& other);

    bool operator==(const LoadReport& other) const;

    void save(const std::filesystem::path& path) const;
};

/// Partial state record merged up the routing tree.
struct PartialStateRecord {
    std::vector<double> payload;
};

/// TAG-style aggregation primitives. `record_size` is the number of packets a
/// record transmission costs (one packet per scalar).
struct AggregationSpec {
    int record_size = 1;
    std::function<PartialStateRecord(std::size_t node_index, double measurement)> init;
    std::function<PartialStateRecord(const PartialStateRecord&, const PartialStateRecord&)> merge;
    std::function<std::vector<double>(const PartialStateRecord&)> evaluate;
};

/// Componentwise-sum spec of the given record size with identity evaluator.
AggregationSpec sum_spec(int record_size,
                         std::function<PartialStateRecord(std::size_t, double)> init);

struct DefaultEpochResult {
    Vector sink_values;  // exact copy of x in sensor-index order
    LoadReport loads;
};

/// D operation: every raw measurement is forwarded to the sink. Node i
/// processes 2*RT_i - 1 packets; the root's final transmission to the base
/// station is counted.
DefaultEpochResult run_default_epoch(const RoutingTree& tree, const Vector& x);

struct AggregateEpochResult {
    std::vector<double> result;
    LoadReport loads;
};

/// A operation: records are merged from the leaves to the root and the
/// evaluator is applied to the root record. Children are merged in ascending
/// node-index order regardless of how the tree lists them, so the result does
/// not depend on presentation order. Node i processes q*(C_i + 1) packets.
AggregateEpochResult run_aggregate_epoch(const RoutingTree& tree, const AggregationSpec& spec,
                                         const Vector& x);

/// F operation: flooding a result from the root to all nodes. Per payload
/// packet: the root transmits once (broadcast), interior nodes receive and
/// forward, leaves only receive.
LoadReport run_feedback(const RoutingTree& tree, int payload_size);

struct NetworkOp {
    enum class Kind { Default, Aggregate, Feedback };
    Kind kind = Kind::Default;
    int size = 1;  // record size for A, payload for F; unused for D

    static NetworkOp d() { return {Kind::Default, 1}; }
    static NetworkOp a(int q) { return {Kind::Aggregate, q}; }
    static NetworkOp f(int s) { return {Kind::Feedback, s}; }
};

/// Closed-form loads for a D/A/F operation; equals the simulated report
/// integer-exactly.
LoadReport analytic_loads(const RoutingTree& tree, const NetworkOp& op);

/// Eq-of-load tradeoff: aggregation beats default forwarding iff
/// q*(c_max + 1) <= 2p - 1.
bool tradeoff_holds(int q, int c_max, int p);

}  // namespace pcag
