#include "pcag/aggregation.hpp"

#include <algorithm>

#include "pcag/csv.hpp"

namespace pcag {

std::int64_t LoadReport::total_rx() const {
    std::int64_t s = 0;
    for (const auto& n : nodes) s += n.rx;
    return s;
}

std::int64_t LoadReport::total_tx() const {
    std::int64_t s = 0;
    for (const auto& n : nodes) s += n.tx;
    return s;
}

std::int64_t LoadReport::max_node_load() const {
    std::int64_t m = 0;
    for (const auto& n : nodes) m = std::max(m, n.total());
    return m;
}

double LoadReport::mean_node_load() const {
    if (nodes.empty()) return 0.0;
    return static_cast<double>(total()) / static_cast<double>(nodes.size());
}

LoadReport& LoadReport::operator+=(const LoadReport& other) {
    if (other.ids != ids) throw std::invalid_argument("LoadReport: node set mismatch");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        nodes[i].rx += other.nodes[i].rx;
        nodes[i].tx += other.nodes[i].tx;
    }
    return *this;
}

bool LoadReport::operator==(const LoadReport& other) const {
    if (ids != other.ids || nodes.size() != other.nodes.size()) return false;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].rx != other.nodes[i].rx || nodes[i].tx != other.nodes[i].tx) return false;
    return true;
}

void LoadReport::save(const std::filesystem::path& path) const {
    Table t;
    t.header = {"sensor_id", "rx", "tx", "total"};
    for (std::size_t i = 0; i < nodes.size(); ++i)
        t.add_row({std::to_string(ids[i]), std::to_string(nodes[i].rx),
                   std::to_string(nodes[i].tx), std::to_string(nodes[i].total())});
    t.write(path);
}

AggregationSpec sum_spec(int record_size,
                         std::function<PartialStateRecord(std::size_t, double)> init) {
    AggregationSpec spec;
    spec.record_size = record_size;
    spec.init = std::move(init);
    spec.merge = [](const PartialStateRecord& a, const PartialStateRecord& b) {
        if (a.payload.size() != b.payload.size())
            throw std::invalid_argument("merge: record dimension mismatch");
        PartialStateRecord out = a;
        for (std::size_t i = 0; i < b.payload.size(); ++i) out.payload[i] += b.payload[i];
        return out;
    };
    spec.evaluate = [](const PartialStateRecord& r) { return r.payload; };
    return spec;
}

DefaultEpochResult run_default_epoch(const RoutingTree& tree, const Vector& x) {
    const std::size_t p = tree.size();
    if (x.size() != p)
        throw std::invalid_argument("run_default_epoch: measurement count mismatch");

    DefaultEpochResult out{Vector(p, 0.0), LoadReport(tree.ids())};
    // Bundles of (index, value) pairs travel up the tree; each forwarded value
    // is one packet.
    std::vector<std::vector<std::pair<std::size_t, double>>> bundle(p);
    for (std::size_t node : tree.post_order()) {
        auto& own = bundle[node];
        own.emplace_back(node, x[node]);
        for (std::size_t child : tree.children(node)) {
            out.loads.nodes[node].rx += static_cast<std::int64_t>(bundle[child].size());
            own.insert(own.end(), bundle[child].begin(), bundle[child].end());
            bundle[child].clear();
        }
        // One transmission per carried value; at the root this is the delivery
        // to the base station.
        out.loads.nodes[node].tx += static_cast<std::int64_t>(own.size());
    }
    for (const auto& [idx, value] : bundle[tree.root()]) out.sink_values[idx] = value;
    return out;
}

AggregateEpochResult run_aggregate_epoch(const RoutingTree& tree, const AggregationSpec& spec,
                                         const Vector& x) {
    const std::size_t p = tree.size();
    if (x.size() != p)
        throw std::invalid_argument("run_aggregate_epoch: measurement count mismatch");
    if (spec.record_size < 1)
        throw std::invalid_argument("run_aggregate_epoch: record size must be >= 1");

    LoadReport loads(tree.ids());
    std::vector<PartialStateRecord> psr(p);
    for (std::size_t node : tree.post_order()) {
        PartialStateRecord rec = spec.init(node, x[node]);
        if (rec.payload.size() != static_cast<std::size_t>(spec.record_size))
            throw std::invalid_argument("run_aggregate_epoch: init record size mismatch");
        // Children sorted by index: merge order is canonical, not positional.
        std::vector<std::size_t> kids(tree.children(node));
        std::sort(kids.begin(), kids.end());
        for (std::size_t child : kids) {
            rec = spec.merge(rec, psr[child]);
            loads.nodes[node].rx += spec.record_size;
        }
        loads.nodes[node].tx += spec.record_size;
        psr[node] = std::move(rec);
    }
    return {spec.evaluate(psr[tree.root()]), std::move(loads)};
}

LoadReport run_feedback(const RoutingTree& tree, int payload_size) {
    if (payload_size < 1)
        throw std::invalid_argument("run_feedback: payload size must be >= 1");
    LoadReport loads(tree.ids());
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const bool is_root = i == tree.root();
        const bool is_leaf = tree.children(i).empty();
        if (!is_root) loads.nodes[i].rx += payload_size;
        if (is_root || !is_leaf) loads.nodes[i].tx += payload_size;
    }
    return loads;
}

LoadReport analytic_loads(const RoutingTree& tree, const NetworkOp& op) {
    const TreeStats stats = tree_stats(tree);
    LoadReport loads(tree.ids());
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const auto rt = static_cast<std::int64_t>(stats.subtree_sizes[i]);
        const auto ci = static_cast<std::int64_t>(stats.children_counts[i]);
        switch (op.kind) {
            case NetworkOp::Kind::Default:
                loads.nodes[i].rx = rt - 1;
                loads.nodes[i].tx = rt;
                break;
            case NetworkOp::Kind::Aggregate:
                loads.nodes[i].rx = static_cast<std::int64_t>(op.size) * ci;
                loads.nodes[i].tx = op.size;
                break;
            case NetworkOp::Kind::Feedback: {
                const bool is_root = i == tree.root();
                const bool is_leaf = tree.children(i).empty();
                loads.nodes[i].rx = is_root ? 0 : op.size;
                loads.nodes[i].tx = (is_root || !is_leaf) ? op.size : 0;
                break;
            }
        }
    }
    return loads;
}

bool tradeoff_holds(int q, int c_max, int p) {
    if (q < 1 || c_max < 1 || p < 1)
        throw std::invalid_argument("tradeoff_holds: arguments must be >= 1");
    return static_cast<std::int64_t>(q) * (c_max + 1) <= 2 * static_cast<std::int64_t>(p) - 1;
}

}  // namespace pcag
