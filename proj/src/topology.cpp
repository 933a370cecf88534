#include "pcag/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <sstream>

#include "pcag/csv.hpp"

namespace pcag {

SensorField::SensorField(std::vector<Sensor> sensors, SensorId root_id)
    : sensors_(std::move(sensors)), root_id_(root_id) {
    if (sensors_.empty()) throw std::invalid_argument("SensorField: no sensors");
    std::sort(sensors_.begin(), sensors_.end(),
              [](const Sensor& a, const Sensor& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < sensors_.size(); ++i)
        if (sensors_[i].id == sensors_[i - 1].id)
            throw std::invalid_argument("SensorField: duplicate sensor id " +
                                        std::to_string(sensors_[i].id));
    index_of(root_id_);  // throws if absent
}

std::size_t SensorField::index_of(SensorId id) const {
    auto it = std::lower_bound(sensors_.begin(), sensors_.end(), id,
                               [](const Sensor& s, SensorId v) { return s.id < v; });
    if (it == sensors_.end() || it->id != id)
        throw std::invalid_argument("SensorField: unknown sensor id " + std::to_string(id));
    return static_cast<std::size_t>(it - sensors_.begin());
}

double SensorField::distance(std::size_t i, std::size_t j) const {
    const Sensor& a = sensors_.at(i);
    const Sensor& b = sensors_.at(j);
    return std::hypot(a.x - b.x, a.y - b.y);
}

SensorField load_positions(const std::filesystem::path& path, SensorId root_id) {
    CsvFile csv = read_csv(path);
    if (csv.header != std::vector<std::string>{"sensor_id", "x", "y"})
        throw std::runtime_error(path.string() + ": expected header sensor_id,x,y");
    std::vector<Sensor> sensors;
    sensors.reserve(csv.rows.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        const auto& row = csv.rows[r];
        const std::string ctx = path.string() + ": line " + std::to_string(r + 2);
        sensors.push_back({static_cast<SensorId>(parse_int(row[0], ctx)),
                           parse_double(row[1], ctx), parse_double(row[2], ctx)});
    }
    return SensorField(std::move(sensors), root_id);
}

void save_positions(const SensorField& field, const std::filesystem::path& path) {
    Table t;
    t.header = {"sensor_id", "x", "y"};
    for (const Sensor& s : field.sensors())
        t.add_row({std::to_string(s.id), format_value(s.x), format_value(s.y)});
    t.write(path);
}

Neighborhoods::Neighborhoods(std::vector<std::vector<std::size_t>> lists, double radio_range,
                             std::vector<SensorId> ids)
    : lists_(std::move(lists)), radio_range_(radio_range), ids_(std::move(ids)) {
    if (ids_.size() != lists_.size())
        throw std::invalid_argument("Neighborhoods: id/list size mismatch");
    for (std::size_t i = 0; i < lists_.size(); ++i) {
        for (std::size_t j : lists_[i]) {
            if (j == i) throw std::invalid_argument("Neighborhoods: self link");
            const auto& back = lists_.at(j);
            if (!std::binary_search(back.begin(), back.end(), i))
                throw std::invalid_argument("Neighborhoods: asymmetric link");
        }
    }
}

Neighborhoods Neighborhoods::complete(std::size_t p) {
    std::vector<std::vector<std::size_t>> lists(p);
    std::vector<SensorId> ids(p);
    for (std::size_t i = 0; i < p; ++i) {
        ids[i] = static_cast<SensorId>(i);
        for (std::size_t j = 0; j < p; ++j)
            if (j != i) lists[i].push_back(j);
    }
    return Neighborhoods(std::move(lists), std::numeric_limits<double>::infinity(),
                         std::move(ids));
}

std::size_t Neighborhoods::max_degree() const {
    std::size_t m = 0;
    for (const auto& l : lists_) m = std::max(m, l.size());
    return m;
}

std::size_t Neighborhoods::max_degree_index() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < lists_.size(); ++i)
        if (lists_[i].size() > lists_[best].size()) best = i;
    return best;
}

Neighborhoods build_neighborhoods(const SensorField& field, double radio_range) {
    if (radio_range <= 0.0)
        throw std::invalid_argument("build_neighborhoods: radio range must be positive");
    const std::size_t p = field.size();
    std::vector<std::vector<std::size_t>> lists(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            if (field.distance(i, j) <= radio_range) {
                lists[i].push_back(j);
                lists[j].push_back(i);
            }
    std::vector<SensorId> ids(p);
    for (std::size_t i = 0; i < p; ++i) ids[i] = field.id_of(i);
    return Neighborhoods(std::move(lists), radio_range, std::move(ids));
}

RoutingTree::RoutingTree(std::vector<std::optional<std::size_t>> parent,
                         std::vector<std::size_t> depth, std::size_t root,
                         std::vector<SensorId> ids)
    : parent_(std::move(parent)), depth_(std::move(depth)), root_(root), ids_(std::move(ids)) {
    const std::size_t p = parent_.size();
    children_.resize(p);
    for (std::size_t v = 0; v < p; ++v)
        if (parent_[v]) children_[*parent_[v]].push_back(v);
    for (auto& c : children_) std::sort(c.begin(), c.end());

    post_order_.reserve(p);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root_, 0}};
    while (!stack.empty()) {
        auto& [node, next_child] = stack.back();
        if (next_child < children_[node].size()) {
            std::size_t child = children_[node][next_child++];
            stack.emplace_back(child, 0);
        } else {
            post_order_.push_back(node);
            stack.pop_back();
        }
    }
    if (post_order_.size() != p)
        throw std::invalid_argument("RoutingTree: parent map does not form a spanning tree");
}

RoutingTree build_routing_tree(const SensorField& field, double radio_range, SensorId root_id) {
    return build_routing_tree(field, build_neighborhoods(field, radio_range), root_id);
}

RoutingTree build_routing_tree(const SensorField& field, const Neighborhoods& nbh,
                               SensorId root_id) {
    const std::size_t p = field.size();
    const std::size_t root = field.index_of(root_id);

    constexpr std::size_t kUnreached = static_cast<std::size_t>(-1);
    std::vector<std::size_t> hop(p, kUnreached);
    hop[root] = 0;
    std::deque<std::size_t> queue{root};
    while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v : nbh.of(u))
            if (hop[v] == kUnreached) {
                hop[v] = hop[u] + 1;
                queue.push_back(v);
            }
    }

    std::vector<SensorId> unreachable;
    for (std::size_t v = 0; v < p; ++v)
        if (hop[v] == kUnreached) unreachable.push_back(field.id_of(v));
    if (!unreachable.empty()) {
        std::ostringstream msg;
        msg << "build_routing_tree: sensors unreachable from root " << root_id
            << " at range " << nbh.radio_range() << ":";
        for (SensorId id : unreachable) msg << ' ' << id;
        throw std::invalid_argument(msg.str());
    }

    // Parent = neighbor one hop closer; ids are unique so the lowest id fully
    // resolves ties among equal-hop candidates.
    std::vector<std::optional<std::size_t>> parent(p);
    for (std::size_t v = 0; v < p; ++v) {
        if (v == root) continue;
        std::optional<std::size_t> best;
        for (std::size_t u : nbh.of(v)) {
            if (hop[u] + 1 != hop[v]) continue;
            if (!best || field.id_of(u) < field.id_of(*best)) best = u;
        }
        parent[v] = *best;
    }

    std::vector<SensorId> ids(p);
    for (std::size_t i = 0; i < p; ++i) ids[i] = field.id_of(i);
    return RoutingTree(std::move(parent), std::move(hop), root, std::move(ids));
}

TreeStats tree_stats(const RoutingTree& tree) {
    const std::size_t p = tree.size();
    TreeStats stats;
    stats.subtree_sizes.assign(p, 1);
    stats.children_counts.assign(p, 0);
    for (std::size_t node : tree.post_order()) {
        stats.children_counts[node] = tree.children(node).size();
        for (std::size_t child : tree.children(node))
            stats.subtree_sizes[node] += stats.subtree_sizes[child];
        stats.depth = std::max(stats.depth, tree.depth(node));
    }
    for (std::size_t i = 0; i < p; ++i)
        if (stats.children_counts[i] > stats.max_children) {
            stats.max_children = stats.children_counts[i];
            stats.max_children_index = i;
        }
    return stats;
}

void save_tree(const RoutingTree& tree, const std::filesystem::path& path) {
    Table t;
    t.header = {"sensor_id", "parent_id", "depth"};
    for (std::size_t i = 0; i < tree.size(); ++i) {
        const auto par = tree.parent(i);
        t.add_row({std::to_string(tree.ids()[i]),
                   par ? std::to_string(tree.ids()[*par]) : std::string(),
                   std::to_string(tree.depth(i))});
    }
    t.write(path);
}

}  // namespace pcag
