#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "pcag/linalg.hpp"

namespace pcag {

using SensorId = int;

struct Sensor {
    SensorId id = 0;
    double x = 0.0;  // meters
    double y = 0.0;  // meters
};

/// Sensor positions plus the designated root. Sensors are kept sorted by id;
/// the position in that order is the dense index used by every vector and
/// matrix in the pipeline.
class SensorField {
public:
    SensorField(std::vector<Sensor> sensors, SensorId root_id);

    std::size_t size() const { return sensors_.size(); }
    const std::vector<Sensor>& sensors() const { return sensors_; }
    SensorId root_id() const { return root_id_; }
    std::size_t root_index() const { return index_of(root_id_); }

    std::size_t index_of(SensorId id) const;
    SensorId id_of(std::size_t index) const { return sensors_.at(index).id; }

    double distance(std::size_t i, std::size_t j) const;

private:
    std::vector<Sensor> sensors_;
    SensorId root_id_;
};

SensorField load_positions(const std::filesystem::path& path, SensorId root_id);
void save_positions(const SensorField& field, const std::filesystem::path& path);

/// Radio-range neighborhoods: per-sensor sorted list of in-range indices,
/// excluding the sensor itself. Symmetric by construction.
class Neighborhoods {
public:
    Neighborhoods(std::vector<std::vector<std::size_t>> lists, double radio_range,
                  std::vector<SensorId> ids);

    /// Complete graph over p nodes (every pair in range); used where the
    /// local covariance hypothesis is switched off.
    static Neighborhoods complete(std::size_t p);

    std::size_t size() const { return lists_.size(); }
    double radio_range() const { return radio_range_; }
    const std::vector<std::size_t>& of(std::size_t index) const { return lists_.at(index); }
    const std::vector<SensorId>& ids() const { return ids_; }

    std::size_t max_degree() const;
    std::size_t max_degree_index() const;  // i_N[*]

private:
    std::vector<std::vector<std::size_t>> lists_;
    double radio_range_;
    std::vector<SensorId> ids_;
};

Neighborhoods build_neighborhoods(const SensorField& field, double radio_range);

/// Shortest-hop routing tree over the neighborhood graph. Each node's parent
/// is the lowest-id neighbor one hop closer to the root.
class RoutingTree {
public:
    RoutingTree(std::vector<std::optional<std::size_t>> parent,
                std::vector<std::size_t> depth, std::size_t root,
                std::vector<SensorId> ids);

    std::size_t size() const { return parent_.size(); }
    std::size_t root() const { return root_; }
    const std::vector<SensorId>& ids() const { return ids_; }
    std::optional<std::size_t> parent(std::size_t index) const { return parent_.at(index); }
    const std::vector<std::size_t>& children(std::size_t index) const {
        return children_.at(index);
    }
    std::size_t depth(std::size_t index) const { return depth_.at(index); }

    /// Node indices ordered so that every child precedes its parent.
    const std::vector<std::size_t>& post_order() const { return post_order_; }

private:
    std::vector<std::optional<std::size_t>> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> depth_;
    std::size_t root_;
    std::vector<SensorId> ids_;
    std::vector<std::size_t> post_order_;
};

RoutingTree build_routing_tree(const SensorField& field, double radio_range, SensorId root_id);
RoutingTree build_routing_tree(const SensorField& field, const Neighborhoods& nbh,
                               SensorId root_id);

struct TreeStats {
    std::vector<std::size_t> subtree_sizes;   // RT_i
    std::vector<std::size_t> children_counts; // C_i
    std::size_t max_children = 0;             // C at i_C[*]
    std::size_t max_children_index = 0;       // i_C[*]
    std::size_t depth = 0;
};

TreeStats tree_stats(const RoutingTree& tree);

void save_tree(const RoutingTree& tree, const std::filesystem::path& path);

}  // namespace pcag
