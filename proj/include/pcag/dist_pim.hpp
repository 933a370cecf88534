#pragma once

#include "pcag/dist_cov.hpp"
#include "pcag/eigen.hpp"

namespace pcag {

/// What one node holds during the distributed power iteration: its entry of
/// the current iterate, the entry of the previous iterate (for the sign
/// test), its rows of the accepted components, and its local covariance row.
struct PimNodeState {
    std::size_t index = 0;
    double v_local = 0.0;
    double v_prev = 0.0;
    std::vector<double> w_locals;
    std::map<std::size_t, double> cov_row;  // neighbors and self
};

struct PimConfig {
    int q_target = 1;
    double delta = 1e-3;
    int t_max = 50;
    InitPolicy v0_policy = InitPolicy::diagonal();

    void validate(std::size_t p) const;
};

/// The node collection plus the mask that drives the exchange phase.
class PimNetwork {
public:
    explicit PimNetwork(const MaskedCovariance& cov);

    std::size_t size() const { return nodes_.size(); }
    const Neighborhoods& mask() const { return mask_; }
    std::vector<PimNodeState>& nodes() { return nodes_; }
    const std::vector<PimNodeState>& nodes() const { return nodes_; }

    Vector iterate() const;
    Vector covariance_diagonal() const;

private:
    std::vector<PimNodeState> nodes_;
    Neighborhoods mask_;
};

/// Local part of C v: sum of c_ij * v[j] over the node's neighborhood plus
/// itself. `neighbor_v` must hold exactly the neighbors' entries.
double local_matvec(const PimNodeState& node, const std::map<std::size_t, double>& neighbor_v);

struct ScalarAggregation {
    std::vector<double> sums;
    LoadReport loads;
};

/// Componentwise sums of per-node records via one A operation over the tree
/// (record size = vector length). Backs the norm and dot-product phases.
ScalarAggregation aggregate_scalars(const RoutingTree& tree,
                                    const std::vector<std::vector<double>>& per_node);

struct PimIterationResult {
    Vector v_next;
    bool converged = false;
    bool zero_norm = false;
    double norm = 0.0;     // aggregated ||C v|| before orthogonalization
    double delta_v = 0.0;  // sign-aligned change between iterates
    LoadReport loads;
};

/// One synchronized iteration for component k (1-based): neighbor exchange,
/// parallel local mat-vec, one A operation of record size k carrying the
/// squared entries and the k-1 deflation products of the post-mat-vec vector,
/// one F operation feeding the k scalars back, then the parallel local update
///   v[i] <- (u[i] - sum_l d_l w_l[i]) / ||u||.
PimIterationResult pim_iteration(PimNetwork& network, const RoutingTree& tree, int k,
                                 double delta);

struct IterationLogEntry {
    int component = 0;
    int iteration = 0;
    double norm = 0.0;
    double delta_v = 0.0;
    std::int64_t load_total = 0;
};

struct DistPimResult {
    PcaBasis basis;                    // assembled from the node-held rows
    std::vector<int> iterations;       // per attempted component
    std::vector<double> eigenvalues;   // per accepted component
    LoadReport cumulative_loads;
    std::vector<IterationLogEntry> log;
    int accepted = 0;
    bool stopped_by_sign = false;
    bool stopped_by_zero_norm = false;
};

/// Algorithm outer loop: components are computed until q_target is reached or
/// the aggregated sign test reports a nonpositive eigenvalue. After the delta
/// test passes, one extra A operation carries the sign sum and one A+F round
/// normalizes the accepted component in place at the nodes.
DistPimResult run_distributed_pim(PimNetwork& network, const RoutingTree& tree,
                                  const PimConfig& config, Vector mean = {});

/// Load of the centralized alternative: flooding all q*p basis coefficients
/// from the root (F operation with payload q*p).
LoadReport distribute_basis_centralized(const RoutingTree& tree, const PcaBasis& basis);

void save_iteration_log(const std::vector<IterationLogEntry>& log,
                        const std::filesystem::path& path);

}  // namespace pcag
