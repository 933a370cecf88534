#include "pcag/dist_pim.hpp"

#include <cmath>

#include "pcag/csv.hpp"

namespace pcag {

void PimConfig::validate(std::size_t p) const {
    if (delta <= 0.0) throw std::invalid_argument("PimConfig: delta must be positive");
    if (t_max < 1) throw std::invalid_argument("PimConfig: t_max must be at least 1");
    if (q_target < 1 || static_cast<std::size_t>(q_target) > p)
        throw std::invalid_argument("PimConfig: q_target must be in [1, p]");
}

PimNetwork::PimNetwork(const MaskedCovariance& cov) : mask_(cov.mask) {
    const std::size_t p = cov.matrix.rows();
    nodes_.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        nodes_[i].index = i;
        nodes_[i].cov_row = cov.row(i);
    }
}

Vector PimNetwork::iterate() const {
    Vector v(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) v[i] = nodes_[i].v_local;
    return v;
}

Vector PimNetwork::covariance_diagonal() const {
    Vector d(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) d[i] = nodes_[i].cov_row.at(nodes_[i].index);
    return d;
}

double local_matvec(const PimNodeState& node, const std::map<std::size_t, double>& neighbor_v) {
    if (neighbor_v.size() + 1 != node.cov_row.size())
        throw std::invalid_argument("local_matvec: neighbor value count mismatch at node " +
                                    std::to_string(node.index));
    double s = 0.0;
    for (const auto& [j, c_ij] : node.cov_row) {
        if (j == node.index) {
            s += c_ij * node.v_local;
        } else {
            auto it = neighbor_v.find(j);
            if (it == neighbor_v.end())
                throw std::invalid_argument("local_matvec: missing value from neighbor " +
                                            std::to_string(j));
            s += c_ij * it->second;
        }
    }
    return s;
}

ScalarAggregation aggregate_scalars(const RoutingTree& tree,
                                    const std::vector<std::vector<double>>& per_node) {
    if (per_node.size() != tree.size())
        throw std::invalid_argument("aggregate_scalars: per-node record count mismatch");
    const std::size_t q = per_node.empty() ? 0 : per_node[0].size();
    for (const auto& rec : per_node)
        if (rec.size() != q)
            throw std::invalid_argument("aggregate_scalars: inconsistent record size");

    AggregationSpec spec = sum_spec(static_cast<int>(q), [&per_node](std::size_t node, double) {
        return PartialStateRecord{per_node[node]};
    });
    auto out = run_aggregate_epoch(tree, spec, Vector(tree.size(), 0.0));
    return {std::move(out.result), std::move(out.loads)};
}

namespace {

double aligned_delta(const Vector& prev, const Vector& next) {
    const bool flip = dot(next, prev) < 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < prev.size(); ++i) {
        const double d = (flip ? -next[i] : next[i]) - prev[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Frobenius norm of the masked matrix from the node rows: diagonals appear
// once, off-diagonals at both endpoints, matching the dense symmetric sum.
double mask_zero_tol(const PimNetwork& network) {
    double fro_sq = 0.0;
    for (const auto& node : network.nodes())
        for (const auto& [j, c] : node.cov_row) fro_sq += c * c;
    return 1e-12 * std::max(1.0, std::sqrt(fro_sq));
}

}  // namespace

PimIterationResult pim_iteration(PimNetwork& network, const RoutingTree& tree, int k,
                                 double delta) {
    const std::size_t p = network.size();
    if (tree.size() != p) throw std::invalid_argument("pim_iteration: tree size mismatch");
    if (k < 1) throw std::invalid_argument("pim_iteration: component index must be >= 1");

    auto& nodes = network.nodes();
    for (const auto& node : nodes)
        if (node.w_locals.size() < static_cast<std::size_t>(k - 1))
            throw std::invalid_argument(
                "pim_iteration: components 1.." + std::to_string(k - 1) +
                " must be accepted before iterating component " + std::to_string(k));
    const Vector v_t = network.iterate();

    // Phase 1: neighbor exchange. One broadcast per node, one reception per
    // neighbor.
    LoadReport loads(tree.ids());
    for (std::size_t i = 0; i < p; ++i) {
        loads.nodes[i].tx += 1;
        loads.nodes[i].rx += static_cast<std::int64_t>(network.mask().of(i).size());
    }

    // Phase 2: local mat-vec, in parallel.
    Vector u(p);
    for (std::size_t i = 0; i < p; ++i) {
        std::map<std::size_t, double> heard;
        for (std::size_t j : network.mask().of(i)) heard[j] = v_t[j];
        u[i] = local_matvec(nodes[i], heard);
    }

    // Phase 3: one A operation of record size k. Each node contributes the
    // square of its post-mat-vec entry and its products with the accepted
    // component rows.
    std::vector<std::vector<double>> records(p);
    for (std::size_t i = 0; i < p; ++i) {
        records[i].reserve(k);
        records[i].push_back(u[i] * u[i]);
        for (int l = 0; l + 1 < k; ++l) records[i].push_back(u[i] * nodes[i].w_locals[l]);
    }
    ScalarAggregation agg = aggregate_scalars(tree, records);
    loads += agg.loads;

    PimIterationResult result{Vector(), false, false, 0.0, 0.0, std::move(loads)};
    const double norm = std::sqrt(agg.sums[0]);
    result.norm = norm;
    if (norm <= mask_zero_tol(network)) {
        result.zero_norm = true;
        return result;
    }

    // Phase 4: F operation feeding the k scalars back.
    result.loads += run_feedback(tree, k);

    // Phase 5: local update, in parallel.
    Vector v_next(p);
    for (std::size_t i = 0; i < p; ++i) {
        double orth = u[i];
        for (int l = 0; l + 1 < k; ++l) orth -= agg.sums[static_cast<std::size_t>(l) + 1] *
                                                nodes[i].w_locals[l];
        v_next[i] = orth / norm;
    }
    for (std::size_t i = 0; i < p; ++i) {
        nodes[i].v_prev = v_t[i];
        nodes[i].v_local = v_next[i];
    }

    result.delta_v = aligned_delta(v_t, v_next);
    result.converged = result.delta_v <= delta;
    result.v_next = std::move(v_next);
    return result;
}

DistPimResult run_distributed_pim(PimNetwork& network, const RoutingTree& tree,
                                  const PimConfig& config, Vector mean) {
    const std::size_t p = network.size();
    config.validate(p);
    if (tree.size() != p)
        throw std::invalid_argument("run_distributed_pim: tree size mismatch");

    DistPimResult result;
    result.cumulative_loads = LoadReport(tree.ids());
    auto& nodes = network.nodes();
    const Vector diag = network.covariance_diagonal();

    std::vector<EigenPair> pairs;
    for (int k = 1; k <= config.q_target; ++k) {
        Vector v0 = initial_vector(config.v0_policy, diag, k);
        for (std::size_t i = 0; i < p; ++i) nodes[i].v_local = v0[i];

        bool retried_random = config.v0_policy.kind == InitPolicy::Kind::SeededRandom;
        int t = 0;
        bool zero_norm = false;
        double last_norm = 0.0;
        while (t < config.t_max) {
            PimIterationResult it = pim_iteration(network, tree, k, config.delta);
            result.cumulative_loads += it.loads;
            ++t;
            result.log.push_back({k, t, it.norm, it.delta_v, it.loads.total()});
            if (it.zero_norm) {
                // A diagonal start can be orthogonal to the remaining range;
                // retry once from the seeded random policy before giving up.
                if (!retried_random) {
                    retried_random = true;
                    Vector retry =
                        initial_vector(InitPolicy::random(config.v0_policy.seed + 1), diag, k);
                    for (std::size_t i = 0; i < p; ++i) nodes[i].v_local = retry[i];
                    continue;
                }
                zero_norm = true;
                break;
            }
            last_norm = it.norm;
            if (it.converged) break;
        }
        if (zero_norm) {
            result.stopped_by_zero_norm = true;
            break;
        }
        result.iterations.push_back(t);

        // Sign round: one extra A operation carrying the sign sum of the
        // products between the last two iterates.
        std::vector<std::vector<double>> sign_records(p);
        for (std::size_t i = 0; i < p; ++i) {
            const double prod = nodes[i].v_prev * nodes[i].v_local;
            sign_records[i] = {prod > 0.0 ? 1.0 : (prod < 0.0 ? -1.0 : 0.0)};
        }
        ScalarAggregation sign_agg = aggregate_scalars(tree, sign_records);
        result.cumulative_loads += sign_agg.loads;
        if (sign_agg.sums[0] <= 0.0) {
            result.stopped_by_sign = true;
            break;
        }

        // Normalization round (A + F of one scalar): nodes store the unit-norm
        // component row.
        std::vector<std::vector<double>> sq_records(p);
        for (std::size_t i = 0; i < p; ++i)
            sq_records[i] = {nodes[i].v_local * nodes[i].v_local};
        ScalarAggregation norm_agg = aggregate_scalars(tree, sq_records);
        result.cumulative_loads += norm_agg.loads;
        result.cumulative_loads += run_feedback(tree, 1);
        const double w_norm = std::sqrt(norm_agg.sums[0]);
        Vector w(p);
        for (std::size_t i = 0; i < p; ++i) {
            w[i] = nodes[i].v_local / w_norm;
            nodes[i].w_locals.push_back(w[i]);
        }
        result.eigenvalues.push_back(last_norm);
        pairs.emplace_back(std::move(w), last_norm);
        ++result.accepted;
    }

    if (mean.empty()) mean.assign(p, 0.0);
    result.basis = PcaBasis(std::move(pairs), std::move(mean));
    return result;
}

LoadReport distribute_basis_centralized(const RoutingTree& tree, const PcaBasis& basis) {
    if (basis.q() == 0) return LoadReport(tree.ids());
    const int payload = static_cast<int>(basis.q() * tree.size());
    return analytic_loads(tree, NetworkOp::f(payload));
}

void save_iteration_log(const std::vector<IterationLogEntry>& log,
                        const std::filesystem::path& path) {
    Table t;
    t.header = {"component", "iteration", "norm", "delta_v", "load_total"};
    for (const auto& e : log)
        t.add_row({std::to_string(e.component), std::to_string(e.iteration),
                   format_value(e.norm), format_value(e.delta_v), std::to_string(e.load_total)});
    t.write(path);
}

}  // namespace pcag
