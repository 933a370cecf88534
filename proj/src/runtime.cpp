#include "pcag/runtime.hpp"

#include <cmath>

namespace pcag {

std::vector<NodeBasisRow> make_basis_rows(const PcaBasis& basis,
                                          const std::vector<SensorId>& ids,
                                          std::optional<double> epsilon) {
    if (ids.size() != basis.p())
        throw std::invalid_argument("make_basis_rows: id count does not match basis dimension");
    if (basis.q() < 1)
        throw std::invalid_argument("make_basis_rows: basis has no components");
    if (epsilon && *epsilon < 0.0)
        throw std::invalid_argument("make_basis_rows: epsilon must be nonnegative");
    std::vector<NodeBasisRow> rows(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        rows[i].sensor_id = ids[i];
        rows[i].mean = basis.mean[i];
        rows[i].epsilon = epsilon;
        rows[i].coefficients.resize(basis.q());
        for (std::size_t k = 0; k < basis.q(); ++k)
            rows[i].coefficients[k] = basis.pairs[k].vector[i];
    }
    return rows;
}

ScoreEpochResult score_epoch(const RoutingTree& tree, const std::vector<NodeBasisRow>& rows,
                             const Vector& x, std::optional<int> q_use) {
    if (rows.size() != tree.size())
        throw std::invalid_argument("score_epoch: rows must cover all nodes");
    if (x.size() != tree.size())
        throw std::invalid_argument("score_epoch: measurement count mismatch");
    const std::size_t q_full = rows.empty() ? 0 : rows[0].coefficients.size();
    for (const auto& r : rows)
        if (r.coefficients.size() != q_full)
            throw std::invalid_argument("score_epoch: inconsistent row widths");
    std::size_t q = q_full;
    if (q_use) {
        if (*q_use < 1 || static_cast<std::size_t>(*q_use) > q_full)
            throw std::invalid_argument("score_epoch: q_use out of range");
        q = static_cast<std::size_t>(*q_use);
    }

    AggregationSpec spec = sum_spec(
        static_cast<int>(q), [&rows, q](std::size_t node, double measurement) {
            const NodeBasisRow& row = rows[node];
            PartialStateRecord rec;
            rec.payload.resize(q);
            const double centered = measurement - row.mean;
            for (std::size_t k = 0; k < q; ++k) rec.payload[k] = row.coefficients[k] * centered;
            return rec;
        });
    auto out = run_aggregate_epoch(tree, spec, x);
    return {std::move(out.result), std::move(out.loads)};
}

Vector sink_reconstruct(const PcaBasis& basis, const Vector& z) {
    if (z.size() != basis.q())
        throw std::invalid_argument("sink_reconstruct: score length mismatch");
    return reconstruct(basis.matrix(), z, basis.mean);
}

std::optional<Violation> supervised_check(const NodeBasisRow& row, const Vector& z_feedback,
                                          double x_actual) {
    if (!row.epsilon)
        throw std::invalid_argument("supervised_check: epsilon not configured");
    if (z_feedback.size() != row.coefficients.size())
        throw std::invalid_argument("supervised_check: score length mismatch");
    // Same expression as reconstruct(): k-ordered sum, then the mean.
    double s = 0.0;
    for (std::size_t k = 0; k < z_feedback.size(); ++k) s += z_feedback[k] * row.coefficients[k];
    const double x_hat = s + row.mean;
    const double error = std::abs(x_hat - x_actual);
    if (error > *row.epsilon) return Violation{row.sensor_id, error};
    return std::nullopt;
}

SupervisedEpochResult run_supervised_epoch(const RoutingTree& tree,
                                           const std::vector<NodeBasisRow>& rows,
                                           const PcaBasis& basis, const Vector& x) {
    ScoreEpochResult scored = score_epoch(tree, rows, x);
    SupervisedEpochResult out;
    out.loads = std::move(scored.loads);
    out.loads += run_feedback(tree, static_cast<int>(scored.z.size()));
    out.sink_view = sink_reconstruct(basis, scored.z);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto violation = supervised_check(rows[i], scored.z, x[i]);
        if (!violation) continue;
        out.violations.push_back(*violation);
        // The violator pushes its raw measurement up the tree: one packet per
        // hop, received and re-transmitted by every ancestor, then handed to
        // the base station by the root.
        out.sink_view[i] = x[i];
        std::size_t node = i;
        out.loads.nodes[node].tx += 1;
        while (auto parent = tree.parent(node)) {
            node = *parent;
            out.loads.nodes[node].rx += 1;
            out.loads.nodes[node].tx += 1;
        }
    }
    out.z = std::move(scored.z);
    return out;
}

}  // namespace pcag
