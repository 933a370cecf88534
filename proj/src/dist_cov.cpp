#include "pcag/dist_cov.hpp"

#include "pcag/csv.hpp"

namespace pcag {

NodeCovState::NodeCovState(std::size_t node_index, const std::vector<std::size_t>& neighbors)
    : index(node_index) {
    for (std::size_t j : neighbors) {
        s_neighbors[j] = 0.0;
        s_cross[j] = 0.0;
    }
}

double NodeCovState::covariance_with(std::size_t j) const {
    if (t < 2) return 0.0;
    if (j == index) return cov_entry(s_self_sq, s_self, s_self, t);
    auto cross = s_cross.find(j);
    auto sums = s_neighbors.find(j);
    if (cross == s_cross.end() || sums == s_neighbors.end())
        throw std::invalid_argument("NodeCovState: " + std::to_string(j) +
                                    " is not a neighbor of " + std::to_string(index));
    return cov_entry(cross->second, s_self, sums->second, t);
}

void node_cov_update(NodeCovState& state, double own,
                     const std::map<std::size_t, double>& neighbor_values) {
    if (neighbor_values.size() != state.s_neighbors.size())
        throw std::invalid_argument("node_cov_update: incomplete round at node " +
                                    std::to_string(state.index));
    for (const auto& [j, value] : neighbor_values) {
        if (!state.s_neighbors.count(j))
            throw std::invalid_argument("node_cov_update: node " + std::to_string(state.index) +
                                        " received a value from non-neighbor " +
                                        std::to_string(j));
        state.s_neighbors[j] += value;
        state.s_cross[j] += own * value;
    }
    state.s_self += own;
    state.s_self_sq += own * own;
    ++state.t;
}

std::vector<NodeCovState> make_cov_network(const Neighborhoods& nbh) {
    std::vector<NodeCovState> network;
    network.reserve(nbh.size());
    for (std::size_t i = 0; i < nbh.size(); ++i) network.emplace_back(i, nbh.of(i));
    return network;
}

CovRoundResult run_cov_round(std::vector<NodeCovState>& network, const Neighborhoods& nbh,
                             const Vector& x) {
    if (x.size() != network.size() || network.size() != nbh.size())
        throw std::invalid_argument("run_cov_round: size mismatch");
    LoadReport loads(nbh.ids());
    for (std::size_t i = 0; i < network.size(); ++i) {
        std::map<std::size_t, double> heard;
        for (std::size_t j : nbh.of(i)) heard[j] = x[j];
        node_cov_update(network[i], x[i], heard);
        loads.nodes[i].tx = 1;  // one broadcast of the own measurement
        loads.nodes[i].rx = static_cast<std::int64_t>(nbh.of(i).size());
    }
    return {std::move(loads)};
}

std::map<std::size_t, double> MaskedCovariance::row(std::size_t i) const {
    std::map<std::size_t, double> r;
    r[i] = matrix(i, i);
    for (std::size_t j : mask.of(i)) r[j] = matrix(i, j);
    return r;
}

MaskedCovariance assemble_masked(const std::vector<NodeCovState>& states,
                                 const Neighborhoods& nbh) {
    if (states.size() != nbh.size())
        throw std::invalid_argument("assemble_masked: size mismatch");
    if (states.empty()) throw std::invalid_argument("assemble_masked: empty network");
    const std::int64_t t = states[0].t;
    for (const auto& s : states)
        if (s.t != t)
            throw std::invalid_argument("assemble_masked: node epochs differ (" +
                                        std::to_string(s.t) + " vs " + std::to_string(t) + ")");
    if (t < 2) throw std::invalid_argument("assemble_masked: need at least 2 epochs");

    const std::size_t p = states.size();
    Matrix c(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        c(i, i) = states[i].covariance_with(i);
        for (std::size_t j : nbh.of(i)) {
            if (j < i) continue;  // lower endpoint fills both entries
            const double v = states[i].covariance_with(j);
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return {std::move(c), nbh};
}

MaskedCovariance mask_covariance(const Matrix& dense, const Neighborhoods& nbh) {
    if (dense.rows() != nbh.size() || dense.cols() != nbh.size())
        throw std::invalid_argument("mask_covariance: size mismatch");
    const std::size_t p = nbh.size();
    Matrix c(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        c(i, i) = dense(i, i);
        for (std::size_t j : nbh.of(i)) c(i, j) = dense(i, j);
    }
    return {std::move(c), nbh};
}

void save_masked(const MaskedCovariance& cov, const std::vector<SensorId>& ids,
                 const std::filesystem::path& path) {
    Table t;
    t.header = {"i", "j", "c_ij"};
    for (std::size_t i = 0; i < cov.matrix.rows(); ++i) {
        t.add_row({std::to_string(ids[i]), std::to_string(ids[i]),
                   format_value(cov.matrix(i, i))});
        for (std::size_t j : cov.mask.of(i))
            if (j > i)
                t.add_row({std::to_string(ids[i]), std::to_string(ids[j]),
                           format_value(cov.matrix(i, j))});
    }
    t.write(path);
}

}  // namespace pcag
