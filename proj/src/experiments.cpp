#include "pcag/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "pcag/covariance.hpp"
#include "pcag/pca.hpp"

namespace pcag {

Dataset dataset_from_trace(const EpochTrace& trace) {
    Dataset data;
    data.ids = trace.sensor_ids;
    data.epochs.reserve(trace.T());
    for (std::size_t t = 0; t < trace.T(); ++t) data.epochs.push_back(trace.epoch_vector(t));
    return data;
}

std::vector<FoldSplit> kfold_split(std::size_t T, int K) {
    if (K < 2) throw std::invalid_argument("kfold_split: K must be at least 2");
    if (T < static_cast<std::size_t>(K))
        throw std::invalid_argument("kfold_split: fewer epochs than folds");
    std::vector<FoldSplit> folds(K);
    const std::size_t base = T / static_cast<std::size_t>(K);
    const std::size_t extra = T % static_cast<std::size_t>(K);
    std::size_t begin = 0;
    for (int k = 0; k < K; ++k) {
        const std::size_t len = base + (static_cast<std::size_t>(k) < extra ? 1 : 0);
        folds[k] = {begin, begin + len};
        begin += len;
    }
    return folds;
}

std::vector<Vector> train_view(const Dataset& data, const FoldSplit& fold) {
    return {data.epochs.begin() + static_cast<std::ptrdiff_t>(fold.train_begin),
            data.epochs.begin() + static_cast<std::ptrdiff_t>(fold.train_end)};
}

std::vector<Vector> test_view(const Dataset& data, const FoldSplit& fold) {
    std::vector<Vector> out;
    out.reserve(data.T() - (fold.train_end - fold.train_begin));
    for (std::size_t t = 0; t < data.T(); ++t)
        if (t < fold.train_begin || t >= fold.train_end) out.push_back(data.epochs[t]);
    return out;
}

void MetricsReport::write_all(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, table] : tables) table.write(dir / (name + ".csv"));
}

BasisMethod basis_method_from_string(const std::string& s) {
    if (s == "reference") return BasisMethod::Reference;
    if (s == "pim") return BasisMethod::Pim;
    if (s == "distributed") return BasisMethod::Distributed;
    throw std::invalid_argument("basis_method must be reference|pim|distributed, got '" + s +
                                "'");
}

ClampedValue clamp_retained(double raw) {
    const double v = std::clamp(raw, 0.0, 1.0);
    return {v, raw - v};
}

namespace {

/// Top pairs of a reference decomposition with negative eigenvalues dropped.
std::vector<EigenPair> reference_top_pairs(const Matrix& cov, int q) {
    auto spectrum = reference_eigendecomposition(cov);
    std::vector<EigenPair> top;
    for (const auto& pr : spectrum) {
        if (static_cast<int>(top.size()) == q) break;
        if (pr.value < 0.0) break;  // sorted descending: the rest are negative too
        top.push_back(pr);
    }
    return top;
}

}  // namespace

PcaBasis train_basis(std::span<const Vector> train, int q, BasisMethod method, double delta,
                     int t_max, const InitPolicy& policy, const Neighborhoods* mask,
                     const RoutingTree* tree) {
    if (train.size() < 2)
        throw std::invalid_argument("train_basis: need at least 2 training epochs");
    Matrix cov = covariance_batch(train);
    Vector mean = mean_vector(train);

    if (mask) {
        MaskedCovariance masked = mask_covariance(cov, *mask);
        if (method == BasisMethod::Distributed) {
            if (!tree)
                throw std::invalid_argument("train_basis: distributed method needs a tree");
            PimNetwork network(masked);
            PimConfig cfg{q, delta, t_max, policy};
            return run_distributed_pim(network, *tree, cfg, std::move(mean)).basis;
        }
        if (method == BasisMethod::Pim)
            return compute_basis(masked.matrix, q, delta, t_max, policy, std::move(mean));
        return PcaBasis(reference_top_pairs(masked.matrix, q), std::move(mean));
    }

    switch (method) {
        case BasisMethod::Reference:
            return PcaBasis(reference_top_pairs(cov, q), std::move(mean));
        case BasisMethod::Pim:
            return compute_basis(cov, q, delta, t_max, policy, std::move(mean));
        case BasisMethod::Distributed: {
            if (!tree)
                throw std::invalid_argument("train_basis: distributed method needs a tree");
            MaskedCovariance full = mask_covariance(cov, Neighborhoods::complete(cov.rows()));
            PimNetwork network(full);
            PimConfig cfg{q, delta, t_max, policy};
            return run_distributed_pim(network, *tree, cfg, std::move(mean)).basis;
        }
    }
    throw std::logic_error("train_basis: unreachable");
}

namespace {

/// Retained variance of the first q components of a (possibly longer) basis;
/// uses all available components when fewer than q were accepted.
double truncated_rv(const PcaBasis& basis, std::span<const Vector> test, int q) {
    const auto use = std::min<std::size_t>(static_cast<std::size_t>(q), basis.q());
    if (use == basis.q()) return empirical_retained_variance(basis, test);
    std::vector<EigenPair> head(basis.pairs.begin(),
                                basis.pairs.begin() + static_cast<std::ptrdiff_t>(use));
    PcaBasis truncated(std::move(head), basis.mean);
    return empirical_retained_variance(truncated, test);
}

int max_of(const std::vector<int>& v) { return *std::max_element(v.begin(), v.end()); }

}  // namespace

MetricsReport xval_retained_variance(const Dataset& data, const XvalOptions& opt) {
    if (opt.components.empty())
        throw std::invalid_argument("xval_retained_variance: no component counts given");
    if (!opt.masked_ranges.empty() && opt.field == nullptr)
        throw std::invalid_argument("xval_retained_variance: masked ranges need the field");
    const int q_max = max_of(opt.components);
    const auto folds = kfold_split(data.T(), opt.folds);
    // The distributed path starts from the covariance diagonal; the
    // centralized paths use the seeded random start.
    const InitPolicy policy = opt.method == BasisMethod::Distributed
                                  ? InitPolicy::diagonal()
                                  : InitPolicy::random(opt.seed);

    MetricsReport report;
    Table per_fold;
    per_fold.header = {"q", "fold", "test_value", "test_clamp_residual", "upper_value",
                       "upper_clamp_residual"};
    Table mean_table;
    mean_table.header = {"q", "mean_test", "mean_upper"};

    std::vector<std::vector<double>> test_rv(opt.components.size());
    std::vector<std::vector<double>> upper_rv(opt.components.size());
    for (int k = 0; k < opt.folds; ++k) {
        auto train = train_view(data, folds[static_cast<std::size_t>(k)]);
        auto test = test_view(data, folds[static_cast<std::size_t>(k)]);
        PcaBasis basis =
            train_basis(train, q_max, opt.method, opt.delta, opt.t_max, policy);
        PcaBasis upper_basis = train_basis(test, q_max, BasisMethod::Reference, opt.delta,
                                           opt.t_max, policy);
        for (std::size_t qi = 0; qi < opt.components.size(); ++qi) {
            const int q = opt.components[qi];
            test_rv[qi].push_back(truncated_rv(basis, test, q));
            upper_rv[qi].push_back(truncated_rv(upper_basis, test, q));
        }
    }
    for (std::size_t qi = 0; qi < opt.components.size(); ++qi) {
        double sum_t = 0.0, sum_u = 0.0;
        for (int k = 0; k < opt.folds; ++k) {
            const auto t = clamp_retained(test_rv[qi][static_cast<std::size_t>(k)]);
            const auto u = clamp_retained(upper_rv[qi][static_cast<std::size_t>(k)]);
            per_fold.add_row({std::to_string(opt.components[qi]), std::to_string(k),
                              format_value(t.value), format_value(t.residual),
                              format_value(u.value), format_value(u.residual)});
            sum_t += t.value;
            sum_u += u.value;
        }
        mean_table.add_row({std::to_string(opt.components[qi]),
                            format_value(sum_t / opt.folds), format_value(sum_u / opt.folds)});
    }
    report.tables["fig9_retained_variance"] = std::move(per_fold);
    report.tables["fig9_mean"] = std::move(mean_table);

    if (!opt.masked_ranges.empty()) {
        Table masked;
        masked.header = {"range", "q", "fold", "value", "clamp_residual"};
        Table masked_mean;
        masked_mean.header = {"range", "q", "mean_value", "mean_upper", "exceeds_upper"};
        for (double range : opt.masked_ranges) {
            Neighborhoods nbh = build_neighborhoods(*opt.field, range);
            std::optional<RoutingTree> tree;
            if (opt.method == BasisMethod::Distributed)
                tree.emplace(build_routing_tree(*opt.field, nbh, opt.root_id));
            std::vector<std::vector<double>> rv(opt.components.size());
            for (int k = 0; k < opt.folds; ++k) {
                auto train = train_view(data, folds[static_cast<std::size_t>(k)]);
                auto test = test_view(data, folds[static_cast<std::size_t>(k)]);
                PcaBasis basis = train_basis(train, q_max, opt.method, opt.delta, opt.t_max,
                                             policy, &nbh, tree ? &*tree : nullptr);
                for (std::size_t qi = 0; qi < opt.components.size(); ++qi)
                    rv[qi].push_back(truncated_rv(basis, test, opt.components[qi]));
            }
            for (std::size_t qi = 0; qi < opt.components.size(); ++qi) {
                double sum = 0.0;
                for (int k = 0; k < opt.folds; ++k) {
                    const auto c = clamp_retained(rv[qi][static_cast<std::size_t>(k)]);
                    masked.add_row({format_value(range), std::to_string(opt.components[qi]),
                                    std::to_string(k), format_value(c.value),
                                    format_value(c.residual)});
                    sum += c.value;
                }
                const double mean_masked = sum / opt.folds;
                double mean_upper = 0.0;
                for (int k = 0; k < opt.folds; ++k)
                    mean_upper +=
                        clamp_retained(upper_rv[qi][static_cast<std::size_t>(k)]).value;
                mean_upper /= opt.folds;
                masked_mean.add_row({format_value(range), std::to_string(opt.components[qi]),
                                     format_value(mean_masked), format_value(mean_upper),
                                     mean_masked > mean_upper + 1e-9 ? "1" : "0"});
            }
        }
        report.tables["fig12_masked_retained"] = std::move(masked);
        report.tables["fig12_mean"] = std::move(masked_mean);
    }

    if (!opt.fold_sweep.empty()) {
        Table sweep;
        sweep.header = {"K", "q", "mean_value"};
        for (int K : opt.fold_sweep) {
            const auto kfolds = kfold_split(data.T(), K);
            std::vector<double> sums(opt.components.size(), 0.0);
            for (int k = 0; k < K; ++k) {
                auto train = train_view(data, kfolds[static_cast<std::size_t>(k)]);
                auto test = test_view(data, kfolds[static_cast<std::size_t>(k)]);
                PcaBasis basis =
                    train_basis(train, q_max, opt.method, opt.delta, opt.t_max, policy);
                for (std::size_t qi = 0; qi < opt.components.size(); ++qi)
                    sums[qi] +=
                        clamp_retained(truncated_rv(basis, test, opt.components[qi])).value;
            }
            for (std::size_t qi = 0; qi < opt.components.size(); ++qi)
                sweep.add_row({std::to_string(K), std::to_string(opt.components[qi]),
                               format_value(sums[qi] / K)});
        }
        report.tables["ksweep_retained"] = std::move(sweep);
    }
    return report;
}

MetricsReport pim_accuracy_study(const Dataset& data, const PimAccuracyOptions& opt) {
    if (opt.components.empty())
        throw std::invalid_argument("pim_accuracy_study: no component counts given");
    if (opt.budgets.empty())
        throw std::invalid_argument("pim_accuracy_study: no iteration budgets given");
    const int q_max = max_of(opt.components);
    const auto folds = kfold_split(data.T(), opt.folds);
    const InitPolicy policy = InitPolicy::random(opt.seed);

    // reference and per-budget retained variance per fold and q
    std::vector<std::vector<double>> ref_rv(opt.components.size());
    std::map<int, std::vector<std::vector<double>>> pim_rv;
    for (int budget : opt.budgets)
        pim_rv[budget] = std::vector<std::vector<double>>(opt.components.size());

    for (int k = 0; k < opt.folds; ++k) {
        auto train = train_view(data, folds[static_cast<std::size_t>(k)]);
        auto test = test_view(data, folds[static_cast<std::size_t>(k)]);
        PcaBasis reference = train_basis(train, q_max, BasisMethod::Reference, opt.delta,
                                         1, policy);
        for (std::size_t qi = 0; qi < opt.components.size(); ++qi)
            ref_rv[qi].push_back(truncated_rv(reference, test, opt.components[qi]));
        for (int budget : opt.budgets) {
            PcaBasis approx =
                train_basis(train, q_max, BasisMethod::Pim, opt.delta, budget, policy);
            for (std::size_t qi = 0; qi < opt.components.size(); ++qi)
                pim_rv[budget][qi].push_back(truncated_rv(approx, test, opt.components[qi]));
        }
    }

    Table t;
    t.header = {"budget", "q", "mean_diff", "std_diff"};
    for (int budget : opt.budgets) {
        for (std::size_t qi = 0; qi < opt.components.size(); ++qi) {
            double sum = 0.0, sum_sq = 0.0;
            for (int k = 0; k < opt.folds; ++k) {
                const double d = ref_rv[qi][static_cast<std::size_t>(k)] -
                                 pim_rv[budget][qi][static_cast<std::size_t>(k)];
                sum += d;
                sum_sq += d * d;
            }
            const double mean = sum / opt.folds;
            const double var = std::max(0.0, sum_sq / opt.folds - mean * mean);
            t.add_row({std::to_string(budget), std::to_string(opt.components[qi]),
                       format_value(mean), format_value(std::sqrt(var))});
        }
    }
    MetricsReport report;
    report.tables["fig14_pim_accuracy"] = std::move(t);
    return report;
}

MetricsReport load_study(const SensorField& field, const Dataset& data,
                         const LoadStudyOptions& opt) {
    if (opt.ranges.empty()) throw std::invalid_argument("load_study: no ranges given");
    MetricsReport report;
    Table per_node;
    per_node.header = {"range", "op", "q", "sensor_id", "rx", "tx", "total"};
    Table overall;
    overall.header = {"range", "op", "q", "total", "max_node"};
    Table cov_loads;
    cov_loads.header = {"range", "sensor_id", "load"};
    Table skipped;
    skipped.header = {"range", "reason"};

    auto emit = [&per_node, &overall](double range, const char* op, int q,
                                      const LoadReport& loads) {
        for (std::size_t i = 0; i < loads.nodes.size(); ++i)
            per_node.add_row({format_value(range), op, std::to_string(q),
                              std::to_string(loads.ids[i]), std::to_string(loads.nodes[i].rx),
                              std::to_string(loads.nodes[i].tx),
                              std::to_string(loads.nodes[i].total())});
        overall.add_row({format_value(range), op, std::to_string(q),
                         std::to_string(loads.total()), std::to_string(loads.max_node_load())});
    };

    for (double range : opt.ranges) {
        Neighborhoods nbh = build_neighborhoods(field, range);
        std::optional<RoutingTree> tree;
        try {
            tree.emplace(build_routing_tree(field, nbh, opt.root_id));
        } catch (const std::invalid_argument& e) {
            skipped.add_row({format_value(range), e.what()});
            continue;
        }
        emit(range, "D", 1, analytic_loads(*tree, NetworkOp::d()));
        for (int q : opt.components)
            emit(range, "A", q, analytic_loads(*tree, NetworkOp::a(q)));
        // covariance update round: 1 tx + |N_i| rx per node
        for (std::size_t i = 0; i < nbh.size(); ++i)
            cov_loads.add_row({format_value(range), std::to_string(nbh.ids()[i]),
                               std::to_string(1 + nbh.of(i).size())});
    }

    report.tables["fig10_loads"] = std::move(per_node);
    report.tables["fig11_overall"] = std::move(overall);
    report.tables["fig13_cov_loads"] = std::move(cov_loads);
    if (!skipped.rows.empty()) report.tables["skipped_ranges"] = std::move(skipped);

    // Cumulative distributed-PIM loads per component count on the configured
    // range, driven by the dataset (iteration counts come from real runs).
    if (opt.pim_q > 0 && data.T() >= 2) {
        Neighborhoods nbh = build_neighborhoods(field, opt.pim_range);
        RoutingTree tree = build_routing_tree(field, nbh, opt.root_id);
        const std::size_t cov_epochs =
            opt.cov_epochs > 0 ? std::min(opt.cov_epochs, data.T()) : data.T();
        std::vector<Vector> train(data.epochs.begin(),
                                  data.epochs.begin() +
                                      static_cast<std::ptrdiff_t>(cov_epochs));
        MaskedCovariance masked = mask_covariance(covariance_batch(train), nbh);

        Table pim_nodes;
        pim_nodes.header = {"q", "sensor_id", "rx", "tx", "total"};
        Table pim_summary;
        pim_summary.header = {"q", "accepted", "iterations_total", "total", "mean_node",
                              "max_node"};
        for (int q = 1; q <= opt.pim_q; ++q) {
            PimNetwork network(masked);
            PimConfig cfg = opt.pim;
            cfg.q_target = q;
            DistPimResult result = run_distributed_pim(network, tree, cfg);
            for (std::size_t i = 0; i < result.cumulative_loads.nodes.size(); ++i)
                pim_nodes.add_row({std::to_string(q),
                                   std::to_string(result.cumulative_loads.ids[i]),
                                   std::to_string(result.cumulative_loads.nodes[i].rx),
                                   std::to_string(result.cumulative_loads.nodes[i].tx),
                                   std::to_string(result.cumulative_loads.nodes[i].total())});
            int iter_total = 0;
            for (int n : result.iterations) iter_total += n;
            pim_summary.add_row({std::to_string(q), std::to_string(result.accepted),
                                 std::to_string(iter_total),
                                 std::to_string(result.cumulative_loads.total()),
                                 format_value(result.cumulative_loads.mean_node_load()),
                                 std::to_string(result.cumulative_loads.max_node_load())});
        }
        report.tables["fig15_pim_loads"] = std::move(pim_nodes);
        report.tables["fig15_summary"] = std::move(pim_summary);
    }
    return report;
}

}  // namespace pcag
