#pragma once

#include <map>
#include <optional>

#include "pcag/csv.hpp"
#include "pcag/dist_pim.hpp"
#include "pcag/trace.hpp"

namespace pcag {

/// Measurement vectors in epoch order, one Vector per epoch.
struct Dataset {
    std::vector<Vector> epochs;
    std::vector<SensorId> ids;

    std::size_t p() const { return ids.size(); }
    std::size_t T() const { return epochs.size(); }
};

Dataset dataset_from_trace(const EpochTrace& trace);

/// Consecutive training block [train_begin, train_end); everything else is
/// the test set of that fold.
struct FoldSplit {
    std::size_t train_begin = 0;
    std::size_t train_end = 0;
};

/// K consecutive, disjoint, exhaustive blocks over T epochs. Block k is the
/// training set of fold k; the complement is its test set.
std::vector<FoldSplit> kfold_split(std::size_t T, int K);

std::vector<Vector> train_view(const Dataset& data, const FoldSplit& fold);
std::vector<Vector> test_view(const Dataset& data, const FoldSplit& fold);

/// Named tables, one per output CSV.
struct MetricsReport {
    std::map<std::string, Table> tables;

    void write_all(const std::filesystem::path& dir) const;
};

enum class BasisMethod { Reference, Pim, Distributed };

BasisMethod basis_method_from_string(const std::string& s);

/// Builds a PCA basis from training epochs: reference eigendecomposition or
/// power iteration (centralized or simulated distributed), optionally on the
/// neighborhood-masked covariance. Negative-eigenvalue components are
/// discarded; the basis may end up shorter than q.
PcaBasis train_basis(std::span<const Vector> train, int q, BasisMethod method, double delta,
                     int t_max, const InitPolicy& policy,
                     const Neighborhoods* mask = nullptr, const RoutingTree* tree = nullptr);

struct XvalOptions {
    int folds = 10;
    std::vector<int> components;
    BasisMethod method = BasisMethod::Reference;
    double delta = 1e-3;
    int t_max = 100;
    std::uint64_t seed = 1;
    std::vector<double> masked_ranges;  // adds the masked-covariance tables
    const SensorField* field = nullptr; // required when masked_ranges set
    SensorId root_id = 0;
    std::vector<int> fold_sweep;        // optional K sweep, reported only
};

/// Cross-validated retained variance per component count, with the
/// train-on-test upper bound; optionally repeated on masked covariances per
/// radio range and over a sweep of fold counts.
MetricsReport xval_retained_variance(const Dataset& data, const XvalOptions& opt);

struct PimAccuracyOptions {
    int folds = 10;
    std::vector<int> budgets{5, 10, 20, 30, 40, 50};
    std::vector<int> components;
    double delta = 1e-3;
    std::uint64_t seed = 1;
};

/// Difference in test retained variance between the reference-decomposition
/// basis and the budget-limited power-iteration basis, averaged over folds.
MetricsReport pim_accuracy_study(const Dataset& data, const PimAccuracyOptions& opt);

struct LoadStudyOptions {
    std::vector<double> ranges;
    std::vector<int> components{1, 5, 15};
    SensorId root_id = 0;
    double pim_range = 10.0;  // range used for the distributed-PIM cost table
    int pim_q = 15;
    PimConfig pim;
    std::size_t cov_epochs = 0;  // epochs of covariance collection before PIM
};

/// Per-range default vs aggregation load distributions, covariance-round
/// loads, and cumulative distributed-PIM loads per component count on the
/// configured range. Disconnected ranges are recorded and skipped.
MetricsReport load_study(const SensorField& field, const Dataset& data,
                         const LoadStudyOptions& opt);

/// Clamp into [0, 1]; the clipped amount is reported alongside the value.
struct ClampedValue {
    double value = 0.0;
    double residual = 0.0;
};
ClampedValue clamp_retained(double raw);

}  // namespace pcag
