#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aq/geo.hpp"

namespace aq::forest {

// --- feature schema ----------------------------------------------------------------

/// Covariates of the regression-kriging mean model: five co-pollutants plus
/// the station coordinates.
inline constexpr std::size_t kFeatureCount = 7;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "no", "no2", "nox", "co", "pm10", "east", "north"};

struct FeatureRow {
    std::array<std::optional<double>, 5> pollutants{};  // no, no2, nox, co, pm10
    double east = 0.0;                                  // longitude
    double north = 0.0;                                 // latitude

    [[nodiscard]] GeoPoint location() const { return {east, north}; }
    /// Dense feature vector in kFeatureNames order, NaN for missing pollutants.
    [[nodiscard]] std::array<double, kFeatureCount> to_array() const;
    /// Throws InvalidArgument unless coordinates are finite and one pollutant is present.
    void validate() const;
};

/// Row-major feature matrix; NaN marks a missing value.
struct Dataset {
    std::size_t n_features = 0;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::string> feature_names;

    [[nodiscard]] std::size_t n_rows() const { return y.size(); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span<const double>(x).subspan(i * n_features, n_features);
    }
};

struct LabeledRow {
    FeatureRow features;
    double target = 0.0;
};

[[nodiscard]] Dataset make_dataset(std::span<const LabeledRow> rows);

// --- model -----------------------------------------------------------------------------

struct ForestConfig {
    std::size_t ntree = 1000;
    std::optional<std::size_t> mtry;  // default max(1, n_features / 3)
    std::size_t min_leaf = 5;
    std::optional<std::size_t> max_depth;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t resolved_mtry(std::size_t n_features) const;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 for leaves
    double threshold = 0.0;     // left when x <= threshold
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    bool missing_left = true;   // where rows lacking the feature go
    double value = 0.0;         // mean of in-bag targets reaching the node
};

class RegressionTree {
public:
    RegressionTree() = default;
    RegressionTree(std::vector<TreeNode> nodes, std::vector<double> impurity_decrease)
        : nodes_(std::move(nodes)), decrease_(std::move(impurity_decrease)) {}

    [[nodiscard]] double predict(std::span<const double> x) const;
    [[nodiscard]] std::span<const TreeNode> nodes() const { return nodes_; }
    /// Total variance-impurity decrease per feature over this tree's splits.
    [[nodiscard]] std::span<const double> impurity_decrease() const { return decrease_; }

private:
    std::vector<TreeNode> nodes_;
    std::vector<double> decrease_;
};

class RegressionForest {
public:
    RegressionForest(ForestConfig config, std::vector<std::string> feature_names,
                     std::vector<RegressionTree> trees, std::vector<double> targets,
                     std::vector<std::optional<double>> oob_predictions);

    /// Mean of per-tree leaf means. Throws SchemaMismatch on a wrong-length row.
    [[nodiscard]] double predict(std::span<const double> x) const;
    /// Requires a forest trained on the FeatureRow schema.
    [[nodiscard]] double predict(const FeatureRow& row) const;

    [[nodiscard]] const ForestConfig& config() const { return config_; }
    [[nodiscard]] std::span<const std::string> feature_names() const { return names_; }
    [[nodiscard]] std::span<const RegressionTree> trees() const { return trees_; }
    [[nodiscard]] std::span<const double> targets() const { return targets_; }
    /// Mean over trees whose bootstrap left the row out; absent when none did.
    [[nodiscard]] std::span<const std::optional<double>> oob_predictions() const { return oob_; }

private:
    ForestConfig config_;
    std::vector<std::string> names_;
    std::vector<RegressionTree> trees_;
    std::vector<double> targets_;
    std::vector<std::optional<double>> oob_;
};

/// Bootstrap-aggregated variance-reduction trees. Tree t draws from
/// split_seed(config.seed, t); trees are trained in parallel.
[[nodiscard]] RegressionForest fit_forest(const Dataset& data, const ForestConfig& config);
/// Single-threaded reference; bit-identical to fit_forest.
[[nodiscard]] RegressionForest fit_forest_serial(const Dataset& data, const ForestConfig& config);
[[nodiscard]] RegressionForest fit_forest(std::span<const LabeledRow> rows, const ForestConfig& config);

struct OobResiduals {
    std::vector<std::size_t> rows;   // training-row indices with OOB coverage
    std::vector<double> residuals;   // y - oob prediction, aligned with rows
    std::size_t dropped = 0;         // rows without any OOB tree
};

[[nodiscard]] OobResiduals oob_residuals(const RegressionForest& forest);

struct ImportanceEntry {
    std::string feature;
    double value = 0.0;
};

/// Mean decrease in variance impurity, normalized to sum 1, sorted descending
/// (ties keep feature order).
struct ImportanceReport {
    std::vector<ImportanceEntry> entries;
};

[[nodiscard]] ImportanceReport importance(const RegressionForest& forest);

}  // namespace aq::forest
