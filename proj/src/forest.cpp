#include "aq/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "aq/error.hpp"
#include "aq/random.hpp"

namespace aq::forest {

std::array<double, kFeatureCount> FeatureRow::to_array() const {
    std::array<double, kFeatureCount> out{};
    for (std::size_t k = 0; k < pollutants.size(); ++k)
        out[k] = pollutants[k] ? *pollutants[k] : std::numeric_limits<double>::quiet_NaN();
    out[5] = east;
    out[6] = north;
    return out;
}

void FeatureRow::validate() const {
    if (!std::isfinite(east) || !std::isfinite(north))
        throw Error(ErrorCode::InvalidArgument, "feature row needs finite east/north");
    if (std::none_of(pollutants.begin(), pollutants.end(), [](const auto& v) { return v.has_value(); }))
        throw Error(ErrorCode::InvalidArgument, "feature row needs at least one pollutant");
}

Dataset make_dataset(std::span<const LabeledRow> rows) {
    Dataset d;
    d.n_features = kFeatureCount;
    d.feature_names.assign(kFeatureNames.begin(), kFeatureNames.end());
    d.x.reserve(rows.size() * kFeatureCount);
    for (const auto& r : rows) {
        r.features.validate();
        const auto a = r.features.to_array();
        d.x.insert(d.x.end(), a.begin(), a.end());
        d.y.push_back(r.target);
    }
    return d;
}

std::size_t ForestConfig::resolved_mtry(std::size_t n_features) const {
    const std::size_t m = mtry.value_or(std::max<std::size_t>(1, n_features / 3));
    if (m < 1 || m > n_features)
        throw Error(ErrorCode::InvalidArgument, "mtry must be in [1, n_features]");
    return m;
}

double RegressionTree::predict(std::span<const double> x) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0) {
        const TreeNode& nd = nodes_[i];
        const double v = x[static_cast<std::size_t>(nd.feature)];
        const bool go_left = std::isnan(v) ? nd.missing_left : v <= nd.threshold;
        i = go_left ? nd.left : nd.right;
    }
    return nodes_[i].value;
}

namespace {

struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double decrease = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, const ForestConfig& cfg, std::size_t mtry, Rng& rng)
        : data_(data), cfg_(cfg), mtry_(mtry), rng_(rng), decrease_(data.n_features, 0.0),
          features_(data.n_features) {
        std::iota(features_.begin(), features_.end(), std::size_t{0});
    }

    RegressionTree build(std::vector<std::size_t> rows) {
        rows_ = std::move(rows);
        grow(0, rows_.size(), 0);
        return RegressionTree(std::move(nodes_), std::move(decrease_));
    }

private:
    double x(std::size_t row, std::size_t f) const { return data_.x[row * data_.n_features + f]; }

    static double sse(const std::vector<double>& ys) {
        double s = 0.0, s2 = 0.0;
        for (double y : ys) {
            s += y;
            s2 += y * y;
        }
        return std::max(0.0, s2 - s * s / static_cast<double>(ys.size()));
    }

    double node_sse(std::size_t begin, std::size_t end, double& mean) const {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += data_.y[rows_[i]];
        mean = s / static_cast<double>(end - begin);
        double acc = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            const double d = data_.y[rows_[i]] - mean;
            acc += d * d;
        }
        return acc;
    }

    Split best_split(std::size_t begin, std::size_t end) {
        // partial Fisher-Yates: the first mtry entries are the candidate features
        for (std::size_t i = 0; i < mtry_; ++i) {
            const std::size_t j = i + uniform_index(rng_, features_.size() - i);
            std::swap(features_[i], features_[j]);
        }
        Split best;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t c = 0; c < mtry_; ++c) {
            const std::size_t f = features_[c];
            pts.clear();
            for (std::size_t i = begin; i < end; ++i) {
                const double v = x(rows_[i], f);
                if (!std::isnan(v)) pts.emplace_back(v, data_.y[rows_[i]]);
            }
            const std::size_t np = pts.size();
            if (np < 2 * cfg_.min_leaf) continue;
            std::sort(pts.begin(), pts.end());
            double total = 0.0, total2 = 0.0;
            for (const auto& p : pts) {
                total += p.second;
                total2 += p.second * p.second;
            }
            const double parent = total2 - total * total / static_cast<double>(np);
            double ls = 0.0, ls2 = 0.0;
            for (std::size_t i = 0; i + 1 < np; ++i) {
                ls += pts[i].second;
                ls2 += pts[i].second * pts[i].second;
                const std::size_t nl = i + 1;
                const std::size_t nr = np - nl;
                if (nl < cfg_.min_leaf) continue;
                if (nr < cfg_.min_leaf) break;
                if (!(pts[i].first < pts[i + 1].first)) continue;
                const double rs = total - ls, rs2 = total2 - ls2;
                const double child = (ls2 - ls * ls / static_cast<double>(nl)) +
                                     (rs2 - rs * rs / static_cast<double>(nr));
                const double dec = parent - child;
                if (dec > best.decrease + 1e-12 * std::max(1.0, parent)) {
                    best.feature = static_cast<std::int32_t>(f);
                    best.threshold = 0.5 * (pts[i].first + pts[i + 1].first);
                    // midpoint can round onto the upper value for adjacent doubles
                    if (!(best.threshold < pts[i + 1].first)) best.threshold = pts[i].first;
                    best.decrease = dec;
                }
            }
        }
        return best;
    }

    std::uint32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.emplace_back();
        double mean = 0.0;
        const double parent_sse = node_sse(begin, end, mean);
        nodes_[id].value = mean;

        const std::size_t n = end - begin;
        const bool depth_capped = cfg_.max_depth && depth >= *cfg_.max_depth;
        if (n < 2 * cfg_.min_leaf || depth_capped || parent_sse <= 1e-14 * std::max(1.0, mean * mean))
            return id;

        const Split split = best_split(begin, end);
        if (split.feature < 0) return id;
        const auto f = static_cast<std::size_t>(split.feature);

        std::size_t present_left = 0, present_right = 0;
        for (std::size_t i = begin; i < end; ++i) {
            const double v = x(rows_[i], f);
            if (std::isnan(v)) continue;
            (v <= split.threshold ? present_left : present_right)++;
        }
        const bool missing_left = present_left >= present_right;
        auto goes_left = [&](std::size_t row) {
            const double v = x(row, f);
            return std::isnan(v) ? missing_left : v <= split.threshold;
        };
        const auto mid_it = std::stable_partition(rows_.begin() + static_cast<long>(begin),
                                                  rows_.begin() + static_cast<long>(end), goes_left);
        const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

        std::vector<double> ly, ry;
        for (std::size_t i = begin; i < mid; ++i) ly.push_back(data_.y[rows_[i]]);
        for (std::size_t i = mid; i < end; ++i) ry.push_back(data_.y[rows_[i]]);
        decrease_[f] += std::max(0.0, parent_sse - sse(ly) - sse(ry));

        nodes_[id].feature = split.feature;
        nodes_[id].threshold = split.threshold;
        nodes_[id].missing_left = missing_left;
        const std::uint32_t l = grow(begin, mid, depth + 1);
        const std::uint32_t r = grow(mid, end, depth + 1);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    const Dataset& data_;
    const ForestConfig& cfg_;
    std::size_t mtry_;
    Rng& rng_;
    std::vector<TreeNode> nodes_;
    std::vector<double> decrease_;
    std::vector<std::size_t> features_;
    std::vector<std::size_t> rows_;
};

struct TrainedTree {
    RegressionTree tree;
    std::vector<unsigned char> in_bag;
};

TrainedTree train_tree(const Dataset& data, const ForestConfig& cfg, std::size_t mtry, std::size_t t) {
    Rng rng(split_seed(cfg.seed, t));
    const std::size_t n = data.n_rows();
    std::vector<std::size_t> sample(n);
    std::vector<unsigned char> in_bag(n, 0);
    for (auto& s : sample) {
        s = uniform_index(rng, n);
        in_bag[s] = 1;
    }
    std::sort(sample.begin(), sample.end());
    TreeBuilder builder(data, cfg, mtry, rng);
    return {builder.build(std::move(sample)), std::move(in_bag)};
}

void check_inputs(const Dataset& data, const ForestConfig& cfg) {
    if (data.n_rows() == 0) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
    if (data.n_rows() < 2) throw Error(ErrorCode::EmptyTrainingSet, "forest needs >= 2 rows");
    if (data.n_features == 0 || data.x.size() != data.n_rows() * data.n_features)
        throw Error(ErrorCode::DimensionMismatch, "feature matrix shape does not match targets");
    if (cfg.ntree < 1) throw Error(ErrorCode::InvalidArgument, "ntree must be >= 1");
    if (cfg.min_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_leaf must be >= 1");
    for (double y : data.y)
        if (!std::isfinite(y)) throw Error(ErrorCode::InvalidArgument, "targets must be finite");
}

RegressionForest assemble(const Dataset& data, const ForestConfig& cfg, std::vector<TrainedTree> trained) {
    const std::size_t n = data.n_rows();
    std::vector<double> sum(n, 0.0);
    std::vector<std::size_t> count(n, 0);
    std::vector<RegressionTree> trees;
    trees.reserve(trained.size());
    for (auto& t : trained) {
        for (std::size_t i = 0; i < n; ++i)
            if (!t.in_bag[i]) {
                sum[i] += t.tree.predict(data.row(i));
                ++count[i];
            }
        trees.push_back(std::move(t.tree));
    }
    std::vector<std::optional<double>> oob(n);
    for (std::size_t i = 0; i < n; ++i)
        if (count[i]) oob[i] = sum[i] / static_cast<double>(count[i]);
    std::vector<std::string> names = data.feature_names;
    if (names.empty())
        for (std::size_t f = 0; f < data.n_features; ++f) names.push_back("x" + std::to_string(f));
    return RegressionForest(cfg, std::move(names), std::move(trees), data.y, std::move(oob));
}

}  // namespace

RegressionForest::RegressionForest(ForestConfig config, std::vector<std::string> feature_names,
                                   std::vector<RegressionTree> trees, std::vector<double> targets,
                                   std::vector<std::optional<double>> oob_predictions)
    : config_(config), names_(std::move(feature_names)), trees_(std::move(trees)),
      targets_(std::move(targets)), oob_(std::move(oob_predictions)) {}

double RegressionForest::predict(std::span<const double> x) const {
    if (x.size() != names_.size())
        throw Error(ErrorCode::SchemaMismatch, "expected " + std::to_string(names_.size()) +
                                                   " features, got " + std::to_string(x.size()));
    double s = 0.0;
    for (const auto& t : trees_) s += t.predict(x);
    return s / static_cast<double>(trees_.size());
}

double RegressionForest::predict(const FeatureRow& row) const {
    if (names_.size() != kFeatureCount ||
        !std::equal(names_.begin(), names_.end(), kFeatureNames.begin()))
        throw Error(ErrorCode::SchemaMismatch, "forest was not trained on the station feature schema");
    const auto a = row.to_array();
    return predict(std::span<const double>(a));
}

RegressionForest fit_forest(const Dataset& data, const ForestConfig& cfg) {
    check_inputs(data, cfg);
    const std::size_t mtry = cfg.resolved_mtry(data.n_features);
    std::vector<TrainedTree> trained(cfg.ntree);
    const auto count = static_cast<long>(cfg.ntree);
#pragma omp parallel for schedule(dynamic, 8)
    for (long t = 0; t < count; ++t)
        trained[static_cast<std::size_t>(t)] = train_tree(data, cfg, mtry, static_cast<std::size_t>(t));
    return assemble(data, cfg, std::move(trained));
}

RegressionForest fit_forest_serial(const Dataset& data, const ForestConfig& cfg) {
    check_inputs(data, cfg);
    const std::size_t mtry = cfg.resolved_mtry(data.n_features);
    std::vector<TrainedTree> trained;
    trained.reserve(cfg.ntree);
    for (std::size_t t = 0; t < cfg.ntree; ++t) trained.push_back(train_tree(data, cfg, mtry, t));
    return assemble(data, cfg, std::move(trained));
}

RegressionForest fit_forest(std::span<const LabeledRow> rows, const ForestConfig& config) {
    if (rows.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training rows");
    return fit_forest(make_dataset(rows), config);
}

OobResiduals oob_residuals(const RegressionForest& forest) {
    OobResiduals out;
    const auto oob = forest.oob_predictions();
    for (std::size_t i = 0; i < oob.size(); ++i) {
        if (!oob[i]) {
            ++out.dropped;
            continue;
        }
        out.rows.push_back(i);
        out.residuals.push_back(forest.targets()[i] - *oob[i]);
    }
    if (out.rows.empty())
        throw Error(ErrorCode::NoOobCoverage, "no training row was left out of any bootstrap sample");
    return out;
}

ImportanceReport importance(const RegressionForest& forest) {
    const std::size_t p = forest.feature_names().size();
    std::vector<double> total(p, 0.0);
    for (const auto& t : forest.trees())
        for (std::size_t f = 0; f < p; ++f) total[f] += t.impurity_decrease()[f];
    const double sum = std::accumulate(total.begin(), total.end(), 0.0);
    ImportanceReport rep;
    for (std::size_t f = 0; f < p; ++f)
        rep.entries.push_back({forest.feature_names()[f],
                               sum > 0.0 ? total[f] / sum : 1.0 / static_cast<double>(p)});
    std::stable_sort(rep.entries.begin(), rep.entries.end(),
                     [](const ImportanceEntry& a, const ImportanceEntry& b) { return a.value > b.value; });
    return rep;
}

}  // namespace aq::forest
