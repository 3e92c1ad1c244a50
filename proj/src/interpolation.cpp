#include "aq/interpolation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <string>

#include "aq/error.hpp"
#include "aq/random.hpp"

namespace aq::interp {

double idw_interpolate(std::span<const SpatialSample> samples, GeoPoint target,
                       const IdwParams& params) {
    if (!(params.power > 0.0)) throw Error(ErrorCode::InvalidArgument, "IDW power must be > 0");
    for (const auto& s : samples)
        if (planar_degrees(s.location(), target) < kCoincidentDegrees) return s.value;

    std::vector<std::pair<double, std::size_t>> cand;
    cand.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        cand.emplace_back(distance(samples[i].location(), target, params.metric), i);

    if (const auto* nk = std::get_if<NearestK>(&params.neighbourhood)) {
        if (nk->k == 0) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
        std::stable_sort(cand.begin(), cand.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        if (cand.size() > nk->k) cand.resize(nk->k);
    } else if (const auto* wr = std::get_if<WithinRadius>(&params.neighbourhood)) {
        if (!(wr->radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be > 0");
        std::erase_if(cand, [&](const auto& c) { return c.first > wr->radius; });
    }
    if (cand.empty()) throw Error(ErrorCode::EmptyNeighborhood, "no samples in the neighbourhood");

    double num = 0.0, den = 0.0;
    for (const auto& [d, i] : cand) {
        const double w = 1.0 / std::pow(d, params.power);
        num += w * samples[i].value;
        den += w;
    }
    return num / den;
}

AccuracyReport accuracy(std::span<const double> observed, std::span<const double> predicted) {
    if (observed.size() != predicted.size())
        throw Error(ErrorCode::LengthMismatch, "observed and predicted differ in length");
    if (observed.size() < 2) throw Error(ErrorCode::TooFewValues, "accuracy needs >= 2 points");
    AccuracyReport r;
    r.n = observed.size();
    const double mean = std::accumulate(observed.begin(), observed.end(), 0.0) /
                        static_cast<double>(r.n);
    for (std::size_t i = 0; i < r.n; ++i) {
        const double e = observed[i] - predicted[i];
        r.sse += e * e;
        r.tss += (observed[i] - mean) * (observed[i] - mean);
    }
    r.mse = r.sse / static_cast<double>(r.n);
    r.rmse = std::sqrt(r.mse);
    if (r.tss > 0.0) r.r2 = 1.0 - r.sse / r.tss;
    return r;
}

// --- ordinary kriging --------------------------------------------------------------

struct OrdinaryKriging::Factor {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

OrdinaryKriging::OrdinaryKriging(std::vector<SpatialSample> samples,
                                 const vario::VariogramModel& model, DistanceMetric metric)
    : samples_(std::move(samples)), model_(model), metric_(metric) {
    const std::size_t n = samples_.size();
    if (n < 2) throw Error(ErrorCode::TooFewSamples, "kriging needs >= 2 samples");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (planar_degrees(samples_[i].location(), samples_[j].location()) < kCoincidentDegrees)
                throw Error(ErrorCode::DuplicateLocations,
                            "samples " + std::to_string(i) + " and " + std::to_string(j) +
                                " share a location");

    const auto dim = static_cast<Eigen::Index>(n + 1);
    Eigen::MatrixXd a(dim, dim);
    for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        a(ii, ii) = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            const double g = vario::model_gamma(
                model_, distance(samples_[i].location(), samples_[j].location(), metric_));
            a(ii, jj) = a(jj, ii) = g;
        }
        a(ii, dim - 1) = a(dim - 1, ii) = 1.0;
    }
    a(dim - 1, dim - 1) = 0.0;

    auto usable = [](const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
        const double rc = lu.rcond();
        return std::isfinite(rc) && rc > 1e-15;
    };
    factor_ = std::make_unique<Factor>(Factor{Eigen::PartialPivLU<Eigen::MatrixXd>(a)});
    if (!usable(factor_->lu)) {
        const double jitter = 1e-10 * model_.sill;
        for (Eigen::Index i = 0; i + 1 < dim; ++i) a(i, i) += jitter;
        factor_->lu.compute(a);
        regularized_ = true;
        if (jitter <= 0.0 || !usable(factor_->lu))
            throw Error(ErrorCode::SingularSystem,
                        "kriging system is singular after diagonal regularization");
    }
}

OrdinaryKriging::~OrdinaryKriging() = default;
OrdinaryKriging::OrdinaryKriging(OrdinaryKriging&&) noexcept = default;
OrdinaryKriging& OrdinaryKriging::operator=(OrdinaryKriging&&) noexcept = default;

KrigingWeights OrdinaryKriging::weights(GeoPoint target) const {
    const std::size_t n = samples_.size();
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n + 1));
    for (std::size_t i = 0; i < n; ++i)
        rhs(static_cast<Eigen::Index>(i)) =
            vario::model_gamma(model_, distance(samples_[i].location(), target, metric_));
    rhs(static_cast<Eigen::Index>(n)) = 1.0;
    const Eigen::VectorXd sol = factor_->lu.solve(rhs);
    KrigingWeights kw;
    kw.weights.assign(sol.data(), sol.data() + n);
    kw.lagrange = sol(static_cast<Eigen::Index>(n));
    return kw;
}

double OrdinaryKriging::predict(GeoPoint target) const {
    const KrigingWeights kw = weights(target);
    double v = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i) v += kw.weights[i] * samples_[i].value;
    return v;
}

KrigingWeights ok_weights(std::span<const SpatialSample> samples, GeoPoint target,
                          const vario::VariogramModel& model, DistanceMetric metric) {
    return OrdinaryKriging({samples.begin(), samples.end()}, model, metric).weights(target);
}

double ok_interpolate(std::span<const SpatialSample> samples, GeoPoint target,
                      const vario::VariogramModel& model, DistanceMetric metric) {
    return OrdinaryKriging({samples.begin(), samples.end()}, model, metric).predict(target);
}

// --- cross-validation --------------------------------------------------------------

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "k-fold CV needs k >= 2");
    if (n < k) throw Error(ErrorCode::TooFewSamples, "k-fold CV needs at least k samples");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    shuffle_in_place(std::span<std::size_t>(perm), rng);
    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < n; ++i) folds[i % k].push_back(perm[i]);
    return folds;
}

namespace {

std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> fold) {
    std::vector<bool> held(n, false);
    for (std::size_t i : fold) held[i] = true;
    std::vector<std::size_t> train;
    train.reserve(n - fold.size());
    for (std::size_t i = 0; i < n; ++i)
        if (!held[i]) train.push_back(i);
    return train;
}

void run_fold(std::size_t n, std::span<const std::size_t> fold, const FoldPredictor& predictor,
              std::vector<double>& predictions) {
    const auto train = complement(n, fold);
    const auto pred = predictor(train, fold);
    if (pred.size() != fold.size())
        throw Error(ErrorCode::LengthMismatch, "fold predictor returned the wrong number of values");
    for (std::size_t i = 0; i < fold.size(); ++i) predictions[fold[i]] = pred[i];
}

}  // namespace

CvResult kfold_cv(std::span<const double> observed, const CvConfig& cv,
                  const FoldPredictor& predictor) {
    const auto folds = make_folds(observed.size(), cv.k, cv.seed);
    std::vector<double> predictions(observed.size(), 0.0);
    std::vector<std::exception_ptr> errors(folds.size());
    const auto count = static_cast<long>(folds.size());
#pragma omp parallel for schedule(dynamic)
    for (long f = 0; f < count; ++f) {
        const auto k = static_cast<std::size_t>(f);
        try {
            run_fold(observed.size(), folds[k], predictor, predictions);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return {accuracy(observed, predictions), std::move(predictions)};
}

CvResult kfold_cv_serial(std::span<const double> observed, const CvConfig& cv,
                         const FoldPredictor& predictor) {
    const auto folds = make_folds(observed.size(), cv.k, cv.seed);
    std::vector<double> predictions(observed.size(), 0.0);
    for (const auto& fold : folds) run_fold(observed.size(), fold, predictor, predictions);
    return {accuracy(observed, predictions), std::move(predictions)};
}

namespace {

std::vector<SpatialSample> pick(std::span<const SpatialSample> samples, std::span<const std::size_t> idx) {
    std::vector<SpatialSample> out;
    out.reserve(idx.size());
    for (std::size_t i : idx) out.push_back(samples[i]);
    return out;
}

std::vector<double> values_of(std::span<const SpatialSample> samples) {
    std::vector<double> v;
    v.reserve(samples.size());
    for (const auto& s : samples) v.push_back(s.value);
    return v;
}

}  // namespace

AccuracyReport kfold_cv(std::span<const SpatialSample> samples, const CvConfig& cv,
                        const IdwParams& params) {
    const auto observed = values_of(samples);
    return kfold_cv(observed, cv,
                    [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
                        const auto tr = pick(samples, train);
                        std::vector<double> out;
                        for (std::size_t i : test)
                            out.push_back(idw_interpolate(tr, samples[i].location(), params));
                        return out;
                    })
        .report;
}

AccuracyReport kfold_cv(std::span<const SpatialSample> samples, const CvConfig& cv,
                        const vario::VariogramModel& model, DistanceMetric metric) {
    const auto observed = values_of(samples);
    return kfold_cv(observed, cv,
                    [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
                        const OrdinaryKriging ok(pick(samples, train), model, metric);
                        std::vector<double> out;
                        for (std::size_t i : test) out.push_back(ok.predict(samples[i].location()));
                        return out;
                    })
        .report;
}

std::vector<double> default_power_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 10.0);
    return grid;
}

PowerSelection select_power(std::vector<PowerScore> scores) {
    if (scores.empty()) throw Error(ErrorCode::InvalidArgument, "power grid is empty");
    std::stable_sort(scores.begin(), scores.end(),
                     [](const PowerScore& a, const PowerScore& b) { return a.power < b.power; });
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i)
        if (scores[i].rmse < scores[best].rmse) best = i;
    return {scores[best].power, std::move(scores)};
}

PowerSelection idw_select_power(std::span<const SpatialSample> samples,
                                std::span<const double> power_grid, const CvConfig& cv,
                                IdwParams base) {
    if (power_grid.empty()) throw Error(ErrorCode::InvalidArgument, "power grid is empty");
    std::vector<PowerScore> scores;
    for (double p : power_grid) {
        base.power = p;
        const auto rep = kfold_cv(samples, cv, base);
        scores.push_back({p, rep.rmse, rep.r2});
    }
    return select_power(std::move(scores));
}

}  // namespace aq::interp
