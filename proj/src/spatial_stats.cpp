#include "aq/spatial_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "aq/error.hpp"
#include "aq/random.hpp"

namespace aq::spatial {

std::string describe(const WeightScheme& scheme) {
    std::ostringstream os;
    if (const auto* id = std::get_if<InverseDistance>(&scheme))
        os << "inverse_distance(power=" << id->power << ",cutoff_km=" << id->cutoff_km
           << (id->row_standardize ? ",row_standardized" : "") << ')';
    else
        os << "k_nearest(k=" << std::get<KNearest>(scheme).k << ')';
    return os.str();
}

WeightMatrix::WeightMatrix(std::size_t n, std::vector<double> weights, WeightScheme scheme,
                           bool row_standardized)
    : n_(n), w_(std::move(weights)), scheme_(scheme), row_standardized_(row_standardized) {
    if (n_ < 2) throw Error(ErrorCode::TooFewValues, "weight matrix needs n >= 2");
    if (w_.size() != n_ * n_) throw Error(ErrorCode::DimensionMismatch, "weights must be n x n");
    for (std::size_t i = 0; i < n_; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = w_[i * n_ + j];
            if (!(v >= 0.0) || !std::isfinite(v))
                throw Error(ErrorCode::InvalidArgument, "weights must be finite and non-negative");
            if (i == j && v != 0.0) throw Error(ErrorCode::InvalidArgument, "diagonal must be zero");
            row_sum += v;
        }
        if (row_sum == 0.0) disconnected_.push_back(i);
        s0_ += row_sum;
    }
}

namespace {

void standardize_rows(std::vector<double>& w, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double sum = std::accumulate(w.begin() + static_cast<long>(i * n),
                                           w.begin() + static_cast<long>((i + 1) * n), 0.0);
        if (sum > 0.0)
            for (std::size_t j = 0; j < n; ++j) w[i * n + j] /= sum;
    }
}

}  // namespace

WeightMatrix build_weights(std::span<const GeoPoint> points, const WeightScheme& scheme) {
    const std::size_t n = points.size();
    if (n < 2) throw Error(ErrorCode::TooFewValues, "weights need at least 2 stations");
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = haversine_km(points[i], points[j]);
            if (d == 0.0)
                throw Error(ErrorCode::DuplicateCoordinates,
                            "stations " + std::to_string(i) + " and " + std::to_string(j) +
                                " share coordinates");
            dist[i * n + j] = dist[j * n + i] = d;
        }

    std::vector<double> w(n * n, 0.0);
    bool standardized = false;
    if (const auto* id = std::get_if<InverseDistance>(&scheme)) {
        if (!(id->power > 0.0) || !(id->cutoff_km > 0.0))
            throw Error(ErrorCode::InvalidArgument, "inverse distance needs power > 0 and cutoff > 0");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && dist[i * n + j] <= id->cutoff_km)
                    w[i * n + j] = 1.0 / std::pow(dist[i * n + j], id->power);
        standardized = id->row_standardize;
    } else {
        const std::size_t k = std::get<KNearest>(scheme).k;
        if (k < 1 || k >= n) throw Error(ErrorCode::InvalidArgument, "k must be in [1, n-1]");
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return dist[i * n + a] < dist[i * n + b];
            });
            std::size_t taken = 0;
            for (std::size_t j : order) {
                if (j == i) continue;
                w[i * n + j] = 1.0;
                if (++taken == k) break;
            }
        }
        standardized = true;
    }
    if (standardized) standardize_rows(w, n);
    return WeightMatrix(n, std::move(w), scheme, standardized);
}

WeightMatrix build_weights(std::span<const StationMeta> stations, const WeightScheme& scheme) {
    std::vector<GeoPoint> pts;
    pts.reserve(stations.size());
    for (const auto& s : stations) pts.push_back({s.lon, s.lat});
    return build_weights(std::span<const GeoPoint>(pts), scheme);
}

namespace {

struct Centered {
    std::vector<double> z;
    double sum_sq = 0.0;
};

Centered center(std::span<const double> values, const WeightMatrix& w) {
    if (values.size() != w.n())
        throw Error(ErrorCode::DimensionMismatch, "values length differs from weight matrix size");
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                        static_cast<double>(values.size());
    Centered c;
    c.z.reserve(values.size());
    for (double v : values) {
        c.z.push_back(v - mean);
        c.sum_sq += (v - mean) * (v - mean);
    }
    // relative test so that rounding noise on a constant field still counts as constant
    if (c.sum_sq <= 1e-24 * std::max(1.0, mean * mean) * static_cast<double>(values.size()))
        throw Error(ErrorCode::ZeroVariance, "values have zero variance");
    return c;
}

/// Sparse row lists so each permutation costs O(nnz).
struct Neighbours {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> cols;
    std::vector<double> vals;
};

Neighbours sparsify(const WeightMatrix& w) {
    Neighbours nb;
    nb.offsets.push_back(0);
    for (std::size_t i = 0; i < w.n(); ++i) {
        for (std::size_t j = 0; j < w.n(); ++j)
            if (w(i, j) != 0.0) {
                nb.cols.push_back(j);
                nb.vals.push_back(w(i, j));
            }
        nb.offsets.push_back(nb.cols.size());
    }
    return nb;
}

double cross_product(const Neighbours& nb, std::span<const double> z) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < nb.offsets.size(); ++i) {
        double row = 0.0;
        for (std::size_t k = nb.offsets[i]; k < nb.offsets[i + 1]; ++k) row += nb.vals[k] * z[nb.cols[k]];
        acc += z[i] * row;
    }
    return acc;
}

struct TestSetup {
    Centered c;
    Neighbours nb;
    double scale = 0.0;  // n / (S0 * sum z^2)
    double observed = 0.0;
    double expected = 0.0;
    double threshold = 0.0;
};

TestSetup prepare(std::span<const double> values, const WeightMatrix& w, std::size_t n_permutations) {
    if (n_permutations < 99) throw Error(ErrorCode::InvalidArgument, "need at least 99 permutations");
    if (!(w.s0() > 0.0)) throw Error(ErrorCode::InvalidArgument, "weight matrix is all zero");
    TestSetup t{center(values, w), sparsify(w)};
    t.scale = static_cast<double>(w.n()) / (w.s0() * t.c.sum_sq);
    t.observed = t.scale * cross_product(t.nb, t.c.z);
    t.expected = expected_morans_i(w.n());
    const double dev = std::abs(t.observed - t.expected);
    // permuted sums accumulate in a different order; treat ulp-level differences as ties
    t.threshold = dev - 1e-12 * std::max(1.0, dev);
    return t;
}

bool permutation_extreme(const TestSetup& t, std::uint64_t seed, std::size_t k, std::vector<double>& buf) {
    buf.assign(t.c.z.begin(), t.c.z.end());
    Rng rng(split_seed(seed, k));
    shuffle_in_place(std::span<double>(buf), rng);
    const double i_perm = t.scale * cross_product(t.nb, buf);
    return std::abs(i_perm - t.expected) >= t.threshold;
}

MoranResult finish(const TestSetup& t, std::size_t n_permutations, std::size_t extreme) {
    return MoranResult{t.observed, t.expected,
                       static_cast<double>(1 + extreme) / static_cast<double>(n_permutations + 1),
                       n_permutations};
}

}  // namespace

double morans_i(std::span<const double> values, const WeightMatrix& w) {
    const Centered c = center(values, w);
    if (!(w.s0() > 0.0)) throw Error(ErrorCode::InvalidArgument, "weight matrix is all zero");
    double acc = 0.0;
    for (std::size_t i = 0; i < w.n(); ++i)
        for (std::size_t j = 0; j < w.n(); ++j) acc += w(i, j) * c.z[i] * c.z[j];
    return static_cast<double>(w.n()) / w.s0() * acc / c.sum_sq;
}

MoranResult morans_test(std::span<const double> values, const WeightMatrix& w,
                        std::size_t n_permutations, std::uint64_t seed) {
    const TestSetup t = prepare(values, w, n_permutations);
    std::vector<unsigned char> hit(n_permutations, 0);
    const auto count = static_cast<long>(n_permutations);
#pragma omp parallel
    {
        std::vector<double> buf;
#pragma omp for schedule(static)
        for (long k = 0; k < count; ++k)
            hit[static_cast<std::size_t>(k)] =
                permutation_extreme(t, seed, static_cast<std::size_t>(k), buf) ? 1 : 0;
    }
    const auto extreme = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
    return finish(t, n_permutations, extreme);
}

MoranResult morans_test_serial(std::span<const double> values, const WeightMatrix& w,
                               std::size_t n_permutations, std::uint64_t seed) {
    const TestSetup t = prepare(values, w, n_permutations);
    std::vector<double> buf;
    std::size_t extreme = 0;
    for (std::size_t k = 0; k < n_permutations; ++k)
        if (permutation_extreme(t, seed, k, buf)) ++extreme;
    return finish(t, n_permutations, extreme);
}

}  // namespace aq::spatial
