#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "aq/core.hpp"
#include "aq/geo.hpp"

namespace aq::spatial {

/// w_ij = 1/d_ij^power (haversine km) for d_ij <= cutoff_km, else 0.
struct InverseDistance {
    double power = 1.0;
    double cutoff_km = 50.0;
    bool row_standardize = true;
};

/// w_ij = 1 for the k nearest neighbours of i (ties by index), row-standardized.
struct KNearest {
    std::size_t k = 4;
};

using WeightScheme = std::variant<InverseDistance, KNearest>;

[[nodiscard]] std::string describe(const WeightScheme& scheme);

class WeightMatrix {
public:
    /// Validates shape, non-negativity and the zero diagonal.
    WeightMatrix(std::size_t n, std::vector<double> weights, WeightScheme scheme,
                 bool row_standardized);

    [[nodiscard]] std::size_t n() const { return n_; }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return std::span<const double>(w_).subspan(i * n_, n_);
    }
    [[nodiscard]] const WeightScheme& scheme() const { return scheme_; }
    [[nodiscard]] bool row_standardized() const { return row_standardized_; }
    /// Rows with no neighbour inside the cutoff.
    [[nodiscard]] const std::vector<std::size_t>& disconnected_rows() const { return disconnected_; }
    /// Sum of all weights.
    [[nodiscard]] double s0() const { return s0_; }

private:
    std::size_t n_;
    std::vector<double> w_;
    WeightScheme scheme_;
    bool row_standardized_;
    std::vector<std::size_t> disconnected_;
    double s0_ = 0.0;
};

[[nodiscard]] WeightMatrix build_weights(std::span<const GeoPoint> points, const WeightScheme& scheme);
[[nodiscard]] WeightMatrix build_weights(std::span<const StationMeta> stations,
                                         const WeightScheme& scheme);

/// I = (n / S0) * sum_ij w_ij z_i z_j / sum_i z_i^2 with z = y - mean(y).
[[nodiscard]] double morans_i(std::span<const double> values, const WeightMatrix& w);

[[nodiscard]] inline double expected_morans_i(std::size_t n) {
    return -1.0 / (static_cast<double>(n) - 1.0);
}

struct MoranResult {
    double i_statistic = 0.0;
    double expected_i = 0.0;
    double p_value = 1.0;
    std::size_t n_permutations = 0;
};

inline constexpr std::size_t kDefaultPermutations = 999;

/// Two-sided permutation test of I = E[I]. Permutation k shuffles with a
/// stream seeded by split_seed(seed, k), so the result does not depend on
/// thread count. Runs permutations in parallel.
[[nodiscard]] MoranResult morans_test(std::span<const double> values, const WeightMatrix& w,
                                      std::size_t n_permutations, std::uint64_t seed);

/// Single-threaded reference for morans_test; identical output.
[[nodiscard]] MoranResult morans_test_serial(std::span<const double> values, const WeightMatrix& w,
                                             std::size_t n_permutations, std::uint64_t seed);

}  // namespace aq::spatial
