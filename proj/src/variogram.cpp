#include "aq/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "aq/error.hpp"

namespace aq::vario {

EmpiricalVariogram empirical_variogram(std::span<const SpatialSample> samples, std::size_t n_bins,
                                       double max_dist_fraction, DistanceMetric metric) {
    if (samples.size() < 2) throw Error(ErrorCode::TooFewSamples, "variogram needs >= 2 samples");
    if (n_bins < 3) throw Error(ErrorCode::InvalidArgument, "variogram needs >= 3 bins");
    if (!(max_dist_fraction > 0.0 && max_dist_fraction <= 1.0))
        throw Error(ErrorCode::InvalidArgument, "max_dist_fraction must be in (0, 1]");

    const std::size_t n = samples.size();
    double max_d = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            max_d = std::max(max_d, distance(samples[i].location(), samples[j].location(), metric));
    if (max_d == 0.0) throw Error(ErrorCode::AllCoincident, "all samples share one location");

    const double cutoff = max_dist_fraction * max_d;
    const double width = cutoff / static_cast<double>(n_bins);
    std::vector<double> sum(n_bins, 0.0);
    std::vector<std::size_t> count(n_bins, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = distance(samples[i].location(), samples[j].location(), metric);
            if (d <= 0.0 || d > cutoff * (1.0 + 1e-12)) continue;
            auto k = static_cast<std::size_t>(std::ceil(d / width)) - 1;
            k = std::min(k, n_bins - 1);
            const double diff = samples[i].value - samples[j].value;
            sum[k] += diff * diff;
            ++count[k];
        }

    EmpiricalVariogram emp;
    emp.metric = metric;
    for (std::size_t k = 0; k < n_bins; ++k) {
        if (count[k] == 0) continue;
        emp.bin_centers.push_back((static_cast<double>(k) + 0.5) * width);
        emp.semivariances.push_back(sum[k] / (2.0 * static_cast<double>(count[k])));
        emp.pair_counts.push_back(count[k]);
    }
    return emp;
}

std::string_view to_string(Family f) {
    switch (f) {
        case Family::Spherical: return "spherical";
        case Family::Exponential: return "exponential";
        case Family::Gaussian: return "gaussian";
        case Family::Linear: return "linear";
    }
    return "?";
}

std::optional<Family> parse_family(std::string_view text) {
    for (Family f : kAllFamilies)
        if (text == to_string(f)) return f;
    return std::nullopt;
}

namespace {

/// Normalized structure shape in [0, 1] for the bounded families.
double shape(Family family, double h, double range) {
    const double r = h / range;
    switch (family) {
        case Family::Spherical: return r >= 1.0 ? 1.0 : 1.5 * r - 0.5 * r * r * r;
        case Family::Exponential: return 1.0 - std::exp(-3.0 * r);
        case Family::Gaussian: return 1.0 - std::exp(-3.0 * r * r);
        case Family::Linear: return h;
    }
    return 0.0;
}

struct LinearFit {
    double intercept = 0.0;
    double coef = 0.0;
    double sse = 0.0;
};

/// min sum w (g - a - b f)^2 subject to a >= 0, b >= 0.
LinearFit nonneg_two_param(std::span<const double> f, std::span<const double> g,
                           std::span<const double> w) {
    double sw = 0, sf = 0, sff = 0, sg = 0, sfg = 0;
    for (std::size_t k = 0; k < f.size(); ++k) {
        sw += w[k];
        sf += w[k] * f[k];
        sff += w[k] * f[k] * f[k];
        sg += w[k] * g[k];
        sfg += w[k] * f[k] * g[k];
    }
    auto sse_of = [&](double a, double b) {
        double s = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const double e = g[k] - a - b * f[k];
            s += w[k] * e * e;
        }
        return s;
    };

    // pure nugget first: it wins ties, which keeps flat variograms at zero structure
    LinearFit best{std::max(0.0, sg / sw), 0.0, 0.0};
    best.sse = sse_of(best.intercept, 0.0);
    auto consider = [&](double a, double b) {
        if (a < 0.0 || b < 0.0) return;
        const double s = sse_of(a, b);
        if (s < best.sse) best = {a, b, s};
    };
    const double det = sw * sff - sf * sf;
    if (det > 1e-12 * sw * sff) consider((sff * sg - sf * sfg) / det, (sw * sfg - sf * sg) / det);
    if (sff > 0.0) consider(0.0, std::max(0.0, sfg / sff));
    return best;
}

struct ProfilePoint {
    double range = 0.0;
    LinearFit fit;
};

ProfilePoint profile(const EmpiricalVariogram& emp, Family family, double range,
                     std::span<const double> w, std::vector<double>& f) {
    for (std::size_t k = 0; k < emp.bin_centers.size(); ++k)
        f[k] = shape(family, emp.bin_centers[k], range);
    return {range, nonneg_two_param(f, emp.semivariances, w)};
}

VariogramModel to_model(Family family, const LinearFit& fit, double range) {
    VariogramModel m;
    m.family = family;
    m.nugget = fit.intercept;
    m.range = range;
    if (family == Family::Linear) {
        m.slope = fit.coef;
        m.sill = fit.intercept + fit.coef * range;
    } else {
        m.sill = fit.intercept + fit.coef;
    }
    return m;
}

double unweighted_rmse(const EmpiricalVariogram& emp, const VariogramModel& m) {
    double s = 0.0;
    for (std::size_t k = 0; k < emp.bin_centers.size(); ++k) {
        const double e = emp.semivariances[k] - model_gamma(m, emp.bin_centers[k]);
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(emp.bin_centers.size()));
}

}  // namespace

double model_gamma(const VariogramModel& m, double h) {
    if (h <= 0.0) return 0.0;
    if (m.family == Family::Linear) return m.nugget + m.slope * h;
    return m.nugget + (m.sill - m.nugget) * shape(m.family, h, m.range);
}

VariogramFit fit_variogram(const EmpiricalVariogram& emp, Family family) {
    const std::size_t nb = emp.bin_centers.size();
    if (nb < 3) throw Error(ErrorCode::TooFewBins, "variogram fit needs >= 3 non-empty bins");
    std::vector<double> w(nb);
    for (std::size_t k = 0; k < nb; ++k) w[k] = static_cast<double>(emp.pair_counts[k]);
    const double h_max = emp.bin_centers.back();

    std::vector<double> f(nb);
    VariogramModel model;
    if (family == Family::Linear) {
        const auto p = profile(emp, family, h_max, w, f);
        model = to_model(family, p.fit, h_max);
    } else {
        constexpr std::size_t kGrid = 200;
        const double lo = 0.01 * h_max;
        const double hi = 2.0 * h_max;
        const double step = (hi - lo) / static_cast<double>(kGrid - 1);
        std::vector<ProfilePoint> grid;
        grid.reserve(kGrid);
        for (std::size_t i = 0; i < kGrid; ++i)
            grid.push_back(profile(emp, family, lo + step * static_cast<double>(i), w, f));

        // local minima of the grid profile, best first; refine the top few
        std::vector<std::size_t> starts;
        for (std::size_t i = 0; i < kGrid; ++i) {
            const double s = grid[i].fit.sse;
            const bool left_ok = i == 0 || s <= grid[i - 1].fit.sse;
            const bool right_ok = i + 1 == kGrid || s < grid[i + 1].fit.sse;
            if (left_ok && right_ok) starts.push_back(i);
        }
        std::stable_sort(starts.begin(), starts.end(),
                         [&](std::size_t a, std::size_t b) { return grid[a].fit.sse < grid[b].fit.sse; });
        if (starts.size() > 4) starts.resize(4);

        ProfilePoint best = grid[starts.front()];
        constexpr double kInvPhi = 0.6180339887498949;
        for (std::size_t i : starts) {
            double a = i == 0 ? lo : grid[i - 1].range;
            double b = i + 1 == kGrid ? hi : grid[i + 1].range;
            double c = b - kInvPhi * (b - a);
            double d = a + kInvPhi * (b - a);
            ProfilePoint pc = profile(emp, family, c, w, f);
            ProfilePoint pd = profile(emp, family, d, w, f);
            while (b - a > 1e-12 * h_max) {
                if (pc.fit.sse <= pd.fit.sse) {
                    b = d;
                    d = c;
                    pd = pc;
                    c = b - kInvPhi * (b - a);
                    pc = profile(emp, family, c, w, f);
                } else {
                    a = c;
                    c = d;
                    pc = pd;
                    d = a + kInvPhi * (b - a);
                    pd = profile(emp, family, d, w, f);
                }
            }
            const ProfilePoint& cand = pc.fit.sse <= pd.fit.sse ? pc : pd;
            if (cand.fit.sse < best.fit.sse) best = cand;
        }
        model = to_model(family, best.fit, best.range);
    }

    const double partial = family == Family::Linear ? model.slope : model.sill - model.nugget;
    if (model.nugget == 0.0 && partial == 0.0)
        throw Error(ErrorCode::DegenerateFit,
                    std::string(to_string(family)) + " fit collapsed to zero (all semivariances zero)");
    return VariogramFit{model, unweighted_rmse(emp, model), nb};
}

const VariogramFit& select_best(std::span<const VariogramFit> fits) {
    if (fits.empty()) throw Error(ErrorCode::InvalidArgument, "no variogram fits to select from");
    const VariogramFit* best = &fits.front();
    for (const auto& fit : fits) {
        if (fit.fit_rmse < best->fit_rmse ||
            (fit.fit_rmse == best->fit_rmse && fit.model.family < best->model.family))
            best = &fit;
    }
    return *best;
}

VariogramFit select_variogram(const EmpiricalVariogram& emp, std::span<const Family> families) {
    if (families.empty()) throw Error(ErrorCode::InvalidArgument, "no variogram families given");
    const auto count = static_cast<long>(families.size());
    std::vector<std::optional<VariogramFit>> fits(families.size());
    std::vector<std::exception_ptr> errors(families.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            fits[k] = fit_variogram(emp, families[k]);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    std::vector<VariogramFit> ok;
    for (const auto& f : fits)
        if (f) ok.push_back(*f);
    if (ok.empty()) std::rethrow_exception(errors.back());
    return select_best(ok);
}

}  // namespace aq::vario
