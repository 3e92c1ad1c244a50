#include "aq/intervention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>

#include "aq/error.hpp"

namespace aq::did {

std::string_view to_string(SeType type) {
    return type == SeType::Homoskedastic ? "homoskedastic" : "station_clustered";
}

namespace {

double two_sided_p(double t, double dof) {
    if (!std::isfinite(t)) return 0.0;
    const boost::math::students_t dist(dof);
    return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

}  // namespace

std::pair<double, double> DidFit::confidence_interval(std::size_t k, double level) const {
    if (k >= 4) throw Error(ErrorCode::InvalidArgument, "coefficient index out of range");
    if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must be in (0, 1)");
    const boost::math::students_t dist(static_cast<double>(dof));
    const double q = boost::math::quantile(dist, 0.5 + level / 2.0);
    return {beta[k] - q * se[k], beta[k] + q * se[k]};
}

DidFit fit_did(const DidPanel& panel, SeType se_type) {
    const auto& rows = panel.rows;
    const std::size_t n = rows.size();
    std::array<std::size_t, 4> cells{};
    for (const auto& r : rows) {
        if ((r.treated_time != 0 && r.treated_time != 1) || (r.group != 0 && r.group != 1))
            throw Error(ErrorCode::InvalidArgument, "I and Z must be 0 or 1");
        if (!std::isfinite(r.y)) throw Error(ErrorCode::InvalidArgument, "non-finite outcome");
        ++cells[static_cast<std::size_t>(r.treated_time * 2 + r.group)];
    }
    for (std::size_t c = 0; c < 4; ++c)
        if (cells[c] == 0)
            throw Error(ErrorCode::EmptyCell, "no rows with I=" + std::to_string(c / 2) +
                                                  ", Z=" + std::to_string(c % 2));
    if (n < 5) throw Error(ErrorCode::TooFewRows, "need at least 5 rows, got " + std::to_string(n));

    Eigen::MatrixXd x(n, 4);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double it = rows[i].treated_time, z = rows[i].group;
        x.row(static_cast<Eigen::Index>(i)) << 1.0, it, z, it * z;
        y(static_cast<Eigen::Index>(i)) = rows[i].y;
    }
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    Eigen::VectorXd b = qr.solve(y);
    Eigen::VectorXd resid = y - x * b;
    // Quantities at rounding level relative to the outcome scale are exact
    // zeros; otherwise a perfect fit reports t = noise / noise.
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, y.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 1; k < 4; ++k)
        if (std::abs(b(k)) <= tol) b(k) = 0.0;
    if (resid.cwiseAbs().maxCoeff() <= tol * static_cast<double>(n)) resid.setZero();

    // (X'X)^-1 = R^-1 R^-T
    const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(4, 4).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(4, 4));
    const Eigen::MatrixXd xtx_inv = r_inv * r_inv.transpose();

    DidFit fit;
    fit.n = n;
    fit.se_type = se_type;
    fit.residual_variance = resid.squaredNorm() / static_cast<double>(n - 4);
    Eigen::Vector4d var;
    double dof = static_cast<double>(n - 4);
    if (se_type == SeType::Homoskedastic) {
        fit.dof = n - 4;
        var = fit.residual_variance * xtx_inv.diagonal();
    } else {
        std::map<std::string, Eigen::Vector4d> scores;
        for (std::size_t i = 0; i < n; ++i) {
            auto [it, inserted] = scores.try_emplace(rows[i].station_id, Eigen::Vector4d::Zero());
            it->second += x.row(static_cast<Eigen::Index>(i)).transpose() *
                          resid(static_cast<Eigen::Index>(i));
        }
        const std::size_t g = scores.size();
        if (g < 2) throw Error(ErrorCode::TooFewRows, "clustered SEs need at least 2 stations");
        Eigen::Matrix4d meat = Eigen::Matrix4d::Zero();
        for (const auto& [id, s] : scores) meat += s * s.transpose();
        const double gd = static_cast<double>(g), nd = static_cast<double>(n);
        const double scale = gd / (gd - 1.0) * (nd - 1.0) / (nd - 4.0);
        var = (scale * xtx_inv * meat * xtx_inv).diagonal();
        fit.dof = g - 1;
        dof = gd - 1.0;
    }
    for (int k = 0; k < 4; ++k) {
        fit.beta[k] = b(k);
        fit.se[k] = std::sqrt(std::max(0.0, var(k)));
        fit.t_stat[k] = fit.se[k] > 0.0 ? fit.beta[k] / fit.se[k]
                                        : (fit.beta[k] == 0.0 ? 0.0 : std::copysign(INFINITY, fit.beta[k]));
        fit.p_value[k] = fit.se[k] > 0.0 || fit.beta[k] != 0.0 ? two_sided_p(fit.t_stat[k], dof) : 1.0;
    }
    return fit;
}

DidFit did_by_zone(const StationPanel& panel, Pollutant pollutant, const PeriodSpec& periods,
                   ActivityZone zone, SeType se) {
    periods.validate();
    const auto stations = panel.stations();
    if (std::none_of(stations.begin(), stations.end(),
                     [&](const StationMeta& s) { return s.zone == zone; }))
        throw Error(ErrorCode::NoData, "no stations in zone " + std::string(to_string(zone)));

    DidPanel did;
    std::array<std::size_t, 4> cells{};
    for (const auto& obs : panel.observations()) {
        const auto v = obs.value(pollutant);
        if (!v) continue;
        const auto period = period_of(obs.date, periods);
        if (!period || *period == Period::AL) continue;
        const bool during = *period == Period::DL;
        const bool in_zone = panel.station(obs.station_id).zone == zone;
        ++cells[(during ? 2 : 0) + (in_zone ? 1 : 0)];
        did.rows.push_back({*v, during ? 1 : 0, in_zone ? 1 : 0, obs.station_id, obs.date});
    }
    const std::string name(to_string(pollutant));
    if (cells[0] + cells[1] == 0) throw Error(ErrorCode::NoData, "no " + name + " data in BL window");
    if (cells[2] + cells[3] == 0) throw Error(ErrorCode::NoData, "no " + name + " data in DL window");
    static constexpr std::array<const char*, 4> kCell{"control BL", "zone BL", "control DL", "zone DL"};
    for (std::size_t c = 0; c < 4; ++c)
        if (cells[c] == 0) throw Error(ErrorCode::NoData, "no " + name + " data for " + kCell[c]);
    return fit_did(did, se);
}

std::string_view significance_stars(double p) {
    if (p < 0.001) return "***";
    if (p < 0.01) return "**";
    if (p < 0.05) return "*";
    if (p < 0.1) return ".";
    return "";
}

}  // namespace aq::did
