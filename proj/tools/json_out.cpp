#include "json_out.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "aq/error.hpp"

namespace aq::cli {

Json meta(const RunConfig& cfg) {
    Json j;
    j["tool"] = "aqctl";
    j["version"] = std::string(tool_version());
    j["command"] = cfg.command;
    j["seed"] = cfg.seed;
    j["config_hash"] = cfg.config_hash();
    return j;
}

Json opt(const std::optional<double>& v) {
    return v && std::isfinite(*v) ? Json(*v) : Json(nullptr);
}

Json to_json(const DescriptiveSummary& s) {
    Json j;
    j["n"] = s.n;
    j["min"] = s.min;
    j["q1"] = s.q1;
    j["median"] = s.median;
    j["mean"] = s.mean;
    j["q3"] = s.q3;
    j["max"] = s.max;
    j["mode"] = s.mode;
    j["sd"] = s.sd;
    j["skewness"] = s.skewness_pearson1;
    j["excess_kurtosis"] = s.excess_kurtosis;
    j["ci95_mean"] = {s.ci95_mean.first, s.ci95_mean.second};
    return j;
}

Json to_json(const spatial::MoranResult& m) {
    Json j;
    j["i"] = m.i_statistic;
    j["expected_i"] = m.expected_i;
    j["p_value"] = m.p_value;
    j["permutations"] = m.n_permutations;
    return j;
}

Json to_json(const vario::VariogramModel& m) {
    Json j;
    j["family"] = std::string(vario::to_string(m.family));
    j["nugget"] = m.nugget;
    j["sill"] = m.sill;
    j["range"] = m.range;
    if (m.family == vario::Family::Linear) j["slope"] = m.slope;
    return j;
}

Json to_json(const vario::VariogramFit& f) {
    Json j = to_json(f.model);
    j["fit_rmse"] = f.fit_rmse;
    return j;
}

Json to_json(const interp::AccuracyReport& a) {
    Json j;
    j["n"] = a.n;
    j["rmse"] = a.rmse;
    j["r2"] = opt(a.r2);
    j["mse"] = a.mse;
    j["sse"] = a.sse;
    j["tss"] = a.tss;
    return j;
}

Json to_json(const did::DidFit& f, ActivityZone zone) {
    Json j;
    j["zone"] = std::string(to_string(zone));
    auto arr = [](const std::array<double, 4>& a) {
        Json out = Json::array();
        for (double v : a) out.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
        return out;
    };
    j["beta"] = arr(f.beta);
    j["se"] = arr(f.se);
    j["t"] = arr(f.t_stat);
    j["p"] = arr(f.p_value);
    j["n"] = f.n;
    j["dof"] = f.dof;
    return j;
}

Json to_json(const forest::ImportanceReport& r) {
    Json j = Json::array();
    for (const auto& e : r.entries) j.push_back({{"feature", e.feature}, {"importance", e.value}});
    return j;
}

Json to_json(const ts::MkResult& r) {
    Json j;
    j["n"] = r.n;
    j["s"] = r.s_statistic;
    j["tau"] = r.tau;
    j["z"] = r.z;
    j["p_value"] = r.p_value;
    return j;
}

Json to_json(const ts::SeasonalInfluence& s) {
    Json j;
    for (Season season : kSeasons) j[std::string(to_string(season))] = opt(s[season]);
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
    out << text;
}

void write_json(const std::filesystem::path& path, const Json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string grid_csv(const std::vector<interp::GridNode>& nodes) {
    std::string out = "lon,lat,value\n";
    char buf[96];
    for (const auto& n : nodes) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f\n", n.lon, n.lat, n.value);
        out += buf;
    }
    return out;
}

Json grid_geojson(const std::vector<interp::GridNode>& nodes) {
    auto r6 = [](double v) { return std::round(v * 1e6) / 1e6; };
    Json features = Json::array();
    for (const auto& n : nodes) {
        Json f;
        f["type"] = "Feature";
        f["geometry"] = {{"type", "Point"}, {"coordinates", {r6(n.lon), r6(n.lat)}}};
        f["properties"] = {{"value", n.value}};
        features.push_back(std::move(f));
    }
    return {{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

}  // namespace aq::cli
