#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "aq/csv_io.hpp"
#include "aq/error.hpp"
#include "aq/grid.hpp"
#include "aq/interpolation.hpp"
#include "aq/intervention.hpp"
#include "aq/rfk.hpp"
#include "aq/synth.hpp"
#include "aq/timeseries.hpp"
#include "aq/variogram.hpp"

namespace aq::cli {

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::ParseError:
        case ErrorCode::UnknownStation:
        case ErrorCode::DuplicateObservation:
        case ErrorCode::SchemaMismatch:
            return kExitSchema;
        case ErrorCode::NoData:
        case ErrorCode::InsufficientCoverage:
            return kExitUnavailable;
        default:
            return kExitStatistical;
    }
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

StationPanel load(const RunConfig& cfg) {
    if (cfg.stations.empty() || cfg.obs.empty())
        throw ExitError(kExitSchema, "--stations and --obs are required");
    for (const auto& p : {cfg.stations, cfg.obs})
        if (!std::filesystem::is_regular_file(p))
            throw ExitError(kExitSchema, "input file not found: " + p.string());
    return io::load_panel(cfg.stations, cfg.obs);
}

IsoWeek required_week(const RunConfig& cfg) {
    if (cfg.week.empty()) throw ExitError(kExitSchema, "--week is required (e.g. 2020-W20)");
    const auto w = parse_iso_week(cfg.week);
    if (!w) throw ExitError(kExitSchema, "invalid ISO week '" + cfg.week + "'");
    return *w;
}

std::string week_tag(IsoWeek w) { return format_iso_week(w); }

Json error_json(const Error& e) {
    return {{"code", std::string(to_string(e.code()))}, {"message", e.detail()}};
}

std::vector<std::optional<double>> present_values(const StationPanel& panel, Pollutant p) {
    std::vector<std::optional<double>> out;
    for (const auto& o : panel.observations()) out.push_back(o.value(p));
    return out;
}

bool has_values(const StationPanel& panel, Pollutant p) {
    const auto obs = panel.observations();
    return std::any_of(obs.begin(), obs.end(), [&](const Observation& o) { return o.value(p).has_value(); });
}

}  // namespace

// --- weekly data ---------------------------------------------------------------------

WeekIndex index_weeks(const StationPanel& panel) {
    WeekIndex idx;
    const auto obs = panel.observations();
    for (std::size_t k = 0; k < obs.size(); ++k) idx[iso_week_of(obs[k].date)].push_back(k);
    return idx;
}

WeekData week_data(const StationPanel& panel, const std::vector<std::size_t>& obs_idx,
                   Pollutant target, IsoWeek week) {
    const auto stations = panel.stations();
    const auto obs = panel.observations();
    const std::size_t n = stations.size();
    std::vector<std::array<double, kPollutantCount>> sum(n);
    std::vector<std::array<std::size_t, kPollutantCount>> cnt(n);
    for (std::size_t k : obs_idx) {
        const auto& o = obs[k];
        const std::size_t s = panel.station_index(o.station_id);
        for (std::size_t p = 0; p < kPollutantCount; ++p)
            if (o.values[p]) {
                sum[s][p] += *o.values[p];
                ++cnt[s][p];
            }
    }
    static constexpr std::array<Pollutant, 5> kCovariates{Pollutant::NO, Pollutant::NO2, Pollutant::NOx,
                                                          Pollutant::CO, Pollutant::PM10};
    WeekData wd;
    wd.week = week;
    const auto t = static_cast<std::size_t>(target);
    for (std::size_t s = 0; s < n; ++s) {
        if (cnt[s][t] == 0) continue;
        const double y = sum[s][t] / static_cast<double>(cnt[s][t]);
        wd.stations.push_back(s);
        wd.samples.push_back({stations[s].lon, stations[s].lat, y});
        forest::LabeledRow row;
        row.features.east = stations[s].lon;
        row.features.north = stations[s].lat;
        bool any = false;
        for (std::size_t c = 0; c < kCovariates.size(); ++c) {
            const auto p = static_cast<std::size_t>(kCovariates[c]);
            // the target never serves as its own covariate
            if (p == t || cnt[s][p] == 0) continue;
            row.features.pollutants[c] = sum[s][p] / static_cast<double>(cnt[s][p]);
            any = true;
        }
        row.target = y;
        if (any) wd.rows.push_back(row);
    }
    return wd;
}

Gate moran_gate(const StationPanel& panel, const WeekData& wd, const RunConfig& cfg) {
    if (wd.samples.size() < 3)
        throw Error(ErrorCode::TooFewValues, "week " + week_tag(wd.week) + " has " +
                                                 std::to_string(wd.samples.size()) +
                                                 " stations with data, need 3");
    std::vector<StationMeta> present;
    std::vector<double> values;
    for (std::size_t k = 0; k < wd.stations.size(); ++k) {
        present.push_back(panel.stations()[wd.stations[k]]);
        values.push_back(wd.samples[k].value);
    }
    const auto w = spatial::build_weights(present, cfg.weight_scheme());
    Gate g;
    g.moran = spatial::morans_test(values, w, cfg.permutations, cfg.seed);
    g.gated = g.moran.p_value < cfg.alpha;
    return g;
}

// --- interpolation -------------------------------------------------------------------

namespace {

std::vector<vario::Family> families_for(const RunConfig& cfg) {
    if (cfg.family == "auto") return {std::begin(vario::kAllFamilies), std::end(vario::kAllFamilies)};
    const auto f = vario::parse_family(cfg.family);
    if (!f) throw Error(ErrorCode::InvalidArgument, "unknown variogram family '" + cfg.family + "'");
    return {*f};
}

void write_grid(const std::filesystem::path& dir, const std::string& method, IsoWeek week,
                const std::vector<interp::GridNode>& nodes, const RunConfig& cfg) {
    const std::string stem = "grid_" + method + "_" + week_tag(week);
    if (cfg.grid_format == "geojson") {
        Json j = grid_geojson(nodes);
        j["meta"] = meta(cfg);
        write_json(dir / (stem + ".geojson"), j);
    } else {
        write_text(dir / (stem + ".csv"), grid_csv(nodes));
    }
}

interp::GridSpec grid_for(const StationPanel& panel, const RunConfig& cfg) {
    std::vector<GeoPoint> pts;
    for (const auto& s : panel.stations()) pts.push_back({s.lon, s.lat});
    return interp::GridSpec::around(pts, cfg.cell);
}

Json run_idw(const StationPanel& panel, const WeekData& wd, const RunConfig& cfg,
             const std::optional<std::filesystem::path>& grid_dir) {
    const interp::CvConfig cv{cfg.folds, cfg.seed};
    interp::IdwParams params;
    params.metric = cfg.distance_metric();
    Json j;
    if (cfg.power == "auto") {
        const auto grid = interp::default_power_grid();
        const auto sel = interp::idw_select_power(wd.samples, grid, cv, params);
        params.power = sel.best_power;
        Json sweep = Json::array();
        for (const auto& s : sel.per_power)
            sweep.push_back({{"p", s.power}, {"rmse", s.rmse}, {"r2", opt(s.r2)}});
        j["power_selection"] = "auto";
        j["power_sweep"] = sweep;
    } else {
        try {
            params.power = std::stod(cfg.power);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "power must be a number or 'auto'");
        }
        if (!(params.power > 0.0)) throw Error(ErrorCode::InvalidArgument, "power must be > 0");
        j["power_selection"] = "fixed";
    }
    j["power"] = params.power;
    j["cv"] = to_json(interp::kfold_cv(wd.samples, cv, params));
    if (grid_dir)
        write_grid(*grid_dir, "idw", wd.week,
                   interp::grid_interpolate(wd.samples, grid_for(panel, cfg), params), cfg);
    return j;
}

Json run_ok(const StationPanel& panel, const WeekData& wd, const RunConfig& cfg,
            const std::optional<std::filesystem::path>& grid_dir) {
    const auto metric = cfg.distance_metric();
    const auto emp = vario::empirical_variogram(wd.samples, cfg.bins, vario::kDefaultMaxDistFraction, metric);
    const auto families = families_for(cfg);
    std::vector<vario::VariogramFit> fits;
    Json candidates = Json::array();
    for (auto f : families) {
        try {
            fits.push_back(vario::fit_variogram(emp, f));
            candidates.push_back(to_json(fits.back()));
        } catch (const Error& e) {
            candidates.push_back({{"family", std::string(vario::to_string(f))}, {"error", error_json(e)}});
        }
    }
    if (fits.empty()) throw Error(ErrorCode::DegenerateFit, "no variogram family could be fitted");
    const auto& best = vario::select_best(fits);
    Json j;
    j["family_selection"] = cfg.family == "auto" ? "auto" : "fixed";
    j["variogram"] = to_json(best);
    if (families.size() > 1) j["variogram_candidates"] = candidates;
    j["cv"] = to_json(interp::kfold_cv(wd.samples, {cfg.folds, cfg.seed}, best.model, metric));
    if (grid_dir)
        write_grid(*grid_dir, "ok", wd.week,
                   interp::grid_interpolate(wd.samples, grid_for(panel, cfg), best.model, metric), cfg);
    return j;
}

Json run_rfk(const StationPanel& panel, const WeekData& wd, const RunConfig& cfg,
             const std::optional<std::filesystem::path>& grid_dir) {
    if (wd.rows.size() < 3)
        throw Error(ErrorCode::TooFewSamples, "RFK needs covariates at 3 or more stations");
    forest::RfkConfig rc;
    rc.forest = cfg.forest_config();
    rc.families = families_for(cfg);
    rc.n_bins = cfg.bins;
    rc.metric = cfg.distance_metric();
    Json j;
    j["ntree"] = cfg.ntree;
    j["n_rows"] = wd.rows.size();
    j["cv"] = to_json(forest::rfk_kfold_cv(wd.rows, rc, {cfg.folds, cfg.seed}).report);
    const auto model = forest::fit_rfk(wd.rows, rc);
    j["importance"] = to_json(forest::importance(*model.forest));
    const auto& fit = model.kriging.residual_variogram();
    j["residual_variogram"] = fit ? to_json(*fit) : Json(nullptr);
    if (grid_dir)
        write_grid(*grid_dir, "rfk", wd.week,
                   interp::grid_interpolate(wd.rows, grid_for(panel, cfg), model), cfg);
    return j;
}

}  // namespace

Json evaluate_methods(const StationPanel& panel, const WeekData& wd, const RunConfig& cfg,
                      const std::vector<std::string>& methods,
                      const std::optional<std::filesystem::path>& grid_dir, bool tolerate_failures) {
    Json results;
    Json comparison = Json::array();
    std::optional<std::pair<double, std::string>> best;
    for (const auto& m : methods) {
        Json r;
        try {
            if (m == "idw") r = run_idw(panel, wd, cfg, grid_dir);
            else if (m == "ok") r = run_ok(panel, wd, cfg, grid_dir);
            else if (m == "rfk") r = run_rfk(panel, wd, cfg, grid_dir);
            else throw Error(ErrorCode::InvalidArgument, "unknown method '" + m + "'");
        } catch (const Error& e) {
            if (!tolerate_failures || e.code() == ErrorCode::InvalidArgument) throw;
            r = {{"error", error_json(e)}};
        }
        if (r.contains("cv")) {
            const double rmse = r["cv"]["rmse"].get<double>();
            comparison.push_back({{"method", m}, {"rmse", rmse}, {"r2", r["cv"]["r2"]}});
            if (!best || rmse < best->first) best = {rmse, m};
        } else {
            comparison.push_back({{"method", m}, {"rmse", nullptr}, {"r2", nullptr}});
        }
        results[m] = std::move(r);
    }
    Json j;
    j["methods"] = std::move(results);
    j["comparison"] = std::move(comparison);
    j["best_method"] = best ? Json(best->second) : Json(nullptr);
    return j;
}

// --- commands ------------------------------------------------------------------------

int cmd_ingest(const RunConfig& cfg, std::ostream& out) {
    const auto panel = load(cfg);
    const auto stations = panel.stations();
    const auto obs = panel.observations();
    const double cells = static_cast<double>(stations.size() * panel.day_count());

    Json j;
    j["meta"] = meta(cfg);
    j["stations"] = stations.size();
    j["observations"] = obs.size();
    j["date_range"] = {{"start", format_date(panel.date_range().start)},
                       {"end", format_date(panel.date_range().end)},
                       {"days", panel.day_count()}};
    Json zones;
    for (auto z : {ActivityZone::Transport, ActivityZone::Residential, ActivityZone::Commercial,
                   ActivityZone::Institutional, ActivityZone::Unclassified})
        zones[std::string(to_string(z))] =
            std::count_if(stations.begin(), stations.end(), [&](const StationMeta& s) { return s.zone == z; });
    j["zones"] = zones;

    Json miss = Json::array();
    Json warnings = Json::array();
    out << "pollutant  present  missing  missing_pct\n";
    for (Pollutant p : kPollutants) {
        const auto present = static_cast<std::size_t>(std::count_if(
            obs.begin(), obs.end(), [&](const Observation& o) { return o.value(p).has_value(); }));
        const double missing = cells - static_cast<double>(present);
        const double pct = cells > 0 ? 100.0 * missing / cells : 0.0;
        miss.push_back({{"pollutant", std::string(to_string(p))},
                        {"present", present},
                        {"missing", static_cast<std::size_t>(missing)},
                        {"missing_pct", std::round(pct * 100.0) / 100.0}});
        char line[96];
        std::snprintf(line, sizeof line, "%-9s  %7zu  %7zu  %10.2f\n", std::string(to_string(p)).c_str(),
                      present, static_cast<std::size_t>(missing), pct);
        out << line;
        if (present == 0) warnings.push_back("no values for " + std::string(to_string(p)));
    }
    std::vector<bool> seen(stations.size(), false);
    for (const auto& o : obs) seen[panel.station_index(o.station_id)] = true;
    for (std::size_t s = 0; s < stations.size(); ++s)
        if (!seen[s]) warnings.push_back("station " + stations[s].id + " has no observations");
    j["missingness"] = miss;
    j["warnings"] = warnings;
    write_json(cfg.out_dir / "ingest.json", j);
    for (const auto& w : warnings) out << "warning: " << w.get<std::string>() << "\n";
    return kExitOk;
}

int cmd_moran(const RunConfig& cfg, std::ostream& out) {
    const auto panel = load(cfg);
    const auto week = required_week(cfg);
    const auto target = cfg.parsed_pollutant();
    const auto weeks = index_weeks(panel);
    const auto it = weeks.find(week);
    if (it == weeks.end()) throw Error(ErrorCode::NoData, "no observations in week " + week_tag(week));
    const auto wd = week_data(panel, it->second, target, week);
    const auto gate = moran_gate(panel, wd, cfg);

    Json j;
    j["meta"] = meta(cfg);
    j["week"] = week_tag(week);
    j["pollutant"] = cfg.pollutant;
    j["scheme"] = spatial::describe(cfg.weight_scheme());
    j["n_stations"] = wd.samples.size();
    j["moran"] = to_json(gate.moran);
    j["alpha"] = cfg.alpha;
    j["gated"] = gate.gated;
    write_json(cfg.out_dir / ("moran_" + week_tag(week) + ".json"), j);
    out << "moran " << week_tag(week) << ": I=" << fmt("%.6f", gate.moran.i_statistic)
        << " p=" << fmt("%.4f", gate.moran.p_value) << " gated=" << (gate.gated ? "true" : "false") << "\n";
    return kExitOk;
}

int cmd_interpolate(const RunConfig& cfg, std::ostream& out) {
    const auto panel = load(cfg);
    const auto week = required_week(cfg);
    const auto target = cfg.parsed_pollutant();
    static const std::vector<std::string> kAll{"idw", "ok", "rfk"};
    if (cfg.method != "auto" && std::find(kAll.begin(), kAll.end(), cfg.method) == kAll.end())
        throw ExitError(kExitSchema, "unknown method '" + cfg.method + "'");
    if (cfg.grid_format != "csv" && cfg.grid_format != "geojson")
        throw ExitError(kExitSchema, "grid format must be csv or geojson");
    const auto weeks = index_weeks(panel);
    const auto it = weeks.find(week);
    if (it == weeks.end()) throw Error(ErrorCode::NoData, "no observations in week " + week_tag(week));
    const auto wd = week_data(panel, it->second, target, week);

    Json gate_json;
    if (cfg.force) {
        try {
            const auto g = moran_gate(panel, wd, cfg);
            gate_json = to_json(g.moran);
            gate_json["gated"] = g.gated;
        } catch (const Error& e) {
            gate_json = {{"error", error_json(e)}, {"gated", false}};
        }
        gate_json["forced"] = true;
    } else {
        const auto g = moran_gate(panel, wd, cfg);
        if (!g.gated)
            throw ExitError(kExitUnavailable,
                            "week " + week_tag(week) + " is not spatially autocorrelated (Moran p = " +
                                fmt("%.4f", g.moran.p_value) + "); use --force to interpolate anyway");
        gate_json = to_json(g.moran);
        gate_json["gated"] = true;
        gate_json["forced"] = false;
    }

    const std::vector<std::string> methods = cfg.method == "auto" ? kAll : std::vector{cfg.method};
    Json eval = evaluate_methods(panel, wd, cfg, methods, cfg.out_dir, cfg.method == "auto");

    Json j;
    j["meta"] = meta(cfg);
    j["week"] = week_tag(week);
    j["pollutant"] = cfg.pollutant;
    j["n_samples"] = wd.samples.size();
    j["folds"] = cfg.folds;
    j["metric"] = std::string(to_string(cfg.distance_metric()));
    j["moran"] = gate_json;
    for (auto& [k, v] : eval.items()) j[k] = v;
    write_json(cfg.out_dir / "accuracy.json", j);

    if (j["methods"].contains("idw") && j["methods"]["idw"].contains("power_sweep")) {
        Json sweep;
        sweep["meta"] = meta(cfg);
        sweep["week"] = week_tag(week);
        sweep["rows"] = j["methods"]["idw"]["power_sweep"];
        sweep["best_power"] = j["methods"]["idw"]["power"];
        write_json(cfg.out_dir / "power_sweep.json", sweep);
    }
    for (const auto& row : j["comparison"])
        out << row["method"].get<std::string>() << ": rmse="
            << (row["rmse"].is_null() ? std::string("n/a") : fmt("%.4f", row["rmse"].get<double>())) << "\n";
    return kExitOk;
}

namespace {

std::string did_table(const Json& zones) {
    std::ostringstream md;
    md << "| Zone | β₀ | β₁ (I) | β₂ (Z) | β₃ (I·Z) | SE(β₃) | t(β₃) | p(β₃) | |\n";
    md << "|---|---:|---:|---:|---:|---:|---:|---:|---|\n";
    for (const auto& z : zones) {
        md << "| " << z["zone"].get<std::string>() << " | ";
        if (z.contains("error")) {
            md << "n/a | n/a | n/a | n/a | n/a | n/a | n/a | " << z["error"]["code"].get<std::string>() << " |\n";
            continue;
        }
        auto at = [&](const char* key, int k) {
            const auto& v = z[key][k];
            return v.is_null() ? std::string("n/a") : fmt("%.4f", v.get<double>());
        };
        const double p = z["p"][3].is_null() ? 1.0 : z["p"][3].get<double>();
        md << at("beta", 0) << " | " << at("beta", 1) << " | " << at("beta", 2) << " | " << at("beta", 3)
           << " | " << at("se", 3) << " | " << at("t", 3) << " | " << fmt("%.5g", p) << " | "
           << did::significance_stars(p) << " |\n";
    }
    md << "\nSignif. codes: *** p < 0.001, ** p < 0.01, * p < 0.05, . p < 0.1\n";
    return md.str();
}

}  // namespace

int cmd_did(const RunConfig& cfg, std::ostream& out) {
    const auto panel = load(cfg);
    const auto target = cfg.parsed_pollutant();
    const auto periods = cfg.periods();
    const auto se = cfg.se_type();
    Json zones = Json::array();
    for (auto zone : cfg.parsed_zones())
        zones.push_back(to_json(did::did_by_zone(panel, target, periods, zone, se), zone));
    Json j;
    j["meta"] = meta(cfg);
    j["pollutant"] = cfg.pollutant;
    j["periods"] = {{"bl", cfg.bl}, {"dl", cfg.dl}};
    j["se_type"] = std::string(did::to_string(se));
    j["zones"] = zones;
    write_json(cfg.out_dir / "did.json", j);
    const std::string table = did_table(zones);
    write_text(cfg.out_dir / "did.md", table);
    out << table;
    return kExitOk;
}

// --- report --------------------------------------------------------------------------

namespace {

struct Skip {
    std::string reason;
};

template <typename F>
Json section(F&& body, int& first_error) {
    try {
        return {{"status", "ok"}, {"data", body()}};
    } catch (const Skip& s) {
        return {{"status", "skipped"}, {"reason", s.reason}};
    } catch (const Error& e) {
        if (first_error == 0) first_error = exit_code_for(e.code());
        return {{"status", "error"}, {"error", error_json(e)}};
    }
}

std::vector<int> panel_years(const StationPanel& panel) {
    std::vector<int> years;
    for (int y = int(panel.date_range().start.year()); y <= int(panel.date_range().end.year()); ++y)
        years.push_back(y);
    return years;
}

Json report_descriptives(const StationPanel& panel, const RunConfig& cfg) {
    Json rows = Json::array();
    std::size_t ok = 0;
    for (Pollutant p : kPollutants) {
        std::vector<double> v;
        for (const auto& x : present_values(panel, p))
            if (x) v.push_back(*x);
        Json r{{"pollutant", std::string(to_string(p))}};
        if (v.empty()) {
            r["status"] = "skipped";
            r["reason"] = "no values";
        } else {
            try {
                r["status"] = "ok";
                r["summary"] = to_json(descriptive_summary(v, cfg.mode_bin));
                ++ok;
            } catch (const Error& e) {
                r["status"] = "error";
                r["error"] = error_json(e);
            }
        }
        rows.push_back(r);
    }
    if (ok == 0) throw Skip{"no pollutant has values"};
    return rows;
}

Json report_seasonal(const StationPanel& panel, Pollutant target) {
    Json rows = Json::array();
    for (auto zone : kClassifiedZones)
        for (int year : panel_years(panel)) {
            Json r{{"zone", std::string(to_string(zone))}, {"year", year}};
            try {
                r["deviation"] = to_json(ts::seasonal_influence(panel, target, zone, year));
            } catch (const Error& e) {
                r["error"] = error_json(e);
            }
            rows.push_back(r);
        }
    return rows;
}

Json report_declination(const StationPanel& panel, Pollutant target, const PeriodSpec& periods) {
    Json rows = Json::array();
    for (auto zone : kClassifiedZones) {
        double sb = 0, sd = 0;
        std::size_t nb = 0, nd = 0;
        for (const auto& o : panel.observations()) {
            const auto v = o.value(target);
            if (!v || panel.station(o.station_id).zone != zone) continue;
            if (periods.bl.contains(o.date)) sb += *v, ++nb;
            else if (periods.dl.contains(o.date)) sd += *v, ++nd;
        }
        Json r{{"zone", std::string(to_string(zone))}};
        if (nb == 0 || nd == 0) {
            r["error"] = {{"code", "NoData"}, {"message", "zone lacks BL or DL values"}};
        } else {
            const double mb = sb / double(nb), md = sd / double(nd);
            r["mean_bl"] = mb;
            r["mean_dl"] = md;
            try {
                r["declination_pct"] = ts::average_declination(mb, md);
            } catch (const Error& e) {
                r["error"] = error_json(e);
            }
        }
        rows.push_back(r);
    }
    return rows;
}

Json report_interpolation(const StationPanel& panel, Pollutant target, const RunConfig& cfg) {
    const auto index = index_weeks(panel);
    std::vector<IsoWeek> weeks;
    if (cfg.report_weeks.empty()) {
        for (const auto& [w, _] : index) weeks.push_back(w);
    } else {
        for (const auto& s : cfg.report_weeks) {
            const auto w = parse_iso_week(s);
            if (!w) throw Error(ErrorCode::InvalidArgument, "invalid report week '" + s + "'");
            weeks.push_back(*w);
        }
    }
    Json rows = Json::array();
    Json ungated = Json::array();
    Json failed = Json::array();
    static const std::vector<std::string> kAll{"idw", "ok", "rfk"};
    for (IsoWeek w : weeks) {
        const auto it = index.find(w);
        if (it == index.end()) {
            failed.push_back({{"week", week_tag(w)}, {"error", {{"code", "NoData"}, {"message", "no observations"}}}});
            continue;
        }
        const auto wd = week_data(panel, it->second, target, w);
        Gate g;
        try {
            g = moran_gate(panel, wd, cfg);
        } catch (const Error& e) {
            failed.push_back({{"week", week_tag(w)}, {"error", error_json(e)}});
            continue;
        }
        if (!g.gated) {
            ungated.push_back({{"week", week_tag(w)}, {"moran_p", g.moran.p_value}});
            continue;
        }
        const Json eval = evaluate_methods(panel, wd, cfg, kAll, std::nullopt, true);
        Json r{{"week", week_tag(w)}, {"n", wd.samples.size()}, {"moran_i", g.moran.i_statistic},
               {"moran_p", g.moran.p_value}};
        for (const auto& c : eval["comparison"]) {
            const std::string m = c["method"].get<std::string>();
            r[m + "_rmse"] = c["rmse"];
            r[m + "_r2"] = c["r2"];
        }
        r["best_method"] = eval["best_method"];
        if (eval["methods"]["idw"].contains("power")) r["idw_power"] = eval["methods"]["idw"]["power"];
        if (eval["methods"]["ok"].contains("variogram"))
            r["ok_family"] = eval["methods"]["ok"]["variogram"]["family"];
        rows.push_back(r);
    }
    return {{"gated_weeks", rows}, {"ungated_weeks", ungated}, {"failed_weeks", failed}};
}

Json report_did(const StationPanel& panel, Pollutant target, const RunConfig& cfg) {
    Json zones = Json::array();
    const auto periods = cfg.periods();
    for (auto zone : kClassifiedZones) {
        try {
            zones.push_back(to_json(did::did_by_zone(panel, target, periods, zone, cfg.se_type()), zone));
        } catch (const Error& e) {
            zones.push_back({{"zone", std::string(to_string(zone))}, {"error", error_json(e)}});
        }
    }
    return zones;
}

Json report_mann_kendall(const StationPanel& panel, Pollutant target) {
    Json rows = Json::array();
    const Date first = panel.date_range().start;
    for (std::size_t s = 0; s < panel.stations().size(); ++s) {
        const auto series = panel.daily_series(s, target);
        for (Season season : kSeasons) {
            std::vector<std::optional<double>> part;
            for (std::size_t d = 0; d < series.size(); ++d)
                if (season_of(add_days(first, static_cast<long>(d))) == season) part.push_back(series[d]);
            Json r{{"station", panel.stations()[s].id}, {"season", std::string(to_string(season))}};
            try {
                r["mk"] = to_json(ts::mann_kendall(part));
            } catch (const Error& e) {
                r["error"] = error_json(e);
            }
            rows.push_back(r);
        }
    }
    return rows;
}

std::string cell(const Json& v, const char* f = "%.4f") {
    return v.is_null() ? "n/a" : fmt(f, v.get<double>());
}

std::string report_markdown(const Json& rep) {
    std::ostringstream md;
    md << "# Air quality report\n\n";
    md << "seed " << rep["meta"]["seed"].get<std::uint64_t>() << ", config "
       << rep["meta"]["config_hash"].get<std::string>() << ", aqctl "
       << rep["meta"]["version"].get<std::string>() << "\n";
    const auto& s = rep["sections"];
    auto header = [&](const char* key, const char* title) {
        md << "\n## " << title << "\n\n";
        const auto& sec = s[key];
        const std::string st = sec["status"].get<std::string>();
        if (st == "skipped") md << "_skipped: " << sec["reason"].get<std::string>() << "_\n";
        if (st == "error") md << "_error: " << sec["error"]["message"].get<std::string>() << "_\n";
        return st == "ok";
    };
    if (header("descriptives", "Descriptive statistics")) {
        md << "| Pollutant | n | Mean | Median | Mode | SD | Skewness | Kurtosis |\n|---|---:|---:|---:|---:|---:|---:|---:|\n";
        for (const auto& r : s["descriptives"]["data"]) {
            md << "| " << r["pollutant"].get<std::string>() << " | ";
            if (r["status"] != "ok") {
                md << r["status"].get<std::string>() << " | | | | | | |\n";
                continue;
            }
            const auto& x = r["summary"];
            md << x["n"].get<std::size_t>() << " | " << cell(x["mean"], "%.2f") << " | "
               << cell(x["median"], "%.2f") << " | " << cell(x["mode"], "%.2f") << " | "
               << cell(x["sd"], "%.2f") << " | " << cell(x["skewness"]) << " | "
               << cell(x["excess_kurtosis"]) << " |\n";
        }
    }
    if (header("seasonal_influence", "Seasonal influence (index - 100)")) {
        md << "| Zone | Year | Winter | Spring | Summer | Monsoon |\n|---|---:|---:|---:|---:|---:|\n";
        for (const auto& r : s["seasonal_influence"]["data"]) {
            md << "| " << r["zone"].get<std::string>() << " | " << r["year"].get<int>() << " | ";
            if (r.contains("error")) {
                md << r["error"]["code"].get<std::string>() << " | | | |\n";
                continue;
            }
            for (Season season : kSeasons)
                md << cell(r["deviation"][std::string(to_string(season))], "%.2f") << " | ";
            md << "\n";
        }
    }
    if (header("declination", "Average declination, lockdown vs baseline")) {
        md << "| Zone | Mean BL | Mean DL | Change % |\n|---|---:|---:|---:|\n";
        for (const auto& r : s["declination"]["data"]) {
            md << "| " << r["zone"].get<std::string>() << " | ";
            if (r.contains("error")) {
                md << r["error"]["code"].get<std::string>() << " | | |\n";
                continue;
            }
            md << cell(r["mean_bl"], "%.2f") << " | " << cell(r["mean_dl"], "%.2f") << " | "
               << cell(r["declination_pct"], "%.2f") << " |\n";
        }
    }
    if (header("interpolation", "Interpolator comparison (10-fold CV RMSE)")) {
        const auto& d = s["interpolation"]["data"];
        md << "| Week | n | Moran p | IDW | OK | RFK | Best |\n|---|---:|---:|---:|---:|---:|---|\n";
        for (const auto& r : d["gated_weeks"])
            md << "| " << r["week"].get<std::string>() << " | " << r["n"].get<std::size_t>() << " | "
               << cell(r["moran_p"]) << " | " << cell(r["idw_rmse"]) << " | " << cell(r["ok_rmse"]) << " | "
               << cell(r["rfk_rmse"]) << " | "
               << (r["best_method"].is_null() ? "n/a" : r["best_method"].get<std::string>()) << " |\n";
        md << "\n" << d["ungated_weeks"].size() << " ungated weeks, " << d["failed_weeks"].size()
           << " weeks without a usable Moran test.\n";
    }
    if (header("did", "Difference in differences")) md << did_table(s["did"]["data"]);
    if (header("mann_kendall", "Mann-Kendall tau by station and season")) {
        md << "| Station | Winter | Spring | Summer | Monsoon |\n|---|---:|---:|---:|---:|\n";
        const auto& rows = s["mann_kendall"]["data"];
        for (std::size_t i = 0; i + 3 < rows.size(); i += 4) {
            md << "| " << rows[i]["station"].get<std::string>() << " | ";
            for (std::size_t k = 0; k < 4; ++k) {
                const auto& r = rows[i + k];
                md << (r.contains("mk") ? cell(r["mk"]["tau"], "%.3f") : std::string("n/a")) << " | ";
            }
            md << "\n";
        }
    }
    return md.str();
}

}  // namespace

int cmd_report(const RunConfig& cfg, std::ostream& out) {
    const auto panel = load(cfg);
    const auto target = cfg.parsed_pollutant();
    const auto periods = cfg.periods();
    const bool target_ok = has_values(panel, target);
    const std::string missing = "no " + cfg.pollutant + " values in the panel";
    auto need_target = [&] {
        if (!target_ok) throw Skip{missing};
    };

    int first_error = 0;
    Json sections;
    sections["descriptives"] = section([&] { return report_descriptives(panel, cfg); }, first_error);
    sections["seasonal_influence"] =
        section([&] { need_target(); return report_seasonal(panel, target); }, first_error);
    sections["declination"] =
        section([&] { need_target(); return report_declination(panel, target, periods); }, first_error);
    sections["interpolation"] =
        section([&] { need_target(); return report_interpolation(panel, target, cfg); }, first_error);
    sections["did"] = section([&] { need_target(); return report_did(panel, target, cfg); }, first_error);
    sections["mann_kendall"] =
        section([&] { need_target(); return report_mann_kendall(panel, target); }, first_error);

    Json rep;
    rep["meta"] = meta(cfg);
    rep["pollutant"] = cfg.pollutant;
    rep["inputs"] = {{"stations", panel.stations().size()},
                     {"observations", panel.observations().size()},
                     {"start", format_date(panel.date_range().start)},
                     {"end", format_date(panel.date_range().end)}};
    rep["periods"] = {{"bl", cfg.bl}, {"dl", cfg.dl}, {"al", cfg.al}};
    rep["sections"] = sections;
    write_json(cfg.out_dir / "report.json", rep);
    write_text(cfg.out_dir / "report.md", report_markdown(rep));

    std::size_t ok = 0;
    for (const auto& [name, sec] : sections.items()) {
        out << name << ": " << sec["status"].get<std::string>() << "\n";
        ok += sec["status"] == "ok";
    }
    if (ok > 0) return kExitOk;
    if (first_error != 0) return first_error;
    throw ExitError(kExitUnavailable, "no report section produced results");
}

// --- synth-fixture -------------------------------------------------------------------

int cmd_synth_fixture(const RunConfig& cfg, std::ostream& out) {
    synth::FixtureConfig fc;
    fc.seed = cfg.seed;
    fc.periods = cfg.periods();
    for (const auto& d : cfg.drop) {
        const auto p = parse_pollutant(d);
        if (!p) throw ExitError(kExitSchema, "unknown pollutant '" + d + "' in --drop");
        fc.dropped_pollutants.push_back(*p);
    }
    const auto fx = synth::generate(fc);
    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream s(cfg.out_dir / "stations.csv", std::ios::binary);
        io::write_stations(s, fx.stations);
        std::ofstream o(cfg.out_dir / "observations.csv", std::ios::binary);
        io::write_observations(o, fx.observations);
        if (!s || !o) throw ExitError(kExitSchema, "cannot write fixture to " + cfg.out_dir.string());
    }
    Json truth;
    truth["meta"] = meta(cfg);
    truth["start"] = format_date(fc.start);
    truth["end"] = format_date(fc.end);
    truth["stations"] = fx.stations.size();
    truth["observations"] = fx.observations.size();
    truth["base_level"] = fc.base_level;
    Json mult;
    for (Season s : kSeasons) mult[std::string(to_string(s))] = fc.season_multiplier[static_cast<std::size_t>(s)];
    truth["season_multiplier"] = mult;
    truth["station_field"] = to_json(fc.station_field);
    truth["weekly_field"] = to_json(fc.weekly_field);
    truth["noise_sd"] = fc.noise_sd;
    truth["common_lockdown_shift"] = fc.common_lockdown_shift;
    Json zones = Json::array();
    for (const auto& z : fx.zones)
        zones.push_back({{"zone", std::string(to_string(z.zone))},
                         {"planted_shift", z.planted_shift},
                         {"expected_beta3", z.expected_beta3}});
    truth["zones"] = zones;
    Json dropped = Json::array();
    for (auto p : fc.dropped_pollutants) dropped.push_back(std::string(to_string(p)));
    truth["dropped_pollutants"] = dropped;
    write_json(cfg.out_dir / "truth.json", truth);
    out << "wrote " << fx.stations.size() << " stations, " << fx.observations.size()
        << " observations to " << cfg.out_dir.string() << "\n";
    return kExitOk;
}

}  // namespace aq::cli
