#include "cli.hpp"

#include <CLI11.hpp>

#include "aq/error.hpp"
#include "commands.hpp"

namespace aq::cli {

namespace {

void add_options(CLI::App& app, RunConfig& c) {
    app.set_config("--config", "", "`key = value` settings file; flags on the command line win");

    app.add_option("--stations", c.stations, "stations CSV (id,name,lat,lon,zone)");
    app.add_option("--obs", c.obs, "observations CSV (station_id,date,no,...,aqi)");
    app.add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
    app.add_option("--pollutant", c.pollutant, "target pollutant")->capture_default_str();
    app.add_option("--week", c.week, "ISO week, e.g. 2020-W20");
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();

    app.add_option("--bl", c.bl, "baseline window START..END")->capture_default_str();
    app.add_option("--dl", c.dl, "lockdown window START..END")->capture_default_str();
    app.add_option("--al", c.al, "after-lockdown window START..END")->capture_default_str();

    app.add_option("--method", c.method, "idw | ok | rfk | auto")->capture_default_str();
    app.add_option("--power", c.power, "IDW power or auto")->capture_default_str();
    app.add_option("--family", c.family, "variogram family or auto")->capture_default_str();
    app.add_option("--metric", c.metric, "degrees | km")->capture_default_str();
    app.add_option("--bins", c.bins, "empirical variogram bins")->capture_default_str();
    app.add_option("--cell", c.cell, "grid cell size in degrees")->capture_default_str();
    app.add_option("--grid-format", c.grid_format, "csv | geojson")->capture_default_str();
    app.add_option("--folds", c.folds, "cross-validation folds")->capture_default_str();
    app.add_flag("--force", c.force, "interpolate weeks that fail the Moran gate");

    app.add_option("--ntree", c.ntree, "forest size")->capture_default_str();
    app.add_option("--mtry", c.mtry, "features tried per split (0: p/3)")->capture_default_str();
    app.add_option("--min-leaf", c.min_leaf, "minimum leaf size")->capture_default_str();

    app.add_option("--scheme", c.scheme, "Moran weights: idw | knn")->capture_default_str();
    app.add_option("--weight-power", c.weight_power, "inverse-distance weight power")->capture_default_str();
    app.add_option("--cutoff-km", c.cutoff_km, "inverse-distance cutoff")->capture_default_str();
    app.add_option("--knn", c.knn, "neighbours for knn weights")->capture_default_str();
    app.add_option("--permutations", c.permutations, "Moran permutations")->capture_default_str();
    app.add_option("--alpha", c.alpha, "Moran gating level")->capture_default_str();

    app.add_option("--zones", c.zones, "zones for did")->delimiter(',')->capture_default_str();
    app.add_option("--se", c.se, "homoskedastic | clustered")->capture_default_str();

    app.add_option("--mode-bin", c.mode_bin, "histogram bin width for the mode")->capture_default_str();
    app.add_option("--report-weeks", c.report_weeks, "weeks for the interpolation section (default all)")
        ->delimiter(',');
    app.add_option("--drop", c.drop, "pollutant columns left empty by synth-fixture")->delimiter(',');
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Urban air-quality screening, interpolation and intervention analysis", "aqctl"};
    app.set_version_flag("--version", std::string(tool_version()));
    add_options(app, cfg);
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    const std::vector<std::pair<const char*, const char*>> commands{
        {"ingest", "validate inputs and report missingness"},
        {"moran", "Moran's I permutation test for one week"},
        {"interpolate", "IDW / OK / RFK surfaces with cross-validated accuracy"},
        {"did", "difference-in-differences per activity zone"},
        {"report", "full analysis bundle"},
        {"synth-fixture", "write a seeded synthetic panel"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->footer("Options are shared by all commands; see aqctl --help.");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? "aqctl " + std::string(tool_version()) + "\n"
                                                                   : app.help());
            return kExitOk;
        }
        err << "aqctl: " << e.what() << "\n";
        return kExitSchema;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (cfg.command == "ingest") return cmd_ingest(cfg, out);
        if (cfg.command == "moran") return cmd_moran(cfg, out);
        if (cfg.command == "interpolate") return cmd_interpolate(cfg, out);
        if (cfg.command == "did") return cmd_did(cfg, out);
        if (cfg.command == "report") return cmd_report(cfg, out);
        return cmd_synth_fixture(cfg, out);
    } catch (const ExitError& e) {
        err << "aqctl: " << e.what() << "\n";
        return e.code();
    } catch (const Error& e) {
        err << "aqctl: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "aqctl: " << e.what() << "\n";
        return kExitSchema;
    }
}

}  // namespace aq::cli
