// tfedsim: deterministic federated-learning simulator over time-series data.
//
// Subcommands:
//   run      execute one experiment from a config file
//   grid     execute a pipeline x paradigm/topology grid and summarize it
//   inspect  print the summary of a completed run directory
//   synth    emit a synthetic dataset as CSV
//
// Exit codes: 0 success, 1 validation error, 2 runtime error, 3 integrity.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tfed/errors.hpp"
#include "tfed/experiment.hpp"

namespace fs = std::filesystem;
using tfed::experiment::ExperimentConfig;
using tfed::experiment::ExperimentReport;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitIntegrity = 3;

struct RunOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};

ExperimentConfig load_config(const RunOptions& opts) {
    ExperimentConfig config = ExperimentConfig::load(opts.config_path);
    if (opts.seed) config.seed = *opts.seed;  // the only permitted override
    if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
    if (config.output_dir.empty()) config.output_dir = "run";
    return config;
}

int execute_run(const ExperimentConfig& config, bool quiet = false) {
    const auto started = std::chrono::steady_clock::now();
    ExperimentReport report;
    try {
        report = tfed::experiment::run_experiment(config);
    } catch (const tfed::ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        std::error_code ec;
        fs::remove_all(config.output_dir, ec);  // no partial outputs
        return kExitRuntime;
    }
    const auto elapsed = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - started);
    try {
        tfed::experiment::write_run_directory(config.output_dir, report);
        // Wall-clock lives outside report.json so reruns stay bit-identical.
        std::ofstream timing(fs::path(config.output_dir) / "timing.txt");
        timing << "wall_clock_seconds " << elapsed.count() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        std::error_code ec;
        fs::remove_all(config.output_dir, ec);
        return kExitRuntime;
    }
    if (!quiet) {
        std::cout << "run complete: " << config.output_dir << "\n"
                  << "  macro  P/R/F1 = " << report.test_macro_mean.precision << " / "
                  << report.test_macro_mean.recall << " / " << report.test_macro_mean.f1 << "\n"
                  << "  bytes transmitted (total) = " << 2 * report.total_bytes << "\n"
                  << "  wall clock = " << elapsed.count() << " s\n";
    }
    return kExitOk;
}

int cmd_run(const RunOptions& opts) {
    ExperimentConfig config;
    try {
        config = load_config(opts);
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    }
    return execute_run(config);
}

struct GridCell {
    std::string pipeline;
    std::string paradigm;
    std::string topology;
};

// The default grid: four pipeline configurations against the five valid
// paradigm/topology pairings (DFL and SDFL on fully and ring, CFL on star).
std::vector<GridCell> default_grid() {
    std::vector<GridCell> cells;
    for (const std::string& pipeline :
         {"base", "feature_engineering", "stationary", "all"}) {
        cells.push_back({pipeline, "DFL", "fully"});
        cells.push_back({pipeline, "DFL", "ring"});
        cells.push_back({pipeline, "SDFL", "fully"});
        cells.push_back({pipeline, "SDFL", "ring"});
        cells.push_back({pipeline, "CFL", "star"});
    }
    return cells;
}

int cmd_grid(const RunOptions& opts, const std::string& grid_path) {
    ExperimentConfig base;
    try {
        base = load_config(opts);
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    }

    std::vector<GridCell> cells;
    if (grid_path.empty()) {
        cells = default_grid();
    } else {
        try {
            std::ifstream in(grid_path);
            if (!in) throw tfed::ConfigError("grid: cannot open " + grid_path);
            const auto j = nlohmann::json::parse(in);
            for (const auto& jc : j.at("cells"))
                cells.push_back({jc.at("pipeline").get<std::string>(),
                                 jc.at("paradigm").get<std::string>(),
                                 jc.at("topology").get<std::string>()});
        } catch (const std::exception& e) {
            std::cerr << "validation error: " << e.what() << "\n";
            return kExitValidation;
        }
    }

    const std::string root = base.output_dir;
    std::ostringstream summary;
    summary << "pipeline,paradigm,topology,status,precision,recall,f1,total_bytes\n";
    std::cout << "cell                                    status   P       R       F1\n";
    bool any_failed = false;
    for (const auto& cell : cells) {
        const std::string cell_dir =
            root + "/" + cell.pipeline + "_" + cell.paradigm + "_" + cell.topology;
        std::string config_text = base.to_json();
        auto j = nlohmann::json::parse(config_text);
        j["pipeline"] = cell.pipeline;
        j["paradigm"] = cell.paradigm;
        j["topology"] = cell.topology;
        j["output_dir"] = cell_dir;
        int rc;
        ExperimentConfig cfg;
        try {
            cfg = ExperimentConfig::from_json(j.dump());
            cfg.validate();
            rc = execute_run(cfg, /*quiet=*/true);
        } catch (const std::exception& e) {
            std::cerr << "cell " << cell_dir << ": " << e.what() << "\n";
            rc = kExitValidation;
        }
        const std::string name = cell.pipeline + "_" + cell.paradigm + "_" + cell.topology;
        if (rc == kExitOk) {
            std::ifstream in(fs::path(cell_dir) / "report.json");
            const auto report = nlohmann::json::parse(in);
            const auto& m = report.at("test_macro_mean");
            summary << cell.pipeline << "," << cell.paradigm << "," << cell.topology << ",ok,"
                    << m.at("precision").get<double>() << "," << m.at("recall").get<double>()
                    << "," << m.at("f1").get<double>() << ","
                    << report.at("total_bytes").get<std::uint64_t>() << "\n";
            std::ostringstream line;
            line.precision(4);
            line << std::fixed << m.at("precision").get<double>() << "  "
                 << m.at("recall").get<double>() << "  " << m.at("f1").get<double>();
            std::cout << name << std::string(name.size() < 40 ? 40 - name.size() : 1, ' ')
                      << "ok       " << line.str() << "\n";
        } else {
            any_failed = true;
            summary << cell.pipeline << "," << cell.paradigm << "," << cell.topology
                    << ",failed,,,,\n";
            std::cout << name << std::string(name.size() < 40 ? 40 - name.size() : 1, ' ')
                      << "FAILED\n";
        }
    }
    fs::create_directories(root);
    std::ofstream out(fs::path(root) / "summary.csv");
    out << summary.str();
    return any_failed ? kExitRuntime : kExitOk;
}

int cmd_inspect(const std::string& run_dir) {
    const fs::path dir(run_dir);
    for (const char* name : {"report.json", "ledger.csv", "resolved-config.json"}) {
        if (!fs::exists(dir / name)) {
            std::cerr << "missing file: " << (dir / name).string() << "\n";
            return kExitRuntime;
        }
    }
    nlohmann::json report;
    try {
        std::ifstream in(dir / "report.json");
        report = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        std::cerr << "corrupt file: " << (dir / "report.json").string() << ": " << e.what()
                  << "\n";
        return kExitIntegrity;
    }

    // Re-derive every ledger row checksum.
    bool integrity_ok = true;
    std::uint64_t ledger_rows = 0;
    {
        std::ifstream in(dir / "ledger.csv");
        std::string line;
        std::getline(in, line);  // header
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            const auto last_comma = line.rfind(',');
            if (last_comma == std::string::npos) {
                integrity_ok = false;
                break;
            }
            const std::string body = line.substr(0, last_comma);
            const std::string checksum = line.substr(last_comma + 1);
            std::ostringstream expect;
            expect << std::hex << tfed::experiment::fnv1a(body.data(), body.size());
            if (checksum != expect.str()) {
                std::cerr << "integrity warning: ledger.csv line " << line_no
                          << " checksum mismatch\n";
                integrity_ok = false;
            }
            ++ledger_rows;
        }
    }

    const auto& m = report.at("test_macro_mean");
    std::cout << "run directory : " << run_dir << "\n"
              << "config digest : " << report.at("config_digest").get<std::string>() << "\n"
              << "macro P/R/F1  : " << m.at("precision").get<double>() << " / "
              << m.at("recall").get<double>() << " / " << m.at("f1").get<double>() << "\n"
              << "total bytes   : " << report.at("total_bytes").get<std::uint64_t>() << "\n"
              << "ledger rows   : " << ledger_rows << "\n";
    return integrity_ok ? kExitOk : kExitIntegrity;
}

int cmd_synth(const std::string& config_path, const std::string& out_path) {
    try {
        const ExperimentConfig config = ExperimentConfig::load(config_path);
        const auto records = tfed::data::synthesize(config.source.synth);
        tfed::data::write_csv(out_path, records);
        std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
        return kExitOk;
    } catch (const tfed::ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic federated learning simulator for industrial time series"};
    app.require_subcommand(1);

    RunOptions opts;
    std::uint64_t seed_value = 0;

    auto* run = app.add_subcommand("run", "execute one experiment");
    run->add_option("--config", opts.config_path, "experiment config file")->required();
    auto* run_seed = run->add_option("--seed", seed_value, "seed override");
    run->add_option("--out", opts.out_dir, "output directory");
    int jobs = 1;
    run->add_option("--jobs", jobs, "reserved; execution is sequential");

    auto* grid = app.add_subcommand("grid", "execute an experiment grid");
    std::string grid_path;
    grid->add_option("--config", opts.config_path, "base experiment config file")->required();
    auto* grid_seed = grid->add_option("--seed", seed_value, "seed override");
    grid->add_option("--out", opts.out_dir, "output root directory");
    grid->add_option("--grid", grid_path, "grid spec file (default: the full 20-cell grid)");
    grid->add_option("--jobs", jobs, "reserved; cells run sequentially");

    auto* inspect = app.add_subcommand("inspect", "summarize a completed run directory");
    std::string run_dir;
    inspect->add_option("dir", run_dir, "run directory")->required();

    auto* synth = app.add_subcommand("synth", "emit a synthetic dataset as CSV");
    std::string synth_out = "synthetic.csv";
    synth->add_option("--config", opts.config_path, "config file with a synthetic data spec")
        ->required();
    synth->add_option("--out", synth_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (run_seed->count()) opts.seed = seed_value;
        return cmd_run(opts);
    }
    if (grid->parsed()) {
        if (grid_seed->count()) opts.seed = seed_value;
        return cmd_grid(opts, grid_path);
    }
    if (inspect->parsed()) return cmd_inspect(run_dir);
    if (synth->parsed()) return cmd_synth(opts.config_path, synth_out);
    return kExitValidation;
}
