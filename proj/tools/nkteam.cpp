// nkteam: run scenario grids, aggregate summaries, and execute self-checks.
//
//   nkteam run --grid default --rounds 300 --out results
//   nkteam run --mode lateral --tau 1 --k 3 --structure block --prob 0.5
//   nkteam report --input results/summary.csv --preset table2 --out tables
//   nkteam oracle block-decomposability --seed 7

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nkteam/nkteam.hpp"

namespace fs = std::filesystem;
using namespace nkteam;

namespace {

constexpr const char* kVersion = "0.1.0";

struct RunOptions {
    std::string config_path;
    std::string grid = "default";
    std::optional<std::uint32_t> rounds, periods;
    std::optional<std::uint64_t> seed;
    std::optional<double> alpha, error_sd;
    std::size_t workers = default_workers();
    std::string out;
    bool paper_scale = false;
    bool rounds_csv = false;
    bool quiet = false;
    std::vector<std::string> modes, ks, structures, taus, probs;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("NKTEAM_OUT_DIR"); env && *env) return env;
    return "nkteam-out";
}

RunSpec resolve(const RunOptions& o) {
    RunSpec spec;
    if (o.grid != "default") throw ConfigError("unknown grid '" + o.grid + "' (known: default)");
    if (!o.config_path.empty()) spec = read_config_file(o.config_path, spec);
    if (o.paper_scale) {
        spec.base.rounds = 1500;
        spec.base.periods = 100;
    }
    if (o.rounds) spec.base.rounds = *o.rounds;
    if (o.periods) spec.base.periods = *o.periods;
    if (o.seed) spec.base.master_seed = *o.seed;
    if (o.error_sd) spec.base.error_sd = *o.error_sd;
    if (o.alpha) set_value(spec, "alpha", format_double(*o.alpha));
    if (o.rounds_csv) spec.rounds_csv = true;
    auto axis = [&](const char* key, const std::vector<std::string>& values) {
        if (values.empty()) return;
        std::string joined;
        for (const auto& v : values) joined += (joined.empty() ? "" : ",") + v;
        set_value(spec, key, joined);
    };
    axis("grid.mode", o.modes);
    axis("grid.k", o.ks);
    axis("grid.structure", o.structures);
    axis("grid.tau", o.taus);
    axis("grid.prob", o.probs);
    return spec;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Files written so far; removed again if the command fails part-way.
class OutputSet {
public:
    std::ofstream open(const fs::path& p) {
        written_.push_back(p);
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        return out;
    }
    void commit() { written_.clear(); }
    ~OutputSet() {
        std::error_code ec;
        for (const auto& p : written_) fs::remove(p, ec);
    }

private:
    std::vector<fs::path> written_;
};

int cmd_run(const RunOptions& o) {
    const auto started = std::chrono::steady_clock::now();
    const auto started_utc = utc_now();
    const RunSpec spec = resolve(o);
    const auto configs = enumerate_scenarios(spec.grid, spec.base);
    if (configs.empty()) throw ConfigError("the grid is empty");
    for (const auto& c : configs) c.validate();

    const fs::path dir = o.out.empty() ? default_out_dir() : o.out;
    fs::create_directories(dir);
    if (!o.quiet)
        std::cerr << "running " << configs.size() << " scenario(s) x " << spec.base.rounds << " rounds on "
                  << o.workers << " worker(s)\n";

    // A single scenario parallelises over rounds; a grid over scenarios.
    std::vector<ScenarioResult> results;
    if (configs.size() == 1) {
        results.push_back(run_scenario(configs.front(), o.workers));
    } else {
        std::size_t last_pct = 0;
        results = run_grid(configs, o.workers, [&](std::size_t done, std::size_t total) {
            const auto pct = done * 100 / total;
            if (!o.quiet && pct >= last_pct + 5) {
                last_pct = pct;
                std::cerr << "  " << done << "/" << total << " scenarios\n";
            }
        });
    }

    OutputSet outputs;
    std::vector<std::string> names{"summary.csv", "periods.csv"};
    {
        auto summary = outputs.open(dir / "summary.csv");
        auto periods = outputs.open(dir / "periods.csv");
        write_summary_header(summary);
        write_periods_header(periods);
        for (const auto& r : results) {
            write_summary_row(summary, summarize(r, spec.alpha));
            write_periods_rows(periods, r);
        }
        if (spec.rounds_csv) {
            names.push_back("rounds.csv");
            auto rounds = outputs.open(dir / "rounds.csv");
            write_rounds_header(rounds);
            for (const auto& r : results) write_rounds_rows(rounds, r);
        }
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    std::string listed;
    for (const auto& n : names) listed += (listed.empty() ? "" : ",") + n;
    {
        auto manifest = outputs.open(dir / "manifest.conf");
        write_config(manifest, spec,
                     {{"tool_version", kVersion},
                      {"started_utc", started_utc},
                      {"wall_clock_seconds", format_double(seconds)},
                      {"scenarios", std::to_string(configs.size())},
                      {"outputs", listed}});
    }
    outputs.commit();
    if (!o.quiet) std::cerr << "wrote " << listed << ",manifest.conf to " << dir.string() << "\n";
    return 0;
}

int cmd_report(const std::string& input, const std::string& preset_name, const std::string& out_dir,
               double alpha, std::optional<double> fixed_prob) {
    const auto preset = make_preset(preset_name, fixed_prob);
    std::ifstream in(input);
    if (!in) throw UsageError("cannot open '" + input + "'");
    const auto summaries = read_summary_csv(in, alpha);
    const auto rows = aggregate(summaries, preset, alpha);
    if (rows.empty()) throw UsageError("no scenarios match preset '" + preset_name + "'");
    const fs::path dir = out_dir.empty() ? default_out_dir() : out_dir;
    fs::create_directories(dir);
    OutputSet outputs;
    {
        auto out = outputs.open(dir / (preset_name + ".csv"));
        write_group_csv(out, rows);
    }
    outputs.commit();
    std::cerr << "wrote " << (dir / (preset_name + ".csv")).string() << " (" << rows.size() << " rows)\n";
    return 0;
}

std::string check_list() {
    std::string s;
    for (const auto& c : oracle_checks()) s += (s.empty() ? "" : ", ") + c.name;
    return s;
}

int cmd_oracle(const std::string& name, std::uint64_t seed) {
    std::vector<const OracleCheck*> selected;
    for (const auto& c : oracle_checks())
        if (name == "all" || c.name == name) selected.push_back(&c);
    if (selected.empty()) throw UsageError("unknown check '" + name + "' (known: all, " + check_list() + ")");
    bool ok = true;
    for (const auto* c : selected) {
        const auto r = c->run(seed);
        std::cout << (r.passed ? "PASS " : "FAIL ") << c->name << ": " << r.detail << "\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NK-landscape team coordination simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run one scenario or a scenario grid");
    run_cmd->add_option("--config", run.config_path, "Config or manifest file (key = value)");
    run_cmd->add_option("--grid", run.grid, "Base grid")->check(CLI::IsMember({"default"}));
    run_cmd->add_option("--rounds", run.rounds, "Simulation rounds per scenario");
    run_cmd->add_option("--periods", run.periods, "Periods per round");
    run_cmd->add_option("--seed", run.seed, "Master seed");
    run_cmd->add_option("--workers", run.workers, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--out", run.out, "Output directory (default: $NKTEAM_OUT_DIR or ./nkteam-out)");
    run_cmd->add_option("--alpha", run.alpha, "Significance level for stored confidence intervals");
    run_cmd->add_option("--error-sd", run.error_sd, "Standard deviation of the estimation error");
    run_cmd->add_flag("--paper-scale", run.paper_scale, "1500 rounds of 100 periods");
    run_cmd->add_flag("--rounds-csv", run.rounds_csv, "Also write per-round rounds.csv");
    run_cmd->add_flag("--quiet", run.quiet, "No progress output");
    run_cmd->add_option("--mode", run.modes, "Coordination modes")->delimiter(',');
    run_cmd->add_option("--k", run.ks, "Complexity values K")->delimiter(',');
    run_cmd->add_option("--structure", run.structures, "Interdependence structures")->delimiter(',');
    run_cmd->add_option("--tau", run.taus, "Reformation intervals (integer or inf)")->delimiter(',');
    run_cmd->add_option("--prob", run.probs, "Learning probabilities")->delimiter(',');

    std::string input, preset = "table2", report_out;
    double report_alpha = kDefaultAlpha;
    std::optional<double> fixed_prob;
    auto* report_cmd = app.add_subcommand("report", "Aggregate a summary.csv into a preset table");
    report_cmd->add_option("--input", input, "summary.csv to read")->required();
    report_cmd->add_option("--preset", preset, "table2 | table3 | table4 | fig3");
    report_cmd->add_option("--out", report_out, "Output directory");
    report_cmd->add_option("--alpha", report_alpha, "Alpha the summary was written with");
    report_cmd->add_option("--fix-prob", fixed_prob, "Keep only this learning probability (table presets)");

    std::string check;
    std::uint64_t oracle_seed = 7;
    auto* oracle_cmd = app.add_subcommand("oracle", "Run a built-in verification check");
    oracle_cmd->add_option("check", check, "Check name, or 'all'")->required();
    oracle_cmd->add_option("--seed", oracle_seed, "Seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(run);
        if (*report_cmd) return cmd_report(input, preset, report_out, report_alpha, fixed_prob);
        if (*oracle_cmd) return cmd_oracle(check, oracle_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
