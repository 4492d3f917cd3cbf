#pragma once

// Run configuration files, manifests, and the CSV schemas.
//
// Config format: one `key = value` per line, `#` starts a comment, list values
// are written `[a, b, c]`. Keys under `meta.` are informational and ignored on
// read, so a manifest can be fed back as a config.

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "nkteam/engine.hpp"
#include "nkteam/error.hpp"
#include "nkteam/metrics.hpp"

namespace nkteam {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
T parse_number(std::string_view text, const std::string& what) {
    T value{};
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty())
        throw ConfigError(what + ": cannot parse '" + std::string(text) + "'");
    return value;
}

}  // namespace detail

inline FormationSchedule parse_tau(std::string_view text) {
    if (text == "inf" || text == "infinity" || text == "never") return FormationSchedule::never_again();
    return FormationSchedule::every(detail::parse_number<std::uint32_t>(text, "tau"));
}

inline CoordinationMode parse_mode_or_throw(std::string_view text) {
    if (auto m = parse_mode(text)) return *m;
    throw ConfigError("unknown coordination mode '" + std::string(text) +
                      "' (known: autonomous, sequential, liaison, lateral)");
}

inline Structure parse_structure_or_throw(std::string_view text) {
    if (auto s = parse_structure(text)) return *s;
    throw ConfigError("unknown structure '" + std::string(text) +
                      "' (known: block, centralized, dependent, hierarchical, local, random)");
}

// Everything needed to reproduce a run.
struct RunSpec {
    ScenarioConfig base;
    Grid grid = default_grid();
    double alpha = kDefaultAlpha;
    bool rounds_csv = false;
};

inline void set_value(RunSpec& spec, const std::string& key, std::string_view raw) {
    std::vector<std::string> items;
    const auto value = detail::trim(raw);
    if (!value.empty() && value.front() == '[') {
        if (value.back() != ']') throw ConfigError(key + ": unterminated list");
        const auto inner = detail::trim(value.substr(1, value.size() - 2));
        if (!inner.empty()) items = detail::split(inner, ',');
    } else {
        items = detail::split(value, ',');
    }
    if (items.empty() || std::any_of(items.begin(), items.end(), [](const auto& s) { return s.empty(); }))
        throw ConfigError(key + ": empty value");

    auto scalar = [&]() -> const std::string& {
        if (items.size() != 1) throw ConfigError(key + ": expected a single value");
        return items.front();
    };
    auto& b = spec.base;
    auto& g = spec.grid;
    if (key == "n") b.n = detail::parse_number<std::size_t>(scalar(), key);
    else if (key == "m") b.m_subtasks = detail::parse_number<std::size_t>(scalar(), key);
    else if (key == "p") b.p_agents = detail::parse_number<std::size_t>(scalar(), key);
    else if (key == "periods") b.periods = detail::parse_number<std::uint32_t>(scalar(), key);
    else if (key == "rounds") b.rounds = detail::parse_number<std::uint32_t>(scalar(), key);
    else if (key == "seed") b.master_seed = detail::parse_number<std::uint64_t>(scalar(), key);
    else if (key == "error_sd") b.error_sd = detail::parse_number<double>(scalar(), key);
    else if (key == "alpha") {
        spec.alpha = detail::parse_number<double>(scalar(), key);
        if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    } else if (key == "output.rounds_csv") {
        const auto& v = scalar();
        if (v != "true" && v != "false") throw ConfigError(key + ": expected true or false");
        spec.rounds_csv = v == "true";
    } else if (key == "grid.mode") {
        g.modes.clear();
        for (const auto& s : items) g.modes.push_back(parse_mode_or_throw(s));
    } else if (key == "grid.k") {
        g.ks.clear();
        for (const auto& s : items) g.ks.push_back(detail::parse_number<std::size_t>(s, key));
    } else if (key == "grid.structure") {
        g.structures.clear();
        for (const auto& s : items) g.structures.push_back(parse_structure_or_throw(s));
    } else if (key == "grid.tau") {
        g.taus.clear();
        for (const auto& s : items) g.taus.push_back(parse_tau(s));
    } else if (key == "grid.prob") {
        g.probs.clear();
        for (const auto& s : items) g.probs.push_back(detail::parse_number<double>(s, key));
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

inline void read_config(std::istream& in, RunSpec& spec) {
    std::string line;
    std::size_t line_no = 0;
    std::map<std::string, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        auto text = std::string_view(line);
        text = detail::trim(text.substr(0, text.find('#')));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key(detail::trim(text.substr(0, eq)));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
        if (key.rfind("meta.", 0) == 0) continue;
        if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        set_value(spec, key, text.substr(eq + 1));
    }
}

inline RunSpec read_config_file(const std::string& path, RunSpec spec = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    read_config(in, spec);
    return spec;
}

// Resolved configuration in config syntax. `meta` lines are appended verbatim.
inline void write_config(std::ostream& out, const RunSpec& spec,
                         const std::vector<std::pair<std::string, std::string>>& meta = {}) {
    const auto& b = spec.base;
    const auto& g = spec.grid;
    auto list = [](const auto& xs, auto fmt) {
        std::string s = "[";
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
        return s + "]";
    };
    out << "n = " << b.n << "\n"
        << "m = " << b.m_subtasks << "\n"
        << "p = " << b.p_agents << "\n"
        << "periods = " << b.periods << "\n"
        << "rounds = " << b.rounds << "\n"
        << "seed = " << b.master_seed << "\n"
        << "error_sd = " << format_double(b.error_sd) << "\n"
        << "alpha = " << format_double(spec.alpha) << "\n"
        << "grid.mode = " << list(g.modes, [](auto m) { return std::string(to_string(m)); }) << "\n"
        << "grid.k = " << list(g.ks, [](auto k) { return std::to_string(k); }) << "\n"
        << "grid.structure = " << list(g.structures, [](auto s) { return std::string(to_string(s)); }) << "\n"
        << "grid.tau = " << list(g.taus, [](const auto& t) { return t.to_string(); }) << "\n"
        << "grid.prob = " << list(g.probs, [](auto p) { return format_double(p); }) << "\n"
        << "output.rounds_csv = " << (spec.rounds_csv ? "true" : "false") << "\n";
    for (const auto& [k, v] : meta) out << "meta." << k << " = " << v << "\n";
}

// ---- CSV ------------------------------------------------------------------

inline const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> cols{"scenario_id", "mode",  "k",        "structure", "tau",     "prob",
                                               "rounds",      "mean_perf", "mean_ci", "final_perf", "final_ci"};
    return cols;
}

inline void write_summary_header(std::ostream& out) {
    const auto& cols = summary_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << "\n";
}

inline void write_summary_row(std::ostream& out, const ScenarioSummary& s) {
    out << s.scenario_id << ',' << to_string(s.mode) << ',' << s.k << ',' << to_string(s.structure) << ','
        << s.tau.to_string() << ',' << format_double(s.prob) << ',' << s.rounds << ',' << format_double(s.mean_perf)
        << ',' << format_double(s.mean_ci) << ',' << format_double(s.final_perf) << ',' << format_double(s.final_ci)
        << "\n";
}

inline void write_periods_header(std::ostream& out) { out << "scenario_id,period,mean_norm_perf\n"; }

inline void write_periods_rows(std::ostream& out, const ScenarioResult& r) {
    const auto id = r.config.id();
    for (std::size_t t = 0; t < r.mean_series.size(); ++t)
        out << id << ',' << (t + 1) << ',' << format_double(r.mean_series[t]) << "\n";
}

inline void write_rounds_header(std::ostream& out) { out << "scenario_id,round,mean_perf,final_perf\n"; }

inline void write_rounds_rows(std::ostream& out, const ScenarioResult& r) {
    const auto id = r.config.id();
    for (std::size_t i = 0; i < r.round_mean.size(); ++i)
        out << id << ',' << i << ',' << format_double(r.round_mean[i]) << ',' << format_double(r.round_final[i])
            << "\n";
}

// Reads summary.csv. Per-round sample statistics are reconstructed from the
// stored CI halfwidths at `alpha`, which must match the alpha used to write them.
inline std::vector<ScenarioSummary> read_summary_csv(std::istream& in, double alpha = kDefaultAlpha) {
    std::string line;
    if (!std::getline(in, line) || detail::trim(line).empty()) throw SchemaError("summary CSV is empty");
    const auto header = detail::split(detail::trim(line), ',');
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const auto& c : summary_columns())
        if (!col.count(c)) throw SchemaError("summary CSV is missing column '" + c + "'");

    std::vector<ScenarioSummary> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(detail::trim(line), ',');
        if (cells.size() != header.size())
            throw SchemaError("summary CSV line " + std::to_string(line_no) + ": expected " +
                              std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
        auto cell = [&](const std::string& name) -> const std::string& { return cells[col.at(name)]; };
        try {
            ScenarioSummary s;
            s.scenario_id = cell("scenario_id");
            s.mode = parse_mode_or_throw(cell("mode"));
            s.k = detail::parse_number<std::size_t>(cell("k"), "k");
            s.structure = parse_structure_or_throw(cell("structure"));
            s.tau = parse_tau(cell("tau"));
            s.prob = detail::parse_number<double>(cell("prob"), "prob");
            s.rounds = detail::parse_number<std::size_t>(cell("rounds"), "rounds");
            s.mean_perf = detail::parse_number<double>(cell("mean_perf"), "mean_perf");
            s.mean_ci = detail::parse_number<double>(cell("mean_ci"), "mean_ci");
            s.final_perf = detail::parse_number<double>(cell("final_perf"), "final_perf");
            s.final_ci = detail::parse_number<double>(cell("final_ci"), "final_ci");
            s.mean_samples = stats_from_interval(s.mean_perf, s.mean_ci, s.rounds, alpha);
            s.final_samples = stats_from_interval(s.final_perf, s.final_ci, s.rounds, alpha);
            out.push_back(std::move(s));
        } catch (const ConfigError& e) {
            throw SchemaError("summary CSV line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (out.empty()) throw SchemaError("summary CSV has no data rows");
    return out;
}

inline void write_group_csv(std::ostream& out, const std::vector<GroupRow>& rows) {
    if (rows.empty()) return;
    for (const auto& [axis, value] : rows.front().keys) out << axis << ',';
    out << "scenarios,mean_perf,mean_ci,final_perf,final_ci\n";
    for (const auto& r : rows) {
        for (const auto& [axis, value] : r.keys) out << value << ',';
        out << r.scenarios << ',' << format_double(r.mean_perf) << ',' << format_double(r.mean_ci) << ','
            << format_double(r.final_perf) << ',' << format_double(r.final_ci) << "\n";
    }
}

}  // namespace nkteam
