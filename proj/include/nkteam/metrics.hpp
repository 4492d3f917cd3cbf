#pragma once

// Performance measures, normal-approximation confidence intervals, and grouped
// aggregation into the table and figure views.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "nkteam/engine.hpp"
#include "nkteam/error.hpp"

namespace nkteam {

inline constexpr double kDefaultAlpha = 0.0001;

// Running count / mean / sum of squared deviations. Merging is exact up to
// rounding, so pooled samples never need to be kept in memory.
struct SampleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const SampleStats& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.count) / n;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }

    // Sample variance (n - 1 denominator).
    double variance() const { return count < 2 ? 0.0 : std::max(0.0, m2 / static_cast<double>(count - 1)); }
    double sd() const { return std::sqrt(variance()); }

    static SampleStats of(std::span<const double> xs) {
        SampleStats s;
        for (double x : xs) s.add(x);
        return s;
    }
};

inline double mean_performance(std::span<const double> series, std::size_t t_max) {
    if (t_max == 0 || series.size() < t_max) throw UsageError("series shorter than the requested period count");
    double sum = 0.0;
    for (std::size_t t = 0; t < t_max; ++t) sum += series[t];
    return sum / static_cast<double>(t_max);
}

inline double final_performance(std::span<const double> series, std::size_t t_max) {
    if (t_max == 0 || series.size() < t_max) throw UsageError("series shorter than the requested period count");
    return series[t_max - 1];
}

// z_{1 - alpha/2} of the standard normal.
inline double z_value(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
}

struct Interval {
    double mean = 0.0;
    double halfwidth = 0.0;
};

inline Interval confidence_interval(const SampleStats& s, double alpha = kDefaultAlpha) {
    if (s.count < 2) throw UsageError("a confidence interval needs at least 2 samples");
    return {s.mean, z_value(alpha) * s.sd() / std::sqrt(static_cast<double>(s.count))};
}

inline Interval confidence_interval(std::span<const double> samples, double alpha = kDefaultAlpha) {
    return confidence_interval(SampleStats::of(samples), alpha);
}

// Inverse of confidence_interval: recovers the sample statistics from a stored
// (mean, halfwidth, n) triple so summaries can be pooled after the fact.
inline SampleStats stats_from_interval(double mean, double halfwidth, std::size_t n, double alpha = kDefaultAlpha) {
    SampleStats s;
    s.count = n;
    s.mean = mean;
    if (n >= 2) {
        const double sd = halfwidth * std::sqrt(static_cast<double>(n)) / z_value(alpha);
        s.m2 = sd * sd * static_cast<double>(n - 1);
    }
    return s;
}

struct ScenarioSummary {
    std::string scenario_id;
    CoordinationMode mode = CoordinationMode::fully_autonomous;
    std::size_t k = 0;
    Structure structure = Structure::block;
    FormationSchedule tau = FormationSchedule::never_again();
    double prob = 0.0;
    std::size_t rounds = 0;
    double mean_perf = 0.0;
    double mean_ci = 0.0;
    double final_perf = 0.0;
    double final_ci = 0.0;
    SampleStats mean_samples;   // per-round mean performance
    SampleStats final_samples;  // per-round final performance
};

inline ScenarioSummary summarize(const ScenarioResult& r, double alpha = kDefaultAlpha) {
    ScenarioSummary s;
    const auto& c = r.config;
    s.scenario_id = c.id();
    s.mode = c.mode;
    s.k = c.k;
    s.structure = c.structure;
    s.tau = c.tau;
    s.prob = c.prob;
    s.rounds = r.round_mean.size();
    s.mean_samples = SampleStats::of(r.round_mean);
    s.final_samples = SampleStats::of(r.round_final);
    s.mean_perf = mean_performance(r.mean_series, r.mean_series.size());
    s.final_perf = final_performance(r.mean_series, r.mean_series.size());
    if (s.rounds >= 2) {
        s.mean_ci = confidence_interval(s.mean_samples, alpha).halfwidth;
        s.final_ci = confidence_interval(s.final_samples, alpha).halfwidth;
    }
    return s;
}

enum class Axis { mode, k, structure, tau, prob };

inline std::string axis_name(Axis a) {
    switch (a) {
        case Axis::mode: return "mode";
        case Axis::k: return "k";
        case Axis::structure: return "structure";
        case Axis::tau: return "tau";
        case Axis::prob: return "prob";
    }
    return "?";
}

inline std::string axis_value(const ScenarioSummary& s, Axis a) {
    switch (a) {
        case Axis::mode: return std::string(to_string(s.mode));
        case Axis::k: return std::to_string(s.k);
        case Axis::structure: return std::string(to_string(s.structure));
        case Axis::tau: return s.tau.to_string();
        case Axis::prob: return format_prob(s.prob);
    }
    return "";
}

namespace detail {

// Sort key that follows the canonical axis orders (modes and structures as
// declared, tau long -> short, K and prob ascending).
inline double axis_rank(const ScenarioSummary& s, Axis a) {
    switch (a) {
        case Axis::mode: return static_cast<double>(s.mode);
        case Axis::k: return static_cast<double>(s.k);
        case Axis::structure: return static_cast<double>(s.structure);
        case Axis::tau: return s.tau.infinite() ? -1.0 : 1.0 / static_cast<double>(s.tau.tau());
        case Axis::prob: return s.prob;
    }
    return 0.0;
}

}  // namespace detail

struct GroupFilter {
    std::optional<std::size_t> k;
    std::optional<double> prob;

    bool admits(const ScenarioSummary& s) const { return (!k || s.k == *k) && (!prob || s.prob == *prob); }
};

struct GroupRow {
    std::vector<std::pair<std::string, std::string>> keys;  // (axis, value) in group_by order
    std::size_t scenarios = 0;
    double mean_perf = 0.0;   // unweighted mean over collapsed scenarios
    double mean_ci = 0.0;     // from pooled per-round samples
    double final_perf = 0.0;
    double final_ci = 0.0;
    SampleStats mean_samples;
    SampleStats final_samples;
};

// Groups that receive no scenario are absent from the output.
inline std::vector<GroupRow> aggregate(std::span<const ScenarioSummary> summaries, std::span<const Axis> group_by,
                                       const GroupFilter& filter = {}, double alpha = kDefaultAlpha) {
    struct Acc {
        GroupRow row;
        double mean_sum = 0.0;
        double final_sum = 0.0;
    };
    std::map<std::vector<double>, Acc> groups;
    for (const auto& s : summaries) {
        if (!filter.admits(s)) continue;
        std::vector<double> rank;
        for (auto a : group_by) rank.push_back(detail::axis_rank(s, a));
        auto [it, fresh] = groups.try_emplace(rank);
        auto& acc = it->second;
        if (fresh)
            for (auto a : group_by) acc.row.keys.emplace_back(axis_name(a), axis_value(s, a));
        ++acc.row.scenarios;
        acc.mean_sum += s.mean_perf;
        acc.final_sum += s.final_perf;
        acc.row.mean_samples.merge(s.mean_samples);
        acc.row.final_samples.merge(s.final_samples);
    }
    std::vector<GroupRow> out;
    out.reserve(groups.size());
    for (auto& [rank, acc] : groups) {
        auto row = std::move(acc.row);
        row.mean_perf = acc.mean_sum / static_cast<double>(row.scenarios);
        row.final_perf = acc.final_sum / static_cast<double>(row.scenarios);
        if (row.mean_samples.count >= 2) row.mean_ci = confidence_interval(row.mean_samples, alpha).halfwidth;
        if (row.final_samples.count >= 2) row.final_ci = confidence_interval(row.final_samples, alpha).halfwidth;
        out.push_back(std::move(row));
    }
    return out;
}

struct Preset {
    std::string name;
    std::vector<Axis> group_by;
    GroupFilter filter;
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"table2", "table3", "table4", "fig3"};
    return names;
}

// `fixed_prob` pins the learning probability instead of collapsing over it
// (only meaningful for the table presets).
inline Preset make_preset(const std::string& name, std::optional<double> fixed_prob = std::nullopt) {
    if (name == "table2") return {name, {Axis::mode, Axis::tau}, {std::nullopt, fixed_prob}};
    if (name == "table3") return {name, {Axis::tau, Axis::mode, Axis::structure}, {3, fixed_prob}};
    if (name == "table4") return {name, {Axis::tau, Axis::mode, Axis::structure}, {5, fixed_prob}};
    if (name == "fig3") return {name, {Axis::tau, Axis::mode, Axis::prob}, {}};
    std::string list;
    for (const auto& n : preset_names()) list += (list.empty() ? "" : ", ") + n;
    throw UsageError("unknown preset '" + name + "' (known: " + list + ")");
}

inline std::vector<GroupRow> aggregate(std::span<const ScenarioSummary> summaries, const Preset& preset,
                                       double alpha = kDefaultAlpha) {
    return aggregate(summaries, preset.group_by, preset.filter, alpha);
}

}  // namespace nkteam
