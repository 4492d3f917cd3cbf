#pragma once

// Per-period simulation loop, scenario grid, and seeded parallel execution.

#include <atomic>
#include <cstdio>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nkteam/coordination.hpp"
#include "nkteam/formation.hpp"
#include "nkteam/landscape.hpp"
#include "nkteam/learning.hpp"
#include "nkteam/population.hpp"
#include "nkteam/random.hpp"

namespace nkteam {

inline std::string format_prob(double p) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

struct ScenarioConfig {
    std::size_t n = 12;
    std::size_t m_subtasks = 3;
    std::size_t p_agents = 30;
    std::size_t k = 3;
    Structure structure = Structure::block;
    FormationSchedule tau = FormationSchedule::never_again();
    double prob = 0.0;
    CoordinationMode mode = CoordinationMode::fully_autonomous;
    std::uint32_t periods = 100;
    std::uint32_t rounds = 300;
    std::uint64_t master_seed = 42;
    double error_sd = 0.1;

    // Stable identifier built from the grid axes, e.g. "lateral-k3-block-t1-p0.5".
    std::string id() const {
        return std::string(to_string(mode)) + "-k" + std::to_string(k) + "-" + std::string(to_string(structure)) + "-t" +
               tau.to_string() + "-p" + format_prob(prob);
    }

    void validate() const {
        Partition part(n, m_subtasks);
        if (p_agents < m_subtasks) throw ConfigError("agent count P must be at least the subtask count M");
        if (k > n - 1) throw ConfigError("K must satisfy 0 <= K <= N-1");
        if (structure == Structure::block && n % (k + 1) != 0)
            throw ConfigError("block structure requires K+1 to divide N");
        if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("learning probability must lie in [0, 1]");
        if (periods == 0) throw ConfigError("periods must be at least 1");
        if (rounds == 0) throw ConfigError("rounds must be at least 1");
        if (!(error_sd >= 0.0)) throw ConfigError("error_sd must be non-negative");
        (void)part;
    }
};

struct Grid {
    std::vector<CoordinationMode> modes;
    std::vector<std::size_t> ks;
    std::vector<Structure> structures;
    std::vector<FormationSchedule> taus;
    std::vector<double> probs;

    std::size_t size() const { return modes.size() * ks.size() * structures.size() * taus.size() * probs.size(); }
};

inline std::vector<double> default_probs() {
    std::vector<double> p;
    for (int i = 0; i <= 10; ++i) p.push_back(i / 10.0);
    return p;
}

inline Grid default_grid() {
    return Grid{{kAllModes.begin(), kAllModes.end()},
                {3, 5},
                {kAllStructures.begin(), kAllStructures.end()},
                {FormationSchedule::never_again(), FormationSchedule::every(10), FormationSchedule::every(1)},
                default_probs()};
}

// Cartesian product in axis order mode, K, structure, tau, prob; other fields
// come from `base`.
inline std::vector<ScenarioConfig> enumerate_scenarios(const Grid& grid, const ScenarioConfig& base = {}) {
    std::vector<ScenarioConfig> out;
    out.reserve(grid.size());
    for (auto mode : grid.modes)
        for (auto k : grid.ks)
            for (auto s : grid.structures)
                for (const auto& tau : grid.taus)
                    for (auto p : grid.probs) {
                        ScenarioConfig c = base;
                        c.mode = mode;
                        c.k = k;
                        c.structure = s;
                        c.tau = tau;
                        c.prob = p;
                        out.push_back(c);
                    }
    return out;
}

struct PeriodRecord {
    std::uint32_t period = 0;
    double raw = 0.0;         // C(d_t)
    double normalized = 0.0;  // C(d_t) / C*
    std::vector<std::size_t> members;
    bool reformed = false;
};

struct RoundResult {
    std::size_t round = 0;
    double optimum = 0.0;
    std::vector<PeriodRecord> periods;

    friend bool operator==(const RoundResult& a, const RoundResult& b) {
        if (a.round != b.round || a.optimum != b.optimum || a.periods.size() != b.periods.size()) return false;
        for (std::size_t i = 0; i < a.periods.size(); ++i) {
            const auto& x = a.periods[i];
            const auto& y = b.periods[i];
            if (x.period != y.period || x.raw != y.raw || x.normalized != y.normalized || x.members != y.members ||
                x.reformed != y.reformed)
                return false;
        }
        return true;
    }
};

// Independent substreams per phase so one module's draw count never shifts another's.
enum class Phase : std::uint64_t { landscape = 1, population, start, formation, coordination, learning };

inline std::uint64_t round_seed(const ScenarioConfig& config, std::size_t round) {
    return derive_seed(derive_seed(config.master_seed, fnv1a64(config.id())), round);
}

inline std::uint64_t phase_seed(std::uint64_t round_seed, Phase phase) {
    return derive_seed(round_seed, static_cast<std::uint64_t>(phase));
}

inline RoundResult run_round(const ScenarioConfig& config, std::size_t round) {
    config.validate();
    const auto seed = round_seed(config, round);
    Rng landscape_rng(phase_seed(seed, Phase::landscape));
    Rng population_rng(phase_seed(seed, Phase::population));
    Rng start_rng(phase_seed(seed, Phase::start));
    Rng formation_rng(phase_seed(seed, Phase::formation));
    Rng coordination_rng(phase_seed(seed, Phase::coordination));
    Rng learning_rng(phase_seed(seed, Phase::learning));

    const Partition part(config.n, config.m_subtasks);
    const auto landscape =
        generate_landscape(build_matrix(config.structure, config.n, config.k, landscape_rng), landscape_rng);
    const PerformanceTable table(landscape, part);
    const double optimum = table.best_value();

    Population pop = init_population(config.p_agents, part, population_rng);
    GaussianError formation_error(formation_rng, config.error_sd);
    GaussianError decision_error(coordination_rng, config.error_sd);
    const auto learning = LearningConfig::with(config.prob);

    TeamState team;
    team.standing = Solution{static_cast<std::uint32_t>(start_rng.index(std::uint64_t{1} << config.n))};

    RoundResult result;
    result.round = round;
    result.optimum = optimum;
    result.periods.reserve(config.periods);
    for (std::uint32_t t = 1; t <= config.periods; ++t) {
        const bool reform = should_reform(t, config.tau);
        if (reform)
            team = form_team(pop, table, team.standing, formation_error, formation_rng);
        else
            refresh_baselines(team, table);

        const auto decision = coordinate(config.mode, team, pop, table, decision_error, coordination_rng);
        const double raw = table.performance(decision.solution);
        result.periods.push_back(PeriodRecord{t, raw, raw / optimum, team.members, reform});

        end_of_period(pop, team.members, team.standing, decision.solution, table, learning, learning_rng);
        team.standing = decision.solution;
    }
    return result;
}

// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
// exception thrown by any task is rethrown after all threads join.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    const auto n = std::min(workers, count);
    pool.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

inline std::size_t default_workers() {
    const auto hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

struct ScenarioResult {
    ScenarioConfig config;
    std::vector<double> mean_series;  // C-bar_t over rounds, t = 1..T
    std::vector<double> round_mean;   // per round: mean normalized performance over periods
    std::vector<double> round_final;  // per round: normalized performance at t = T
};

// Reductions run in round-index order, so results do not depend on `workers`.
inline ScenarioResult run_scenario(const ScenarioConfig& config, std::size_t workers = 1) {
    config.validate();
    const std::size_t rounds = config.rounds;
    const std::size_t periods = config.periods;
    std::vector<double> normalized(rounds * periods);
    parallel_for(rounds, workers, [&](std::size_t r) {
        const auto rr = run_round(config, r);
        for (std::size_t t = 0; t < periods; ++t) normalized[r * periods + t] = rr.periods[t].normalized;
    });

    ScenarioResult out;
    out.config = config;
    out.mean_series.assign(periods, 0.0);
    out.round_mean.resize(rounds);
    out.round_final.resize(rounds);
    for (std::size_t r = 0; r < rounds; ++r) {
        double sum = 0.0;
        for (std::size_t t = 0; t < periods; ++t) {
            const double v = normalized[r * periods + t];
            out.mean_series[t] += v;
            sum += v;
        }
        out.round_mean[r] = sum / static_cast<double>(periods);
        out.round_final[r] = normalized[r * periods + periods - 1];
    }
    for (auto& v : out.mean_series) v /= static_cast<double>(rounds);
    return out;
}

// Scenarios are the unit of parallel work; each is reduced serially.
inline std::vector<ScenarioResult> run_grid(const std::vector<ScenarioConfig>& configs, std::size_t workers,
                                            const std::function<void(std::size_t done, std::size_t total)>& progress = {}) {
    for (const auto& c : configs) c.validate();
    std::vector<ScenarioResult> out(configs.size());
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;
    parallel_for(configs.size(), workers, [&](std::size_t i) {
        out[i] = run_scenario(configs[i], 1);
        const auto d = ++done;
        if (progress) {
            std::lock_guard lock(progress_mutex);
            progress(d, configs.size());
        }
    });
    return out;
}

}  // namespace nkteam
