#pragma once

// Desk-scale self-checks behind `nkteam oracle <check>`. Each check compares
// the library against a brute-force or closed-form reference and reports the
// first counterexample it finds.

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "nkteam/coordination.hpp"
#include "nkteam/engine.hpp"
#include "nkteam/formation.hpp"
#include "nkteam/landscape.hpp"
#include "nkteam/learning.hpp"
#include "nkteam/population.hpp"
#include "nkteam/random.hpp"

namespace nkteam {

struct OracleResult {
    bool passed = true;
    std::string detail;
};

namespace oracle {

inline OracleResult fail(const std::string& what) { return {false, what}; }

// C* of a block landscape equals the mean of the per-block exhaustive maxima.
inline OracleResult block_decomposability(std::uint64_t seed, std::size_t seeds = 100) {
    const std::size_t n = 12, k = 3, width = k + 1;
    for (std::size_t i = 0; i < seeds; ++i) {
        Rng rng(derive_seed(seed, i));
        const auto l = generate_landscape(build_matrix(Structure::block, n, k, rng), rng);
        double block_sum = 0.0;
        std::uint32_t argmax = 0;
        for (std::size_t b = 0; b < n / width; ++b) {
            double best = -1.0;
            std::uint32_t best_local = 0;
            for (std::uint32_t local = 0; local < (1U << width); ++local) {
                const Solution s{local << (b * width)};
                double sum = 0.0;
                for (std::size_t c = b * width; c < (b + 1) * width; ++c) sum += contribution(l, s, c);
                if (sum > best) {
                    best = sum;
                    best_local = local;
                }
            }
            block_sum += best;
            argmax |= best_local << (b * width);
        }
        const double expected = block_sum / static_cast<double>(n);
        if (std::abs(expected - l.global_max) > 1e-12 || std::abs(evaluate(l, Solution{argmax}) - l.global_max) > 1e-12) {
            std::ostringstream os;
            os << "landscape " << i << ": per-block optimum " << expected << " vs exhaustive " << l.global_max;
            return fail(os.str());
        }
    }
    return {true, std::to_string(seeds) + " block landscapes decompose exactly"};
}

inline OracleResult k0_single_peak(std::uint64_t seed, std::size_t seeds = 100) {
    for (std::size_t i = 0; i < seeds; ++i) {
        Rng rng(derive_seed(seed, i));
        const auto l = generate_landscape(build_matrix(Structure::random, 12, 0, rng), rng);
        const auto peaks = count_local_optima(l);
        if (peaks != 1) return fail("landscape " + std::to_string(i) + " has " + std::to_string(peaks) + " local optima");
    }
    return {true, std::to_string(seeds) + " K=0 landscapes are single-peaked"};
}

// Mean local-optimum count over `seeds` random-structure landscapes per K.
inline OracleResult ruggedness(std::uint64_t seed, std::size_t seeds = 100) {
    const std::vector<std::size_t> ks{0, 1, 3, 5, 7, 11};
    std::ostringstream os;
    double previous = 0.0;
    bool ok = true;
    for (auto k : ks) {
        double total = 0.0;
        for (std::size_t i = 0; i < seeds; ++i) {
            Rng rng(derive_seed(derive_seed(seed, k), i));
            const auto l = generate_landscape(build_matrix(Structure::random, 12, k, rng), rng);
            total += static_cast<double>(count_local_optima(l));
        }
        const double mean = total / static_cast<double>(seeds);
        os << "K=" << k << ": " << mean << " ";
        if (mean < previous) ok = false;
        previous = mean;
    }
    return {ok, "mean local optima " + os.str()};
}

namespace detail {

// Error-free utility straight from the contribution tables.
inline double reference_utility(const Landscape& l, const Partition& part, Solution s, std::size_t m) {
    return utility(DirectEvaluator(l, part), s, m);
}

struct ToyInstance {
    Landscape landscape;
    Partition partition{4, 2};
    Population population;
    TeamState team;
};

inline ToyInstance toy_instance(Rng& rng) {
    ToyInstance x;
    x.landscape = generate_landscape(build_matrix(Structure::random, 4, rng.index(4), rng), rng);
    x.population = init_population(6, x.partition, rng);
    for (auto& a : x.population.agents)
        for (std::uint32_t c = 0; c < x.partition.sub_solutions(); ++c)
            if (rng.bernoulli(0.5)) a.add_known(SubSolution{c});
    x.team.standing = Solution{static_cast<std::uint32_t>(rng.index(16))};
    for (const auto& roster : x.population.rosters) x.team.members.push_back(roster[rng.index(roster.size())]);
    return x;
}

}  // namespace detail

// Error-free autonomous/sequential proposals equal brute-force argmaxes.
inline OracleResult argmax_equivalence(std::uint64_t seed, std::size_t cases = 1000) {
    Rng rng(seed);
    for (std::size_t i = 0; i < cases; ++i) {
        auto x = detail::toy_instance(rng);
        const PerformanceTable table(x.landscape, x.partition);
        refresh_baselines(x.team, table);
        NoError none;
        Rng unused(0);
        for (auto mode : {CoordinationMode::fully_autonomous, CoordinationMode::sequential}) {
            const auto got = coordinate(mode, x.team, x.population, table, none, unused).solution;
            Solution expected = x.team.standing;
            for (std::size_t m = 0; m < 2; ++m) {
                const Solution context = mode == CoordinationMode::sequential ? expected : x.team.standing;
                double best = -1.0;
                SubSolution pick{};
                for (std::uint32_t c = 0; c < 4; ++c) {
                    if (!x.population.agents[x.team.members[m]].knows(SubSolution{c})) continue;
                    const double u = detail::reference_utility(x.landscape, x.partition,
                                                               x.partition.replace(context, m, SubSolution{c}), m);
                    if (u > best) {
                        best = u;
                        pick = SubSolution{c};
                    }
                }
                expected = x.partition.replace(expected, m, pick);
            }
            if (got != expected) {
                std::ostringstream os;
                os << "case " << i << " (" << to_string(mode) << "): got " << got.code << ", brute force "
                   << expected.code;
                return fail(os.str());
            }
        }
    }
    return {true, std::to_string(cases) + " cases match brute-force enumeration"};
}

// With every candidate at or below the baselines, liaison and lateral keep d_{t-1};
// whenever they move, every member strictly gained.
inline OracleResult veto_fallback(std::uint64_t seed, std::size_t cases = 1000) {
    Rng rng(seed);
    std::size_t vetoed = 0;
    for (std::size_t i = 0; i < cases; ++i) {
        auto x = detail::toy_instance(rng);
        const PerformanceTable table(x.landscape, x.partition);
        refresh_baselines(x.team, table);
        NoError none;
        Rng picks(derive_seed(seed, i));
        for (auto mode : {CoordinationMode::liaison, CoordinationMode::lateral}) {
            const auto d = coordinate(mode, x.team, x.population, table, none, picks);
            bool all_worse = true;
            for (const auto& c : d.candidates)
                for (std::size_t m = 0; m < 2; ++m)
                    if (detail::reference_utility(x.landscape, x.partition, c, m) > x.team.baselines[m]) all_worse = false;
            if (all_worse) {
                ++vetoed;
                if (d.solution != x.team.standing)
                    return fail("case " + std::to_string(i) + " (" + std::string(to_string(mode)) +
                                "): all candidates at or below baselines but d_t != d_{t-1}");
            }
            if (d.solution != x.team.standing)
                for (std::size_t m = 0; m < 2; ++m)
                    if (!(detail::reference_utility(x.landscape, x.partition, d.solution, m) > x.team.baselines[m]))
                        return fail("case " + std::to_string(i) + ": accepted candidate without unanimous gain");
        }
    }
    return {true, std::to_string(vetoed) + " all-veto cases fell back to d_{t-1}"};
}

inline OracleResult serial_parallel(std::uint64_t seed) {
    ScenarioConfig c;
    c.n = 4;
    c.m_subtasks = 2;
    c.p_agents = 6;
    c.k = 1;
    c.structure = Structure::local;
    c.tau = FormationSchedule::every(10);
    c.prob = 0.3;
    c.mode = CoordinationMode::lateral;
    c.periods = 20;
    c.rounds = 50;
    c.master_seed = seed;
    const auto serial = run_scenario(c, 1);
    const auto parallel = run_scenario(c, 4);
    std::vector<double> reference(c.periods, 0.0);
    for (std::size_t r = 0; r < c.rounds; ++r) {
        const auto rr = run_round(c, r);
        for (std::size_t t = 0; t < c.periods; ++t) reference[t] += rr.periods[t].normalized;
    }
    for (auto& v : reference) v /= static_cast<double>(c.rounds);
    if (serial.mean_series != parallel.mean_series || serial.round_mean != parallel.round_mean ||
        serial.round_final != parallel.round_final)
        return fail("1-worker and 4-worker aggregates differ");
    if (serial.mean_series != reference) return fail("aggregate differs from the round-by-round reference");
    return {true, "1-worker, 4-worker and reference aggregates are identical"};
}

namespace detail {

inline OracleResult frequencies(const std::string& label, const std::vector<double>& expected,
                                const std::vector<std::size_t>& counts, std::size_t trials, double tol = 0.02) {
    std::ostringstream os;
    bool ok = true;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        const double f = static_cast<double>(counts[i]) / static_cast<double>(trials);
        os << label << i << "=" << f << " (expect " << expected[i] << ") ";
        if (std::abs(f - expected[i]) > tol) ok = false;
    }
    return {ok, os.str()};
}

}  // namespace detail

// Equal beliefs over four unknown sub-solutions: each discovered with frequency 1/4.
inline OracleResult discovery_frequency(std::uint64_t seed, std::size_t trials = 10000) {
    Rng rng(seed);
    const auto config = LearningConfig::with(1.0);
    std::vector<std::size_t> counts(4, 0);
    for (std::size_t i = 0; i < trials; ++i) {
        Agent a;
        a.beliefs.assign(8, Belief{});
        for (std::uint32_t c = 4; c < 8; ++c) a.add_known(SubSolution{c});
        const auto found = discovery_step(a, config, rng);
        if (!found || found->code >= 4) return fail("discovery picked a known sub-solution");
        ++counts[found->code];
    }
    return detail::frequencies("s", {0.25, 0.25, 0.25, 0.25}, counts, trials);
}

// Two known sub-solutions with q = 0.75 and 0.25.
inline OracleResult forgetting_frequency(std::uint64_t seed, std::size_t trials = 10000) {
    Rng rng(seed);
    const auto config = LearningConfig::with(1.0);
    std::vector<std::size_t> counts(2, 0);
    for (std::size_t i = 0; i < trials; ++i) {
        Agent a;
        a.beliefs.assign(2, Belief{});
        a.known = {SubSolution{0}, SubSolution{1}};
        a.beliefs[0].lambda = 3;
        a.beliefs[1].delta = 3;
        const auto lost = forgetting_step(a, config, rng);
        if (!lost) return fail("forgetting did not fire at prob 1");
        ++counts[lost->code];
    }
    return detail::frequencies("s", {0.75, 0.25}, counts, trials);
}

// Four identical signallers for one seat: each joins with frequency 1/4.
inline OracleResult tie_break_frequency(std::uint64_t seed, std::size_t trials = 10000) {
    Rng rng(seed);
    Rng landscape_rng(derive_seed(seed, 1));
    const Partition part(4, 1);
    const auto l = generate_landscape(build_matrix(Structure::local, 4, 1, landscape_rng), landscape_rng);
    const PerformanceTable table(l, part);
    Population pop;
    pop.rosters.resize(1);
    for (std::size_t i = 0; i < 4; ++i) {
        Agent a;
        a.id = i;
        a.beliefs.assign(16, Belief{});
        a.known = {SubSolution{5}};
        pop.agents.push_back(a);
        pop.rosters[0].push_back(i);
    }
    NoError none;
    std::vector<std::size_t> counts(4, 0);
    for (std::size_t i = 0; i < trials; ++i) ++counts[form_team(pop, table, Solution{0}, none, rng).members[0]];
    return detail::frequencies("agent", {0.25, 0.25, 0.25, 0.25}, counts, trials);
}

// One member knowing three sub-solutions: every candidate slot holds each
// known sub-solution with frequency 1/3.
inline OracleResult lateral_frequency(std::uint64_t seed, std::size_t trials = 10000) {
    Rng rng(seed);
    Rng landscape_rng(derive_seed(seed, 1));
    const Partition part(4, 2);
    const auto l = generate_landscape(build_matrix(Structure::local, 4, 1, landscape_rng), landscape_rng);
    const PerformanceTable table(l, part);
    Rng pop_rng(derive_seed(seed, 2));
    auto pop = init_population(2, part, pop_rng);
    auto& a = pop.agents[pop.rosters[0].front()];
    a.known = {SubSolution{0}, SubSolution{1}, SubSolution{2}};
    TeamState team;
    team.standing = Solution{0};
    team.members = {pop.rosters[0].front(), pop.rosters[1].front()};
    refresh_baselines(team, table);
    NoError none;
    std::vector<std::size_t> counts(3, 0);
    for (std::size_t i = 0; i < trials; ++i) {
        const auto d = decide_lateral(team, pop, table, none, rng);
        const auto pick = part.extract(d.candidates[0], 0).code;
        if (pick > 2) return fail("lateral candidate uses an unknown sub-solution");
        ++counts[pick];
    }
    return detail::frequencies("s", {1.0 / 3, 1.0 / 3, 1.0 / 3}, counts, trials);
}

// The hand-worked (alpha, beta, lambda, delta) cases.
inline OracleResult belief_algebra(std::uint64_t) {
    auto fresh = [] {
        Agent a;
        a.beliefs.assign(2, Belief{});
        a.known = {SubSolution{0}};
        return a;
    };
    const SubSolution s{0};
    auto improved = fresh();
    update_beliefs_on_outcome(improved, s, 0.7, 0.6);
    auto dropped = fresh();
    update_beliefs_on_outcome(dropped, s, 0.5, 0.6);
    auto equal = fresh();
    update_beliefs_on_outcome(equal, s, 0.6, 0.6);
    auto idle = fresh();
    apply_memory_decay(idle);
    const Belief want_improved{2, 1, 2, 2}, want_dropped{1, 2, 3, 1}, want_equal{2, 1, 2, 1}, want_idle{1, 1, 2, 1};
    if (!(improved.belief(s) == want_improved) || improved.belief(s).discovery() != 2.0 / 3 ||
        improved.belief(s).forgetting() != 0.5)
        return fail("improvement case");
    if (!(dropped.belief(s) == want_dropped) || dropped.belief(s).discovery() != 1.0 / 3 ||
        dropped.belief(s).forgetting() != 0.75)
        return fail("drop case");
    if (!(equal.belief(s) == want_equal)) return fail("equal-utility case");
    if (!(idle.belief(s) == want_idle) || idle.belief(s).forgetting() != 2.0 / 3) return fail("memory-decay case");
    return {true, "improvement, drop, equal and memory-decay cases reproduce exactly"};
}

}  // namespace oracle

struct OracleCheck {
    std::string name;
    std::function<OracleResult(std::uint64_t)> run;
};

inline const std::vector<OracleCheck>& oracle_checks() {
    static const std::vector<OracleCheck> checks{
        {"block-decomposability", [](std::uint64_t s) { return oracle::block_decomposability(s); }},
        {"k0-single-peak", [](std::uint64_t s) { return oracle::k0_single_peak(s); }},
        {"ruggedness", [](std::uint64_t s) { return oracle::ruggedness(s); }},
        {"argmax-equivalence", [](std::uint64_t s) { return oracle::argmax_equivalence(s); }},
        {"veto-fallback", [](std::uint64_t s) { return oracle::veto_fallback(s); }},
        {"serial-parallel", [](std::uint64_t s) { return oracle::serial_parallel(s); }},
        {"discovery-frequency", [](std::uint64_t s) { return oracle::discovery_frequency(s); }},
        {"forgetting-frequency", [](std::uint64_t s) { return oracle::forgetting_frequency(s); }},
        {"tie-break-frequency", [](std::uint64_t s) { return oracle::tie_break_frequency(s); }},
        {"lateral-frequency", [](std::uint64_t s) { return oracle::lateral_frequency(s); }},
        {"belief-algebra", [](std::uint64_t s) { return oracle::belief_algebra(s); }},
    };
    return checks;
}

}  // namespace nkteam
