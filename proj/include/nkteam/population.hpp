#pragma once

// Agents with bounded capabilities: one subtask of expertise, a partial set of
// known sub-solutions, and Beta-style counters for discovery and forgetting.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "nkteam/error.hpp"
#include "nkteam/landscape.hpp"
#include "nkteam/random.hpp"

namespace nkteam {

// Counters start at 1 and are only ever incremented.
struct Belief {
    std::uint32_t alpha = 1;   // improvements while implemented
    std::uint32_t beta = 1;    // deteriorations while implemented
    std::uint32_t lambda = 1;  // forgetting pressure (memory factor included)
    std::uint32_t delta = 1;   // strict improvements while implemented

    double discovery() const noexcept { return static_cast<double>(alpha) / static_cast<double>(alpha + beta); }
    double forgetting() const noexcept { return static_cast<double>(lambda) / static_cast<double>(lambda + delta); }

    friend bool operator==(const Belief&, const Belief&) = default;
};

struct Agent {
    std::size_t id = 0;
    std::size_t subtask = 0;
    std::vector<SubSolution> known;  // ascending, never empty
    std::vector<Belief> beliefs;     // one per sub-solution, persists across forget/rediscover

    bool knows(SubSolution s) const { return std::binary_search(known.begin(), known.end(), s); }

    void add_known(SubSolution s) {
        auto it = std::lower_bound(known.begin(), known.end(), s);
        if (it == known.end() || *it != s) known.insert(it, s);
    }

    void remove_known(SubSolution s) {
        auto it = std::lower_bound(known.begin(), known.end(), s);
        if (it != known.end() && *it == s) known.erase(it);
    }

    Belief& belief(SubSolution s) { return beliefs.at(s.code); }
    const Belief& belief(SubSolution s) const { return beliefs.at(s.code); }

    friend bool operator==(const Agent&, const Agent&) = default;
};

struct Population {
    std::vector<Agent> agents;
    std::vector<std::vector<std::size_t>> rosters;  // rosters[m] = ids of agents with subtask m, ascending

    friend bool operator==(const Population&, const Population&) = default;
};

// Subtasks are assigned uniformly and redrawn wholesale until none is empty;
// each agent starts with one uniformly random sub-solution.
inline Population init_population(std::size_t agents, const Partition& partition, Rng& rng) {
    const std::size_t m = partition.subtasks();
    if (agents < m) throw ConfigError("agent count P must be at least the subtask count M");

    std::vector<std::size_t> assignment(agents);
    for (;;) {
        std::vector<std::size_t> counts(m, 0);
        for (auto& a : assignment) {
            a = static_cast<std::size_t>(rng.index(m));
            ++counts[a];
        }
        if (std::find(counts.begin(), counts.end(), 0) == counts.end()) break;
    }

    Population pop;
    pop.rosters.resize(m);
    pop.agents.reserve(agents);
    for (std::size_t i = 0; i < agents; ++i) {
        Agent a;
        a.id = i;
        a.subtask = assignment[i];
        a.beliefs.assign(partition.sub_solutions(), Belief{});
        a.known.push_back(SubSolution{static_cast<std::uint32_t>(rng.index(partition.sub_solutions()))});
        pop.rosters[a.subtask].push_back(i);
        pop.agents.push_back(std::move(a));
    }
    return pop;
}

// U = 1/2 (C(d_m) + mean_{r != m} C(d_r)). With a single subtask there are no
// residual decisions and the utility is C(d_m).
template <SubtaskEvaluator E>
double utility(const E& eval, Solution s, std::size_t m) {
    const auto& p = eval.partition();
    const double own = eval.subtask_performance(s, m);
    if (p.subtasks() == 1) return own;
    double residual = 0.0;
    for (std::size_t r = 0; r < p.subtasks(); ++r)
        if (r != m) residual += eval.subtask_performance(s, r);
    return 0.5 * (own + residual / static_cast<double>(p.subtasks() - 1));
}

// Multiplicative miscalculation e ~ N(0, sd), one fresh draw per call.
class GaussianError {
public:
    GaussianError(Rng& rng, double sd) : rng_(&rng), sd_(sd) {}
    double operator()() { return rng_->normal(0.0, sd_); }

private:
    Rng* rng_;
    double sd_;
};

struct NoError {
    double operator()() const noexcept { return 0.0; }
};

struct FixedError {
    double value = 0.0;
    double operator()() const noexcept { return value; }
};

template <class N>
concept ErrorSource = requires(N& n) {
    { n() } -> std::convertible_to<double>;
};

template <SubtaskEvaluator E, ErrorSource N>
double estimated_utility(const E& eval, Solution candidate, std::size_t m, N& error) {
    return utility(eval, candidate, m) * (1.0 + error());
}

// EU of playing `own` on subtask m while the residual decisions stay as in `standing`.
template <SubtaskEvaluator E, ErrorSource N>
double estimated_utility(const E& eval, Solution standing, std::size_t m, SubSolution own, N& error) {
    return estimated_utility(eval, eval.partition().replace(standing, m, own), m, error);
}

}  // namespace nkteam
