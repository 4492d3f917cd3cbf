#pragma once

// End-of-period learning: outcome-driven belief updates for team members,
// memory decay, then one discovery draw and one forgetting draw per agent.

#include <vector>

#include "nkteam/error.hpp"
#include "nkteam/formation.hpp"
#include "nkteam/population.hpp"
#include "nkteam/random.hpp"

namespace nkteam {

struct LearningConfig {
    double prob = 0.0;  // shared by discovery and forgetting

    static LearningConfig with(double prob) {
        if (!(prob >= 0.0 && prob <= 1.0)) throw ConfigError("learning probability must lie in [0, 1]");
        return LearningConfig{prob};
    }
};

// Beliefs of the implemented sub-solution. The lambda increment already
// includes the one-period memory factor for this solution.
inline void update_beliefs_on_outcome(Agent& agent, SubSolution implemented, double u_now, double u_prev) {
    auto& b = agent.belief(implemented);
    if (u_now >= u_prev)
        ++b.alpha;
    else
        ++b.beta;
    b.lambda += u_now < u_prev ? 2U : 1U;
    if (u_now > u_prev) ++b.delta;
}

// lambda += 1 for every known sub-solution except `skip` (already aged by the outcome update).
inline void apply_memory_decay(Agent& agent, std::optional<SubSolution> skip = std::nullopt) {
    for (auto s : agent.known)
        if (!skip || s != *skip) ++agent.belief(s).lambda;
}

// With probability prob, learn one unknown sub-solution drawn proportionally to
// its discovery belief. Returns the discovered sub-solution, if any.
inline std::optional<SubSolution> discovery_step(Agent& agent, const LearningConfig& config, Rng& rng) {
    if (!rng.bernoulli(config.prob)) return std::nullopt;
    const auto total = static_cast<std::uint32_t>(agent.beliefs.size());
    if (agent.known.size() >= total) return std::nullopt;
    thread_local std::vector<SubSolution> unknown;
    thread_local std::vector<double> weights;
    unknown.clear();
    weights.clear();
    for (std::uint32_t c = 0; c < total; ++c) {
        const SubSolution s{c};
        if (agent.knows(s)) continue;
        unknown.push_back(s);
        weights.push_back(agent.belief(s).discovery());
    }
    const auto pick = unknown[rng.weighted(weights)];
    agent.add_known(pick);
    return pick;
}

// With probability prob, and only while at least two are known, forget one
// known sub-solution drawn proportionally to its forgetting belief.
inline std::optional<SubSolution> forgetting_step(Agent& agent, const LearningConfig& config, Rng& rng) {
    if (!rng.bernoulli(config.prob)) return std::nullopt;
    if (agent.known.size() < 2) return std::nullopt;
    thread_local std::vector<double> weights;
    weights.clear();
    for (auto s : agent.known) weights.push_back(agent.belief(s).forgetting());
    const auto pick = agent.known[rng.weighted(weights)];
    agent.remove_known(pick);
    return pick;
}

// Full end-of-period step for the whole population, agents in id order.
// `previous` is d_{t-1} and `implemented` is d_t. A member only updates
// outcome beliefs for a sub-solution it actually knows.
template <SubtaskEvaluator E>
void end_of_period(Population& pop, const std::vector<std::size_t>& members, Solution previous, Solution implemented,
                   const E& eval, const LearningConfig& config, Rng& rng) {
    const auto& part = eval.partition();
    for (auto& agent : pop.agents) {
        std::optional<SubSolution> touched;
        if (members.at(agent.subtask) == agent.id) {
            const auto mine = part.extract(implemented, agent.subtask);
            if (agent.knows(mine)) {
                update_beliefs_on_outcome(agent, mine, utility(eval, implemented, agent.subtask),
                                          utility(eval, previous, agent.subtask));
                touched = mine;
            }
        }
        apply_memory_decay(agent, touched);
        discovery_step(agent, config, rng);
        forgetting_step(agent, config, rng);
    }
}

}  // namespace nkteam
