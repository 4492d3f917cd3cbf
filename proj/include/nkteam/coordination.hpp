#pragma once

// Per-period joint decision protocols. Every protocol reads the members' known
// sub-solutions and the standing solution d_{t-1}, and returns d_t.

#include <algorithm>
#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "nkteam/formation.hpp"
#include "nkteam/landscape.hpp"
#include "nkteam/population.hpp"

namespace nkteam {

enum class CoordinationMode { fully_autonomous, sequential, liaison, lateral };

inline constexpr std::array<CoordinationMode, 4> kAllModes = {
    CoordinationMode::fully_autonomous, CoordinationMode::sequential,
    CoordinationMode::liaison, CoordinationMode::lateral};

inline std::string_view to_string(CoordinationMode m) {
    switch (m) {
        case CoordinationMode::fully_autonomous: return "autonomous";
        case CoordinationMode::sequential: return "sequential";
        case CoordinationMode::liaison: return "liaison";
        case CoordinationMode::lateral: return "lateral";
    }
    return "?";
}

inline std::optional<CoordinationMode> parse_mode(std::string_view text) {
    if (text == "fully_autonomous") return CoordinationMode::fully_autonomous;
    for (auto m : kAllModes)
        if (to_string(m) == text) return m;
    return std::nullopt;
}

struct Decision {
    Solution solution;
    std::array<Solution, 2> candidates{};  // liaison / lateral only
    std::optional<std::size_t> accepted;   // index of the implemented candidate
    std::size_t candidates_evaluated = 0;
};

namespace detail {

// argmax of EU over the agent's known set against `context`; ties keep the lower code.
template <SubtaskEvaluator E, ErrorSource N>
SubSolution best_known(const Agent& agent, std::size_t m, const E& eval, Solution context, N& error) {
    SubSolution best = agent.known.front();
    double best_value = estimated_utility(eval, context, m, best, error);
    for (std::size_t i = 1; i < agent.known.size(); ++i) {
        const double v = estimated_utility(eval, context, m, agent.known[i], error);
        if (v > best_value) {
            best_value = v;
            best = agent.known[i];
        }
    }
    return best;
}

// Unanimous strict acceptance against the error-free baselines. A candidate
// identical to one already vetoed is not put to a second vote.
template <SubtaskEvaluator E, ErrorSource N>
Decision vote(const TeamState& team, const E& eval, const std::array<Solution, 2>& candidates, N& error) {
    Decision d;
    d.candidates = candidates;
    d.solution = team.standing;
    const auto m = eval.partition().subtasks();
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        if (j > 0 && candidates[j] == candidates[j - 1]) continue;
        ++d.candidates_evaluated;
        bool unanimous = true;
        for (std::size_t i = 0; i < m; ++i) {
            // Every member votes; no short-circuit, so draw counts do not depend on earlier votes.
            if (!(estimated_utility(eval, candidates[j], i, error) > team.baselines[i])) unanimous = false;
        }
        if (unanimous) {
            d.solution = candidates[j];
            d.accepted = j;
            return d;
        }
    }
    return d;
}

}  // namespace detail

template <SubtaskEvaluator E, ErrorSource N>
Decision decide_autonomous(const TeamState& team, const Population& pop, const E& eval, N& error) {
    const auto& part = eval.partition();
    Solution next = team.standing;
    for (std::size_t m = 0; m < part.subtasks(); ++m) {
        const auto& agent = pop.agents.at(team.members[m]);
        next = part.replace(next, m, detail::best_known(agent, m, eval, team.standing, error));
    }
    return Decision{next, {}, std::nullopt, 0};
}

// Members propose in subtask order; member m sees the fresh proposals of 0..m-1.
template <SubtaskEvaluator E, ErrorSource N>
Decision decide_sequential(const TeamState& team, const Population& pop, const E& eval, N& error) {
    const auto& part = eval.partition();
    Solution next = team.standing;
    for (std::size_t m = 0; m < part.subtasks(); ++m) {
        const auto& agent = pop.agents.at(team.members[m]);
        next = part.replace(next, m, detail::best_known(agent, m, eval, next, error));
    }
    return Decision{next, {}, std::nullopt, 0};
}

// Each member nominates its two best-ranked known sub-solutions; candidate j
// concatenates the j-th nominations. A member with a single known sub-solution
// nominates it twice.
template <SubtaskEvaluator E, ErrorSource N>
Decision decide_liaison(const TeamState& team, const Population& pop, const E& eval, N& error) {
    const auto& part = eval.partition();
    std::array<Solution, 2> candidates{team.standing, team.standing};
    std::vector<std::pair<double, SubSolution>> ranked;
    for (std::size_t m = 0; m < part.subtasks(); ++m) {
        const auto& agent = pop.agents.at(team.members[m]);
        ranked.clear();
        for (auto s : agent.known) ranked.emplace_back(estimated_utility(eval, team.standing, m, s, error), s);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto& a, const auto& b) { return a.first > b.first; });
        const SubSolution first = ranked[0].second;
        const SubSolution second = ranked.size() > 1 ? ranked[1].second : first;
        candidates[0] = part.replace(candidates[0], m, first);
        candidates[1] = part.replace(candidates[1], m, second);
    }
    return detail::vote(team, eval, candidates, error);
}

// Each member draws two known sub-solutions (distinct when possible); each
// candidate takes one of the two picks per member, uniformly and independently.
template <SubtaskEvaluator E, ErrorSource N>
Decision decide_lateral(const TeamState& team, const Population& pop, const E& eval, N& error, Rng& rng) {
    const auto& part = eval.partition();
    const auto m_count = part.subtasks();
    std::vector<std::array<SubSolution, 2>> picks(m_count);
    for (std::size_t m = 0; m < m_count; ++m) {
        const auto& known = pop.agents.at(team.members[m]).known;
        if (known.size() == 1) {
            picks[m] = {known[0], known[0]};
        } else {
            const auto a = rng.index(known.size());
            auto b = rng.index(known.size() - 1);
            if (b >= a) ++b;
            picks[m] = {known[a], known[b]};
        }
    }
    std::array<Solution, 2> candidates{team.standing, team.standing};
    for (auto& c : candidates)
        for (std::size_t m = 0; m < m_count; ++m) c = part.replace(c, m, picks[m][rng.index(2)]);
    return detail::vote(team, eval, candidates, error);
}

template <SubtaskEvaluator E, ErrorSource N>
Decision coordinate(CoordinationMode mode, const TeamState& team, const Population& pop, const E& eval, N& error,
                    Rng& rng) {
    switch (mode) {
        case CoordinationMode::fully_autonomous: return decide_autonomous(team, pop, eval, error);
        case CoordinationMode::sequential: return decide_sequential(team, pop, eval, error);
        case CoordinationMode::liaison: return decide_liaison(team, pop, eval, error);
        case CoordinationMode::lateral: return decide_lateral(team, pop, eval, error, rng);
    }
    return Decision{team.standing, {}, std::nullopt, 0};
}

}  // namespace nkteam
