#pragma once

// Signalling-based team formation, repeated every tau periods.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nkteam/landscape.hpp"
#include "nkteam/population.hpp"

namespace nkteam {

class FormationSchedule {
public:
    static FormationSchedule every(std::uint32_t tau) {
        if (tau == 0) throw ConfigError("tau must be a positive period count");
        return FormationSchedule(tau);
    }
    static FormationSchedule never_again() { return FormationSchedule(std::nullopt); }

    bool infinite() const noexcept { return !tau_; }
    std::uint32_t tau() const { return tau_.value(); }

    std::string to_string() const { return tau_ ? std::to_string(*tau_) : std::string("inf"); }

    friend bool operator==(const FormationSchedule&, const FormationSchedule&) = default;

private:
    explicit FormationSchedule(std::optional<std::uint32_t> tau) : tau_(tau) {}
    std::optional<std::uint32_t> tau_;
};

// Periods are numbered from 1. The team is always formed at t = 1.
inline bool should_reform(std::uint32_t t, const FormationSchedule& schedule) {
    if (t == 0) throw UsageError("periods are numbered from 1");
    if (t == 1) return true;
    if (schedule.infinite()) return false;
    return (t - 1) % schedule.tau() == 0;
}

struct TeamState {
    std::vector<std::size_t> members;  // members[m] = agent id serving subtask m
    Solution standing;                 // d_{t-1}
    std::vector<double> baselines;     // U_m(d_{t-1}), error-free
};

// Error-free utility of the standing solution for every subtask seat.
template <SubtaskEvaluator E>
void refresh_baselines(TeamState& team, const E& eval) {
    const auto m = eval.partition().subtasks();
    team.baselines.resize(m);
    for (std::size_t i = 0; i < m; ++i) team.baselines[i] = utility(eval, team.standing, i);
}

// Highest estimated utility over the agent's known sub-solutions, with the
// residual decisions held at the standing solution. One error draw per candidate.
template <SubtaskEvaluator E, ErrorSource N>
double signal(const Agent& agent, const E& eval, Solution standing, N& error) {
    double best = -std::numeric_limits<double>::infinity();
    for (auto s : agent.known) best = std::max(best, estimated_utility(eval, standing, agent.subtask, s, error));
    return best;
}

// Agents signal in id order; the top signaller per subtask joins and exact ties
// are broken uniformly at random.
template <SubtaskEvaluator E, ErrorSource N>
TeamState form_team(const Population& pop, const E& eval, Solution standing, N& error, Rng& rng) {
    const auto m = eval.partition().subtasks();
    std::vector<double> signals(pop.agents.size());
    for (const auto& a : pop.agents) signals[a.id] = signal(a, eval, standing, error);

    TeamState team;
    team.standing = standing;
    team.members.resize(m);
    std::vector<std::size_t> top;
    for (std::size_t sub = 0; sub < m; ++sub) {
        const auto& roster = pop.rosters.at(sub);
        if (roster.empty()) throw std::logic_error("empty roster for subtask " + std::to_string(sub));
        double best = -std::numeric_limits<double>::infinity();
        top.clear();
        for (auto id : roster) {
            if (signals[id] > best) {
                best = signals[id];
                top.assign(1, id);
            } else if (signals[id] == best) {
                top.push_back(id);
            }
        }
        team.members[sub] = top.size() == 1 ? top.front() : top[rng.index(top.size())];
    }
    refresh_baselines(team, eval);
    return team;
}

}  // namespace nkteam
