// Acceptance suite: one PASS/FAIL line per criterion A1..A9.
//
//   acceptance [--rounds N] [--magnitude-rounds N] [--workers W] [--only A5,A6,...]
//
// Defaults are the pinned scales: 300 rounds over the full grid for the
// ordering and learning-effect criteria, 500 rounds for the magnitudes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nkteam/nkteam.hpp"
#include "reference.hpp"

using namespace nkteam;

namespace {

struct Options {
    std::uint32_t rounds = 300;
    std::uint32_t magnitude_rounds = 500;
    std::size_t workers = default_workers();
    std::set<std::string> only;
};

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

// ---- A5: landscape properties ------------------------------------------------

std::size_t reference_local_optima(const Landscape& l) {
    const std::size_t n = l.matrix.rows.size();
    std::vector<double> v(std::size_t{1} << n);
    for (std::uint32_t c = 0; c < v.size(); ++c) v[c] = ref::performance(l, c);
    std::size_t peaks = 0;
    for (std::uint32_t c = 0; c < v.size(); ++c) {
        bool peak = true;
        for (std::size_t b = 0; b < n; ++b) peak = peak && !(v[c ^ (1U << b)] > v[c]);
        peaks += peak;
    }
    return peaks;
}

Verdict a5_landscape() {
    std::ostringstream os;
    bool ok = true;
    // K = 0: exactly one local optimum.
    std::size_t single = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(derive_seed(5000, s));
        single += reference_local_optima(generate_landscape(build_matrix(Structure::random, 12, 0, rng), rng)) == 1;
    }
    ok = ok && single == 100;
    os << "K=0 single-peaked " << single << "/100; ";

    // Block K=3: the optimum is the concatenation of per-block exhaustive optima.
    std::size_t decomposed = 0;
    for (std::uint64_t s = 0; s < 100; ++s) {
        Rng rng(derive_seed(5001, s));
        const auto l = generate_landscape(build_matrix(Structure::block, 12, 3, rng), rng);
        std::uint32_t concat = 0;
        double value = 0.0;
        for (std::size_t b = 0; b < 3; ++b) {
            double best = -1.0;
            std::uint32_t arg = 0;
            for (std::uint32_t local = 0; local < 16; ++local) {
                double sum = 0.0;
                for (std::size_t n = 4 * b; n < 4 * b + 4; ++n)
                    sum += ref::contribution(l.matrix.rows, l.tables, local << (4 * b), n);
                if (sum > best) {
                    best = sum;
                    arg = local;
                }
            }
            concat |= arg << (4 * b);
            value += best;
        }
        decomposed += l.global_argmax.code == concat && std::abs(l.global_max - value / 12.0) < 1e-12;
    }
    ok = ok && decomposed == 100;
    os << "block K=3 decomposable " << decomposed << "/100; ";

    // Ruggedness: mean local-optimum count is non-decreasing in K.
    os << "mean local optima by K:";
    double previous = 0.0;
    for (std::size_t k : {0u, 1u, 2u, 3u, 5u, 7u, 9u, 11u}) {
        double total = 0.0;
        for (std::uint64_t s = 0; s < 100; ++s) {
            Rng rng(derive_seed(derive_seed(5002, k), s));
            total += static_cast<double>(
                reference_local_optima(generate_landscape(build_matrix(Structure::random, 12, k, rng), rng)));
        }
        const double mean = total / 100.0;
        ok = ok && mean >= previous;
        previous = mean;
        os << " " << k << ":" << fmt(mean, 2);
    }
    return {ok, os.str()};
}

// ---- A6: protocol oracles -------------------------------------------------------

struct Toy {
    Landscape l;
    Population pop;
    TeamState team;
};

Toy toy(Rng& rng) {
    Toy x;
    x.l = generate_landscape(build_matrix(Structure::random, 4, rng.index(4), rng), rng);
    x.pop.rosters = {{0}, {1}};
    for (std::size_t m = 0; m < 2; ++m) {
        Agent a;
        a.id = m;
        a.subtask = m;
        a.beliefs.assign(4, Belief{});
        a.add_known(SubSolution{static_cast<std::uint32_t>(rng.index(4))});
        for (std::uint32_t c = 0; c < 4; ++c)
            if (rng.bernoulli(0.5)) a.add_known(SubSolution{c});
        x.pop.agents.push_back(a);
    }
    x.team.members = {0, 1};
    x.team.standing = Solution{static_cast<std::uint32_t>(rng.index(16))};
    return x;
}

Verdict a6_protocols() {
    const Partition part(4, 2);
    Rng rng(6000);
    std::size_t agree = 0;
    for (int i = 0; i < 1000; ++i) {
        auto x = toy(rng);
        const PerformanceTable table(x.l, part);
        refresh_baselines(x.team, table);
        auto best = [&](std::size_t m, std::uint32_t context) {
            double top = -1.0;
            std::uint32_t arg = 0;
            for (std::uint32_t c = 0; c < 4; ++c) {
                if (!x.pop.agents[m].knows(SubSolution{c})) continue;
                const double u = ref::utility(x.l, 2, ref::splice(context, 2, m, c), m);
                if (u > top) {
                    top = u;
                    arg = c;
                }
            }
            return arg;
        };
        const auto d = x.team.standing.code;
        const auto autonomous = ref::splice(ref::splice(d, 2, 0, best(0, d)), 2, 1, best(1, d));
        const auto first = ref::splice(d, 2, 0, best(0, d));
        const auto sequential = ref::splice(first, 2, 1, best(1, first));
        NoError none;
        agree += decide_autonomous(x.team, x.pop, table, none).solution.code == autonomous &&
                 decide_sequential(x.team, x.pop, table, none).solution.code == sequential;
    }

    // Veto fallback: whenever no candidate beats every baseline, d_t = d_{t-1}.
    Rng vrng(6001);
    std::size_t vetoed = 0, violations = 0;
    for (int i = 0; i < 1000; ++i) {
        auto x = toy(vrng);
        const PerformanceTable table(x.l, part);
        refresh_baselines(x.team, table);
        NoError none;
        for (auto mode : {CoordinationMode::liaison, CoordinationMode::lateral}) {
            const auto dec = coordinate(mode, x.team, x.pop, table, none, vrng);
            bool any_unanimous = false;
            for (const auto& c : dec.candidates) {
                bool all = true;
                for (std::size_t m = 0; m < 2; ++m)
                    all = all && ref::utility(x.l, 2, c.code, m) > x.team.baselines[m];
                any_unanimous = any_unanimous || all;
            }
            if (!any_unanimous) {
                ++vetoed;
                violations += dec.solution != x.team.standing;
            }
        }
    }
    return {agree == 1000 && violations == 0 && vetoed > 0,
            "argmax equivalence " + std::to_string(agree) + "/1000; veto fallback held in " +
                std::to_string(vetoed - violations) + "/" + std::to_string(vetoed) + " all-veto cases"};
}

// ---- A7: belief algebra and sampling frequencies --------------------------------

Verdict a7_learning() {
    std::ostringstream os;
    bool ok = true;
    auto fresh = [](std::uint32_t solutions, std::vector<std::uint32_t> known) {
        Agent a;
        a.beliefs.assign(solutions, Belief{});
        for (auto c : known) a.add_known(SubSolution{c});
        return a;
    };
    const SubSolution s{0};
    auto up = fresh(2, {0});
    update_beliefs_on_outcome(up, s, 0.7, 0.6);
    auto down = fresh(2, {0});
    update_beliefs_on_outcome(down, s, 0.5, 0.6);
    auto same = fresh(2, {0});
    update_beliefs_on_outcome(same, s, 0.6, 0.6);
    const bool hand = up.belief(s) == Belief{2, 1, 2, 2} && up.belief(s).discovery() == 2.0 / 3 &&
                      up.belief(s).forgetting() == 0.5 && down.belief(s) == Belief{1, 2, 3, 1} &&
                      down.belief(s).discovery() == 1.0 / 3 && down.belief(s).forgetting() == 0.75 &&
                      same.belief(s) == Belief{2, 1, 2, 1};
    ok = ok && hand;
    os << "hand cases " << (hand ? "exact" : "MISMATCH");

    const int trials = 10000;
    const auto always = LearningConfig::with(1.0);
    auto within = [&](const std::string& label, double observed, double expected) {
        const bool good = std::abs(observed - expected) <= 0.02;
        ok = ok && good;
        os << "; " << label << " " << fmt(observed) << " (expect " << fmt(expected) << ")";
    };

    Rng rng(7000);
    int discovered = 0;
    for (int i = 0; i < trials; ++i) {
        auto a = fresh(5, {0});
        discovered += discovery_step(a, always, rng)->code == 3;
    }
    within("discovery uniform", discovered / double(trials), 0.25);

    int skewed = 0;
    for (int i = 0; i < trials; ++i) {
        auto a = fresh(3, {0});
        a.beliefs[1] = Belief{2, 1, 1, 1};  // p = 2/3
        a.beliefs[2] = Belief{1, 2, 1, 1};  // p = 1/3
        skewed += discovery_step(a, always, rng)->code == 1;
    }
    within("discovery proportional", skewed / double(trials), 2.0 / 3);

    int forgot = 0;
    for (int i = 0; i < trials; ++i) {
        auto a = fresh(2, {0, 1});
        a.beliefs[0] = Belief{1, 1, 3, 1};  // q = 0.75
        a.beliefs[1] = Belief{1, 1, 1, 3};  // q = 0.25
        forgot += forgetting_step(a, always, rng)->code == 0;
    }
    within("forgetting proportional", forgot / double(trials), 0.75);

    int gated = 0;
    const auto some = LearningConfig::with(0.3);
    for (int i = 0; i < trials; ++i) {
        auto a = fresh(16, {0});
        gated += discovery_step(a, some, rng).has_value();
    }
    within("learning gate", gated / double(trials), 0.3);
    return {ok, os.str()};
}

// ---- A8: determinism ---------------------------------------------------------

std::string render(const std::vector<ScenarioResult>& results) {
    std::ostringstream os;
    write_summary_header(os);
    for (const auto& r : results) write_summary_row(os, summarize(r));
    write_periods_header(os);
    for (const auto& r : results) write_periods_rows(os, r);
    write_rounds_header(os);
    for (const auto& r : results) write_rounds_rows(os, r);
    return os.str();
}

Verdict a8_determinism() {
    Grid g{{kAllModes.begin(), kAllModes.end()},
           {3},
           {Structure::local, Structure::random},
           {FormationSchedule::every(10)},
           {0.0, 0.5}};
    ScenarioConfig base;
    base.rounds = 12;
    base.periods = 40;
    const auto configs = enumerate_scenarios(g, base);
    const auto first = render(run_grid(configs, 1));
    const auto second = render(run_grid(configs, 1));
    const auto threaded = render(run_grid(configs, 4));
    bool rounds_equal = true;
    for (const auto& c : configs) {
        const auto a = run_scenario(c, 1), b = run_scenario(c, 4);
        rounds_equal = rounds_equal && a.mean_series == b.mean_series && a.round_mean == b.round_mean &&
                       a.round_final == b.round_final;
    }
    const bool ok = first == second && first == threaded && rounds_equal;
    return {ok, std::to_string(configs.size()) + " scenarios, " + std::to_string(first.size()) +
                    " CSV bytes; rerun identical: " + (first == second ? "yes" : "no") +
                    "; 1 vs 4 workers (grid) identical: " + (first == threaded ? "yes" : "no") +
                    "; 1 vs 4 workers (rounds) identical: " + (rounds_equal ? "yes" : "no")};
}

// ---- A1, A3, A4: full grid at desk scale ---------------------------------------

const GroupRow* find(const std::vector<GroupRow>& rows, std::vector<std::string> values) {
    for (const auto& r : rows) {
        bool match = r.keys.size() == values.size();
        for (std::size_t i = 0; match && i < values.size(); ++i) match = r.keys[i].second == values[i];
        if (match) return &r;
    }
    return nullptr;
}

const char* kTaus[] = {"inf", "10", "1"};
const char* kTauNames[] = {"long", "medium", "short"};

Verdict a1_ordering(const std::vector<ScenarioSummary>& s) {
    const double alpha = 0.05;
    const auto t2 = aggregate(s, make_preset("table2"), alpha);
    std::ostringstream os;
    bool ok = true;
    const std::vector<std::string> order{"lateral", "sequential", "autonomous", "liaison"};
    for (int t = 0; t < 3; ++t) {
        os << kTauNames[t] << ":";
        for (std::size_t i = 0; i < order.size(); ++i) {
            const auto* r = find(t2, {order[i], kTaus[t]});
            os << " " << order[i] << "=" << fmt(r->mean_perf) << "±" << fmt(r->mean_ci);
            if (i > 0) ok = ok && find(t2, {order[i - 1], kTaus[t]})->mean_perf > r->mean_perf;
        }
        const auto* lat = find(t2, {"lateral", kTaus[t]});
        const auto* lia = find(t2, {"liaison", kTaus[t]});
        const bool separated = lat->mean_perf - lat->mean_ci > lia->mean_perf + lia->mean_ci;
        ok = ok && separated;
        os << (separated ? " [lateral>liaison separated]" : " [lateral>liaison NOT separated]") << "; ";
    }
    for (const auto& mode : order) {
        const double lng = find(t2, {mode, "inf"})->mean_perf;
        const double med = find(t2, {mode, "10"})->mean_perf;
        const double sht = find(t2, {mode, "1"})->mean_perf;
        const bool mono = sht > med && med > lng;
        ok = ok && mono;
        os << mode << " short>medium>long " << (mono ? "yes" : "no") << "; ";
    }
    return {ok, os.str()};
}

double fig3_mean(const std::vector<GroupRow>& f, const char* tau, const char* mode, const char* prob) {
    return find(f, {tau, mode, prob})->mean_perf;
}

Verdict a3_learning_effect(const std::vector<ScenarioSummary>& s) {
    const auto f = aggregate(s, make_preset("fig3"));
    const double l0 = fig3_mean(f, "inf", "autonomous", "0"), l1 = fig3_mean(f, "inf", "autonomous", "1");
    const double s0 = fig3_mean(f, "1", "autonomous", "0"), s1 = fig3_mean(f, "1", "autonomous", "1");
    const double long_gap = l1 - l0, short_gap = s1 - s0;
    const bool ok = std::abs(long_gap - 0.0764) <= 0.02 && std::abs(short_gap - 0.0147) <= 0.02;
    return {ok, "tau=inf: " + fmt(l0) + " -> " + fmt(l1) + " gap " + fmt(long_gap) + " (target 0.0764±0.02); tau=1: " +
                    fmt(s0) + " -> " + fmt(s1) + " gap " + fmt(short_gap) + " (target 0.0147±0.02)"};
}

Verdict a4_liaison_decline(const std::vector<ScenarioSummary>& s) {
    const auto f = aggregate(s, make_preset("fig3"));
    const double p01 = fig3_mean(f, "inf", "liaison", "0.1"), p1 = fig3_mean(f, "inf", "liaison", "1");
    const double decline = p01 - p1;
    return {std::abs(decline - 0.03) <= 0.015,
            "liaison tau=inf: P=0.1 " + fmt(p01) + " -> P=1 " + fmt(p1) + ", decline " + fmt(decline) +
                " (target 0.03±0.015)"};
}

// ---- A2: magnitudes at >= 500 rounds --------------------------------------------

Verdict a2_magnitudes(const Options& o) {
    Grid g = default_grid();
    ScenarioConfig base;
    base.rounds = o.magnitude_rounds;
    g.modes = {CoordinationMode::fully_autonomous};
    g.taus = {FormationSchedule::never_again()};
    auto configs = enumerate_scenarios(g, base);
    g.modes = {CoordinationMode::lateral};
    g.taus = {FormationSchedule::every(1)};
    for (const auto& c : enumerate_scenarios(g, base)) configs.push_back(c);
    std::vector<ScenarioSummary> s;
    for (const auto& r : run_grid(configs, o.workers)) s.push_back(summarize(r));
    const auto t2 = aggregate(s, make_preset("table2"));
    const double autonomous_long = find(t2, {"autonomous", "inf"})->mean_perf;
    const double lateral_short_final = find(t2, {"lateral", "1"})->final_perf;
    const bool ok = std::abs(autonomous_long - 0.8296) <= 0.03 && std::abs(lateral_short_final - 0.9410) <= 0.03;
    return {ok, std::to_string(configs.size()) + " scenarios x " + std::to_string(o.magnitude_rounds) +
                    " rounds; autonomous long-term mean " + fmt(autonomous_long) +
                    " (target 0.8296±0.03); lateral short-term final " + fmt(lateral_short_final) +
                    " (target 0.9410±0.03)"};
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        auto next = [&]() -> std::string {
            if (i + 1 >= argc) {
                std::fprintf(stderr, "%s needs a value\n", a.c_str());
                std::exit(2);
            }
            return argv[++i];
        };
        if (a == "--rounds") o.rounds = static_cast<std::uint32_t>(std::stoul(next()));
        else if (a == "--magnitude-rounds") o.magnitude_rounds = static_cast<std::uint32_t>(std::stoul(next()));
        else if (a == "--workers") o.workers = std::stoul(next());
        else if (a == "--only") {
            std::stringstream ss(next());
            for (std::string item; std::getline(ss, item, ',');) o.only.insert(item);
        } else {
            std::fprintf(stderr, "usage: acceptance [--rounds N] [--magnitude-rounds N] [--workers W] [--only A1,..]\n");
            return 2;
        }
    }
    auto wanted = [&](const char* id) { return o.only.empty() || o.only.count(id) > 0; };

    std::map<std::string, Verdict> verdicts;
    auto record = [&](const char* id, const std::function<Verdict()>& fn) {
        if (!wanted(id)) return;
        const auto start = std::chrono::steady_clock::now();
        auto v = fn();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        v.detail += " [" + fmt(secs, 1) + "s]";
        verdicts[id] = v;
        std::fprintf(stderr, "%s %s\n", id, v.pass ? "pass" : "FAIL");
    };

    record("A9", [] {
        const auto n = enumerate_scenarios(default_grid()).size();
        return Verdict{n == 1584, std::to_string(n) + " scenario configs (target 1584)"};
    });
    record("A5", a5_landscape);
    record("A6", a6_protocols);
    record("A7", a7_learning);
    record("A8", a8_determinism);

    if (wanted("A1") || wanted("A3") || wanted("A4")) {
        ScenarioConfig base;
        base.rounds = o.rounds;
        const auto configs = enumerate_scenarios(default_grid(), base);
        std::fprintf(stderr, "running %zu scenarios x %u rounds on %zu worker(s)\n", configs.size(), o.rounds,
                     o.workers);
        const auto start = std::chrono::steady_clock::now();
        std::vector<ScenarioSummary> summaries;
        for (const auto& r : run_grid(configs, o.workers)) summaries.push_back(summarize(r));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::fprintf(stderr, "grid finished in %.1fs\n", secs);
        const std::string scale = " (" + std::to_string(o.rounds) + " rounds/scenario)";
        record("A1", [&] { auto v = a1_ordering(summaries); v.detail += scale; return v; });
        record("A3", [&] { auto v = a3_learning_effect(summaries); v.detail += scale; return v; });
        record("A4", [&] { auto v = a4_liaison_decline(summaries); v.detail += scale; return v; });
    }
    record("A2", [&] { return a2_magnitudes(o); });

    bool all = true;
    for (const auto& [id, v] : verdicts) {
        std::printf("%s %s: %s\n", id.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
        all = all && v.pass;
    }
    return all ? 0 : 1;
}
