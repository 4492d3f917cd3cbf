#include <gtest/gtest.h>

#include <sstream>

#include "nkteam/io.hpp"

using namespace nkteam;

TEST(Config, ParsesScalarsAndLists) {
    std::istringstream in(R"(# desk run
rounds = 10
seed = 7
grid.k = [3]
grid.mode = [lateral, liaison]
grid.tau = [inf, 1]
grid.prob = 0.1, 0.9
output.rounds_csv = true
meta.wall_clock_seconds = 12.5
)");
    RunSpec spec;
    read_config(in, spec);
    EXPECT_EQ(spec.base.rounds, 10u);
    EXPECT_EQ(spec.base.master_seed, 7u);
    EXPECT_EQ(spec.grid.ks, (std::vector<std::size_t>{3}));
    EXPECT_EQ(spec.grid.modes, (std::vector<CoordinationMode>{CoordinationMode::lateral, CoordinationMode::liaison}));
    EXPECT_TRUE(spec.grid.taus[0].infinite());
    EXPECT_EQ(spec.grid.taus[1].tau(), 1u);
    EXPECT_EQ(spec.grid.probs, (std::vector<double>{0.1, 0.9}));
    EXPECT_TRUE(spec.rounds_csv);
    EXPECT_EQ(spec.grid.size(), 2u * 1 * 6 * 2 * 2);
}

TEST(Config, Errors) {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        RunSpec spec;
        read_config(in, spec);
    };
    EXPECT_THROW(parse("nonsense = 1\n"), ConfigError);
    EXPECT_THROW(parse("rounds = ten\n"), ConfigError);
    EXPECT_THROW(parse("rounds\n"), ConfigError);
    EXPECT_THROW(parse("rounds = 1\nrounds = 2\n"), ConfigError);
    EXPECT_THROW(parse("grid.mode = [committee]\n"), ConfigError);
    EXPECT_THROW(parse("grid.tau = [0]\n"), ConfigError);
    EXPECT_THROW(parse("grid.k = [3\n"), ConfigError);
    EXPECT_THROW(parse("alpha = 2\n"), ConfigError);
}

TEST(Config, WriteReadRoundTrip) {
    RunSpec spec;
    spec.base.rounds = 17;
    spec.base.error_sd = 0.1;
    spec.grid.probs = {0.0, 0.3, 1.0};
    spec.grid.taus = {FormationSchedule::every(10), FormationSchedule::never_again()};
    std::stringstream io;
    write_config(io, spec, {{"tool_version", "x"}});
    RunSpec back;
    read_config(io, back);
    EXPECT_EQ(back.base.rounds, 17u);
    EXPECT_EQ(back.base.error_sd, 0.1);
    EXPECT_EQ(back.grid.probs, spec.grid.probs);
    EXPECT_EQ(back.grid.taus, spec.grid.taus);
    EXPECT_EQ(back.grid.modes, spec.grid.modes);
    EXPECT_EQ(back.grid.structures, spec.grid.structures);
}

TEST(Csv, DoublesRoundTripExactly) {
    for (double v : {0.1, 1.0 / 3, 0.94100000000000006, 2.2250738585072014e-308})
        EXPECT_EQ(std::stod(format_double(v)), v);
}

TEST(Csv, SummaryRoundTrip) {
    ScenarioResult r;
    r.config.mode = CoordinationMode::liaison;
    r.config.k = 5;
    r.config.structure = Structure::dependent;
    r.config.tau = FormationSchedule::every(10);
    r.config.prob = 0.7;
    r.mean_series = {0.61, 0.73};
    r.round_mean = {0.5, 0.6, 0.7, 0.8};
    r.round_final = {0.6, 0.7, 0.8, 0.75};
    const auto s = summarize(r);
    std::stringstream io;
    write_summary_header(io);
    write_summary_row(io, s);
    const auto back = read_summary_csv(io);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].scenario_id, "liaison-k5-dependent-t10-p0.7");
    EXPECT_EQ(back[0].mode, CoordinationMode::liaison);
    EXPECT_EQ(back[0].k, 5u);
    EXPECT_EQ(back[0].structure, Structure::dependent);
    EXPECT_EQ(back[0].tau, FormationSchedule::every(10));
    EXPECT_EQ(back[0].prob, 0.7);
    EXPECT_EQ(back[0].mean_perf, s.mean_perf);
    EXPECT_EQ(back[0].final_ci, s.final_ci);
    EXPECT_NEAR(back[0].mean_samples.variance(), s.mean_samples.variance(), 1e-12);
}

TEST(Csv, SchemaErrorsNameTheColumn) {
    std::istringstream missing("scenario_id,mode,k,structure,tau,prob,rounds,mean_perf,mean_ci,final_perf\nx\n");
    try {
        read_summary_csv(missing);
        FAIL();
    } catch (const SchemaError& e) {
        EXPECT_NE(std::string(e.what()).find("final_ci"), std::string::npos);
    }
    std::istringstream empty("");
    EXPECT_THROW(read_summary_csv(empty), SchemaError);
    std::stringstream header_only;
    write_summary_header(header_only);
    EXPECT_THROW(read_summary_csv(header_only), SchemaError);
}

TEST(Csv, PeriodsAndRoundsLayout) {
    ScenarioResult r;
    r.config.mode = CoordinationMode::lateral;
    r.mean_series = {0.5, 0.25};
    r.round_mean = {0.375};
    r.round_final = {0.25};
    std::ostringstream periods, rounds;
    write_periods_header(periods);
    write_periods_rows(periods, r);
    write_rounds_header(rounds);
    write_rounds_rows(rounds, r);
    EXPECT_EQ(periods.str(),
              "scenario_id,period,mean_norm_perf\n"
              "lateral-k3-block-tinf-p0,1,0.5\n"
              "lateral-k3-block-tinf-p0,2,0.25\n");
    EXPECT_EQ(rounds.str(), "scenario_id,round,mean_perf,final_perf\nlateral-k3-block-tinf-p0,0,0.375,0.25\n");
}

TEST(Csv, GroupTable) {
    GroupRow row;
    row.keys = {{"mode", "lateral"}, {"tau", "1"}};
    row.scenarios = 2;
    row.mean_perf = 0.5;
    std::ostringstream out;
    write_group_csv(out, {row});
    EXPECT_EQ(out.str(), "mode,tau,scenarios,mean_perf,mean_ci,final_perf,final_ci\nlateral,1,2,0.5,0,0,0\n");
}
