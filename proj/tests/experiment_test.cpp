// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lavabo/experiment.hpp"

namespace lavabo::experiment {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("lavabo_experiment_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json ackley_json(const fs::path& out) {
    json j = json::parse(R"({
        "objective": {"type": "ackley", "d": 2},
        "algorithms": [
            {"type": "bo", "name": "bo", "max_evaluations": 14, "init": {"num_points": 5},
             "optimizer": {"kind": "random_sampling", "num_candidates": 1000}},
            {"type": "random", "name": "random", "max_evaluations": 60}
        ],
        "repeats": 3,
        "base_seed": 100
    })");
    j["output_dir"] = out.string();
    return j;
}

TEST(ParseConfig, FullSchema) {
    const auto cfg = parse_config(json::parse(R"({
        "objective": {"type": "synthetic", "landscape_seed": 4, "smoothness": 0.9},
        "space": [
            {"name": "rate", "type": "stepped", "low": 0.1, "high": 0.7, "delta": 0.2},
            {"name": "act", "type": "categorical", "options": ["relu", "tanh"]}
        ],
        "algorithms": [
            {"type": "bo", "acquisition": {"kind": "ei", "xi": 0.05},
             "optimizer": {"kind": "quasi_newton", "num_starts": 4, "num_candidates": 200, "max_iters": 20},
             "init": {"kind": "latin_hypercube", "num_points": 3}, "max_evaluations": 6},
            {"type": "grid"}
        ],
        "repeats": 2, "base_seed": 7, "output_dir": "out", "baseline": "grid", "transport": "channel"
    })"));
    EXPECT_EQ(cfg.objective.kind, ObjectiveKind::Synthetic);
    EXPECT_EQ(cfg.objective.landscape_seed, 4u);
    EXPECT_EQ(cfg.space.cardinality(), 8u);
    ASSERT_EQ(cfg.algorithms.size(), 2u);
    const auto& bo = cfg.algorithms[0];
    EXPECT_EQ(bo.name, "bo");
    EXPECT_EQ(bo.acquisition.kind, AcquisitionKind::NegativeExpectedImprovement);
    EXPECT_EQ(bo.acquisition.xi, 0.05);
    EXPECT_EQ(bo.optimizer.kind, OptimizerKind::QuasiNewton);
    EXPECT_EQ(bo.optimizer.num_starts, 4u);
    EXPECT_EQ(bo.init.kind, InitialDesign::LatinHypercube);
    EXPECT_EQ(cfg.algorithms[1].kind, AlgorithmKind::Grid);
    EXPECT_EQ(cfg.seed_for(1), 8u);
    EXPECT_EQ(cfg.baseline, "grid");
    EXPECT_EQ(cfg.transport, Transport::Channel);
}

TEST(ParseConfig, DefaultsAndPresets) {
    const auto cfg = parse_config(json::parse(R"({"objective": {"type": "ackley"}, "algorithms": [{"type": "bo"}]})"));
    EXPECT_EQ(cfg.space.size(), 2u);
    EXPECT_EQ(cfg.algorithms[0].max_evaluations, 50u);
    EXPECT_EQ(cfg.algorithms[0].init.num_points, 10u);
    EXPECT_EQ(cfg.algorithms[0].acquisition.kappa, 1.96);
    EXPECT_EQ(cfg.repeats, 1u);
    const auto evo = parse_config(
        json::parse(R"({"objective": {"type": "synthetic"}, "space": "evolutionary", "algorithms": [{"type": "grid"}]})"));
    EXPECT_EQ(evo.space.cardinality(), 432u);
}

TEST(ParseConfig, RejectsBadInput) {
    const char* bad[] = {
        R"({"algorithms": [{"type": "bo"}]})",
        R"({"objective": {"type": "rosenbrock"}, "algorithms": [{"type": "bo"}]})",
        R"({"objective": {"type": "ackley"}, "algorithms": []})",
        R"({"objective": {"type": "ackley"}, "algorithms": [{"type": "grid"}]})",
        R"({"objective": {"type": "ackley"}, "algorithms": [{"type": "bo", "max_evaluations": 3}]})",
        R"({"objective": {"type": "ackley"}, "algorithms": [{"type": "bo"}, {"type": "bo"}]})",
        R"({"objective": {"type": "ackley"}, "algorithms": [{"type": "bo"}], "repeats": 0})",
        R"({"objective": {"type": "ackley"}, "algorithms": [{"type": "bo"}], "baseline": "nope"})",
        R"({"objective": {"type": "ackley"}, "algorithms": [{"type": "bo", "acquisition": {"kind": "lcb", "kappa": -1}}]})",
        R"({"objective": {"type": "synthetic"}, "space": "ackley", "algorithms": [{"type": "bo"}]})",
        R"({"objective": {"type": "ackley"}, "algorithms": [{"type": "bo"}], "repeats": "many"})",
    };
    for (const char* text : bad) {
        const auto j = json::parse(text);
        try {
            const auto cfg = parse_config(j);
            // An unknown baseline is only detectable against the run list.
            (void)summarize({}, cfg.baseline);
            ADD_FAILURE() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Config) << text;
        }
    }
}

TEST(RunExperiment, AckleyWritesAllFiles) {
    const auto dir = scratch_dir("ackley");
    const auto cfg = parse_config(ackley_json(dir));
    const auto result = run_experiment(cfg);
    EXPECT_FALSE(result.any_failed);
    EXPECT_EQ(result.records.size(), 6u);
    for (const auto* algo : {"bo", "random"})
        for (int s = 100; s < 103; ++s) EXPECT_TRUE(fs::exists(dir / trace_filename(algo, s)));
    EXPECT_TRUE(fs::exists(dir / "summary.json"));
    EXPECT_TRUE(fs::exists(dir / "observations_hist.csv"));

    // Summary best scores agree with the trace files on disk.
    const auto summary = json::parse(slurp(dir / "summary.json"));
    EXPECT_EQ(summary["baseline"], "random");
    for (const auto& algo : summary["algorithms"]) {
        for (const auto& run : algo["run_details"]) {
            const auto loaded = read_trace_csv((dir / run["file"].get<std::string>()).string());
            EXPECT_EQ(run["final_best"].get<double>(), loaded.trace.rows().back().best_so_far);
            EXPECT_EQ(run["evaluations"].get<std::size_t>(), loaded.trace.size());
        }
    }
}

TEST(RunExperiment, RerunIsByteIdenticalAcrossThreadCounts) {
    const auto a = scratch_dir("rerun_a");
    const auto b = scratch_dir("rerun_b");
    (void)run_experiment(parse_config(ackley_json(a)), 1);
    (void)run_experiment(parse_config(ackley_json(b)), 4);
    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto name = entry.path().filename();
        EXPECT_EQ(slurp(entry.path()), slurp(b / name)) << name;
        ++compared;
    }
    EXPECT_EQ(compared, 8u);
}

TEST(RunExperiment, ChannelTransportMatchesDirect) {
    const auto a = scratch_dir("direct");
    const auto b = scratch_dir("channel");
    (void)run_experiment(parse_config(ackley_json(a)));
    auto j = ackley_json(b);
    j["transport"] = "channel";
    (void)run_experiment(parse_config(j));
    for (const auto& entry : fs::directory_iterator(a))
        EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path().filename();
}

TEST(RunExperiment, GridRunsOnceWith432Rows) {
    const auto dir = scratch_dir("grid");
    auto j = json::parse(R"({"objective": {"type": "synthetic"}, "space": "evolutionary",
                             "algorithms": [{"type": "grid"}], "repeats": 3})");
    j["output_dir"] = dir.string();
    const auto result = run_experiment(parse_config(j));
    ASSERT_EQ(result.records.size(), 1u);
    const auto loaded = read_trace_csv((dir / "grid_seed0.csv").string());
    EXPECT_EQ(loaded.trace.size(), 432u);
}

TEST(RunExperiment, UnwritableOutputFailsBeforeRunning) {
    const auto dir = scratch_dir("blocked");
    fs::create_directories(dir);
    { std::ofstream(dir / "file") << "x"; }
    auto j = ackley_json(dir / "file" / "sub");
    try {
        (void)run_experiment(parse_config(j));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Io);
    }
}

TEST(RunExperiment, FailedRunKeepsPartialTraceWithMarker) {
    ExperimentConfig cfg = parse_config(ackley_json(scratch_dir("unused")));
    AlgorithmSpec algo;
    algo.name = "bo";
    algo.max_evaluations = 8;
    algo.init.num_points = 4;
    std::size_t calls = 0;
    const Objective flaky = [&](const ParamVector& p) {
        if (++calls == 6) throw std::runtime_error("simulator crashed");
        return std::get<double>(p[0]);
    };
    const auto rec = execute_run(cfg, algo, 0, flaky);
    ASSERT_TRUE(rec.error);
    EXPECT_EQ(rec.trace.size(), 5u);
    std::ostringstream out;
    write_trace_csv(out, rec.trace, rec.error);
    EXPECT_NE(out.str().find("# error: "), std::string::npos);
    EXPECT_NE(out.str().find("simulator crashed"), std::string::npos);
}

TEST(Summary, GainUsesEvaluationsToTarget) {
    auto make = [](const std::string& algo, std::uint64_t seed, std::vector<double> scores) {
        RunRecord r;
        r.algorithm = algo;
        r.seed = seed;
        r.trace = RunTrace(1);
        for (double s : scores) r.trace.append(Phase::Random, ParamVector{0.0}, s);
        return r;
    };
    std::vector<RunRecord> recs;
    recs.push_back(make("random", 0, {5, 4, 3, 2}));
    recs.push_back(make("random", 1, {5, 5, 5, 3}));
    recs.push_back(make("random", 2, {1, 1, 1, 1}));
    recs.push_back(make("bo", 0, {3, 2, 1}));    // reaches 2 at evaluation 2
    recs.push_back(make("bo", 1, {9, 9}));       // never
    recs.push_back(make("bo", 2, {2, 0}));       // evaluation 1
    const auto report = summarize(recs, std::nullopt);
    EXPECT_EQ(report.baseline, "random");
    EXPECT_EQ(report.target, 2.0);
    const auto& bo = report.algorithms[1];
    EXPECT_EQ(bo.name, "bo");
    EXPECT_EQ(bo.evaluations_to_target, 2.0);
    EXPECT_EQ(bo.gain_vs_baseline, 2.0);  // 4 / 2
    EXPECT_EQ(bo.best_median, 1.0);
    EXPECT_EQ(bo.best_min, 0.0);
    EXPECT_EQ(bo.best_max, 9.0);
}

TEST(Histograms, FractionsSumToOne) {
    const auto space = bench::ackley_space(2);
    std::vector<RunRecord> recs(2);
    for (std::size_t i = 0; i < 2; ++i) {
        recs[i].algorithm = "random";
        recs[i].trace = run_random(space, 250, i, [](const ParamVector&) { return 0.0; });
    }
    const auto rows = emit_histograms(recs, space);
    ASSERT_EQ(rows.size(), 2u * kHistogramBins);
    for (std::size_t d = 0; d < 2; ++d) {
        double sum = 0.0;
        for (const auto& r : rows)
            if (r.dimension == d) {
                sum += r.fraction;
                // 500 draws, p = 1/64: P(count > 35) per bin is below 1e-9.
                EXPECT_LE(r.fraction, 0.07);
                EXPECT_GE(r.fraction, 0.0);
            }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
    EXPECT_DOUBLE_EQ(rows.front().bin_low, -bench::kAckleyBound);
    EXPECT_DOUBLE_EQ(rows[kHistogramBins - 1].bin_high, bench::kAckleyBound);
}

TEST(Histograms, SingleRowFillsOneBin) {
    const auto space = bench::snn_training_space();
    RunRecord r;
    r.algorithm = "bo";
    r.trace = RunTrace(space.size());
    r.trace.append(Phase::Init, ParamVector({ParamValue{5.0}, ParamValue{0.0}, ParamValue{0.35}, ParamValue{0.7},
                                             ParamValue{std::string("1e-3")}}),
                   0.5);
    const auto rows = emit_histograms({r}, space);
    for (std::size_t d = 0; d < space.size(); ++d) {
        std::size_t full = 0;
        for (const auto& row : rows)
            if (row.dimension == d && row.fraction == 1.0) ++full;
        EXPECT_EQ(full, 1u);
    }
    EXPECT_THROW((void)emit_histograms({}, space), Error);
}

TEST(SummarizeDirectory, MatchesInMemorySummary) {
    const auto dir = scratch_dir("summarize");
    const auto result = run_experiment(parse_config(ackley_json(dir)));
    std::vector<RunRecord> storage;
    const auto report = summarize_directory(dir.string(), storage);
    EXPECT_EQ(storage.size(), 6u);
    EXPECT_EQ(report.target, result.summary.target);
    ASSERT_EQ(report.algorithms.size(), 2u);
    for (const auto& s : report.algorithms) {
        const auto it = std::find_if(result.summary.algorithms.begin(), result.summary.algorithms.end(),
                                     [&](const AlgorithmSummary& o) { return o.name == s.name; });
        ASSERT_NE(it, result.summary.algorithms.end());
        EXPECT_EQ(s.best_median, it->best_median);
        EXPECT_EQ(s.gain_vs_baseline, it->gain_vs_baseline);
    }
    EXPECT_THROW((void)summarize_directory((dir / "missing").string(), storage), Error);
}

}  // namespace
}  // namespace lavabo::experiment
