// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

// Batch experiment runner.
//
//   lavabo_cli run --config <path> [--output-dir <path>] [--parallel <n>]
//   lavabo_cli summarize --input-dir <path>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lavabo/experiment.hpp"

namespace {

int run_command(const std::string& config_path, const std::optional<std::string>& output_dir, std::size_t parallel) {
    auto cfg = lavabo::experiment::load_config(config_path);
    if (output_dir) cfg.output_dir = *output_dir;
    const auto result = lavabo::experiment::run_experiment(cfg, parallel);
    for (const auto& s : result.summary.algorithms) {
        std::cout << s.name << ": runs=" << s.runs << " failed=" << s.failed << " best median=" << s.best_median
                  << " min=" << s.best_min << " max=" << s.best_max << " evaluations=" << s.evaluations_used;
        if (s.gain_vs_baseline) std::cout << " gain=" << *s.gain_vs_baseline << 'x';
        std::cout << '\n';
    }
    std::cout << "wrote " << result.records.size() << " traces to " << cfg.output_dir << '\n';
    if (result.any_failed) {
        for (const auto& r : result.records)
            if (r.error) std::cerr << "run " << r.file << " failed: " << *r.error << '\n';
        return 2;
    }
    return 0;
}

int summarize_command(const std::string& input_dir, const std::optional<std::string>& baseline) {
    std::vector<lavabo::experiment::RunRecord> records;
    const auto report = lavabo::experiment::summarize_directory(input_dir, records, baseline);
    std::cout << lavabo::experiment::to_json(report).dump(2) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian optimization benchmark runner"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Execute an experiment config");
    std::string config_path;
    std::optional<std::string> output_dir;
    std::size_t parallel = 1;
    run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--output-dir", output_dir, "Override the config's output_dir");
    run->add_option("--parallel", parallel, "Worker threads")->check(CLI::PositiveNumber);

    auto* summarize = app.add_subcommand("summarize", "Summarize trace files in a directory");
    std::string input_dir;
    std::optional<std::string> baseline;
    summarize->add_option("--input-dir", input_dir, "Directory containing <algo>_seed<k>.csv traces")->required();
    summarize->add_option("--baseline", baseline, "Baseline algorithm name");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_command(config_path, output_dir, parallel);
        return summarize_command(input_dir, baseline);
    } catch (const lavabo::Error& e) {
        std::cerr << "lavabo_cli: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "lavabo_cli: unexpected failure: " << e.what() << '\n';
        return 1;
    }
}
