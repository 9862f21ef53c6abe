// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_EXPERIMENT_HPP
#define LAVABO_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lavabo/benchmarks.hpp"
#include "lavabo/channel.hpp"
#include "lavabo/error.hpp"
#include "lavabo/solver.hpp"
#include "lavabo/trace.hpp"

namespace lavabo::experiment {

using nlohmann::json;

inline constexpr std::size_t kHistogramBins = 64;

enum class ObjectiveKind { Ackley, Synthetic };

struct ObjectiveSpec {
    ObjectiveKind kind = ObjectiveKind::Ackley;
    bench::AckleyParams ackley;
    std::uint64_t landscape_seed = 0;
    double smoothness = 0.8;
};

enum class AlgorithmKind { Bo, Random, Grid };

inline std::string_view to_string(AlgorithmKind k) {
    switch (k) {
        case AlgorithmKind::Bo: return "bo";
        case AlgorithmKind::Random: return "random";
        case AlgorithmKind::Grid: return "grid";
    }
    return "?";
}

struct AlgorithmSpec {
    std::string name;
    AlgorithmKind kind = AlgorithmKind::Bo;
    std::size_t max_evaluations = 0;  // unused for grid
    AcquisitionSpec acquisition = AcquisitionSpec::lcb();
    OptimizerSpec optimizer = OptimizerSpec::random_sampling();
    InitialPointGenerator init;
};

enum class Transport { Direct, Channel };

struct ExperimentConfig {
    ObjectiveSpec objective;
    SearchSpace space;
    std::vector<AlgorithmSpec> algorithms;
    std::size_t repeats = 1;
    std::uint64_t base_seed = 0;
    std::string output_dir = "results";
    std::optional<std::string> baseline;
    Transport transport = Transport::Direct;

    std::uint64_t seed_for(std::size_t repeat) const { return base_seed + repeat; }
};

// ---------------------------------------------------------------- parsing

namespace detail {

inline Error config_error(const std::string& what) { return Error(ErrorKind::Config, what); }

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw config_error(std::string("key '") + key + "': " + e.what());
    }
}

inline Dimension parse_dimension(const json& j, std::size_t index) {
    const auto name = get_or<std::string>(j, "name", "param_" + std::to_string(index));
    const auto type = get_or<std::string>(j, "type", "");
    if (type == "continuous") return Dimension::continuous(name, j.at("low").get<double>(), j.at("high").get<double>());
    if (type == "stepped" || type == "discrete")
        return Dimension::stepped(name, j.at("low").get<double>(), j.at("high").get<double>(),
                                  j.at("delta").get<double>());
    if (type == "categorical") return Dimension::categorical(name, j.at("options").get<std::vector<std::string>>());
    throw config_error("dimension " + std::to_string(index) + ": unknown type '" + type + "'");
}

inline SearchSpace parse_space(const json& j, const ObjectiveSpec& objective) {
    if (j.is_null()) {
        if (objective.kind == ObjectiveKind::Ackley) return bench::ackley_space(objective.ackley.d);
        throw config_error("synthetic objective requires a 'space'");
    }
    if (j.is_string()) {
        const auto preset = j.get<std::string>();
        if (preset == "ackley") return bench::ackley_space(objective.ackley.d);
        if (preset == "evolutionary") return bench::evolutionary_space();
        if (preset == "snn_training") return bench::snn_training_space();
        throw config_error("unknown space preset '" + preset + "'");
    }
    if (!j.is_array()) throw config_error("'space' must be a preset name or a list of dimensions");
    std::vector<Dimension> dims;
    for (std::size_t i = 0; i < j.size(); ++i) dims.push_back(parse_dimension(j[i], i));
    return SearchSpace(std::move(dims));
}

inline AcquisitionSpec parse_acquisition(const json& j) {
    if (j.is_null()) return AcquisitionSpec::lcb();
    const auto kind = get_or<std::string>(j, "kind", "lcb");
    AcquisitionSpec spec;
    if (kind == "lcb")
        spec = AcquisitionSpec::lcb(get_or<double>(j, "kappa", 1.96));
    else if (kind == "ei")
        spec = AcquisitionSpec::neg_ei(get_or<double>(j, "xi", 0.01));
    else if (kind == "pi")
        spec = AcquisitionSpec::neg_pi(get_or<double>(j, "xi", 0.01));
    else
        throw config_error("unknown acquisition '" + kind + "'");
    spec.validate();
    return spec;
}

inline OptimizerSpec parse_optimizer(const json& j) {
    if (j.is_null()) return OptimizerSpec::random_sampling();
    const auto kind = get_or<std::string>(j, "kind", "random_sampling");
    OptimizerSpec spec;
    if (kind == "random_sampling")
        spec = OptimizerSpec::random_sampling(get_or<std::size_t>(j, "num_candidates", 10000));
    else if (kind == "quasi_newton")
        spec = OptimizerSpec::quasi_newton(get_or<std::size_t>(j, "num_starts", 10),
                                           get_or<std::size_t>(j, "num_candidates", 10000),
                                           get_or<int>(j, "max_iters", 50));
    else
        throw config_error("unknown optimizer '" + kind + "'");
    spec.validate();
    return spec;
}

inline InitialPointGenerator parse_init(const json& j) {
    InitialPointGenerator gen;
    if (j.is_null()) return gen;
    const auto kind = get_or<std::string>(j, "kind", "uniform");
    if (kind == "uniform")
        gen.kind = InitialDesign::UniformRandom;
    else if (kind == "latin_hypercube")
        gen.kind = InitialDesign::LatinHypercube;
    else
        throw config_error("unknown initial design '" + kind + "'");
    gen.num_points = get_or<std::size_t>(j, "num_points", 10);
    gen.validate();
    return gen;
}

inline const json& member_or_null(const json& j, const char* key) {
    static const json null_json;
    return j.contains(key) ? j.at(key) : null_json;
}

}  // namespace detail

/// Parses the JSON experiment schema documented in the README.
inline ExperimentConfig parse_config(const json& j) {
    using namespace detail;
    try {
        ExperimentConfig cfg;
        const json& obj = j.at("objective");
        const auto type = get_or<std::string>(obj, "type", "");
        if (type == "ackley") {
            cfg.objective.kind = ObjectiveKind::Ackley;
            cfg.objective.ackley.d = get_or<std::size_t>(obj, "d", 2);
            cfg.objective.ackley.a = get_or<double>(obj, "a", 20.0);
            cfg.objective.ackley.b = get_or<double>(obj, "b", 0.2);
            cfg.objective.ackley.c = get_or<double>(obj, "c", 2.0 * std::numbers::pi);
            if (cfg.objective.ackley.d < 1) throw config_error("ackley d must be >= 1");
        } else if (type == "synthetic") {
            cfg.objective.kind = ObjectiveKind::Synthetic;
            cfg.objective.landscape_seed = get_or<std::uint64_t>(obj, "landscape_seed", 0);
            cfg.objective.smoothness = get_or<double>(obj, "smoothness", 0.8);
        } else {
            throw config_error("objective type must be 'ackley' or 'synthetic'");
        }
        cfg.space = parse_space(member_or_null(j, "space"), cfg.objective);
        if (cfg.objective.kind == ObjectiveKind::Synthetic && !cfg.space.cardinality())
            throw config_error("synthetic objective needs a finite space");
        if (cfg.objective.kind == ObjectiveKind::Ackley) {
            if (cfg.space.size() != cfg.objective.ackley.d) throw config_error("space dimension differs from ackley d");
            for (const auto& d : cfg.space.dimensions())
                if (d.is_categorical()) throw config_error("ackley space must be numeric");
        }

        const json& algos = j.at("algorithms");
        if (!algos.is_array() || algos.empty()) throw config_error("'algorithms' must be a non-empty list");
        for (const auto& a : algos) {
            AlgorithmSpec spec;
            const auto kind = get_or<std::string>(a, "type", "");
            if (kind == "bo") {
                spec.kind = AlgorithmKind::Bo;
                spec.acquisition = parse_acquisition(member_or_null(a, "acquisition"));
                spec.optimizer = parse_optimizer(member_or_null(a, "optimizer"));
                spec.init = parse_init(member_or_null(a, "init"));
                spec.max_evaluations = get_or<std::size_t>(a, "max_evaluations", 50);
                if (spec.max_evaluations < spec.init.num_points)
                    throw config_error("bo max_evaluations must be >= init.num_points");
            } else if (kind == "random") {
                spec.kind = AlgorithmKind::Random;
                spec.max_evaluations = get_or<std::size_t>(a, "max_evaluations", 50);
                if (spec.max_evaluations < 1) throw config_error("random max_evaluations must be >= 1");
            } else if (kind == "grid") {
                spec.kind = AlgorithmKind::Grid;
                if (!cfg.space.cardinality()) throw config_error("grid search needs a finite space");
            } else {
                throw config_error("algorithm type must be 'bo', 'random' or 'grid'");
            }
            spec.name = get_or<std::string>(a, "name", std::string(to_string(spec.kind)));
            if (spec.name.empty() || spec.name.find_first_of("/\\") != std::string::npos)
                throw config_error("invalid algorithm name '" + spec.name + "'");
            for (const auto& other : cfg.algorithms)
                if (other.name == spec.name) throw config_error("duplicate algorithm name '" + spec.name + "'");
            cfg.algorithms.push_back(std::move(spec));
        }

        cfg.repeats = get_or<std::size_t>(j, "repeats", 1);
        if (cfg.repeats < 1) throw config_error("repeats must be >= 1");
        cfg.base_seed = get_or<std::uint64_t>(j, "base_seed", 0);
        cfg.output_dir = get_or<std::string>(j, "output_dir", "results");
        if (j.contains("baseline")) cfg.baseline = j.at("baseline").get<std::string>();
        const auto transport = get_or<std::string>(j, "transport", "direct");
        if (transport == "direct")
            cfg.transport = Transport::Direct;
        else if (transport == "channel")
            cfg.transport = Transport::Channel;
        else
            throw config_error("transport must be 'direct' or 'channel'");
        return cfg;
    } catch (const json::exception& e) {
        throw config_error(e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        throw config_error(e.what());
    }
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open config '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config, "'" + path + "': " + e.what());
    }
    return parse_config(j);
}

// ---------------------------------------------------------------- running

/// Deterministic objective for a config; safe to share across threads.
inline Objective make_objective(const ExperimentConfig& cfg) {
    if (cfg.objective.kind == ObjectiveKind::Ackley) {
        const auto params = cfg.objective.ackley;
        return [params](const ParamVector& p) {
            const auto x = p.reals();
            return bench::ackley(x, params);
        };
    }
    auto landscape =
        std::make_shared<const bench::SyntheticLandscape>(cfg.space, cfg.objective.landscape_seed, cfg.objective.smoothness);
    return [landscape](const ParamVector& p) { return landscape->score(p); };
}

struct RunRecord {
    std::string algorithm;
    std::uint64_t seed = 0;
    std::string file;
    RunTrace trace;
    std::optional<std::string> error;
};

inline std::string trace_filename(const std::string& algorithm, std::uint64_t seed) {
    return algorithm + "_seed" + std::to_string(seed) + ".csv";
}

/// Runs one algorithm once. Failures are captured in the record together
/// with the partial trace.
inline RunRecord execute_run(const ExperimentConfig& cfg, const AlgorithmSpec& algo, std::uint64_t seed,
                             const Objective& objective) {
    RunRecord rec;
    rec.algorithm = algo.name;
    rec.seed = seed;
    rec.file = trace_filename(algo.name, seed);
    rec.trace = RunTrace(cfg.space.size());

    std::unique_ptr<BlackBoxProcess> process;
    Objective target = objective;
    if (cfg.transport == Transport::Channel) {
        process = std::make_unique<BlackBoxProcess>(objective, cfg.space);
        target = process->objective();
    }
    try {
        switch (algo.kind) {
            case AlgorithmKind::Bo: {
                SolverConfig sc;
                sc.space = cfg.space;
                sc.acquisition = algo.acquisition;
                sc.optimizer = algo.optimizer;
                sc.init = algo.init;
                sc.max_evaluations = algo.max_evaluations;
                sc.seed = seed;
                rec.trace = run_bo(sc, target);
                break;
            }
            case AlgorithmKind::Random:
                rec.trace = run_random(cfg.space, algo.max_evaluations, seed, target);
                break;
            case AlgorithmKind::Grid:
                rec.trace = run_grid(cfg.space, target);
                break;
        }
    } catch (const RunAborted& e) {
        rec.trace = e.partial();
        rec.error = e.what();
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

// ---------------------------------------------------------------- reporting

namespace detail {

/// Median; +inf propagates when it falls in the middle.
inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    if (n % 2 == 1) return v[n / 2];
    const double lo = v[n / 2 - 1];
    const double hi = v[n / 2];
    if (std::isinf(lo) || std::isinf(hi)) return std::isinf(hi) ? hi : lo;
    return 0.5 * (lo + hi);
}

inline json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace detail

struct AlgorithmSummary {
    std::string name;
    std::size_t runs = 0;
    std::size_t failed = 0;
    double best_median = 0.0;
    double best_min = 0.0;
    double best_max = 0.0;
    std::size_t evaluations_used = 0;
    double evaluations_to_target = std::numeric_limits<double>::infinity();
    std::optional<double> gain_vs_baseline;
};

struct SummaryReport {
    std::optional<std::string> baseline;
    std::optional<double> target;
    std::vector<AlgorithmSummary> algorithms;
    std::vector<RunRecord const*> runs;  // non-owning; order of execution plan
};

/// Picks the named baseline, else the first random-search, else the first grid algorithm.
inline std::optional<std::string> pick_baseline(const std::vector<std::string>& names,
                                                const std::optional<std::string>& requested) {
    if (requested) {
        if (std::find(names.begin(), names.end(), *requested) == names.end())
            throw Error(ErrorKind::Config, "baseline '" + *requested + "' is not an algorithm in this experiment");
        return requested;
    }
    for (const char* prefix : {"random", "grid"})
        for (const auto& n : names)
            if (n.starts_with(prefix)) return n;
    return std::nullopt;
}

/// Builds per-algorithm statistics.
///
/// target = median over baseline runs of the final best score. Gain is the
/// baseline's evaluations_used divided by the subject's median
/// evaluations-to-reach-target (runs that never reach it count as +inf);
/// it is omitted when that median is infinite.
inline SummaryReport summarize(const std::vector<RunRecord>& records, const std::optional<std::string>& requested) {
    std::vector<std::string> names;
    for (const auto& r : records)
        if (std::find(names.begin(), names.end(), r.algorithm) == names.end()) names.push_back(r.algorithm);

    SummaryReport report;
    report.baseline = pick_baseline(names, requested);
    for (const auto& r : records) report.runs.push_back(&r);

    auto runs_of = [&](const std::string& name) {
        std::vector<const RunRecord*> out;
        for (const auto& r : records)
            if (r.algorithm == name) out.push_back(&r);
        return out;
    };

    std::size_t baseline_evals = 0;
    if (report.baseline) {
        std::vector<double> finals;
        for (const auto* r : runs_of(*report.baseline)) {
            if (!r->trace.empty()) finals.push_back(r->trace.best());
            baseline_evals = std::max(baseline_evals, r->trace.size());
        }
        if (!finals.empty()) report.target = detail::median(finals);
    }

    for (const auto& name : names) {
        AlgorithmSummary s;
        s.name = name;
        std::vector<double> finals;
        std::vector<double> reach;
        for (const auto* r : runs_of(name)) {
            ++s.runs;
            if (r->error) ++s.failed;
            s.evaluations_used = std::max(s.evaluations_used, r->trace.size());
            if (r->trace.empty()) continue;
            finals.push_back(r->trace.best());
            if (report.target) {
                const auto n = r->trace.evaluations_to_reach(*report.target);
                reach.push_back(n ? static_cast<double>(*n) : std::numeric_limits<double>::infinity());
            }
        }
        if (!finals.empty()) {
            s.best_median = detail::median(finals);
            s.best_min = *std::min_element(finals.begin(), finals.end());
            s.best_max = *std::max_element(finals.begin(), finals.end());
        } else {
            s.best_median = s.best_min = s.best_max = std::numeric_limits<double>::quiet_NaN();
        }
        if (report.target) {
            if (name == *report.baseline) {
                s.evaluations_to_target = static_cast<double>(baseline_evals);
                s.gain_vs_baseline = 1.0;
            } else {
                s.evaluations_to_target = detail::median(reach);
                if (std::isfinite(s.evaluations_to_target) && s.evaluations_to_target > 0.0)
                    s.gain_vs_baseline = static_cast<double>(baseline_evals) / s.evaluations_to_target;
            }
        }
        report.algorithms.push_back(std::move(s));
    }
    return report;
}

inline json to_json(const SummaryReport& report) {
    json out;
    out["baseline"] = report.baseline ? json(*report.baseline) : json(nullptr);
    out["target"] = report.target ? detail::finite_or_null(*report.target) : json(nullptr);
    json algos = json::array();
    for (const auto& s : report.algorithms) {
        json a;
        a["name"] = s.name;
        a["runs"] = s.runs;
        a["failed_runs"] = s.failed;
        a["best_score"] = {{"median", detail::finite_or_null(s.best_median)},
                           {"min", detail::finite_or_null(s.best_min)},
                           {"max", detail::finite_or_null(s.best_max)}};
        a["evaluations_used"] = s.evaluations_used;
        a["evaluations_to_target"] = detail::finite_or_null(s.evaluations_to_target);
        a["gain_vs_baseline"] = s.gain_vs_baseline ? json(*s.gain_vs_baseline) : json(nullptr);
        json runs = json::array();
        for (const auto* r : report.runs) {
            if (r->algorithm != s.name) continue;
            json run;
            run["seed"] = r->seed;
            run["file"] = r->file;
            run["evaluations"] = r->trace.size();
            run["final_best"] = r->trace.empty() ? json(nullptr) : detail::finite_or_null(r->trace.best());
            run["status"] = r->error ? "failed" : "ok";
            if (r->error) run["error"] = *r->error;
            runs.push_back(std::move(run));
        }
        a["run_details"] = std::move(runs);
        algos.push_back(std::move(a));
    }
    out["algorithms"] = std::move(algos);
    return out;
}

struct HistogramRow {
    std::string algorithm;
    std::size_t dimension;
    double bin_low;
    double bin_high;
    std::size_t count;
    double fraction;
};

/// Histogram coordinate of a value: the native value for numeric
/// dimensions, the option index for categorical ones.
inline double histogram_coordinate(const Dimension& dim, const ParamValue& v) {
    if (dim.is_categorical()) return static_cast<double>(dim.index_of(v));
    return std::get<double>(v);
}

/// Per-(algorithm, dimension) counts over 64 equal bins spanning the
/// dimension's range, aggregated over all traces of that algorithm.
inline std::vector<HistogramRow> emit_histograms(const std::vector<RunRecord>& records, const SearchSpace& space,
                                                 std::size_t bins = kHistogramBins) {
    std::vector<std::string> names;
    for (const auto& r : records)
        if (std::find(names.begin(), names.end(), r.algorithm) == names.end()) names.push_back(r.algorithm);
    if (names.empty()) throw Error(ErrorKind::Data, "no traces to histogram");

    std::vector<HistogramRow> rows;
    for (const auto& name : names) {
        std::vector<std::vector<std::size_t>> counts(space.size(), std::vector<std::size_t>(bins, 0));
        std::size_t total = 0;
        for (const auto& r : records) {
            if (r.algorithm != name) continue;
            for (const auto& row : r.trace.rows()) {
                ++total;
                for (std::size_t d = 0; d < space.size(); ++d) {
                    const auto [lo, hi] = space[d].range();
                    const double x = histogram_coordinate(space[d], row.params[d]);
                    const double pos = (x - lo) / (hi - lo) * static_cast<double>(bins);
                    const auto bin = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
                    ++counts[d][bin];
                }
            }
        }
        if (total == 0) throw Error(ErrorKind::Data, "algorithm '" + name + "' has no observations");
        for (std::size_t d = 0; d < space.size(); ++d) {
            const auto [lo, hi] = space[d].range();
            const double width = (hi - lo) / static_cast<double>(bins);
            for (std::size_t b = 0; b < bins; ++b) {
                rows.push_back({name, d, lo + static_cast<double>(b) * width,
                                b + 1 == bins ? hi : lo + static_cast<double>(b + 1) * width, counts[d][b],
                                static_cast<double>(counts[d][b]) / static_cast<double>(total)});
            }
        }
    }
    return rows;
}

inline void write_histograms_csv(std::ostream& out, const std::vector<HistogramRow>& rows) {
    out << "algorithm,dimension,bin_low,bin_high,count,fraction\n";
    for (const auto& r : rows)
        out << csv::escape(r.algorithm) << ',' << r.dimension << ',' << csv::format_real(r.bin_low) << ','
            << csv::format_real(r.bin_high) << ',' << r.count << ',' << csv::format_real(r.fraction) << '\n';
}

struct ExperimentResult {
    std::vector<RunRecord> records;
    SummaryReport summary;
    bool any_failed = false;
};

namespace detail {

inline void ensure_writable(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
    const auto probe = dir / ".lavabo_write_probe";
    {
        std::ofstream out(probe, std::ios::trunc);
        if (!out || !(out << "probe")) throw Error(ErrorKind::Io, "output directory '" + dir.string() + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text)) throw Error(ErrorKind::Io, "failed writing '" + path.string() + "'");
}

}  // namespace detail

/// Runs every algorithm x repeat (grid once, it is deterministic), writes
/// `<algo>_seed<k>.csv`, `summary.json` and `observations_hist.csv` into
/// the output directory. `parallel` worker threads share a job queue;
/// results do not depend on it.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t parallel = 1) {
    const std::filesystem::path dir(cfg.output_dir);
    detail::ensure_writable(dir);

    struct Job {
        const AlgorithmSpec* algo;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& a : cfg.algorithms) {
        const std::size_t reps = a.kind == AlgorithmKind::Grid ? 1 : cfg.repeats;
        for (std::size_t r = 0; r < reps; ++r) jobs.push_back({&a, cfg.seed_for(r)});
    }

    const Objective objective = make_objective(cfg);
    ExperimentResult result;
    result.records.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            auto rec = execute_run(cfg, *jobs[i].algo, jobs[i].seed, objective);
            write_trace_csv((dir / rec.file).string(), rec.trace, rec.error);
            result.records[i] = std::move(rec);
        }
    };
    const std::size_t threads = std::clamp<std::size_t>(parallel, 1, jobs.size());
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    for (const auto& r : result.records) result.any_failed = result.any_failed || r.error.has_value();
    result.summary = summarize(result.records, cfg.baseline);
    detail::write_text(dir / "summary.json", to_json(result.summary).dump(2) + "\n");

    std::ostringstream hist;
    write_histograms_csv(hist, emit_histograms(result.records, cfg.space));
    detail::write_text(dir / "observations_hist.csv", hist.str());
    return result;
}

/// Rebuilds a summary from the `<algo>_seed<k>.csv` files in a directory.
inline SummaryReport summarize_directory(const std::string& input_dir, std::vector<RunRecord>& storage,
                                         const std::optional<std::string>& baseline = std::nullopt) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(input_dir)) throw Error(ErrorKind::Io, "'" + input_dir + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input_dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.ends_with(".csv") && name.find("_seed") != std::string::npos)
            files.push_back(entry.path());
    }
    if (files.empty()) throw Error(ErrorKind::Data, "no trace files in '" + input_dir + "'");

    storage.clear();
    for (const auto& f : files) {
        const auto name = f.filename().string();
        const auto cut = name.rfind("_seed");
        RunRecord rec;
        rec.algorithm = name.substr(0, cut);
        const auto seed_text = name.substr(cut + 5, name.size() - cut - 5 - 4);
        try {
            rec.seed = std::stoull(seed_text);
        } catch (const std::exception&) {
            continue;  // not a trace file
        }
        rec.file = name;
        auto loaded = read_trace_csv(f.string());
        rec.trace = std::move(loaded.trace);
        rec.error = std::move(loaded.error);
        storage.push_back(std::move(rec));
    }
    std::sort(storage.begin(), storage.end(), [](const RunRecord& a, const RunRecord& b) {
        return std::tie(a.algorithm, a.seed) < std::tie(b.algorithm, b.seed);
    });
    return summarize(storage, baseline);
}

}  // namespace lavabo::experiment

#endif  // LAVABO_EXPERIMENT_HPP
