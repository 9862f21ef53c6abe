// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_SOLVER_HPP
#define LAVABO_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "lavabo/acquisition.hpp"
#include "lavabo/channel.hpp"
#include "lavabo/error.hpp"
#include "lavabo/random.hpp"
#include "lavabo/space.hpp"
#include "lavabo/surrogate.hpp"
#include "lavabo/trace.hpp"

namespace lavabo {

struct Observation {
    ParamVector params;
    double score;
};

struct SolverConfig {
    SearchSpace space;
    AcquisitionSpec acquisition = AcquisitionSpec::lcb();
    OptimizerSpec optimizer = OptimizerSpec::random_sampling();
    InitialPointGenerator init;
    std::size_t max_evaluations = 50;
    std::uint64_t seed = 0;
    /// Surrogate fitting bounds and restarts; the seed field is overwritten per iteration.
    FitConfig surrogate;

    void validate() const {
        acquisition.validate();
        optimizer.validate();
        init.validate();
        if (space.size() == 0) throw Error(ErrorKind::Contract, "search space has no dimensions");
        if (max_evaluations < init.num_points)
            throw Error(ErrorKind::Contract, "max_evaluations must be >= the number of initial points");
    }
};

/// Thrown when a run stops early; carries the rows evaluated so far.
class RunAborted : public Error {
public:
    RunAborted(ErrorKind kind, const std::string& message, RunTrace partial)
        : Error(kind, message), partial_(std::move(partial)) {}

    const RunTrace& partial() const noexcept { return partial_; }

private:
    RunTrace partial_;
};

namespace detail {

/// Evaluates one point and appends it, converting failures into RunAborted.
inline void evaluate_into(RunTrace& trace, const SearchSpace& space, const Objective& objective, Phase phase,
                          ParamVector params) {
    const auto iteration = trace.size();
    if (!space.contains(params))
        throw RunAborted(ErrorKind::Bounds, "iteration " + std::to_string(iteration) + ": point outside the space",
                         trace);
    double score;
    try {
        score = objective(params);
    } catch (const Error& e) {
        throw RunAborted(e.kind(), "iteration " + std::to_string(iteration) + ": " + e.what(), trace);
    } catch (const std::exception& e) {
        throw RunAborted(ErrorKind::Data, "iteration " + std::to_string(iteration) + ": " + e.what(), trace);
    }
    if (!std::isfinite(score))
        throw RunAborted(ErrorKind::Data, "iteration " + std::to_string(iteration) + ": objective returned non-finite score",
                         trace);
    trace.append(phase, std::move(params), score);
}

constexpr std::uint64_t kFitStream = 0xf17;

}  // namespace detail

/// Sequential Bayesian optimization.
///
/// Evaluates the initial design, then repeats fit -> propose -> evaluate
/// until max_evaluations. The GP (hyperparameters included) is refit every
/// iteration. A proposal equal to an already-observed point is replaced by
/// one uniform draw, which is accepted even if it also repeats.
inline RunTrace run_bo(const SolverConfig& config, const Objective& objective) {
    config.validate();
    const auto& space = config.space;
    Rng rng(config.seed);
    RunTrace trace(space.size());

    for (auto& p : initial_points(config.init, space, rng))
        detail::evaluate_into(trace, space, objective, Phase::Init, std::move(p));

    const auto d = static_cast<Eigen::Index>(space.size());
    while (trace.size() < config.max_evaluations) {
        const auto n = static_cast<Eigen::Index>(trace.size());
        Eigen::MatrixXd x(n, d);
        Eigen::VectorXd y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& row = trace.rows()[static_cast<std::size_t>(i)];
            x.row(i) = space.to_unit(row.params).transpose();
            y[i] = row.score;
        }
        FitConfig fit_config = config.surrogate;
        fit_config.seed = derive_seed(config.seed, detail::kFitStream + static_cast<std::uint64_t>(n));

        ParamVector next;
        try {
            const GpModel model = fit(x, y, fit_config);
            next = propose(model, config.acquisition, config.optimizer, space, rng).params;
        } catch (const Error& e) {
            throw RunAborted(e.kind(), "iteration " + std::to_string(trace.size()) + ": " + e.what(), trace);
        }
        const bool seen = std::any_of(trace.rows().begin(), trace.rows().end(),
                                      [&](const TraceRow& r) { return r.params == next; });
        if (seen) next = space.sample_uniform(rng);
        detail::evaluate_into(trace, space, objective, Phase::Bo, std::move(next));
    }
    return trace;
}

/// Uniform i.i.d. sampling baseline. Draws exactly the same point sequence
/// as run_bo's uniform initial design under the same seed.
inline RunTrace run_random(const SearchSpace& space, std::size_t max_evaluations, std::uint64_t seed,
                           const Objective& objective) {
    Rng rng(seed);
    RunTrace trace(space.size());
    for (std::size_t i = 0; i < max_evaluations; ++i)
        detail::evaluate_into(trace, space, objective, Phase::Random, space.sample_uniform(rng));
    return trace;
}

/// Exhaustive baseline over a finite space, lexicographic order.
inline RunTrace run_grid(const SearchSpace& space, const Objective& objective) {
    RunTrace trace(space.size());
    for (const auto& p : space.grid()) detail::evaluate_into(trace, space, objective, Phase::Grid, p);
    return trace;
}

}  // namespace lavabo

#endif  // LAVABO_SOLVER_HPP
