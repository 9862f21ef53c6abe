// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_ACQUISITION_HPP
#define LAVABO_ACQUISITION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lavabo/error.hpp"
#include "lavabo/quasi_newton.hpp"
#include "lavabo/random.hpp"
#include "lavabo/space.hpp"
#include "lavabo/surrogate.hpp"

namespace lavabo {

enum class AcquisitionKind {
    LowerConfidenceBound,
    NegativeExpectedImprovement,
    NegativeProbabilityOfImprovement,
};

/// Acquisition function choice. All variants are minimized.
struct AcquisitionSpec {
    AcquisitionKind kind = AcquisitionKind::LowerConfidenceBound;
    double kappa = 1.96;  // LCB
    double xi = 0.01;     // EI / PI

    static AcquisitionSpec lcb(double kappa = 1.96) { return {AcquisitionKind::LowerConfidenceBound, kappa, 0.01}; }
    static AcquisitionSpec neg_ei(double xi = 0.01) { return {AcquisitionKind::NegativeExpectedImprovement, 1.96, xi}; }
    static AcquisitionSpec neg_pi(double xi = 0.01) {
        return {AcquisitionKind::NegativeProbabilityOfImprovement, 1.96, xi};
    }

    void validate() const {
        if (kind == AcquisitionKind::LowerConfidenceBound) {
            if (!std::isfinite(kappa) || !(kappa > 0.0)) throw Error(ErrorKind::Contract, "kappa must be positive");
        } else if (!std::isfinite(xi) || xi < 0.0) {
            throw Error(ErrorKind::Contract, "xi must be non-negative");
        }
    }
};

enum class OptimizerKind { RandomSampling, QuasiNewton };

struct OptimizerSpec {
    OptimizerKind kind = OptimizerKind::RandomSampling;
    std::size_t num_candidates = 10000;
    std::size_t num_starts = 10;  // QuasiNewton only
    int max_iters = 50;           // QuasiNewton only

    static OptimizerSpec random_sampling(std::size_t candidates = 10000) {
        return {OptimizerKind::RandomSampling, candidates, 10, 50};
    }
    static OptimizerSpec quasi_newton(std::size_t starts = 10, std::size_t candidates = 10000, int iters = 50) {
        return {OptimizerKind::QuasiNewton, candidates, starts, iters};
    }

    void validate() const {
        if (num_candidates < 1) throw Error(ErrorKind::Contract, "num_candidates must be >= 1");
        if (kind == OptimizerKind::QuasiNewton && (num_starts < 1 || max_iters < 1))
            throw Error(ErrorKind::Contract, "num_starts and max_iters must be >= 1");
    }
};

enum class InitialDesign { UniformRandom, LatinHypercube };

struct InitialPointGenerator {
    InitialDesign kind = InitialDesign::UniformRandom;
    std::size_t num_points = 10;

    void validate() const {
        if (num_points < 1) throw Error(ErrorKind::Contract, "num_points must be >= 1");
    }
};

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Acquisition value with its partial derivatives in mean and std.
struct AcquisitionPartials {
    double value;
    double d_mean;
    double d_std;
};

inline AcquisitionPartials acq_partials(const AcquisitionSpec& spec, double mean, double std, double best) {
    if (!(std >= 0.0)) throw Error(ErrorKind::Contract, "posterior std must be non-negative");
    switch (spec.kind) {
        case AcquisitionKind::LowerConfidenceBound:
            return {mean - spec.kappa * std, 1.0, -spec.kappa};
        case AcquisitionKind::NegativeExpectedImprovement: {
            const double gap = best - mean - spec.xi;
            if (std == 0.0) return {-std::max(gap, 0.0), gap > 0.0 ? 1.0 : 0.0, 0.0};
            const double z = gap / std;
            const double cdf = normal_cdf(z);
            const double pdf = normal_pdf(z);
            return {-(gap * cdf + std * pdf), cdf, -pdf};
        }
        case AcquisitionKind::NegativeProbabilityOfImprovement: {
            const double gap = best - mean - spec.xi;
            if (std == 0.0) return {gap > 0.0 ? -1.0 : 0.0, 0.0, 0.0};
            const double z = gap / std;
            const double pdf = normal_pdf(z);
            return {-normal_cdf(z), pdf / std, pdf * z / std};
        }
    }
    return {0.0, 0.0, 0.0};
}

/// Acquisition value; lower is better.
inline double acq_value(const AcquisitionSpec& spec, double mean, double std, double best) {
    return acq_partials(spec, mean, std, best).value;
}

/// Proposed next point with its acquisition value and unit-cube location.
struct Proposal {
    ParamVector params;
    UnitPoint unit;
    double acquisition;
};

namespace detail {

inline Eigen::MatrixXd uniform_candidates(const SearchSpace& space, std::size_t count, Rng& rng) {
    const auto d = static_cast<Eigen::Index>(space.size());
    Eigen::MatrixXd c(static_cast<Eigen::Index>(count), d);
    for (Eigen::Index i = 0; i < c.rows(); ++i)
        for (Eigen::Index j = 0; j < d; ++j) c(i, j) = rng.uniform();
    return c;
}

}  // namespace detail

/// Minimizes the acquisition function over the space.
///
/// Candidates are drawn uniformly in the unit cube and snapped to the
/// discrete levels before scoring; ties resolve to the lowest candidate
/// index. QuasiNewton refines the `num_starts` best candidates with
/// projected BFGS on [0,1]^d and keeps a refined point only if, after
/// snapping, it scores strictly below the best seen so far.
inline Proposal propose(const GpModel& model, const AcquisitionSpec& spec, const OptimizerSpec& optimizer,
                        const SearchSpace& space, Rng& rng) {
    spec.validate();
    optimizer.validate();
    if (static_cast<std::size_t>(model.dimension()) != space.size())
        throw Error(ErrorKind::Shape, "model and space dimensions differ");

    const double best = model.best_observed();
    Eigen::MatrixXd candidates = detail::uniform_candidates(space, optimizer.num_candidates, rng);
    for (Eigen::Index i = 0; i < candidates.rows(); ++i)
        candidates.row(i) = space.snap_unit(candidates.row(i).transpose()).transpose();

    std::vector<double> values(optimizer.num_candidates);
    constexpr Eigen::Index kChunk = 512;
    for (Eigen::Index start = 0; start < candidates.rows(); start += kChunk) {
        const Eigen::Index rows = std::min(kChunk, candidates.rows() - start);
        const auto preds = model.predict_batch(candidates.middleRows(start, rows));
        for (Eigen::Index j = 0; j < rows; ++j) {
            const auto& p = preds[static_cast<std::size_t>(j)];
            values[static_cast<std::size_t>(start + j)] = acq_value(spec, p.mean, p.std, best);
        }
    }

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    UnitPoint best_unit = candidates.row(static_cast<Eigen::Index>(order.front())).transpose();
    double best_value = values[order.front()];

    if (optimizer.kind == OptimizerKind::QuasiNewton) {
        const auto d = model.dimension();
        const Eigen::VectorXd lower = Eigen::VectorXd::Zero(d);
        const Eigen::VectorXd upper = Eigen::VectorXd::Ones(d);
        const opt::ValueAndGradient objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
            const auto g = model.predict_with_gradient(x);
            const auto a = acq_partials(spec, g.mean, g.std, best);
            grad = a.d_mean * g.d_mean + a.d_std * g.d_std;
            return a.value;
        };
        opt::BoxOptions options;
        options.max_iters = optimizer.max_iters;
        options.gradient_tol = 1e-9;
        options.max_step_fraction = 0.1;

        const std::size_t starts = std::min(optimizer.num_starts, order.size());
        for (std::size_t s = 0; s < starts; ++s) {
            const UnitPoint x0 = candidates.row(static_cast<Eigen::Index>(order[s])).transpose();
            const auto refined = opt::minimize_box(objective, x0, lower, upper, options);
            const UnitPoint snapped = space.snap_unit(refined.x);
            const auto p = model.predict(snapped);
            const double v = acq_value(spec, p.mean, p.std, best);
            if (v < best_value) {
                best_value = v;
                best_unit = snapped;
            }
        }
    }

    return {space.from_unit(best_unit), best_unit, best_value};
}

/// Initial design of `gen.num_points` points.
///
/// LatinHypercube places one sample in each of num_points equal-width bins
/// per continuous dimension, with an independent random bin permutation per
/// dimension; discrete dimensions are sampled uniformly over their levels.
inline std::vector<ParamVector> initial_points(const InitialPointGenerator& gen, const SearchSpace& space, Rng& rng) {
    gen.validate();
    std::vector<ParamVector> out;
    out.reserve(gen.num_points);
    if (gen.kind == InitialDesign::UniformRandom) {
        for (std::size_t i = 0; i < gen.num_points; ++i) out.push_back(space.sample_uniform(rng));
        return out;
    }

    const std::size_t n = gen.num_points;
    std::vector<std::vector<std::size_t>> bins(space.size());
    for (std::size_t j = 0; j < space.size(); ++j) {
        if (!space[j].is_continuous()) continue;
        bins[j].resize(n);
        std::iota(bins[j].begin(), bins[j].end(), std::size_t{0});
        rng.shuffle(bins[j].begin(), bins[j].end());
    }
    for (std::size_t i = 0; i < n; ++i) {
        ParamVector p;
        p.values.reserve(space.size());
        for (std::size_t j = 0; j < space.size(); ++j) {
            if (space[j].is_continuous()) {
                const double u = (static_cast<double>(bins[j][i]) + rng.uniform()) / static_cast<double>(n);
                p.values.push_back(space[j].from_unit(std::min(u, 1.0)));
            } else {
                p.values.push_back(space[j].sample(rng));
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace lavabo

#endif  // LAVABO_ACQUISITION_HPP
