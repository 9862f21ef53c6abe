// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_BENCHMARKS_HPP
#define LAVABO_BENCHMARKS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "lavabo/error.hpp"
#include "lavabo/random.hpp"
#include "lavabo/space.hpp"

namespace lavabo::bench {

inline constexpr double kAckleyBound = 32.768;

struct AckleyParams {
    double a = 20.0;
    double b = 0.2;
    double c = 2.0 * std::numbers::pi;
    std::size_t d = 2;
};

/// f(x) = -a exp(-b sqrt(mean x_i^2)) - exp(mean cos(c x_i)) + a + e
inline double ackley(std::span<const double> x, const AckleyParams& params = {}) {
    if (x.empty()) throw Error(ErrorKind::Shape, "ackley needs at least one coordinate");
    double sum_sq = 0.0;
    double sum_cos = 0.0;
    for (const double xi : x) {
        sum_sq += xi * xi;
        sum_cos += std::cos(params.c * xi);
    }
    const double n = static_cast<double>(x.size());
    // Grouped so that both differences cancel exactly at the origin.
    return params.a * (1.0 - std::exp(-params.b * std::sqrt(sum_sq / n))) + (std::numbers::e - std::exp(sum_cos / n));
}

/// Continuous [-32.768, 32.768]^d.
inline SearchSpace ackley_space(std::size_t d) {
    std::vector<Dimension> dims;
    for (std::size_t i = 0; i < d; ++i)
        dims.push_back(Dimension::continuous("x" + std::to_string(i), -kAckleyBound, kAckleyBound));
    return SearchSpace(std::move(dims));
}

/// The 4 x 4 x 3 x 3 x 3 = 432-point evolutionary-learning hyperparameter grid.
inline SearchSpace evolutionary_space() {
    return SearchSpace({
        Dimension::stepped("crossover_rate", 0.1, 0.7, 0.2),
        Dimension::stepped("mutation_rate", 0.1, 0.7, 0.2),
        Dimension::stepped("num_mutations", 1.0, 3.0, 1.0),
        Dimension::stepped("num_starting_edges", 3.0, 7.0, 2.0),
        Dimension::stepped("num_starting_nodes", 3.0, 7.0, 2.0),
    });
}

/// Spiking-network training space with stepped ranges and an explicit
/// nine-option learning-rate list (41 * 71^3 * 9 points).
inline SearchSpace snn_training_space() {
    return SearchSpace({
        Dimension::stepped("threshold", 0.0, 5.0, 0.125),
        Dimension::stepped("current_decay", 0.0, 0.7, 0.01),
        Dimension::stepped("voltage_decay", 0.0, 0.7, 0.01),
        Dimension::stepped("tau_grad", 0.0, 0.7, 0.01),
        Dimension::categorical("learning_rate",
                               {"1e-20", "1e-10", "1e-7", "1e-5", "1e-4", "1e-3", "3e-3", "1e-2", "1e-1"}),
    });
}

/// Deterministic synthetic landscape over a finite space, scores in [0, 1].
///
/// score = normalize(sum_i table_i[k_i] + sum_{i<j} w_ij (t_i - c_i)(t_j - c_j)) + 1e-9 * hash(p)
///
/// where k_i is the level index of dimension i, t_i = k_i / (count_i - 1),
/// and each table_i mixes a seeded quadratic bowl centred at c_i with
/// seeded per-level noise, weighted by `smoothness`. Normalization uses the
/// exact per-term extremes, so no enumeration of the space is needed.
class SyntheticLandscape {
public:
    SyntheticLandscape(SearchSpace space, std::uint64_t seed, double smoothness = 0.8)
        : space_(std::move(space)), seed_(seed), smoothness_(smoothness) {
        if (!space_.cardinality()) throw Error(ErrorKind::Unsupported, "synthetic landscape needs a finite space");
        if (!(smoothness > 0.0 && smoothness <= 1.0)) throw Error(ErrorKind::Contract, "smoothness must be in (0, 1]");
        const std::size_t d = space_.size();
        Rng rng(derive_seed(seed, 0x5eed));
        centers_.resize(d);
        tables_.resize(d);
        for (std::size_t i = 0; i < d; ++i) {
            const auto count = *space_[i].count();
            centers_[i] = rng.uniform();
            const double curvature = rng.uniform(0.5, 1.5);
            tables_[i].resize(count);
            for (std::uint64_t k = 0; k < count; ++k) {
                const double t = unit(i, k);
                const double bowl = curvature * (t - centers_[i]) * (t - centers_[i]);
                tables_[i][k] = smoothness_ * bowl + (1.0 - smoothness_) * curvature * rng.uniform();
            }
        }
        weights_.assign(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) weights_[i * d + j] = rng.uniform(-0.5, 0.5);

        low_ = 0.0;
        double high = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const auto [mn, mx] = std::minmax_element(tables_[i].begin(), tables_[i].end());
            low_ += *mn;
            high += *mx;
        }
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = i + 1; j < d; ++j) {
                // Bilinear in (t_i, t_j): extremes sit at level-grid corners.
                double mn = std::numeric_limits<double>::infinity();
                double mx = -mn;
                for (const double ti : {0.0, 1.0})
                    for (const double tj : {0.0, 1.0}) {
                        const double v = pair_term(i, j, ti, tj);
                        mn = std::min(mn, v);
                        mx = std::max(mx, v);
                    }
                low_ += mn;
                high += mx;
            }
        }
        span_ = std::max(high - low_, 1e-300);
    }

    const SearchSpace& space() const noexcept { return space_; }
    std::uint64_t seed() const noexcept { return seed_; }
    double smoothness() const noexcept { return smoothness_; }

    double score(const ParamVector& p) const {
        if (p.size() != space_.size()) throw Error(ErrorKind::Bounds, "parameter vector does not match landscape space");
        const std::size_t d = space_.size();
        std::vector<std::uint64_t> index(d);
        for (std::size_t i = 0; i < d; ++i) index[i] = space_[i].index_of(p[i]);

        double raw = 0.0;
        for (std::size_t i = 0; i < d; ++i) raw += tables_[i][index[i]];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i + 1; j < d; ++j) raw += pair_term(i, j, unit(i, index[i]), unit(j, index[j]));

        std::uint64_t h = mix64(seed_);
        for (const auto k : index) h = mix64(h ^ k);
        const double tie_break = 1e-9 * (static_cast<double>(h >> 11) * 0x1.0p-53);
        return std::clamp((raw - low_) / span_ + tie_break, 0.0, 1.0);
    }

    double operator()(const ParamVector& p) const { return score(p); }

private:
    double unit(std::size_t i, std::uint64_t k) const {
        return static_cast<double>(k) / static_cast<double>(*space_[i].count() - 1);
    }

    double pair_term(std::size_t i, std::size_t j, double ti, double tj) const {
        return weights_[i * space_.size() + j] * (ti - centers_[i]) * (tj - centers_[j]);
    }

    SearchSpace space_;
    std::uint64_t seed_;
    double smoothness_;
    std::vector<double> centers_;
    std::vector<std::vector<double>> tables_;
    std::vector<double> weights_;
    double low_ = 0.0;
    double span_ = 1.0;
};

}  // namespace lavabo::bench

#endif  // LAVABO_BENCHMARKS_HPP
