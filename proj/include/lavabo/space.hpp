// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_SPACE_HPP
#define LAVABO_SPACE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "lavabo/error.hpp"
#include "lavabo/random.hpp"

namespace lavabo {

/// Native-unit value of one parameter: a real for numeric dimensions, a
/// label for categorical ones.
using ParamValue = std::variant<double, std::string>;

/// Point in the unit cube [0,1]^d the surrogate works in.
using UnitPoint = Eigen::VectorXd;

struct ParamVector {
    std::vector<ParamValue> values;

    ParamVector() = default;
    explicit ParamVector(std::vector<ParamValue> v) : values(std::move(v)) {}
    ParamVector(std::initializer_list<double> reals) : values(reals.begin(), reals.end()) {}

    std::size_t size() const noexcept { return values.size(); }
    const ParamValue& operator[](std::size_t i) const { return values[i]; }
    ParamValue& operator[](std::size_t i) { return values[i]; }

    /// Numeric view; throws if any entry is a label.
    std::vector<double> reals() const {
        std::vector<double> out;
        out.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            const auto* r = std::get_if<double>(&values[i]);
            if (!r) throw Error(ErrorKind::Contract, "parameter " + std::to_string(i) + " is categorical");
            out.push_back(*r);
        }
        return out;
    }

    friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

struct Continuous {
    double low;
    double high;
};

struct DiscreteStepped {
    double low;
    double high;
    double delta;
};

struct Categorical {
    std::vector<std::string> options;
};

/// One axis of a search space.
class Dimension {
public:
    using Kind = std::variant<Continuous, DiscreteStepped, Categorical>;

    static Dimension continuous(std::string name, double low, double high) {
        if (!std::isfinite(low) || !std::isfinite(high) || !(low < high))
            throw Error(ErrorKind::Contract, "dimension '" + name + "': continuous bounds require low < high");
        return Dimension(std::move(name), Continuous{low, high}, 0);
    }

    static Dimension stepped(std::string name, double low, double high, double delta) {
        if (!std::isfinite(low) || !std::isfinite(high) || !(low < high))
            throw Error(ErrorKind::Contract, "dimension '" + name + "': stepped bounds require low < high");
        if (!std::isfinite(delta) || !(delta > 0.0))
            throw Error(ErrorKind::Contract, "dimension '" + name + "': delta must be positive");
        const double ratio = (high - low) / delta;
        // Relative slack absorbs representation error, e.g. 0.7 / 0.01 = 69.999...
        const auto count = static_cast<std::uint64_t>(std::floor(ratio + 1e-9 * std::max(1.0, ratio))) + 1;
        if (count < 2)
            throw Error(ErrorKind::Contract, "dimension '" + name + "': needs at least two levels");
        return Dimension(std::move(name), DiscreteStepped{low, high, delta}, count);
    }

    static Dimension categorical(std::string name, std::vector<std::string> options) {
        if (options.size() < 2)
            throw Error(ErrorKind::Contract, "dimension '" + name + "': needs at least two options");
        std::set<std::string> seen(options.begin(), options.end());
        if (seen.size() != options.size())
            throw Error(ErrorKind::Contract, "dimension '" + name + "': options must be unique");
        const auto count = options.size();
        return Dimension(std::move(name), Categorical{std::move(options)}, count);
    }

    const std::string& name() const noexcept { return name_; }
    const Kind& kind() const noexcept { return kind_; }
    bool is_continuous() const noexcept { return std::holds_alternative<Continuous>(kind_); }
    bool is_categorical() const noexcept { return std::holds_alternative<Categorical>(kind_); }

    /// Number of levels; nullopt for continuous dimensions.
    std::optional<std::uint64_t> count() const noexcept {
        if (is_continuous()) return std::nullopt;
        return count_;
    }

    /// Native value of level k (discrete/categorical only).
    ParamValue level(std::uint64_t k) const {
        if (const auto* s = std::get_if<DiscreteStepped>(&kind_))
            return s->low + static_cast<double>(k) * s->delta;
        if (const auto* c = std::get_if<Categorical>(&kind_)) return c->options.at(k);
        throw Error(ErrorKind::Unsupported, "dimension '" + name_ + "' has no discrete levels");
    }

    /// Level index of a discrete/categorical value; throws a bounds error if
    /// the value is not one of the levels.
    std::uint64_t index_of(const ParamValue& v) const {
        if (const auto* s = std::get_if<DiscreteStepped>(&kind_)) {
            const auto* r = std::get_if<double>(&v);
            if (!r || !std::isfinite(*r)) throw bounds("expected a numeric level");
            const double k = std::round((*r - s->low) / s->delta);
            if (k < 0.0 || k > static_cast<double>(count_ - 1)) throw bounds("value outside [low, high]");
            const double snapped = s->low + k * s->delta;
            if (std::abs(snapped - *r) > 1e-9 * s->delta) throw bounds("value is not on the level grid");
            return static_cast<std::uint64_t>(k);
        }
        if (const auto* c = std::get_if<Categorical>(&kind_)) {
            const auto* label = std::get_if<std::string>(&v);
            if (!label) throw bounds("expected a categorical label");
            const auto it = std::find(c->options.begin(), c->options.end(), *label);
            if (it == c->options.end()) throw bounds("unknown option '" + *label + "'");
            return static_cast<std::uint64_t>(it - c->options.begin());
        }
        throw Error(ErrorKind::Unsupported, "dimension '" + name_ + "' has no discrete levels");
    }

    /// Native value -> unit interval.
    double to_unit(const ParamValue& v) const {
        if (const auto* c = std::get_if<Continuous>(&kind_)) {
            const auto* r = std::get_if<double>(&v);
            if (!r || !std::isfinite(*r)) throw bounds("expected a finite real");
            if (*r < c->low || *r > c->high) throw bounds("value outside [low, high]");
            return (*r - c->low) / (c->high - c->low);
        }
        return static_cast<double>(index_of(v)) / static_cast<double>(count_ - 1);
    }

    /// Unit interval -> native value, snapping to the nearest level.
    ParamValue from_unit(double u) const {
        if (!(u >= 0.0 && u <= 1.0)) throw bounds("unit coordinate outside [0, 1]");
        if (const auto* c = std::get_if<Continuous>(&kind_)) {
            return std::min(c->high, c->low + u * (c->high - c->low));
        }
        return level(nearest_index(u));
    }

    /// Unit coordinate of the level nearest to u (identity for continuous).
    double snap_unit(double u) const {
        if (is_continuous()) return u;
        return static_cast<double>(nearest_index(u)) / static_cast<double>(count_ - 1);
    }

    ParamValue sample(Rng& rng) const {
        if (const auto* c = std::get_if<Continuous>(&kind_)) return rng.uniform(c->low, c->high);
        return level(rng.below(count_));
    }

    bool contains(const ParamValue& v) const {
        try {
            (void)to_unit(v);
            return true;
        } catch (const Error&) {
            return false;
        }
    }

    /// Native range used for histogramming: [low, high] for numeric
    /// dimensions, [0, count-1] (option index) for categorical.
    std::pair<double, double> range() const {
        if (const auto* c = std::get_if<Continuous>(&kind_)) return {c->low, c->high};
        if (const auto* s = std::get_if<DiscreteStepped>(&kind_))
            return {s->low, s->low + static_cast<double>(count_ - 1) * s->delta};
        return {0.0, static_cast<double>(count_ - 1)};
    }

private:
    Dimension(std::string name, Kind kind, std::uint64_t count)
        : name_(std::move(name)), kind_(std::move(kind)), count_(count) {}

    std::uint64_t nearest_index(double u) const {
        const double k = std::round(std::clamp(u, 0.0, 1.0) * static_cast<double>(count_ - 1));
        return std::min(static_cast<std::uint64_t>(k), count_ - 1);
    }

    Error bounds(const std::string& what) const {
        return Error(ErrorKind::Bounds, "dimension '" + name_ + "': " + what);
    }

    std::string name_;
    Kind kind_;
    std::uint64_t count_;
};

class GridRange;

/// Ordered list of dimensions defining an optimization domain.
class SearchSpace {
public:
    SearchSpace() = default;
    explicit SearchSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {}

    std::size_t size() const noexcept { return dims_.size(); }
    const Dimension& operator[](std::size_t i) const { return dims_[i]; }
    const std::vector<Dimension>& dimensions() const noexcept { return dims_; }

    /// Number of distinct points; nullopt ("infinite") when any dimension is
    /// continuous. Saturates at UINT64_MAX.
    std::optional<std::uint64_t> cardinality() const noexcept {
        std::uint64_t total = 1;
        for (const auto& d : dims_) {
            const auto c = d.count();
            if (!c) return std::nullopt;
            if (total > UINT64_MAX / *c) return UINT64_MAX;
            total *= *c;
        }
        return total;
    }

    UnitPoint to_unit(const ParamVector& p) const {
        check_arity(p.size());
        UnitPoint u(static_cast<Eigen::Index>(dims_.size()));
        for (std::size_t i = 0; i < dims_.size(); ++i) u[static_cast<Eigen::Index>(i)] = dims_[i].to_unit(p[i]);
        return u;
    }

    ParamVector from_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const {
        check_arity(static_cast<std::size_t>(u.size()));
        ParamVector p;
        p.values.reserve(dims_.size());
        for (std::size_t i = 0; i < dims_.size(); ++i) p.values.push_back(dims_[i].from_unit(u[static_cast<Eigen::Index>(i)]));
        return p;
    }

    /// Snaps each discrete coordinate of a unit point to its nearest level.
    UnitPoint snap_unit(const Eigen::Ref<const Eigen::VectorXd>& u) const {
        check_arity(static_cast<std::size_t>(u.size()));
        UnitPoint out(u.size());
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            out[j] = dims_[i].snap_unit(u[j]);
        }
        return out;
    }

    ParamVector sample_uniform(Rng& rng) const {
        ParamVector p;
        p.values.reserve(dims_.size());
        for (const auto& d : dims_) p.values.push_back(d.sample(rng));
        return p;
    }

    bool contains(const ParamVector& p) const {
        if (p.size() != dims_.size()) return false;
        for (std::size_t i = 0; i < dims_.size(); ++i)
            if (!dims_[i].contains(p[i])) return false;
        return true;
    }

    /// Throws a bounds (or shape) error naming the first offending dimension.
    void validate(const ParamVector& p) const { (void)to_unit(p); }

    /// Lexicographic enumeration (last dimension varies fastest).
    GridRange grid() const;

private:
    void check_arity(std::size_t n) const {
        if (n != dims_.size())
            throw Error(ErrorKind::Shape, "expected " + std::to_string(dims_.size()) + " parameters, got " +
                                               std::to_string(n));
    }

    std::vector<Dimension> dims_;
};

/// Forward range over every point of a finite SearchSpace, last dimension
/// fastest. Holds its own copy of the level table, so it may outlive the space.
class GridRange {
    using Levels = std::vector<std::vector<ParamValue>>;

public:
    class iterator {
    public:
        using value_type = ParamVector;
        using difference_type = std::ptrdiff_t;

        iterator() = default;

        const ParamVector& operator*() const { return current_; }
        const ParamVector* operator->() const { return &current_; }

        iterator& operator++() {
            for (std::size_t i = index_.size(); i-- > 0;) {
                if (++index_[i] < (*levels_)[i].size()) {
                    current_[i] = (*levels_)[i][index_[i]];
                    return *this;
                }
                index_[i] = 0;
                current_[i] = (*levels_)[i][0];
            }
            done_ = true;
            return *this;
        }
        iterator operator++(int) {
            auto copy = *this;
            ++*this;
            return copy;
        }

        friend bool operator==(const iterator& a, const iterator& b) {
            if (a.done_ || b.done_) return a.done_ == b.done_;
            return a.index_ == b.index_;
        }

    private:
        friend class GridRange;
        iterator(std::shared_ptr<const Levels> levels, bool done) : levels_(std::move(levels)), done_(done) {
            if (done_) return;
            index_.assign(levels_->size(), 0);
            for (const auto& l : *levels_) current_.values.push_back(l.front());
            if (levels_->empty()) done_ = true;
        }

        std::shared_ptr<const Levels> levels_;
        std::vector<std::size_t> index_;
        ParamVector current_;
        bool done_ = true;
    };

    explicit GridRange(const SearchSpace& space) {
        auto levels = std::make_shared<Levels>();
        for (const auto& d : space.dimensions()) {
            const auto c = d.count();
            if (!c) throw Error(ErrorKind::Unsupported, "grid enumeration over continuous dimension '" + d.name() + "'");
            auto& l = levels->emplace_back();
            l.reserve(*c);
            for (std::uint64_t k = 0; k < *c; ++k) l.push_back(d.level(k));
        }
        levels_ = std::move(levels);
    }

    iterator begin() const { return iterator(levels_, false); }
    iterator end() const { return iterator(levels_, true); }

private:
    std::shared_ptr<const Levels> levels_;
};

inline GridRange SearchSpace::grid() const { return GridRange(*this); }

}  // namespace lavabo

#endif  // LAVABO_SPACE_HPP
