// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_SURROGATE_HPP
#define LAVABO_SURROGATE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "lavabo/error.hpp"
#include "lavabo/quasi_newton.hpp"
#include "lavabo/random.hpp"

namespace lavabo {

/// Hyperparameters of the Matern 5/2 covariance with per-dimension length scales.
struct KernelParams {
    double signal_variance = 1.0;
    Eigen::VectorXd length_scales;
    double noise_variance = 1e-10;
};

namespace kernel {

inline constexpr double kSqrt5 = 2.2360679774997896964;

/// Matern 5/2: s2 (1 + sqrt5 r + 5/3 r^2) exp(-sqrt5 r), r the scaled distance.
inline double matern52(double signal_variance, double r) {
    const double sr = kSqrt5 * r;
    return signal_variance * (1.0 + sr + sr * sr / 3.0) * std::exp(-sr);
}

/// (dk/dr) / r, finite at r = 0.
inline double matern52_dr_over_r(double signal_variance, double r) {
    const double sr = kSqrt5 * r;
    return -signal_variance * (5.0 / 3.0) * (1.0 + sr) * std::exp(-sr);
}

inline double scaled_distance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                              const Eigen::VectorXd& length_scales) {
    return (a - b).cwiseQuotient(length_scales).norm();
}

/// Covariance matrix between the rows of A and the rows of B.
inline Eigen::MatrixXd cross(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const KernelParams& p) {
    Eigen::MatrixXd k(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j)
            k(i, j) = matern52(p.signal_variance,
                               scaled_distance(a.row(i).transpose(), b.row(j).transpose(), p.length_scales));
    return k;
}

}  // namespace kernel

/// Options for fit(). Bounds apply to standardized targets and unit-cube inputs.
struct FitConfig {
    std::uint64_t seed = 0;
    int restarts = 3;
    int max_iters = 100;
    double min_length_scale = 1e-3;
    double max_length_scale = 10.0;
    double min_signal_variance = 1e-3;
    double max_signal_variance = 1e3;
    double min_noise = 1e-10;
    double max_noise = 1e-1;
    /// Skip marginal-likelihood optimization and condition on these values.
    std::optional<KernelParams> fixed_kernel;
};

inline constexpr double kJitterFloor = 1e-10;
inline constexpr double kJitterCeiling = 1e-4;
inline constexpr double kStdFloor = 1e-12;

struct Prediction {
    double mean;
    double std;
};

/// Prediction plus gradients with respect to the unit-cube input.
struct PredictionGradient {
    double mean;
    double std;
    Eigen::VectorXd d_mean;
    Eigen::VectorXd d_std;
};

/// Fitted Gaussian-process posterior over the unit cube.
///
/// Targets are standardized to zero mean and unit (population) deviation,
/// so the prior mean function is the constant 0 in standardized units.
/// Immutable after construction.
class GpModel {
public:
    const Eigen::MatrixXd& inputs() const noexcept { return inputs_; }
    const Eigen::VectorXd& targets() const noexcept { return targets_; }
    double y_mean() const noexcept { return y_mean_; }
    double y_std() const noexcept { return y_std_; }
    double prior_mean() const noexcept { return 0.0; }
    const KernelParams& kernel() const noexcept { return kernel_; }
    const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }
    const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
    Eigen::Index size() const noexcept { return inputs_.rows(); }
    Eigen::Index dimension() const noexcept { return inputs_.cols(); }

    /// Lowest training score, native units.
    double best_observed() const { return y_mean_ + y_std_ * targets_.minCoeff(); }

    /// Posterior mean and standard deviation in native score units.
    Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        check_dim(x.size());
        Eigen::VectorXd k_star(size());
        for (Eigen::Index i = 0; i < size(); ++i)
            k_star[i] = kernel::matern52(kernel_.signal_variance,
                                         kernel::scaled_distance(inputs_.row(i).transpose(), x, kernel_.length_scales));
        const double mean = k_star.dot(alpha_);
        const Eigen::VectorXd v = lower().solve(k_star);
        const double var = std::max(0.0, kernel_.signal_variance - v.squaredNorm());
        return {y_mean_ + y_std_ * mean, y_std_ * std::sqrt(var)};
    }

    /// Predictions for every row of `points`.
    std::vector<Prediction> predict_batch(const Eigen::MatrixXd& points) const {
        check_dim(points.cols());
        const Eigen::MatrixXd k_star = kernel::cross(inputs_, points, kernel_);
        const Eigen::VectorXd mean = k_star.transpose() * alpha_;
        const Eigen::MatrixXd v = lower().solve(k_star);
        const Eigen::VectorXd reduction = v.colwise().squaredNorm().transpose();
        std::vector<Prediction> out(static_cast<std::size_t>(points.rows()));
        for (Eigen::Index j = 0; j < points.rows(); ++j) {
            const double var = std::max(0.0, kernel_.signal_variance - reduction[j]);
            out[static_cast<std::size_t>(j)] = {y_mean_ + y_std_ * mean[j], y_std_ * std::sqrt(var)};
        }
        return out;
    }

    PredictionGradient predict_with_gradient(const Eigen::Ref<const Eigen::VectorXd>& x) const {
        check_dim(x.size());
        const Eigen::Index n = size();
        const Eigen::Index d = dimension();
        Eigen::VectorXd k_star(n);
        Eigen::MatrixXd dk(n, d);  // dk(i, j) = d k(x_i, x) / d x_j
        const Eigen::VectorXd inv_l2 = kernel_.length_scales.cwiseAbs2().cwiseInverse();
        for (Eigen::Index i = 0; i < n; ++i) {
            const Eigen::VectorXd diff = x - inputs_.row(i).transpose();
            const double r = diff.cwiseQuotient(kernel_.length_scales).norm();
            k_star[i] = kernel::matern52(kernel_.signal_variance, r);
            dk.row(i) = (kernel::matern52_dr_over_r(kernel_.signal_variance, r) * diff.cwiseProduct(inv_l2)).transpose();
        }
        PredictionGradient g;
        g.mean = y_mean_ + y_std_ * k_star.dot(alpha_);
        g.d_mean = y_std_ * (dk.transpose() * alpha_);

        const Eigen::VectorXd v = lower().solve(k_star);
        const double var = kernel_.signal_variance - v.squaredNorm();
        if (var <= 0.0) {
            g.std = 0.0;
            g.d_std = Eigen::VectorXd::Zero(d);
            return g;
        }
        const Eigen::MatrixXd dv = lower().solve(dk);
        const double sd = std::sqrt(var);
        g.std = y_std_ * sd;
        // d var = -2 v^T dv;  d sd = d var / (2 sd)
        g.d_std = y_std_ * (-(dv.transpose() * v) / sd);
        return g;
    }

    /// Conditions on standardized targets with fixed hyperparameters;
    /// nullopt when Cholesky fails at the jitter ceiling.
    static std::optional<GpModel> conditioned(const Eigen::MatrixXd& x, const Eigen::VectorXd& standardized,
                                              double y_mean, double y_std, KernelParams params);

    /// -1/2 y^T alpha - sum log L_ii - n/2 log 2 pi, standardized units.
    double log_marginal_likelihood() const {
        const double n = static_cast<double>(size());
        return -0.5 * targets_.dot(alpha_) - chol_.diagonal().array().log().sum() -
               0.5 * n * std::log(2.0 * std::numbers::pi);
    }

private:
    Eigen::TriangularView<const Eigen::MatrixXd, Eigen::Lower> lower() const {
        return chol_.triangularView<Eigen::Lower>();
    }

    void check_dim(Eigen::Index got) const {
        if (got != dimension())
            throw Error(ErrorKind::Shape,
                        "model dimension " + std::to_string(dimension()) + ", query dimension " + std::to_string(got));
    }

    Eigen::MatrixXd inputs_;
    Eigen::VectorXd targets_;
    double y_mean_ = 0.0;
    double y_std_ = 1.0;
    KernelParams kernel_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd alpha_;
};

namespace detail {

/// Cholesky of K + max(noise, jitter) I with jitter escalation from the
/// floor up to the ceiling. Returns the diagonal term actually used.
inline std::optional<std::pair<Eigen::MatrixXd, double>> jittered_cholesky(const Eigen::MatrixXd& k, double noise) {
    for (double jitter = kJitterFloor; jitter <= kJitterCeiling * (1.0 + 1e-9); jitter *= 10.0) {
        const double diag = std::max(noise, jitter);
        Eigen::MatrixXd a = k;
        a.diagonal().array() += diag;
        Eigen::LLT<Eigen::MatrixXd> llt(a);
        if (llt.info() == Eigen::Success) {
            const Eigen::MatrixXd l = llt.matrixL();
            if (l.diagonal().minCoeff() > 0.0 && l.allFinite()) return std::make_pair(l, diag);
        }
    }
    return std::nullopt;
}

/// Log-parameter layout: [log l_1 .. log l_d, log signal_variance, log noise].
inline KernelParams unpack(const Eigen::VectorXd& theta, Eigen::Index d) {
    KernelParams p;
    p.length_scales = theta.head(d).array().exp();
    p.signal_variance = std::exp(theta[d]);
    p.noise_variance = std::exp(theta[d + 1]);
    return p;
}

/// Negative log marginal likelihood and its gradient in log-parameters.
inline double negative_lml(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& theta,
                           Eigen::VectorXd& grad) {
    const Eigen::Index n = x.rows();
    const Eigen::Index d = x.cols();
    const KernelParams p = unpack(theta, d);

    Eigen::MatrixXd k(n, n);
    std::vector<Eigen::MatrixXd> scaled_sq(static_cast<std::size_t>(d), Eigen::MatrixXd::Zero(n, n));
    Eigen::MatrixXd dr_over_r(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            double r2 = 0.0;
            for (Eigen::Index m = 0; m < d; ++m) {
                const double t = (x(i, m) - x(j, m)) / p.length_scales[m];
                scaled_sq[static_cast<std::size_t>(m)](i, j) = scaled_sq[static_cast<std::size_t>(m)](j, i) = t * t;
                r2 += t * t;
            }
            const double r = std::sqrt(r2);
            k(i, j) = k(j, i) = kernel::matern52(p.signal_variance, r);
            dr_over_r(i, j) = dr_over_r(j, i) = kernel::matern52_dr_over_r(p.signal_variance, r);
        }
    }
    const auto factor = jittered_cholesky(k, p.noise_variance);
    grad.setZero(theta.size());
    if (!factor) return std::numeric_limits<double>::infinity();
    const auto& [l, diag] = *factor;
    const auto lower = l.triangularView<Eigen::Lower>();
    const Eigen::VectorXd alpha = lower.transpose().solve(lower.solve(y));
    const Eigen::MatrixXd k_inv = lower.transpose().solve(lower.solve(Eigen::MatrixXd::Identity(n, n)));
    const Eigen::MatrixXd inner = alpha * alpha.transpose() - k_inv;

    const double nll = 0.5 * y.dot(alpha) + l.diagonal().array().log().sum() +
                       0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

    // dK/dlog l_m = -(dk/dr / r) * (dx_m / l_m)^2
    for (Eigen::Index m = 0; m < d; ++m) {
        const Eigen::MatrixXd dk = -dr_over_r.cwiseProduct(scaled_sq[static_cast<std::size_t>(m)]);
        grad[m] = -0.5 * inner.cwiseProduct(dk).sum();
    }
    grad[d] = -0.5 * inner.cwiseProduct(k).sum();
    grad[d + 1] = diag > p.noise_variance ? 0.0 : -0.5 * p.noise_variance * inner.trace();
    return nll;
}

}  // namespace detail

inline std::optional<GpModel> GpModel::conditioned(const Eigen::MatrixXd& x, const Eigen::VectorXd& standardized,
                                                  double y_mean, double y_std, KernelParams params) {
    const Eigen::MatrixXd k = kernel::cross(x, x, params);
    auto factor = detail::jittered_cholesky(k, params.noise_variance);
    if (!factor) return std::nullopt;
    GpModel m;
    m.inputs_ = x;
    m.targets_ = standardized;
    m.y_mean_ = y_mean;
    m.y_std_ = y_std;
    params.noise_variance = factor->second;
    m.kernel_ = std::move(params);
    m.chol_ = std::move(factor->first);
    const auto lower = m.lower();
    m.alpha_ = lower.transpose().solve(lower.solve(standardized));
    return m;
}

/// Fits a GP to rows of `inputs` (unit cube) and their scores.
///
/// Hyperparameters maximize the log marginal likelihood over log-parameters
/// with projected BFGS, restarted from unit length scales and from
/// `restarts - 1` seeded random points inside the bounds.
inline GpModel fit(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& scores, const FitConfig& config = {}) {
    const Eigen::Index n = inputs.rows();
    const Eigen::Index d = inputs.cols();
    if (n < 1) throw Error(ErrorKind::Data, "fit requires at least one observation");
    if (scores.size() != n) throw Error(ErrorKind::Shape, "inputs and scores differ in length");
    if (d < 1) throw Error(ErrorKind::Shape, "inputs need at least one column");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!std::isfinite(scores[i])) throw Error(ErrorKind::Data, "non-finite score at index " + std::to_string(i));
    if (!inputs.allFinite() || inputs.minCoeff() < 0.0 || inputs.maxCoeff() > 1.0)
        throw Error(ErrorKind::Bounds, "fit inputs must lie in the unit cube");

    const double y_mean = scores.mean();
    const double y_std = std::max(kStdFloor, std::sqrt((scores.array() - y_mean).square().mean()));
    const Eigen::VectorXd y = (scores.array() - y_mean) / y_std;

    KernelParams chosen;
    if (config.fixed_kernel) {
        chosen = *config.fixed_kernel;
        if (chosen.length_scales.size() != d) throw Error(ErrorKind::Shape, "fixed kernel has wrong length-scale count");
    } else {
        Eigen::VectorXd lower(d + 2), upper(d + 2);
        lower.head(d).setConstant(std::log(config.min_length_scale));
        upper.head(d).setConstant(std::log(config.max_length_scale));
        lower[d] = std::log(config.min_signal_variance);
        upper[d] = std::log(config.max_signal_variance);
        lower[d + 1] = std::log(config.min_noise);
        upper[d + 1] = std::log(config.max_noise);

        const opt::ValueAndGradient objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
            return detail::negative_lml(inputs, y, theta, grad);
        };
        opt::BoxOptions options;
        options.max_iters = config.max_iters;
        options.gradient_tol = 1e-6;
        options.value_tol = 1e-10;

        Rng rng(config.seed);
        opt::BoxResult best;
        for (int start = 0; start < std::max(1, config.restarts); ++start) {
            Eigen::VectorXd theta0(d + 2);
            if (start == 0) {
                theta0.head(d).setZero();
                theta0[d] = 0.0;
                theta0[d + 1] = std::log(1e-4);
            } else {
                for (Eigen::Index i = 0; i < d + 2; ++i) theta0[i] = rng.uniform(lower[i], upper[i]);
            }
            auto result = opt::minimize_box(objective, theta0, lower, upper, options);
            if (result.value < best.value) best = std::move(result);
        }
        if (!std::isfinite(best.value)) throw Error(ErrorKind::Numerical, "Cholesky failed for every restart");
        chosen = detail::unpack(best.x, d);
    }

    auto model = GpModel::conditioned(inputs, y, y_mean, y_std, chosen);
    if (!model) throw Error(ErrorKind::Numerical, "Cholesky failed after jitter escalation to 1e-4");
    return *std::move(model);
}

}  // namespace lavabo

#endif  // LAVABO_SURROGATE_HPP
