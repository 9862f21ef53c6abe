// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef LAVABO_QUASI_NEWTON_HPP
#define LAVABO_QUASI_NEWTON_HPP

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Core>

namespace lavabo::opt {

/// Objective for minimize_box: returns f(x) and writes the gradient.
using ValueAndGradient = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BoxResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

struct BoxOptions {
    int max_iters = 100;
    double gradient_tol = 1e-8;
    double value_tol = 1e-12;
    /// Largest step along any coordinate, as a fraction of that coordinate's box width.
    double max_step_fraction = 0.25;
};

/// Projected BFGS over the box [lower, upper].
///
/// The dense inverse-Hessian estimate is updated from successive gradient
/// differences; coordinates pinned at a bound with the gradient pointing
/// outward are frozen for the step, and trial points are clamped into the
/// box. Non-finite objective values are treated as a failed trial step.
inline BoxResult minimize_box(const ValueAndGradient& f, Eigen::VectorXd x0, const Eigen::VectorXd& lower,
                              const Eigen::VectorXd& upper, const BoxOptions& options = {}) {
    const Eigen::Index n = x0.size();
    auto clamp = [&](Eigen::VectorXd v) { return v.cwiseMax(lower).cwiseMin(upper).eval(); };

    BoxResult result;
    result.x = clamp(std::move(x0));
    Eigen::VectorXd grad(n);
    result.value = f(result.x, grad);
    if (!std::isfinite(result.value)) return result;

    const Eigen::VectorXd width = (upper - lower).cwiseMax(1e-300);
    Eigen::MatrixXd inv_hessian = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd trial_grad(n);

    for (int iter = 0; iter < options.max_iters; ++iter) {
        result.iterations = iter + 1;

        Eigen::VectorXd free = Eigen::VectorXd::Ones(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const bool at_low = result.x[i] <= lower[i] && grad[i] > 0.0;
            const bool at_high = result.x[i] >= upper[i] && grad[i] < 0.0;
            if (at_low || at_high) free[i] = 0.0;
        }
        const Eigen::VectorXd projected = grad.cwiseProduct(free);
        if (projected.lpNorm<Eigen::Infinity>() < options.gradient_tol) break;

        Eigen::VectorXd direction = -(inv_hessian * projected).cwiseProduct(free);
        if (direction.dot(projected) >= 0.0) {
            inv_hessian.setIdentity();
            direction = -projected;
        }
        const double longest = (direction.cwiseAbs().cwiseQuotient(width)).maxCoeff();
        if (longest > options.max_step_fraction) direction *= options.max_step_fraction / longest;

        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd trial;
        double trial_value = 0.0;
        for (int ls = 0; ls < 40; ++ls) {
            trial = clamp(result.x + step * direction);
            trial_value = f(trial, trial_grad);
            const double decrease = grad.dot(trial - result.x);
            if (std::isfinite(trial_value) && trial_value <= result.value + 1e-4 * decrease) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Eigen::VectorXd s = trial - result.x;
        const Eigen::VectorXd y = trial_grad - grad;
        const double improvement = result.value - trial_value;
        result.x = trial;
        result.value = trial_value;
        grad = trial_grad;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
            const Eigen::MatrixXd left = identity - rho * s * y.transpose();
            inv_hessian = left * inv_hessian * left.transpose() + rho * s * s.transpose();
        }
        if (improvement < options.value_tol * (1.0 + std::abs(result.value))) break;
    }
    return result;
}

}  // namespace lavabo::opt

#endif  // LAVABO_QUASI_NEWTON_HPP
