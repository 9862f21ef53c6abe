// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "lavabo/quasi_newton.hpp"

namespace lavabo::opt {
namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1.0 - x[0], b = x[1] - x[0] * x[0];
    g.resize(2);
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    return a * a + 100.0 * b * b;
}

TEST(MinimizeBox, InteriorQuadratic) {
    const ValueAndGradient f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        const Eigen::VectorXd c = (Eigen::VectorXd(3) << 0.2, 0.5, 0.7).finished();
        const Eigen::VectorXd w = (Eigen::VectorXd(3) << 1.0, 10.0, 100.0).finished();
        g = 2.0 * w.cwiseProduct(x - c);
        return w.dot((x - c).cwiseAbs2());
    };
    BoxOptions options;
    options.max_step_fraction = 1.0;
    const auto r = minimize_box(f, Eigen::VectorXd::Constant(3, 0.9), Eigen::VectorXd::Zero(3),
                                Eigen::VectorXd::Ones(3), options);
    EXPECT_NEAR(r.x[0], 0.2, 1e-6);
    EXPECT_NEAR(r.x[1], 0.5, 1e-6);
    EXPECT_NEAR(r.x[2], 0.7, 1e-6);
    EXPECT_LT(r.value, 1e-10);
}

TEST(MinimizeBox, ActiveBoundIsRespected) {
    const ValueAndGradient f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = 2.0 * (x - Eigen::VectorXd::Constant(2, 3.0));
        return (x - Eigen::VectorXd::Constant(2, 3.0)).squaredNorm();
    };
    const auto r = minimize_box(f, Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, -1.0),
                                Eigen::VectorXd::Ones(2));
    EXPECT_DOUBLE_EQ(r.x[0], 1.0);
    EXPECT_DOUBLE_EQ(r.x[1], 1.0);
}

TEST(MinimizeBox, RosenbrockConverges) {
    BoxOptions options;
    options.max_iters = 500;
    options.max_step_fraction = 1.0;
    const auto r = minimize_box(rosenbrock, (Eigen::VectorXd(2) << -1.2, 1.0).finished(),
                                Eigen::VectorXd::Constant(2, -2.0), Eigen::VectorXd::Constant(2, 2.0), options);
    EXPECT_NEAR(r.x[0], 1.0, 1e-4);
    EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(MinimizeBox, NeverIncreasesAndStaysInBox) {
    const Eigen::VectorXd lo = (Eigen::VectorXd(2) << 0.0, 0.0).finished();
    const Eigen::VectorXd hi = (Eigen::VectorXd(2) << 0.5, 2.0).finished();
    const Eigen::VectorXd x0 = (Eigen::VectorXd(2) << 0.1, 1.9).finished();
    Eigen::VectorXd g;
    const double f0 = rosenbrock(x0, g);
    const auto r = minimize_box(rosenbrock, x0, lo, hi);
    EXPECT_LE(r.value, f0);
    EXPECT_TRUE((r.x.array() >= lo.array()).all() && (r.x.array() <= hi.array()).all());
}

TEST(MinimizeBox, ClampsStartingPoint) {
    const ValueAndGradient f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = Eigen::VectorXd::Ones(1);
        return x[0];
    };
    const auto r = minimize_box(f, Eigen::VectorXd::Constant(1, 5.0), Eigen::VectorXd::Zero(1),
                                Eigen::VectorXd::Ones(1));
    EXPECT_DOUBLE_EQ(r.x[0], 0.0);
}

}  // namespace
}  // namespace lavabo::opt
