// Copyright 2026 The lavabo Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gp_oracle.hpp"
#include "lavabo/surrogate.hpp"

namespace lavabo {
namespace {

using testing::OracleKernel;
using testing::OraclePosterior;

Eigen::MatrixXd random_inputs(Rng& rng, Eigen::Index n, Eigen::Index d) {
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.uniform();
    return x;
}

Eigen::VectorXd smooth_scores(const Eigen::MatrixXd& x) {
    Eigen::VectorXd y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) y[i] = std::sin(3.0 * x(i, 0)) + x.row(i).squaredNorm();
    return y;
}

// Standardized targets the way the model sees them, computed by hand.
Eigen::VectorXd standardize(const Eigen::VectorXd& y, double& mean, double& sd) {
    mean = y.sum() / static_cast<double>(y.size());
    double ss = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) ss += (y[i] - mean) * (y[i] - mean);
    sd = std::max(1e-12, std::sqrt(ss / static_cast<double>(y.size())));
    return (y.array() - mean) / sd;
}

void expect_matches_oracle(const GpModel& model, const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Rng& rng) {
    double mean = 0.0, sd = 1.0;
    const Eigen::VectorXd ys = standardize(y, mean, sd);
    const OraclePosterior oracle(x, ys,
                                 {model.kernel().signal_variance, model.kernel().length_scales,
                                  model.kernel().noise_variance});
    for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd q(x.cols());
        for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = rng.uniform();
        const auto p = model.predict(q);
        EXPECT_NEAR((p.mean - mean) / sd, oracle.mean(q), 1e-8);
        EXPECT_NEAR(p.std * p.std / (sd * sd), std::max(0.0, oracle.variance(q)), 1e-8);
    }
    EXPECT_NEAR(model.log_marginal_likelihood(), oracle.log_marginal_likelihood(), 1e-8);
}

TEST(Fit, SinglePointInterpolates) {
    Eigen::MatrixXd x(1, 2);
    x << 0.3, 0.7;
    Eigen::VectorXd y(1);
    y << 4.25;
    const auto model = fit(x, y);
    const auto p = model.predict(x.row(0).transpose());
    EXPECT_EQ(p.mean, 4.25);
    EXPECT_LE(p.std, 1e-3 * model.y_std());
}

TEST(Fit, FivePointsMatchDirectInversion) {
    Rng rng(11);
    const auto x = random_inputs(rng, 5, 2);
    const auto y = smooth_scores(x);
    FitConfig config;
    config.seed = 3;
    expect_matches_oracle(fit(x, y, config), x, y, rng);
}

TEST(Fit, OracleEquivalenceAcrossSizes) {
    Rng rng(2026);
    for (Eigen::Index n = 1; n <= 8; ++n) {
        for (Eigen::Index d = 1; d <= 3; ++d) {
            const auto x = random_inputs(rng, n, d);
            Eigen::VectorXd y(n);
            for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.normal() * 3.0 + 1.0;
            FitConfig config;
            config.seed = static_cast<std::uint64_t>(n * 10 + d);
            SCOPED_TRACE("n=" + std::to_string(n) + " d=" + std::to_string(d));
            expect_matches_oracle(fit(x, y, config), x, y, rng);
        }
    }
}

TEST(Fit, DuplicateInputsAverage) {
    Eigen::MatrixXd x(2, 1);
    x << 0.5, 0.5;
    Eigen::VectorXd y(2);
    y << 1.0, 3.0;
    const auto model = fit(x, y);
    EXPECT_GT(model.kernel().noise_variance, kJitterFloor);

    double mean = 0.0, sd = 1.0;
    const Eigen::VectorXd ys = standardize(y, mean, sd);
    // K = s2 * ones(2,2); k* = s2 * ones(2); mean = s2 (ys0 + ys1) / (2 s2 + noise).
    const double s2 = model.kernel().signal_variance;
    const double direct = s2 * (ys[0] + ys[1]) / (2.0 * s2 + model.kernel().noise_variance);
    Eigen::VectorXd q(1);
    q << 0.5;
    EXPECT_NEAR((model.predict(q).mean - mean) / sd, direct, 1e-6);
    EXPECT_NEAR(direct, 0.5 * (ys[0] + ys[1]), 1e-6);
}

TEST(Fit, RejectsInvalidData) {
    Eigen::MatrixXd x(2, 1);
    x << 0.1, 0.2;
    Eigen::VectorXd y(2);
    y << 1.0, std::nan("");
    try {
        (void)fit(x, y);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Data);
    }
    y << 1.0, 2.0;
    x << 0.1, 1.5;
    EXPECT_THROW((void)fit(x, y), Error);
    EXPECT_THROW((void)fit(Eigen::MatrixXd(0, 1), Eigen::VectorXd(0)), Error);
    EXPECT_THROW((void)fit(Eigen::MatrixXd::Zero(3, 1), y), Error);
}

TEST(Predict, TrainingInputsAreInterpolated) {
    Rng rng(4);
    const auto x = random_inputs(rng, 12, 2);
    const auto y = smooth_scores(x);
    FitConfig config;
    KernelParams k;
    k.signal_variance = 1.0;
    k.length_scales = Eigen::VectorXd::Constant(2, 0.3);
    k.noise_variance = kJitterFloor;
    config.fixed_kernel = k;
    const auto model = fit(x, y, config);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto p = model.predict(x.row(i).transpose());
        EXPECT_NEAR((p.mean - model.y_mean()) / model.y_std(), model.targets()[i], 1e-6);
        EXPECT_LE(p.std, 1e-3 * model.y_std());
    }
}

TEST(Predict, FarPointsRecoverPrior) {
    Eigen::MatrixXd x(2, 1);
    x << 0.0, 0.01;
    Eigen::VectorXd y(2);
    y << 2.0, 6.0;
    FitConfig config;
    KernelParams k;
    k.signal_variance = 2.5;
    k.length_scales = Eigen::VectorXd::Constant(1, 0.01);
    k.noise_variance = 1e-6;
    config.fixed_kernel = k;
    const auto model = fit(x, y, config);
    Eigen::VectorXd q(1);
    q << 1.0;  // 99 length scales away; kernel ~ 1e-94
    const auto p = model.predict(q);
    EXPECT_NEAR(p.mean, 4.0, 1e-12);
    EXPECT_NEAR(p.std, std::sqrt(2.5) * 2.0, 1e-12);
}

TEST(Predict, DimensionMismatchIsShapeError) {
    Eigen::MatrixXd x(1, 2);
    x << 0.1, 0.2;
    const auto model = fit(x, Eigen::VectorXd::Ones(1));
    try {
        (void)model.predict(Eigen::VectorXd::Zero(3));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Shape);
    }
}

TEST(Predict, BatchAgreesWithPointwise) {
    Rng rng(8);
    const auto x = random_inputs(rng, 7, 3);
    const auto model = fit(x, smooth_scores(x));
    const auto q = random_inputs(rng, 20, 3);
    const auto batch = model.predict_batch(q);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        const auto p = model.predict(q.row(i).transpose());
        EXPECT_NEAR(batch[static_cast<std::size_t>(i)].mean, p.mean, 1e-12);
        EXPECT_NEAR(batch[static_cast<std::size_t>(i)].std, p.std, 1e-12);
        EXPECT_GE(p.std, 0.0);
    }
}

TEST(Predict, GradientMatchesFiniteDifferences) {
    Rng rng(10);
    const auto x = random_inputs(rng, 9, 2);
    const auto model = fit(x, smooth_scores(x));
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd q(2);
        q << 0.1 + 0.8 * rng.uniform(), 0.1 + 0.8 * rng.uniform();
        const auto g = model.predict_with_gradient(q);
        for (Eigen::Index j = 0; j < 2; ++j) {
            constexpr double h = 1e-6;
            Eigen::VectorXd a = q, b = q;
            a[j] += h;
            b[j] -= h;
            const auto pa = model.predict(a), pb = model.predict(b);
            EXPECT_NEAR(g.d_mean[j], (pa.mean - pb.mean) / (2 * h), 1e-4 * (1.0 + std::abs(g.d_mean[j])));
            EXPECT_NEAR(g.d_std[j], (pa.std - pb.std) / (2 * h), 1e-4 * (1.0 + std::abs(g.d_std[j])));
        }
    }
}

TEST(Predict, TranslationShiftsMeansOnly) {
    Rng rng(12);
    const auto x = random_inputs(rng, 8, 2);
    const auto y = smooth_scores(x);
    FitConfig config;
    config.seed = 1;
    const auto base = fit(x, y, config);
    const auto shifted = fit(x, (y.array() + 17.5).matrix(), config);
    for (int t = 0; t < 10; ++t) {
        const Eigen::VectorXd q = random_inputs(rng, 1, 2).row(0).transpose();
        const auto a = base.predict(q), b = shifted.predict(q);
        EXPECT_NEAR(b.mean - a.mean, 17.5, 1e-9);
        EXPECT_NEAR(b.std, a.std, 1e-9);
    }
}

TEST(Predict, NewObservationNeverIncreasesVarianceThere) {
    Rng rng(13);
    KernelParams k;
    k.signal_variance = 1.0;
    k.length_scales = Eigen::VectorXd::Constant(2, 0.25);
    k.noise_variance = kJitterFloor;
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_inputs(rng, 6, 2);
        const Eigen::VectorXd ys = Eigen::VectorXd::Random(6);
        const auto before = GpModel::conditioned(x.topRows(5), ys.head(5), 0.0, 1.0, k);
        const auto after = GpModel::conditioned(x, ys, 0.0, 1.0, k);
        ASSERT_TRUE(before && after);
        const Eigen::VectorXd q = x.row(5).transpose();
        EXPECT_LE(after->predict(q).std, before->predict(q).std + 1e-12);
    }
}

TEST(LogMarginalLikelihood, SinglePointClosedForm) {
    Eigen::MatrixXd x(1, 1);
    x << 0.5;
    FitConfig config;
    KernelParams k;
    k.signal_variance = 1.0;
    k.length_scales = Eigen::VectorXd::Ones(1);
    k.noise_variance = 0.0;
    config.fixed_kernel = k;
    const auto model = fit(x, Eigen::VectorXd::Constant(1, 3.0), config);
    EXPECT_NEAR(model.log_marginal_likelihood(), -0.5 * std::log(2.0 * std::numbers::pi), 1e-9);
}

TEST(LogMarginalLikelihood, FourPointDeterminantOracle) {
    Eigen::MatrixXd x(4, 2);
    x << 0.1, 0.2, 0.4, 0.9, 0.7, 0.3, 0.95, 0.6;
    Eigen::VectorXd y(4);
    y << 1.0, -0.5, 2.0, 0.25;
    FitConfig config;
    KernelParams k;
    k.signal_variance = 1.7;
    k.length_scales = (Eigen::VectorXd(2) << 0.4, 0.8).finished();
    k.noise_variance = 0.01;
    config.fixed_kernel = k;
    const auto model = fit(x, y, config);
    double mean = 0.0, sd = 1.0;
    const OraclePosterior oracle(x, standardize(y, mean, sd), {1.7, k.length_scales, 0.01});
    EXPECT_NEAR(model.log_marginal_likelihood(), oracle.log_marginal_likelihood(), 1e-8);
}

TEST(LogMarginalLikelihood, FittedBeatsGrosslyWrongNoise) {
    Rng rng(14);
    const auto x = random_inputs(rng, 15, 1);
    const auto y = smooth_scores(x);
    const auto fitted = fit(x, y);
    FitConfig wrong;
    KernelParams k = fitted.kernel();
    k.noise_variance = 10.0;
    wrong.fixed_kernel = k;
    EXPECT_LT(fit(x, y, wrong).log_marginal_likelihood(), fitted.log_marginal_likelihood());
}

TEST(LogMarginalLikelihood, AnalyticGradientMatchesFiniteDifferences) {
    Rng rng(15);
    const auto x = random_inputs(rng, 10, 2);
    double mean = 0.0, sd = 1.0;
    const Eigen::VectorXd y = standardize(smooth_scores(x), mean, sd);
    Eigen::VectorXd theta(4);
    theta << std::log(0.3), std::log(0.6), std::log(1.4), std::log(1e-3);
    Eigen::VectorXd grad, scratch;
    (void)detail::negative_lml(x, y, theta, grad);
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
        constexpr double h = 1e-5;
        Eigen::VectorXd a = theta, b = theta;
        a[i] += h;
        b[i] -= h;
        const double fd = (detail::negative_lml(x, y, a, scratch) - detail::negative_lml(x, y, b, scratch)) / (2 * h);
        EXPECT_NEAR(grad[i], fd, 1e-5 * (1.0 + std::abs(fd))) << "parameter " << i;
    }
}

}  // namespace
}  // namespace lavabo
