#include "acar/lbfgsb.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace acar {
namespace {

double rosenbrock(const Vector& x, Vector& g) {
    g.resize(x.size());
    double f = 0.0;
    g.setZero();
    for (Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        f += 100.0 * a * a + b * b;
        g[i] += -400.0 * x[i] * a - 2.0 * b;
        g[i + 1] += 200.0 * a;
    }
    return f;
}

TEST(MinimizeBox, UnconstrainedQuadratic) {
    const Vector target = (Vector(3) << 1.0, -2.0, 0.5).finished();
    auto f = [&](const Vector& x, Vector& g) {
        g = 2.0 * (x - target);
        return (x - target).squaredNorm();
    };
    const Vector big = Vector::Constant(3, 1e6);
    const auto r = minimize_box(f, Vector::Zero(3), -big, big);
    EXPECT_TRUE(r.converged) << r.status;
    EXPECT_LT((r.x - target).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(MinimizeBox, Rosenbrock) {
    const Vector big = Vector::Constant(4, 10.0);
    LbfgsbOptions options;
    options.rel_tolerance = 0.0;
    options.max_iterations = 2000;
    const auto r = minimize_box(rosenbrock, Vector::Constant(4, -1.2), -big, big, options);
    EXPECT_LT((r.x - Vector::Ones(4)).cwiseAbs().maxCoeff(), 1e-4) << r.status;
}

TEST(MinimizeBox, ActiveBoundIsRespected) {
    // minimum of (x-3)^2 + (y+1)^2 on [0,2]x[0,2] is at (2, 0)
    auto f = [](const Vector& x, Vector& g) {
        g.resize(2);
        g << 2.0 * (x[0] - 3.0), 2.0 * (x[1] + 1.0);
        return (x[0] - 3.0) * (x[0] - 3.0) + (x[1] + 1.0) * (x[1] + 1.0);
    };
    const auto r = minimize_box(f, Vector::Constant(2, 1.0), Vector::Zero(2), Vector::Constant(2, 2.0));
    EXPECT_TRUE(r.converged) << r.status;
    EXPECT_NEAR(r.x[0], 2.0, 1e-12);
    EXPECT_NEAR(r.x[1], 0.0, 1e-12);
    EXPECT_LE(r.projected_gradient, 1e-6);
}

TEST(MinimizeBox, StartOutsideBoxIsProjected) {
    auto f = [](const Vector& x, Vector& g) {
        g = 2.0 * x;
        return x.squaredNorm();
    };
    const auto r = minimize_box(f, Vector::Constant(2, 50.0), Vector::Constant(2, 1.0), Vector::Constant(2, 5.0));
    EXPECT_NEAR(r.x[0], 1.0, 1e-12);
    EXPECT_NEAR(r.x[1], 1.0, 1e-12);
}

TEST(MinimizeBox, ObjectiveDecreasesMonotonically) {
    const Vector big = Vector::Constant(6, 10.0);
    const auto r = minimize_box(rosenbrock, Vector::Constant(6, -0.5), -big, big);
    ASSERT_GE(r.history.size(), 2u);
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
}

TEST(MinimizeBox, NonFiniteRegionIsAvoided) {
    // log barrier: undefined for x <= 0, minimum at x = 1
    auto f = [](const Vector& x, Vector& g) {
        g.resize(1);
        if (x[0] <= 0.0) return std::numeric_limits<double>::infinity();
        g[0] = 1.0 - 1.0 / x[0];
        return x[0] - std::log(x[0]);
    };
    const auto r = minimize_box(f, Vector::Constant(1, 4.0), Vector::Constant(1, -10.0), Vector::Constant(1, 10.0));
    EXPECT_NEAR(r.x[0], 1.0, 1e-5);
}

TEST(MinimizeBox, NonFiniteStartIsReported) {
    auto f = [](const Vector&, Vector& g) {
        g = Vector::Zero(1);
        return std::numeric_limits<double>::quiet_NaN();
    };
    const auto r = minimize_box(f, Vector::Zero(1), Vector::Constant(1, -1.0), Vector::Constant(1, 1.0));
    EXPECT_FALSE(r.converged);
    EXPECT_FALSE(r.status.empty());
}

TEST(ProjectedGradientNorm, ClampsAtBounds) {
    const Vector x = (Vector(2) << 0.0, 1.0).finished();
    const Vector g = (Vector(2) << 5.0, -0.5).finished();
    // first coordinate sits on its lower bound with an outward gradient
    EXPECT_DOUBLE_EQ(projected_gradient_norm(x, g, Vector::Zero(2), Vector::Constant(2, 2.0)), 0.5);
}

}  // namespace
}  // namespace acar
