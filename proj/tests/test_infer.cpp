#include "support.hpp"

#include "acar/comparison.hpp"
#include "acar/distributions.hpp"
#include "acar/portmanteau.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace acar {
namespace {

// Upper regularized incomplete gamma Q(a, x): power series below a + 1,
// modified Lentz continued fraction above.
double incomplete_gamma_q(double a, double x) {
    if (x <= 0.0) return 1.0;
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    if (x < a + 1.0) {
        double term = 1.0 / a, sum = term;
        for (int n = 1; n < 10000; ++n) {
            term *= x / (a + n);
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-17) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefix) * h;
}

Matrix random_spd(Rng& rng, Index d) {
    Matrix A(d, d);
    for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) A(i, j) = rng.normal();
    return A * A.transpose() + static_cast<double>(d) * Matrix::Identity(d, d);
}

ResidualMatrix random_residuals(Rng& rng, Index n, Index K, Index d) {
    ResidualMatrix r;
    r.e.resize(n, K);
    r.xi.resize(n * K, d);
    for (Index i = 0; i < r.e.size(); ++i) r.e.data()[i] = rng.uniform(-0.9, 0.9);
    for (Index i = 0; i < r.xi.size(); ++i) r.xi.data()[i] = rng.normal();
    return r;
}

Matrix random_matrix(Rng& rng, Index rows, Index cols) {
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
    return m;
}

FitResult fitted(int which, Index n, std::uint64_t seed) {
    SimConfig sim;
    sim.theta = table1_theta(which);
    sim.n = n;
    sim.seed = seed;
    const auto sample = simulate(sim);
    FitConfig config;
    config.n_starts = 4;
    config.seed = seed;
    return fit(sample.series, sample.covariates, config);
}

TEST(Distributions, ChiSquareUpperTail) {
    for (double df : {1.0, 2.0, 3.0, 9.0, 14.0})
        EXPECT_EQ(chi_square_upper_tail(0.0, df), 1.0);
    EXPECT_NEAR(chi_square_upper_tail(7.8147, 3.0), 0.05, 1e-5);
    for (double df : {1.0, 3.0, 5.0, 9.0, 14.0, 30.0})
        for (double x : {0.01, 0.5, 1.0, 2.5, 7.8147, 12.0, 25.0, 60.0})
            EXPECT_NEAR(chi_square_upper_tail(x, df), incomplete_gamma_q(df / 2.0, x / 2.0), 1e-10)
                << "x=" << x << " df=" << df;
}

TEST(Distributions, ChiSquareCriticalInvertsTail) {
    EXPECT_NEAR(chi_square_critical(0.05, 3.0), 7.814727903251178, 1e-9);
    for (double df : {1.0, 9.0, 14.0}) EXPECT_NEAR(chi_square_upper_tail(chi_square_critical(0.05, df), df), 0.05, 1e-12);
}

TEST(Distributions, Normal) {
    EXPECT_EQ(normal_upper_tail(0.0), 0.5);
    EXPECT_NEAR(normal_upper_tail(1.959963984540054), 0.025, 1e-12);
    EXPECT_NEAR(normal_two_sided(-1.959963984540054), 0.05, 1e-12);
    EXPECT_NEAR(normal_critical(0.05), 1.959963984540054, 1e-12);
    EXPECT_NEAR(normal_upper_tail(-3.0), 1.0 - normal_upper_tail(3.0), 1e-15);
}

TEST(Autocorrelations, HandSums) {
    Matrix e(3, 1);
    const double a = 0.3, b = -0.7, c = 0.45;
    e << a, b, c;
    const Vector rho = residual_autocorrelations(e, 2);
    EXPECT_NEAR(rho[0], (a * b + b * c) / 3.0, 1e-16);
    EXPECT_NEAR(rho[1], a * c / 3.0, 1e-16);
}

TEST(Autocorrelations, CategoryMajorLayout) {
    Matrix e(4, 2);
    e << 1, 2, 3, 4, 5, 6, 7, 8;
    const Vector rho = residual_autocorrelations(e, 2);
    EXPECT_DOUBLE_EQ(rho[0], (3 * 1 + 5 * 3 + 7 * 5) / 4.0);  // k=1, h=1
    EXPECT_DOUBLE_EQ(rho[1], (5 * 1 + 7 * 3) / 4.0);          // k=1, h=2
    EXPECT_DOUBLE_EQ(rho[2], (4 * 2 + 6 * 4 + 8 * 6) / 4.0);  // k=2, h=1
    EXPECT_DOUBLE_EQ(rho[3], (6 * 2 + 8 * 4) / 4.0);          // k=2, h=2
}

TEST(Autocorrelations, ZeroResidualsAndLagErrors) {
    EXPECT_TRUE(residual_autocorrelations(Matrix::Zero(10, 3), 4).isZero(0.0));
    EXPECT_THROW(residual_autocorrelations(Matrix::Zero(3, 1), 3), InputError);
    EXPECT_THROW(residual_autocorrelations(Matrix::Zero(3, 1), 0), InputError);
}

TEST(Autocorrelations, SmallUnderCorrectSpecification) {
    SimConfig sim;
    sim.theta = table1_theta(1);
    sim.n = 5001;
    sim.seed = 41;
    const auto sample = simulate(sim);
    auto path = compute_latent_path(sim.theta, sample.series, sample.covariates, default_eta0(3));
    latent_gradients(sim.theta, sample.series, sample.covariates, path);
    const auto res = residual_path(sim.theta, sample.series, sample.covariates, path);
    const Vector rho = residual_autocorrelations(res, 3);
    EXPECT_LE(rho.cwiseAbs().maxCoeff(), 3.0 / std::sqrt(5000.0));
}

TEST(EstimateW, HandEvaluatedSingleCategoryInstance) {
    ResidualMatrix r;
    r.e.resize(4, 1);
    r.e << 0.2, -0.5, 0.4, 0.1;
    r.xi.resize(4, 2);
    r.xi << 0.3, -0.1, -0.2, 0.6, 0.5, 0.2, -0.4, 0.3;
    Matrix s(4, 2);
    s << 0.1, 0.2, -0.3, 0.05, 0.2, -0.1, 0.15, 0.25;
    Matrix J(2, 2), L(2, 2);
    J << 0.8, 0.1, 0.1, 0.5;
    L << 0.6, -0.05, -0.05, 0.4;

    const auto& e = r.e;
    double c0 = 0, c1 = 0, dd = 0, g0 = 0, g1 = 0;
    for (int t = 1; t < 4; ++t) {
        c0 += e(t - 1) * r.xi(t, 0);
        c1 += e(t - 1) * r.xi(t, 1);
        const double m = e(t) * e(t - 1);
        dd += m * m;
        g0 -= m * s(t, 0);
        g1 -= m * s(t, 1);
    }
    c0 /= 4, c1 /= 4, dd /= 4, g0 /= 4, g1 /= 4;
    const double det = 0.8 * 0.5 - 0.1 * 0.1;
    const double i00 = 0.5 / det, i01 = -0.1 / det, i11 = 0.8 / det;
    // u = J^-1 C^T
    const double u0 = i00 * c0 + i01 * c1, u1 = i01 * c0 + i11 * c1;
    const double middle = u0 * (0.6 * u0 - 0.05 * u1) + u1 * (-0.05 * u0 + 0.4 * u1);
    // G = g J^-1
    const double G0 = g0 * i00 + g1 * i01, G1 = g0 * i01 + g1 * i11;
    const double expected = dd + middle + 2.0 * (G0 * c0 + G1 * c1);

    const auto w = estimate_W(r, s, J, L, 1);
    EXPECT_NEAR(w.C(0, 0), c0, 1e-15);
    EXPECT_NEAR(w.C(0, 1), c1, 1e-15);
    EXPECT_NEAR(w.D(0, 0), dd, 1e-15);
    EXPECT_NEAR(w.W(0, 0), expected, 1e-14);
}

TEST(EstimateW, ZeroResidualsGiveZeroW) {
    ResidualMatrix r;
    r.e = Matrix::Zero(6, 2);
    Rng rng(42);
    r.xi = random_matrix(rng, 12, 3);
    const auto w = estimate_W(r, random_matrix(rng, 6, 3), random_spd(rng, 3), random_spd(rng, 3), 2);
    EXPECT_TRUE(w.W.isZero(0.0));
}

TEST(EstimateW, SymmetricAndShapes) {
    Rng rng(43);
    const auto r = random_residuals(rng, 50, 3, 7);
    const auto w = estimate_W(r, random_matrix(rng, 50, 7), random_spd(rng, 7), random_spd(rng, 7), 2);
    EXPECT_EQ(w.W.rows(), 6);
    EXPECT_EQ(w.C.cols(), 7);
    EXPECT_EQ(w.G.rows(), 6);
    EXPECT_LT((w.W - w.W.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(EstimateW, SingularJIsReported) {
    Rng rng(44);
    const auto r = random_residuals(rng, 20, 1, 3);
    EXPECT_THROW(estimate_W(r, random_matrix(rng, 20, 3), Matrix::Zero(3, 3), random_spd(rng, 3), 1), NumericalError);
}

TEST(Portmanteau, ZeroAutocorrelationGivesZeroStatistic) {
    const auto result = portmanteau_statistic(Vector::Zero(3), Matrix::Identity(3, 3), 100, 1);
    EXPECT_EQ(result.statistic, 0.0);
    EXPECT_EQ(result.p_value, 1.0);
    EXPECT_EQ(result.df, 3);
}

TEST(Portmanteau, SolverEquivalence) {
    Rng rng(45);
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix W = random_spd(rng, 6);
        const Vector rho = random_matrix(rng, 6, 1);
        const auto result = portmanteau_statistic(rho, W, 250, 2);
        const double explicit_inverse = 250.0 * rho.dot(W.inverse() * rho);
        EXPECT_NEAR(result.statistic, explicit_inverse, 1e-10 * explicit_inverse);
        EXPECT_NEAR(result.p_value, incomplete_gamma_q(3.0, result.statistic / 2.0), 1e-10);
    }
}

TEST(Portmanteau, IllConditionedWIsReported) {
    Matrix W = Matrix::Identity(2, 2);
    W(1, 1) = 1e-14;
    EXPECT_THROW(portmanteau_statistic(Vector::Ones(2), W, 10, 1), NumericalError);
}

TEST(Portmanteau, CategoryPermutationInvariance) {
    Rng rng(46);
    const Index n = 80, K = 3, d = 5;
    const int q = 2;
    const auto r = random_residuals(rng, n, K, d);
    const Matrix s = random_matrix(rng, n, d);
    const Matrix J = random_spd(rng, d);
    const Matrix L = random_spd(rng, d);
    const auto base = portmanteau_statistic(residual_autocorrelations(r, q), estimate_W(r, s, J, L, q).W, n, q);

    const std::array<Index, 3> perm{2, 0, 1};
    ResidualMatrix p;
    p.e.resize(n, K);
    p.xi.resize(n * K, d);
    for (Index t = 0; t < n; ++t)
        for (Index k = 0; k < K; ++k) {
            p.e(t, k) = r.e(t, perm[static_cast<std::size_t>(k)]);
            p.xi.row(t * K + k) = r.xi.row(t * K + perm[static_cast<std::size_t>(k)]);
        }
    const auto permuted = portmanteau_statistic(residual_autocorrelations(p, q), estimate_W(p, s, J, L, q).W, n, q);
    EXPECT_NEAR(permuted.statistic, base.statistic, 1e-10 * base.statistic);
}

TEST(Portmanteau, OnAFittedModel) {
    const auto f = fitted(1, 400, 47);
    ASSERT_TRUE(f.inference_available);
    const auto result = portmanteau_test(f, 3);
    EXPECT_EQ(result.df, 9);
    EXPECT_EQ(result.n, 399);
    EXPECT_GE(result.statistic, 0.0);
    EXPECT_GE(result.p_value, 0.0);
    EXPECT_LE(result.p_value, 1.0);
    EXPECT_EQ(result.reject(0.05), result.statistic > chi_square_critical(0.05, 9.0));
}

TEST(CrossScoreCovariance, Modes) {
    const auto f = fitted(1, 300, 48);
    EXPECT_TRUE(cross_score_covariance(f, f, CrossCovarianceMode::assumed_zero).isZero(0.0));
    EXPECT_LT((cross_score_covariance(f, f, CrossCovarianceMode::empirical) - f.L_hat).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CrossScoreCovariance, LengthMismatchInEmpiricalMode) {
    const auto a = fitted(1, 300, 49);
    const auto b = fitted(1, 301, 50);
    EXPECT_THROW(cross_score_covariance(a, b, CrossCovarianceMode::empirical), InputError);
    EXPECT_NO_THROW(compare_models(a, b, CrossCovarianceMode::assumed_zero));
}

TEST(CrossScoreCovariance, SmallForIndependentSites) {
    SimConfig site;
    site.theta = table1_theta(1);
    site.n = 5000;
    site.seed = 51;
    const auto pair = simulate_paired_sites(site, site, Coupling::independent);
    const auto f1 = evaluate_fit(site.theta, pair.series1, pair.covariates1);
    const auto f2 = evaluate_fit(site.theta, pair.series2, pair.covariates2);
    const Matrix S = cross_score_covariance(f1, f2, CrossCovarianceMode::empirical);
    EXPECT_LE(S.norm() / f1.L_hat.norm(), 0.1);
}

TEST(ComparisonCovariance, IdenticalFits) {
    const auto f = fitted(1, 300, 52);
    const double n = static_cast<double>(f.n_obs);
    const Matrix sandwich = n * f.covariance;
    const Matrix published = comparison_covariance(f, f, CrossCovarianceMode::empirical, CrossTermSign::published);
    EXPECT_LT((published - 4.0 * sandwich).cwiseAbs().maxCoeff(), 1e-8 * sandwich.cwiseAbs().maxCoeff());
    const Matrix difference = comparison_covariance(f, f, CrossCovarianceMode::empirical, CrossTermSign::difference);
    EXPECT_LT(difference.cwiseAbs().maxCoeff(), 1e-8 * sandwich.cwiseAbs().maxCoeff());
    const Matrix zero = comparison_covariance(f, f, CrossCovarianceMode::assumed_zero);
    EXPECT_LT((zero - 2.0 * sandwich).cwiseAbs().maxCoeff(), 1e-8 * sandwich.cwiseAbs().maxCoeff());
}

TEST(ComparisonCovariance, HandSizedSingleCategoryInstance) {
    Rng rng(53);
    ParameterVector theta(1, 0);
    theta.flat() << 0.3, -0.4, 0.5;
    const auto y1 = test::random_series(rng, 12, 1);
    const auto y2 = test::random_series(rng, 12, 1);
    const auto f1 = evaluate_fit(theta, y1, CovariateMatrix::empty(12));
    const auto f2 = evaluate_fit(theta, y2, CovariateMatrix::empty(12));
    ASSERT_TRUE(f1.inference_available && f2.inference_available);
    Matrix S = Matrix::Zero(3, 3);
    for (Index t = 0; t < 11; ++t) S += f2.scores.row(t).transpose() * f1.scores.row(t);
    S /= 11.0;
    const Matrix A1 = f1.J_hat.inverse(), A2 = f2.J_hat.inverse();
    for (auto sign : {CrossTermSign::published, CrossTermSign::difference}) {
        const double c = sign == CrossTermSign::published ? 1.0 : -1.0;
        Matrix V = A1 * f1.L_hat * A1.transpose() + A2 * f2.L_hat * A2.transpose() +
                   c * (A2 * S * A1.transpose() + A1 * S.transpose() * A2.transpose());
        V = 0.5 * (V + V.transpose());
        const Matrix got = comparison_covariance(f1, f2, CrossCovarianceMode::empirical, sign);
        EXPECT_LT((got - V).cwiseAbs().maxCoeff(), 1e-9 * V.cwiseAbs().maxCoeff());
    }
}

TEST(ComparisonCovariance, RejectsDimensionMismatch) {
    const auto a = fitted(1, 200, 54);
    Rng rng(55);
    const auto y = test::random_series(rng, 200, 3);
    ParameterVector theta(3, 0);
    theta.flat().setZero();
    const auto b = evaluate_fit(theta, y, CovariateMatrix::empty(200));
    EXPECT_THROW(comparison_covariance(a, b, CrossCovarianceMode::assumed_zero), InputError);
}

TEST(CompareModels, IdenticalEstimates) {
    const auto f = fitted(1, 300, 56);
    const auto r = compare_models(f, f, CrossCovarianceMode::assumed_zero);
    EXPECT_TRUE(r.per_param_z.isZero(0.0));
    EXPECT_EQ(r.global_statistic, 0.0);
    EXPECT_EQ(r.global_p, 1.0);
    EXPECT_EQ(r.global_df, 14);
    EXPECT_FALSE(r.reject(0.05));
}

TEST(CompareModels, PerParameterZIdentity) {
    const auto a = fitted(1, 300, 57);
    const auto b = fitted(3, 300, 58);
    for (auto mode : {CrossCovarianceMode::assumed_zero, CrossCovarianceMode::empirical}) {
        const auto r = compare_models(a, b, mode);
        ASSERT_TRUE(r.global_available) << r.global_error;
        for (Index p = 0; p < 14; ++p) {
            const double diff = a.theta_hat.flat()[p] - b.theta_hat.flat()[p];
            EXPECT_EQ(r.difference[p], diff);
            EXPECT_DOUBLE_EQ(r.per_param_z[p], diff * std::sqrt(300.0 - 1.0) / std::sqrt(r.V_hat(p, p)));
            EXPECT_NEAR(r.per_param_p[p], 2.0 * normal_upper_tail(std::abs(r.per_param_z[p])), 1e-15);
        }
        const Vector d = r.difference;
        const double stat = 299.0 * d.dot(r.V_hat.ldlt().solve(d));
        EXPECT_NEAR(r.global_statistic, stat, 1e-8 * stat);
        EXPECT_GE(r.global_statistic, 0.0);
    }
}

TEST(CompareModels, DistinctParameterSetsAreRejected) {
    const auto a = fitted(1, 500, 59);
    const auto b = fitted(3, 500, 60);
    EXPECT_TRUE(compare_models(a, b, CrossCovarianceMode::assumed_zero).reject(0.05));
}

TEST(CompareModels, ModeAndSignNames) {
    EXPECT_EQ(parse_cross_covariance_mode("assumed-zero"), CrossCovarianceMode::assumed_zero);
    EXPECT_EQ(parse_cross_covariance_mode(to_string(CrossCovarianceMode::empirical)), CrossCovarianceMode::empirical);
    EXPECT_EQ(parse_cross_term_sign(to_string(CrossTermSign::difference)), CrossTermSign::difference);
    EXPECT_THROW(parse_cross_covariance_mode("maybe"), InputError);
}

}  // namespace
}  // namespace acar
