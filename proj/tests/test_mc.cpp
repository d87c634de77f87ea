#include "acar/montecarlo.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>

namespace acar {
namespace {

ReplicationRecord record(int index, const Vector& theta_hat, const Vector& se, bool ok = true, bool at_bound = false) {
    ReplicationRecord r;
    r.replication = index;
    r.ok = ok;
    r.at_bound = at_bound;
    r.theta_hat = theta_hat;
    r.std_errors = se;
    return r;
}

MCDesign small_design() {
    MCDesign design;
    design.theta0 = table1_theta(1);
    design.sample_sizes = {120};
    design.replications = 3;
    design.seed = 5;
    design.fit_config.n_starts = 3;
    design.threads = 1;
    return design;
}

TEST(SummarizeRecovery, SingleReplicationIdentities) {
    const auto theta0 = table1_theta(1);
    Vector hat = theta0.flat();
    hat.array() += 0.1;
    hat[3] -= 0.3;
    const std::array<ReplicationRecord, 1> records{record(0, hat, Vector::Constant(14, 0.2))};
    const auto s = summarize_recovery(theta0, 500, records);
    EXPECT_EQ(s.used, 1);
    EXPECT_EQ(s.cmle, hat);
    const Vector err = hat - theta0.flat();
    for (Index i = 0; i < 14; ++i) {
        EXPECT_DOUBLE_EQ(s.mse[i], err[i] * err[i]);
        EXPECT_DOUBLE_EQ(s.mae[i], std::abs(err[i]));
        EXPECT_NEAR(s.mse[i], s.mae[i] * s.mae[i], 1e-15);
        EXPECT_DOUBLE_EQ(s.tse[i], 0.2);
        EXPECT_EQ(s.coverage[i], std::abs(err[i]) <= 1.96 * 0.2 ? 1.0 : 0.0);
    }
}

TEST(SummarizeRecovery, IdenticalReplicationsAverageToTheCommonEstimate) {
    const auto theta0 = table1_theta(2);
    const Vector hat = theta0.flat() * 1.1;
    std::vector<ReplicationRecord> records;
    for (int b = 0; b < 5; ++b) records.push_back(record(b, hat, Vector::Constant(14, 0.3)));
    const auto s = summarize_recovery(theta0, 100, records);
    EXPECT_LT((s.cmle - hat).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(s.used, 5);
}

TEST(SummarizeRecovery, FailuresAndBoundFitsAreExcludedAndCounted) {
    const auto theta0 = table1_theta(1);
    const Vector good = theta0.flat();
    const Vector bad = Vector::Constant(14, 99.0);
    const std::array<ReplicationRecord, 3> records{record(0, good, Vector::Ones(14)),
                                                   record(1, bad, Vector::Ones(14), false),
                                                   record(2, bad, Vector::Ones(14), true, true)};
    const auto s = summarize_recovery(theta0, 100, records);
    EXPECT_EQ(s.replications, 3);
    EXPECT_EQ(s.used, 1);
    EXPECT_EQ(s.failures, 1);
    EXPECT_EQ(s.at_bound, 1);
    EXPECT_EQ(s.cmle, good);
    EXPECT_TRUE(s.mse.isZero(0.0));
}

TEST(SummarizeRecovery, NonNegativeErrorMeasures) {
    const auto theta0 = table1_theta(3);
    std::vector<ReplicationRecord> records;
    for (int b = 0; b < 4; ++b) records.push_back(record(b, theta0.flat() * (0.9 + 0.05 * b), Vector::Ones(14)));
    const auto s = summarize_recovery(theta0, 300, records);
    EXPECT_GE(s.mse.minCoeff(), 0.0);
    EXPECT_GE(s.mae.minCoeff(), 0.0);
}

TEST(MCDesign, Validation) {
    auto design = small_design();
    EXPECT_NO_THROW(design.validate());
    design.replications = 0;
    EXPECT_THROW(design.validate(), InputError);
    design = small_design();
    design.sample_sizes = {10};
    EXPECT_THROW(design.validate(), InputError);
}

TEST(RecoveryStudy, DeterministicAndThreadIndependent) {
    auto design = small_design();
    const auto a = run_recovery_study(design);
    design.threads = 3;
    const auto b = run_recovery_study(design);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a[0].cmle, b[0].cmle);
    EXPECT_EQ(a[0].tse, b[0].tse);
    EXPECT_EQ(a[0].n, 120);
    EXPECT_EQ(a[0].replications, 3);
}

TEST(RecoveryStudy, SingleReplicationMatchesRunReplication) {
    auto design = small_design();
    design.replications = 1;
    const auto summary = run_recovery_study(design).front();
    const auto rec = run_replication(design, 120, 0);
    ASSERT_TRUE(rec.ok);
    if (!rec.at_bound) {
        EXPECT_EQ(summary.cmle, rec.theta_hat);
        const Vector err = rec.theta_hat - design.theta0.flat();
        EXPECT_LT((summary.mse - err.cwiseProduct(err)).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(ScenarioStudy, SmallRunIsDeterministic) {
    ScenarioDesign design;
    design.scenario = 3;
    design.n = 150;
    design.replications = 2;
    design.seed = 9;
    design.fit_config.n_starts = 2;
    design.threads = 2;
    const auto a = run_scenario_study(design);
    const auto b = run_scenario_study(design);
    EXPECT_EQ(a.statistics, b.statistics);
    EXPECT_EQ(a.coupling, Coupling::antithetic);
    EXPECT_EQ(a.S_mode, CrossCovarianceMode::empirical);
    EXPECT_EQ(a.replications, 2);
    EXPECT_DOUBLE_EQ(a.rejection_rate + a.acceptance_rate, a.used > 0 ? 1.0 : 0.0);
}

TEST(ScenarioStudy, DefaultModes) {
    ScenarioDesign design;
    for (int s : {1, 2}) {
        design.scenario = s;
        EXPECT_EQ(design.effective_mode(), CrossCovarianceMode::assumed_zero);
    }
    for (int s : {3, 4}) {
        design.scenario = s;
        EXPECT_EQ(design.effective_mode(), CrossCovarianceMode::empirical);
    }
    design.S_mode = CrossCovarianceMode::assumed_zero;
    EXPECT_EQ(design.effective_mode(), CrossCovarianceMode::assumed_zero);
}

TEST(SizeStudy, SmallRunShapes) {
    SizeDesign design;
    design.theta0 = table1_theta(1);
    design.n = 150;
    design.q = 2;
    design.replications = 2;
    design.fit_config.n_starts = 2;
    design.threads = 1;
    const auto s = run_portmanteau_size_study(design);
    EXPECT_EQ(s.df, 6);
    EXPECT_EQ(s.replications, 2);
    EXPECT_EQ(static_cast<int>(s.statistics.size()), s.used);
}

}  // namespace
}  // namespace acar
