#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nlrl/observables.hpp"
#include "nlrl/random_state.hpp"
#include "oracles.hpp"

using namespace nlrl;

namespace {

SimConfig config(int N, double T, int stride = 500) {
  SimConfig c;
  c.N = N;
  c.T = T;
  c.sample_stride = stride;
  return c;
}

}  // namespace

TEST(MeanDisplacement, LinearTopologicalIsOne) {
  const auto md = mean_displacement(evolve(make_params(ModelKind::Linear, 0.3, 2.0, 0.0), config(60, 25.0)));
  EXPECT_GE(md.value, 0.98);
  EXPECT_LE(md.value, 1.0);
  EXPECT_LT(md.residual_norm, 1e-3);
  EXPECT_FALSE(md.warning.has_value());
}

TEST(MeanDisplacement, LinearTrivialIsZero) {
  const auto md = mean_displacement(evolve(make_params(ModelKind::Linear, -0.3, 2.0, 0.0), config(60, 25.0)));
  EXPECT_GE(md.value, 0.0);
  EXPECT_LE(md.value, 0.02);
}

TEST(MeanDisplacement, TruncationAttachesWarning) {
  const auto md = mean_displacement(evolve(make_params(ModelKind::Linear, 0.3, 0.2, 0.0), config(3, 20.0)));
  ASSERT_TRUE(md.warning.has_value());
  EXPECT_NE(md.warning->find("N = 3"), std::string::npos);
}

TEST(MeanDisplacement, ModelCBalancedMatchesReference) {
  // Regression values for the balanced chain at weak loss, fixed by the
  // adaptive reference integrator rather than by eye.
  for (double U : {0.0, 0.5}) {
    const auto p = make_params(ModelKind::C, 0.0, 0.2, U);
    const auto md = mean_displacement(evolve(p, config(40, 60.0)));
    const auto ref = oracle::dopri(p, oracle::single_b0(40), 60.0, 1e-10);
    EXPECT_NEAR(md.value, ref.displacement(), 1e-7) << "U=" << U;
  }
}

TEST(MeanDisplacement, ModelCBalancedInsensitiveToU) {
  SimConfig c = config(150, 250.0);
  const double weak = mean_displacement(evolve(make_params(ModelKind::C, 0.0, 0.2, 0.5), c)).value;
  const double strong = mean_displacement(evolve(make_params(ModelKind::C, 0.0, 0.2, 5.0), c)).value;
  EXPECT_NEAR(weak, strong, 0.1);
}

TEST(MeanDisplacementProperty, LinearStaysInUnitInterval) {
  for (double dg = -0.45; dg < 0.5; dg += 0.15) {
    const auto md = mean_displacement(evolve(make_params(ModelKind::Linear, dg, 2.0, 0.0), config(40, 25.0)));
    EXPECT_GE(md.value, -1e-9) << dg;
    EXPECT_LE(md.value, 1.0 + 1e-9) << dg;
  }
}

TEST(DisplacementSeries, StartsAtZeroAndEndsAtMean) {
  const auto traj = evolve(make_params(ModelKind::A, -0.4, 2.0, 5.0), config(60, 25.0));
  const auto series = displacement_of_time(traj);
  ASSERT_EQ(series.times.size(), series.values.size());
  EXPECT_EQ(series.values.front(), 0.0);
  EXPECT_EQ(series.final_value, series.values.back());
  EXPECT_EQ(series.final_value, mean_displacement(traj).value);
  EXPECT_LE(std::abs(series.final_value), traj.config.N);
}

TEST(DisplacementSeries, ModelASettlesNearOne) {
  const auto series = displacement_of_time(evolve(make_params(ModelKind::A, -0.4, 2.0, 5.0), config(60, 25.0)));
  // Past t = 5 the excitation has mostly left; the curve should already sit near its end value.
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.times[i] < 5.0) continue;
    EXPECT_NEAR(series.values[i], 1.0, 0.1) << "t=" << series.times[i];
  }
}

TEST(DisplacementSeries, LosslessIsIdenticallyZero) {
  const auto series = displacement_of_time(evolve(make_params(ModelKind::B, 0.1, 0.0, 1.0), config(20, 5.0, 100)));
  for (double v : series.values) EXPECT_EQ(v, 0.0);
}

TEST(ContrastSeries, LinearIsConstant) {
  const auto p = make_params(ModelKind::A, 0.15, 2.0, 0.0);
  const auto z = contrast_series(evolve(p, config(10, 3.0, 200)));
  for (const auto& row : z.Z)
    for (double v : row) EXPECT_DOUBLE_EQ(v, std::abs(p.nu) - std::abs(p.mu));
}

TEST(ContrastSeries, ModelAInitialValue) {
  const auto z = contrast_series(evolve(make_params(ModelKind::A, -0.4, 2.0, 5.0), config(10, 1.0)));
  EXPECT_EQ(z.times.front(), 0.0);
  EXPECT_NEAR(z.at(0, 1), 4.0, 1e-14);
  EXPECT_EQ(z.first_cell, -10);
  EXPECT_EQ(z.last_cell, 10);
}

TEST(ContrastSeries, ModelAGrowsWithU) {
  std::vector<double> z1;
  for (double U : {0.5, 3.0, 5.0})
    z1.push_back(contrast_series(evolve(make_params(ModelKind::A, -0.4, 2.0, U), config(10, 0.1))).at(0, 1));
  EXPECT_LT(z1[0], 0.0);
  EXPECT_LT(z1[0], z1[1]);
  EXPECT_LT(z1[1], z1[2]);
  EXPECT_GT(z1[2], 0.0);
}

TEST(ContrastSeries, RelaxesToLinearValueOnceDecayed) {
  for (auto k : {ModelKind::A, ModelKind::B, ModelKind::C, ModelKind::D, ModelKind::E}) {
    const auto p = make_params(k, -0.2, 2.0, 3.0);
    const auto traj = evolve(p, config(40, 80.0, 80000));
    const auto z = contrast_series(traj);
    // No shift can exceed U times the probability left on the lattice.
    const double bound = p.U * traj.final.norm();
    ASSERT_LT(bound, 1e-4);
    for (double v : z.Z.back()) EXPECT_NEAR(v, std::abs(p.nu) - std::abs(p.mu), bound) << to_string(k);
  }
}

TEST(NormRateResidual, RandomStatesModelsAE) {
  std::mt19937_64 rng(1);
  for (auto k : {ModelKind::A, ModelKind::E})
    for (int rep = 0; rep < 50; ++rep)
      EXPECT_LT(norm_rate_residual(make_params(k, 0.2, 2.0, 4.0), random_state(8, rng)), 1e-12);
}

TEST(IncoherentReference, ClosedForm) {
  EXPECT_DOUBLE_EQ(incoherent_reference(0.5, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(incoherent_reference(-0.3, 0.3), 0.5);
  EXPECT_EQ(incoherent_reference(0.7, 0.0), 0.0);
  EXPECT_EQ(incoherent_reference(0.0, 0.7), 1.0);
  EXPECT_NEAR(incoherent_reference(0.9, 0.1), 0.01 / 0.82, 1e-15);
  EXPECT_THROW(incoherent_reference(0.0, 0.0), DomainError);
}

TEST(Conservation, NormPlusDecayIsOne) {
  for (auto k : kAllModels) {
    const auto traj = evolve(make_params(k, -0.1, 0.2, 3.0), config(60, 50.0));
    EXPECT_NEAR(traj.final.norm() + traj.final.total_decay(), 1.0, 1e-6) << to_string(k);
  }
}
