#include "cpd/invariants.hpp"

#include <gtest/gtest.h>

#include "cpd/errors.hpp"
#include "cpd/reference.hpp"
#include "oracles.hpp"

namespace cpd {
namespace {

ParticleState initial(const ProblemSpec& p) { return {p.x0, p.v0, 0.0}; }

TEST(Invariants, Problem1HandValues) {
  const auto p = builtin_problem("problem1");
  const auto s = initial(p);
  EXPECT_NEAR(energy(s, p.field), 0.0354, 1e-16);
  EXPECT_NEAR(modified_energy(s, p.field, 0.01), 0.0354 - 5.05e-9, 1e-16);
  EXPECT_NEAR(momentum(s, p.field, p.S), -0.41, 1e-16);
  EXPECT_NEAR(magnetic_moment(s, p.field), 0.0053, 1e-16);
}

TEST(Invariants, TrivialCases) {
  const FieldModel zero = testing::make_field(std::make_shared<testing::ZeroPotential>(), {0, 0, 2});
  const ParticleState rest{{1, 2, 3}, {}, 0.0};
  EXPECT_EQ(energy(rest, zero), 0.0);
  const ParticleState s{{1, 2, 3}, {0.1, 0.2, 0.3}, 0.0};
  const ParticleState s2{s.x, 2.0 * s.v, 0.0};
  EXPECT_NEAR(energy(s2, zero), 4.0 * energy(s, zero), 1e-15);
  for (double h : {0.0, 0.1, 1.0}) EXPECT_EQ(modified_energy(s, zero, h), energy(s, zero));
  EXPECT_NEAR(magnetic_moment(s2, zero), 4.0 * magnetic_moment(s, zero), 1e-15);
  const ParticleState parallel{s.x, {0, 0, 0.7}, 0.0};
  EXPECT_EQ(magnetic_moment(parallel, zero), 0.0);
  EXPECT_EQ(momentum({{}, s.v, 0.0}, zero, default_momentum_matrix()), 0.0);
  EXPECT_EQ(momentum(s, zero, SkewMatrix3(Mat3::zero())), 0.0);
}

TEST(Invariants, ModifiedEnergyOffset) {
  const auto p = builtin_problem("problem2");
  testing::Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    const ParticleState s{rng.off_axis(0.5, 2, 1), rng.vec(-1, 1), 0.0};
    const double h = rng.uniform(0.001, 0.1);
    const double g2 = norm_sq(p.field.grad_U(s.x));
    EXPECT_NEAR(modified_energy(s, p.field, h) - energy(s, p.field), -h * h / 8.0 * g2, 1e-15);
  }
}

TEST(Invariants, DegenerateField) {
  const FieldModel f = testing::make_field(std::make_shared<testing::ZeroPotential>(), {0, 0, 0});
  EXPECT_THROW(magnetic_moment({{1, 0, 0}, {1, 0, 0}, 0.0}, f), DegenerateField);
}

TEST(DriftSeries, FirstEntryIsZeroAndMaxMatches) {
  const auto p = builtin_problem("problem1");
  IntegratorConfig cfg;
  cfg.h = 0.05;
  const auto tr = integrate(p, cfg, 10.0);
  const auto d = drift_series(tr.samples, p, cfg.h);
  ASSERT_EQ(d.size(), tr.samples.size());
  for (Channel c : kChannels) {
    EXPECT_EQ(d.channel(c).front(), 0.0);
    EXPECT_EQ(d.max_drift(c), *std::max_element(d.channel(c).begin(), d.channel(c).end()));
  }
  EXPECT_EQ(d.initial.H, energy(tr.samples.front(), p.field));
  EXPECT_LE(d.max_drift(Channel::H, 1.0), d.max_drift(Channel::H));
  EXPECT_FALSE(d.absolute.H || d.absolute.Hh || d.absolute.M || d.absolute.I);
}

TEST(DriftSeries, ZeroInitialValueUsesAbsoluteDrift) {
  auto p = builtin_problem("problem1");
  p.x0 = {0, 0, 0};  // M = 0 at the origin.
  IntegratorConfig cfg;
  const auto tr = integrate(p, cfg, 1.0);
  const auto d = drift_series(tr.samples, p, cfg.h);
  EXPECT_TRUE(d.absolute.M);
  EXPECT_FALSE(d.absolute.H);
  const double m_end = momentum(tr.samples.back(), p.field, p.S);
  EXPECT_EQ(d.e_M.back(), std::fabs(m_end));
}

TEST(DriftSeries, EmptyInputThrows) {
  const auto p = builtin_problem("problem1");
  EXPECT_THROW(drift_series({}, p, 0.01), InvalidParameter);
}

// The exact flow conserves H and, on problem 1, M.
TEST(DriftSeries, ExactFlowConservesEnergyAndMomentum) {
  const auto p = builtin_problem("problem1");
  const ReferenceConfig ref{1e-14, 1e-14};
  std::vector<ParticleState> samples{{p.x0, p.v0, 0.0}};
  for (int i = 1; i <= 100; ++i) {
    samples.push_back(reference_propagate(p.field, samples.back(), 1.0, ref));
    samples.back().t = i;
  }
  const auto d = drift_series(samples, p, 0.01);
  EXPECT_LE(d.max_drift(Channel::H), 1e-9);
  EXPECT_LE(d.max_drift(Channel::M), 1e-8);
}

}  // namespace
}  // namespace cpd
