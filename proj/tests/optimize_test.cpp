#include "grape/optimize.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace grape {
namespace {

ControlGrid random_start(const ControlModel& m, double T, int M, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ControlGrid g(M, m.channel_count(), T);
  for (auto& a : g.amplitudes) a = u(rng);
  for (int k = 0; k < M; ++k)
    for (int j = 0; j < g.K; ++j) g.at(k, j) *= scale * m.channels[j].bound.value_or(m.J);
  return g;
}

OptimizeOptions realistic_options() {
  OptimizeOptions o;
  o.threshold = kRealisticThreshold;
  o.bounds_on = true;
  o.envelope_on = true;
  return o;
}

TEST(Optimize, DriftAloneAlreadyGivesIswap) {
  const ControlModel m = build_model(ModelKind::Ideal2);
  const auto r = optimize(m, gate_target("iswap12", 2), 0.5, 256, {});
  EXPECT_EQ(r.termination, Termination::ThresholdReached);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_GT(r.fidelity_sq, 1.0 - 1e-10);
}

TEST(Optimize, ReportedFidelityMatchesRepropagation) {
  const ControlModel m = build_model(ModelKind::Ideal2);
  const GateTarget t = gate_target("cnot12", 2);
  OptimizeOptions o;
  o.max_iters = 40;
  const auto r = optimize(m, t, random_start(m, 0.6, 64, 3, 0.2), o);
  EXPECT_NEAR(r.fidelity_sq, grid_fidelity(m, r.final_controls, t.matrix), 1e-12);
  ASSERT_FALSE(r.fidelity_history.empty());
  EXPECT_NEAR(r.fidelity_history.back(), r.fidelity_sq, 1e-12);
  for (std::size_t i = 1; i < r.fidelity_history.size(); ++i)
    EXPECT_GE(r.fidelity_history[i], r.fidelity_history[i - 1]);
}

TEST(Optimize, ConvergesToCnotAtModerateDuration) {
  const ControlModel m = build_model(ModelKind::Ideal2);
  OptimizeOptions o;
  o.max_iters = 500;
  const auto r = optimize(m, gate_target("cnot12", 2), random_start(m, 0.8, 64, 5, 0.2), o);
  EXPECT_EQ(r.termination, Termination::ThresholdReached);
  EXPECT_GE(r.fidelity_sq, kIdealThreshold);
}

TEST(Optimize, RealisticRunRespectsBoundsAndEnvelope) {
  const ControlModel m = build_model(ModelKind::Real3);
  const double T = 1.2;
  const int M = 128;
  OptimizeOptions o = realistic_options();
  o.max_iters = 60;
  const auto r = optimize(m, gate_target("iswap13", 3), random_start(m, T, M, 11, 0.2), o);
  const auto env = run_envelope(m, T, M, o);
  for (int k = 0; k < M; ++k)
    for (int j = 0; j < r.final_controls.K; ++j) {
      const double bound = *m.channels[j].bound;
      EXPECT_LE(std::abs(r.variables.at(k, j)), bound * (1 + 1e-12));
      EXPECT_LE(std::abs(r.final_controls.at(k, j)), env[k] * bound * (1 + 1e-12));
    }
  // The envelope vanishes towards both ends of the pulse.
  EXPECT_LT(env.front(), 0.1);
  EXPECT_LT(env.back(), 0.1);
  EXPECT_EQ(env[M / 2], 1.0);
}

TEST(Optimize, RejectsOutOfBoundsStart) {
  const ControlModel m = build_model(ModelKind::Real2);
  ControlGrid g = zero_controls(m, 0.8, 32);
  g.at(3, 2) = 60.0;  // Omega channel, bound 50 MHz
  EXPECT_THROW(optimize(m, gate_target("cnot12", 2), g, realistic_options()), std::invalid_argument);
  OptimizeOptions unbounded = realistic_options();
  unbounded.bounds_on = false;
  EXPECT_NO_THROW(optimize(m, gate_target("cnot12", 2), g, unbounded));
}

TEST(Optimize, RejectsTargetOfWrongSize) {
  const ControlModel m = build_model(ModelKind::Ideal2);
  EXPECT_THROW(optimize(m, gate_target("cnot13", 3), 0.5, 16, {}), std::invalid_argument);
}

TEST(Optimize, ConvergedProjectedGradientIsSmall) {
  const ControlModel m = build_model(ModelKind::Ideal2);
  const GateTarget t = gate_target("cnot12", 2);
  OptimizeOptions o;
  o.max_iters = 1000;
  o.threshold = 1.0 - 1e-12;
  const auto r = optimize(m, t, random_start(m, 0.8, 32, 7, 0.2), o);
  ASSERT_GT(r.fidelity_sq, 1.0 - 1e-8);
  double norm = 0.0;
  for (double v : gradient(m, r.final_controls, t, GradientMode::Exact)) norm += v * v * m.J * m.J;
  EXPECT_LT(std::sqrt(norm), 1e-5);
}

TEST(Optimize, ReversedRealisticCnotPulseKeepsFidelity) {
  const ControlModel m = build_model(ModelKind::Real2);
  const GateTarget t = gate_target("cnot12", 2);
  OptimizeOptions o = realistic_options();
  o.max_iters = 200;
  const auto r = optimize(m, t, random_start(m, 1.0, 128, 13, 0.2), o);
  EXPECT_NEAR(grid_fidelity(m, time_reversed(r.final_controls), t.matrix), r.fidelity_sq, 1e-8);
}

TEST(Optimize, FirstOrderGradientStillClimbs) {
  const ControlModel m = build_model(ModelKind::Ideal2);
  const GateTarget t = gate_target("cnot12", 2);
  const ControlGrid start = random_start(m, 0.8, 64, 17, 0.2);
  OptimizeOptions o;
  o.max_iters = 30;
  o.mode = GradientMode::FirstOrder;
  const auto r = optimize(m, t, start, o);
  EXPECT_GT(r.fidelity_sq, grid_fidelity(m, start, t.matrix));
}

TEST(Optimize, ZeroIterationBudgetReturnsStart) {
  const ControlModel m = build_model(ModelKind::Ideal3);
  const ControlGrid start = random_start(m, 1.0, 16, 19, 0.2);
  OptimizeOptions o;
  o.max_iters = 0;
  const auto r = optimize(m, gate_target("swap13", 3), start, o);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.termination, Termination::MaxIters);
  for (std::size_t i = 0; i < start.amplitudes.size(); ++i)
    EXPECT_NEAR(r.final_controls.amplitudes[i], start.amplitudes[i], 1e-12 * m.J);
}

}  // namespace
}  // namespace grape
