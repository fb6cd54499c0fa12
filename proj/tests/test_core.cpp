#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "impdelay/core.hpp"

using namespace impdelay;

namespace {

// x(s) = s on [-1, 0] sampled at quarter points, with a jump at -0.5 from -0.5 (left) to 1.0.
HistoryFunction ramp_with_jump() {
  std::vector<double> grid{-1.0, -0.75, -0.5, -0.25, 0.0};
  std::vector<State> values{{-1.0}, {-0.75}, {1.0}, {-0.25}, {0.0}};
  return HistoryFunction(grid, values, {HistoryFunction::Jump{-0.5, {-0.5}}});
}

}  // namespace

TEST(Samples, RejectsNonIncreasingTimes) {
  Samples s(1);
  s.append(0.0, {1.0});
  EXPECT_THROW(s.append(0.0, {2.0}), DomainError);
  EXPECT_THROW(s.append(-1.0, {2.0}), DomainError);
  EXPECT_THROW(s.append(1.0, {1.0, 2.0}), DimensionError);
}

TEST(Samples, InterpolatesLinearlyBetweenNodes) {
  Samples s(1);
  s.append(0.0, {0.0});
  s.append(2.0, {4.0});
  EXPECT_DOUBLE_EQ(s.value(0.5)[0], 1.0);
  EXPECT_DOUBLE_EQ(s.value(2.0)[0], 4.0);
  EXPECT_THROW(s.value(2.5), CoverageError);
  EXPECT_THROW(s.value(-0.1), CoverageError);
}

TEST(Samples, JumpKeepsBothLimits) {
  Samples s(1);
  s.append(0.0, {0.0});
  s.append(1.0, {1.0});
  s.jump_back({3.0});
  s.append(2.0, {5.0});
  EXPECT_DOUBLE_EQ(s.value(1.0)[0], 3.0);
  EXPECT_DOUBLE_EQ(s.left_limit(1.0)[0], 1.0);
  // interior of the cell before the jump interpolates toward the left limit
  EXPECT_DOUBLE_EQ(s.value(0.5)[0], 0.5);
  EXPECT_DOUBLE_EQ(s.value(1.5)[0], 4.0);
  EXPECT_THROW(s.left_limit(0.0), DomainError);
}

TEST(HistoryFunction, EvaluatesRightContinuousWithLeftLimits) {
  auto h = ramp_with_jump();
  EXPECT_DOUBLE_EQ(h.eval(-0.5)[0], 1.0);
  EXPECT_DOUBLE_EQ(h.left_limit(-0.5)[0], -0.5);
  EXPECT_DOUBLE_EQ(h.eval(-0.625)[0], -0.625);
  EXPECT_DOUBLE_EQ(h.eval(-0.375)[0], 0.375);
  EXPECT_DOUBLE_EQ(h.eval(0.0)[0], 0.0);
  EXPECT_THROW(h.eval(-1.5), DomainError);
  EXPECT_THROW(h.eval(0.5), DomainError);
  EXPECT_THROW(h.left_limit(-1.0), DomainError);
}

TEST(HistoryFunction, ValidatesConstruction) {
  EXPECT_THROW(HistoryFunction({0.0}, {{1.0}}), DomainError);
  EXPECT_THROW(HistoryFunction({-1.0, 0.5}, {{1.0}, {1.0}}), DomainError);
  EXPECT_THROW(HistoryFunction({-1.0, 0.0}, {{1.0}}), DimensionError);
  EXPECT_THROW(HistoryFunction({-1.0, 0.0}, {{1.0}, {NAN}}), DomainError);
  EXPECT_THROW(HistoryFunction({-1.0, 0.0}, {{1.0}, {1.0}}, {HistoryFunction::Jump{-0.3, {0.0}}}), DomainError);
}

TEST(HistoryFunction, TrapezoidIntegralSplitsAtJumps) {
  auto h = ramp_with_jump();
  // Pieces: [-1,-0.5] ramp s: -0.375; [-0.5,-0.25] from 1 to -0.25: 0.09375; [-0.25,0] ramp: -0.03125
  EXPECT_NEAR(h.integral()[0], -0.375 + 0.09375 - 0.03125, 1e-15);
  EXPECT_NEAR(h.integral(0.25)[0], -0.03125, 1e-15);
  const double sq = h.integrate_scalar([](double, const State& x) { return x[0] * x[0]; });
  // trapezoid of x^2 cell by cell
  const double expect = 0.25 * 0.5 * (1.0 + 0.5625) + 0.25 * 0.5 * (0.5625 + 0.25) + 0.25 * 0.5 * (1.0 + 0.0625) +
                        0.25 * 0.5 * (0.0625 + 0.0);
  EXPECT_NEAR(sq, expect, 1e-15);
}

TEST(HistoryFunction, ConstantHistory) {
  auto h = HistoryFunction::constant({2.0, -1.0}, 0.5);
  EXPECT_EQ(h.dim(), 2u);
  EXPECT_DOUBLE_EQ(h.tau(), 0.5);
  EXPECT_DOUBLE_EQ(h.eval(-0.3)[1], -1.0);
  EXPECT_NEAR(h.integral()[0], 1.0, 1e-15);
  EXPECT_NEAR(h.sup_norm(), std::sqrt(5.0), 1e-15);
  EXPECT_TRUE(h.jumps().empty());
  EXPECT_EQ(h.grid(), (std::vector<double>{-0.5, 0.0}));
}

TEST(Trajectory, WindowsSeeLeftOrRightValueAtTheAnchor) {
  auto store = std::make_shared<Samples>(1);
  store->append(-1.0, {1.0});
  store->append(0.0, {1.0});
  store->append(0.5, {2.0});
  store->jump_back({-2.0});
  store->append(1.0, {0.0});
  Trajectory traj(0.0, HistoryFunction::constant({1.0}, 1.0), store);

  auto before = traj.window(0.5, Side::before);
  auto at = traj.window(0.5, Side::at);
  EXPECT_DOUBLE_EQ(before.eval(0.0)[0], 2.0);
  EXPECT_DOUBLE_EQ(at.eval(0.0)[0], -2.0);
  EXPECT_DOUBLE_EQ(at.eval(-0.25)[0], 1.5);
  EXPECT_EQ(traj.impulse_times(), std::vector<double>{0.5});
  EXPECT_THROW(traj.window(-0.1, Side::at), CoverageError);
  EXPECT_THROW(traj.window(1.5, Side::at), CoverageError);

  // the jump at 0.5 is interior to the window at t = 1 and is reported with its left limit
  auto w = traj.window(1.0, Side::at);
  auto jumps = w.jumps();
  ASSERT_EQ(jumps.size(), 1u);
  EXPECT_DOUBLE_EQ(jumps[0].offset, -0.5);
  EXPECT_DOUBLE_EQ(jumps[0].left[0], 2.0);
}

TEST(Trajectory, LeftWindowTakesLeftLimitsAtInteriorJumps) {
  auto store = std::make_shared<Samples>(1);
  store->append(-1.0, {1.0});
  store->append(0.0, {1.0});
  store->append(0.3, {2.0});
  store->jump_back({-2.0});
  store->append(0.7, {0.0});
  Trajectory traj(0.0, HistoryFunction::constant({1.0}, 1.0), store);

  const double lag = 0.4;
  const Time t = 0.3 + lag;
  EXPECT_DOUBLE_EQ(traj.window(t, Side::before).eval(-lag)[0], 2.0);
  EXPECT_DOUBLE_EQ(traj.window(t, Side::at).eval(-lag)[0], -2.0);
  // t - lag misses 0.3 by round-off and still lands on the node
  EXPECT_NE(t - lag, 0.3);
  EXPECT_DOUBLE_EQ(traj.window(t, Side::at).eval(-lag)[0], store->value(0.3)[0]);
}

TEST(Trajectory, FromHistoryCoversTheInitialWindow) {
  auto traj = Trajectory::from_history(ramp_with_jump(), 3.0);
  EXPECT_DOUBLE_EQ(traj.t0(), 3.0);
  EXPECT_DOUBLE_EQ(traj.value(2.5)[0], 1.0);
  EXPECT_DOUBLE_EQ(traj.left_limit(2.5)[0], -0.5);
}

TEST(SystemDefinition, RequiresTrivialSolution) {
  auto zero = [](Time, const HistoryFunction& h) { return State(h.dim(), 0.0); };
  auto shifted = [](Time, const HistoryFunction& h) { return State(h.dim(), 1.0); };
  EXPECT_NO_THROW(SystemDefinition(1, 1.0, zero, zero));
  EXPECT_THROW(SystemDefinition(1, 1.0, shifted, zero), DomainError);
  EXPECT_THROW(SystemDefinition(1, 0.0, zero, zero), DomainError);
  EXPECT_THROW(SystemDefinition(0, 1.0, zero, zero), DomainError);
}
