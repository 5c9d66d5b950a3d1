#include "grape/lbfgs.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace grape {
namespace {

// f(x) = -sum c_i (x_i - a_i)^2, maximum at a.
struct Quadratic {
  std::vector<double> a, c;
  std::vector<double> last;
  int evaluations = 0;

  double value(std::span<const double> x) {
    ++evaluations;
    last.assign(x.begin(), x.end());
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) f -= c[i] * (x[i] - a[i]) * (x[i] - a[i]);
    return f;
  }
  void gradient(std::span<double> g) {
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = -2.0 * c[i] * (last[i] - a[i]);
  }
};

// Negated Rosenbrock, maximum 0 at (1, 1).
struct Rosenbrock {
  double x = 0, y = 0;
  double value(std::span<const double> v) {
    x = v[0];
    y = v[1];
    return -(std::pow(1 - x, 2) + 100 * std::pow(y - x * x, 2));
  }
  void gradient(std::span<double> g) {
    g[0] = 2 * (1 - x) + 400 * x * (y - x * x);
    g[1] = -200 * (y - x * x);
  }
};

TEST(ProjectedLbfgs, FindsUnconstrainedQuadraticMaximum) {
  Quadratic q{{1.0, -2.0, 0.5}, {1.0, 10.0, 100.0}};
  AscentOptions opt;
  opt.max_iters = 200;
  const auto r = maximize_projected_lbfgs(q, {0.0, 0.0, 0.0}, BoxBounds::unbounded(3), opt);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r.x[i], q.a[i], 1e-6);
}

TEST(ProjectedLbfgs, StopsOnActiveBound) {
  Quadratic q{{3.0, -3.0}, {1.0, 1.0}};
  BoxBounds b{{-1.0, -1.0}, {1.0, 1.0}};
  AscentOptions opt;
  opt.max_iters = 100;
  const auto r = maximize_projected_lbfgs(q, {0.0, 0.0}, b, opt);
  EXPECT_EQ(r.x[0], 1.0);
  EXPECT_EQ(r.x[1], -1.0);
  // Nothing can move once both coordinates are pinned.
  EXPECT_EQ(r.termination, Termination::LineSearchFailure);
}

TEST(ProjectedLbfgs, MixedBoundsKeepFreeCoordinatesConverging) {
  Quadratic q{{5.0, 0.25, -0.75}, {1.0, 3.0, 7.0}};
  BoxBounds b{{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
  AscentOptions opt;
  opt.max_iters = 200;
  const auto r = maximize_projected_lbfgs(q, {0.0, 0.0, 0.0}, b, opt);
  EXPECT_EQ(r.x[0], 1.0);
  EXPECT_NEAR(r.x[1], 0.25, 1e-6);
  EXPECT_NEAR(r.x[2], -0.75, 1e-6);
  EXPECT_TRUE(b.contains(r.x));
}

TEST(ProjectedLbfgs, RosenbrockConverges) {
  Rosenbrock f;
  AscentOptions opt;
  opt.max_iters = 500;
  const auto r = maximize_projected_lbfgs(f, {-1.2, 1.0}, BoxBounds::unbounded(2), opt);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], 1.0, 1e-4);
}

TEST(ProjectedLbfgs, HistoryIsMonotone) {
  Rosenbrock f;
  AscentOptions opt;
  opt.max_iters = 60;
  const auto r = maximize_projected_lbfgs(f, {-1.2, 1.0}, BoxBounds::unbounded(2), opt);
  ASSERT_EQ(static_cast<int>(r.history.size()), r.iterations);
  for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_GE(r.history[i], r.history[i - 1]);
  EXPECT_EQ(r.value, r.history.back());
}

TEST(ProjectedLbfgs, ThresholdStopsEarly) {
  Quadratic q{{1.0}, {1.0}};
  AscentOptions opt;
  opt.threshold = -0.01;
  const auto r = maximize_projected_lbfgs(q, {-2.0}, BoxBounds::unbounded(1), opt);
  EXPECT_EQ(r.termination, Termination::ThresholdReached);
  EXPECT_GE(r.value, -0.01);
}

TEST(ProjectedLbfgs, ThresholdMetAtStartUsesNoIterations) {
  Quadratic q{{1.0}, {1.0}};
  AscentOptions opt;
  opt.threshold = -1.0;
  const auto r = maximize_projected_lbfgs(q, {1.0}, BoxBounds::unbounded(1), opt);
  EXPECT_EQ(r.termination, Termination::ThresholdReached);
  EXPECT_EQ(r.iterations, 0);
}

TEST(ProjectedLbfgs, IterationCapReportsMaxIters) {
  Rosenbrock f;
  AscentOptions opt;
  opt.max_iters = 3;
  const auto r = maximize_projected_lbfgs(f, {-1.2, 1.0}, BoxBounds::unbounded(2), opt);
  EXPECT_EQ(r.termination, Termination::MaxIters);
  EXPECT_EQ(r.iterations, 3);
}

TEST(ProjectedLbfgs, SteepestAscentAlsoClimbs) {
  Quadratic q{{1.0, -1.0}, {1.0, 4.0}};
  AscentOptions opt;
  opt.max_iters = 200;
  opt.steepest = true;
  const auto r = maximize_projected_lbfgs(q, {0.0, 0.0}, BoxBounds::unbounded(2), opt);
  EXPECT_NEAR(r.x[0], 1.0, 1e-4);
  EXPECT_NEAR(r.x[1], -1.0, 1e-4);
}

TEST(ProjectedLbfgs, CancellationStopsImmediately) {
  Quadratic q{{1.0}, {1.0}};
  AscentOptions opt;
  opt.cancelled = [] { return true; };
  const auto r = maximize_projected_lbfgs(q, {-2.0}, BoxBounds::unbounded(1), opt);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.termination, Termination::MaxIters);
}

TEST(ProjectedLbfgs, RejectsInfeasibleStart) {
  Quadratic q{{0.0}, {1.0}};
  BoxBounds b{{-1.0}, {1.0}};
  EXPECT_THROW(maximize_projected_lbfgs(q, {2.0}, b, {}), std::invalid_argument);
  EXPECT_THROW(maximize_projected_lbfgs(q, {0.0, 0.0}, b, {}), std::invalid_argument);
}

}  // namespace
}  // namespace grape
