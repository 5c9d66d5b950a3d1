#pragma once

// Box-projected limited-memory BFGS ascent.
//
// An objective provides
//   double value(std::span<const double> x);
//   void gradient(std::span<double> g);   // gradient at the last value() point
// and is maximized subject to lower <= x <= upper (entries may be infinite).

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace grape {

enum class Termination { ThresholdReached, MaxIters, LineSearchFailure };

inline std::string to_string(Termination t) {
  switch (t) {
    case Termination::ThresholdReached: return "threshold_reached";
    case Termination::MaxIters: return "max_iters";
    case Termination::LineSearchFailure: return "line_search_failure";
  }
  return "?";
}

struct BoxBounds {
  std::vector<double> lower;
  std::vector<double> upper;

  static BoxBounds unbounded(std::size_t n) {
    const double inf = std::numeric_limits<double>::infinity();
    return {std::vector<double>(n, -inf), std::vector<double>(n, inf)};
  }

  bool contains(std::span<const double> x, double slack = 0.0) const {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i] < lower[i] - slack || x[i] > upper[i] + slack) return false;
    return true;
  }
};

struct AscentOptions {
  int max_iters = 100;
  int memory = 20;
  std::optional<double> threshold;
  double armijo = 1e-4;
  double shrink = 0.5;
  int max_trials = 30;
  bool steepest = false;              // plain projected steepest ascent
  std::function<bool()> cancelled;    // polled once per iteration
};

struct AscentResult {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> history;  // value after each accepted step
  int iterations = 0;
  Termination termination = Termination::MaxIters;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

struct CurvaturePair {
  std::vector<double> s;
  std::vector<double> y;
  double rho;
};

// Two-loop recursion for the ascent problem: minimizes -f, so the
// returned direction is H * grad(f) with H approximating (-hess f)^-1.
inline std::vector<double> two_loop(const std::deque<CurvaturePair>& mem, std::span<const double> g,
                                    double gamma) {
  std::vector<double> q(g.begin(), g.end());
  std::vector<double> alpha(mem.size());
  for (std::size_t i = mem.size(); i-- > 0;) {
    alpha[i] = mem[i].rho * dot(mem[i].s, q);
    for (std::size_t t = 0; t < q.size(); ++t) q[t] -= alpha[i] * mem[i].y[t];
  }
  for (double& v : q) v *= gamma;
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const double beta = mem[i].rho * dot(mem[i].y, q);
    for (std::size_t t = 0; t < q.size(); ++t) q[t] += mem[i].s[t] * (alpha[i] - beta);
  }
  return q;
}

}  // namespace detail

template <class Objective>
AscentResult maximize_projected_lbfgs(Objective& objective, std::vector<double> x0,
                                      const BoxBounds& bounds, const AscentOptions& opt) {
  const std::size_t n = x0.size();
  if (bounds.lower.size() != n || bounds.upper.size() != n)
    throw std::invalid_argument("bounds do not match the variable count");
  if (!bounds.contains(x0)) throw std::invalid_argument("initial point violates the bounds");
  if (opt.memory < 0 || opt.max_iters < 0) throw std::invalid_argument("negative optimizer option");

  auto project = [&](std::vector<double>& x) {
    bool clipped = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::clamp(x[i], bounds.lower[i], bounds.upper[i]);
      if (c != x[i]) clipped = true;
      x[i] = c;
    }
    return clipped;
  };

  AscentResult res;
  res.x = std::move(x0);
  double f = objective.value(res.x);
  std::vector<double> g(n), g_new(n), pg(n), x_trial(n);
  objective.gradient(g);
  res.value = f;

  auto reached = [&](double v) { return opt.threshold && v >= *opt.threshold; };
  if (reached(f)) {
    res.termination = Termination::ThresholdReached;
    return res;
  }

  std::deque<detail::CurvaturePair> memory;
  double gamma = 0.0;  // last curvature scaling, reused after a flush

  for (int iter = 0; iter < opt.max_iters; ++iter) {
    if (opt.cancelled && opt.cancelled()) {
      res.termination = Termination::MaxIters;
      return res;
    }

    // Freeze coordinates held at a bound by an outward-pointing gradient.
    for (std::size_t i = 0; i < n; ++i) {
      const bool at_lower = res.x[i] <= bounds.lower[i] && g[i] < 0.0;
      const bool at_upper = res.x[i] >= bounds.upper[i] && g[i] > 0.0;
      pg[i] = (at_lower || at_upper) ? 0.0 : g[i];
    }
    const double pg_norm = detail::inf_norm(pg);
    if (pg_norm == 0.0 || !std::isfinite(pg_norm)) {
      res.termination = Termination::LineSearchFailure;
      return res;
    }

    bool accepted = false;
    bool clipped = false;
    double f_trial = f;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool quasi_newton = !opt.steepest && !memory.empty() && attempt == 0;
      std::vector<double> d;
      if (quasi_newton) {
        d = detail::two_loop(memory, pg, gamma);
        for (std::size_t i = 0; i < n; ++i)
          if (pg[i] == 0.0) d[i] = 0.0;
        if (detail::dot(d, pg) <= 0.0) {
          memory.clear();
          continue;
        }
      } else {
        const double scale = gamma > 0.0 ? gamma : 1.0 / std::sqrt(detail::dot(pg, pg));
        d.assign(pg.begin(), pg.end());
        for (double& v : d) v *= scale;
      }

      double step = 1.0;
      for (int trial = 0; trial < opt.max_trials; ++trial, step *= opt.shrink) {
        for (std::size_t i = 0; i < n; ++i) x_trial[i] = res.x[i] + step * d[i];
        clipped = project(x_trial);
        double predicted = 0.0;
        for (std::size_t i = 0; i < n; ++i) predicted += g[i] * (x_trial[i] - res.x[i]);
        if (predicted <= 0.0) continue;
        f_trial = objective.value(x_trial);
        if (!std::isfinite(f_trial)) continue;
        if (f_trial >= f + opt.armijo * predicted) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (memory.empty()) break;
        memory.clear();
      }
    }

    if (!accepted) {
      // The objective's cache must describe res.x on return.
      res.value = objective.value(res.x);
      res.termination = Termination::LineSearchFailure;
      return res;
    }

    objective.gradient(g_new);
    detail::CurvaturePair pair{std::vector<double>(n), std::vector<double>(n), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = x_trial[i] - res.x[i];
      pair.y[i] = g[i] - g_new[i];
    }
    const double sy = detail::dot(pair.s, pair.y);
    const double yy = detail::dot(pair.y, pair.y);

    res.x.swap(x_trial);
    g.swap(g_new);
    f = f_trial;
    res.value = f;
    res.history.push_back(f);
    ++res.iterations;

    if (clipped) memory.clear();
    if (sy > 1e-12 * std::sqrt(yy * detail::dot(pair.s, pair.s)) && yy > 0.0) {
      gamma = sy / yy;
      if (!clipped && opt.memory > 0) {
        pair.rho = 1.0 / sy;
        memory.push_back(std::move(pair));
        if (static_cast<int>(memory.size()) > opt.memory) memory.pop_front();
      }
    }

    if (reached(f)) {
      res.termination = Termination::ThresholdReached;
      return res;
    }
  }
  res.termination = Termination::MaxIters;
  return res;
}

}  // namespace grape
