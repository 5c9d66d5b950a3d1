#pragma once

// Staged multi-start tournament, minimal-time sweeps and entanglement along
// optimized pulses.

#include "grape/entanglement.hpp"
#include "grape/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <thread>
#include <vector>

namespace grape {

struct Stage {
  int population;
  int iterations;
};

struct MultiStartProtocol {
  std::vector<Stage> stages = {{50, 100}, {10, 500}, {2, 1000}};
  std::uint64_t seed = 1;
  double init_scale = 0.2;    // fraction of the channel bound (of J when unbounded)
  int attempts = 1;           // full tournaments to run before giving up on the threshold
  bool stop_at_threshold = true;
  int jobs = 1;

  void validate() const {
    if (stages.empty()) throw std::invalid_argument("multi-start protocol needs at least one stage");
    for (std::size_t s = 0; s < stages.size(); ++s) {
      if (stages[s].population < 1 || stages[s].iterations < 0)
        throw std::invalid_argument("stage populations must be positive and iterations nonnegative");
      if (s > 0 && stages[s].population >= stages[s - 1].population)
        throw std::invalid_argument("stage populations must strictly decrease");
    }
    if (!(init_scale >= 0.0)) throw std::invalid_argument("init_scale must be nonnegative");
    if (attempts < 1) throw std::invalid_argument("attempts must be at least 1");
  }
};

struct AuditRecord {
  int attempt;
  int stage;
  int candidate;
  std::uint64_t seed;
  double fidelity_sq;
  int iterations;
  Termination termination;
};

struct MultiStartResult {
  OptimizationResult best;
  int best_candidate = -1;
  int attempts_used = 0;
  std::vector<AuditRecord> audit;
};

// ---------------------------------------------------------------------------
// Deterministic seeding

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

/// Uniform in [-1, 1) from a 64-bit generator, identical across standard libraries.
inline double symmetric_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

inline ControlGrid random_initial_controls(const ControlModel& model, double T, int M,
                                           double init_scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ControlGrid g(M, model.channel_count(), T);
  for (int k = 0; k < M; ++k)
    for (int j = 0; j < g.K; ++j)
      g.at(k, j) = init_scale * model.channels[j].bound.value_or(model.J) * symmetric_uniform(rng);
  return g;
}

// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `jobs` threads.
inline void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::clamp(jobs, 1, std::max(n, 1));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline int default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

namespace detail {

struct Candidate {
  int id;
  std::uint64_t seed;
  OptimizationResult result;
  bool ran = false;
};

// Lowest-index success wins so the outcome does not depend on scheduling.
inline MultiStartResult run_tournament(const ControlModel& model, const GateTarget& target,
                                       double T, int M, const MultiStartProtocol& protocol,
                                       const OptimizeOptions& base, int attempt,
                                       std::uint64_t attempt_seed) {
  MultiStartResult out;
  const int P0 = protocol.stages.front().population;
  std::vector<Candidate> pool(P0);
  for (int c = 0; c < P0; ++c) {
    pool[c].id = c;
    pool[c].seed = derive_seed(attempt_seed, static_cast<std::uint64_t>(c));
  }
  std::vector<int> order(P0);
  for (int c = 0; c < P0; ++c) order[c] = c;

  for (std::size_t s = 0; s < protocol.stages.size(); ++s) {
    const Stage stage = protocol.stages[s];
    const int count = std::min<int>(stage.population, static_cast<int>(order.size()));
    order.resize(count);
    std::atomic<int> first_success{std::numeric_limits<int>::max()};

    parallel_for(count, protocol.jobs, [&](int rank) {
      if (protocol.stop_at_threshold && first_success.load() < rank) return;
      Candidate& c = pool[order[rank]];
      OptimizeOptions opt = base;
      opt.max_iters = stage.iterations;
      if (protocol.stop_at_threshold)
        opt.cancelled = [&first_success, rank] { return first_success.load() < rank; };
      const ControlGrid start = s == 0 ? random_initial_controls(model, T, M, protocol.init_scale, c.seed)
                                       : c.result.variables;
      OptimizationResult r = optimize(model, target, start, opt);
      if (s > 0) {
        r.fidelity_history.insert(r.fidelity_history.begin(), c.result.fidelity_history.begin(),
                                  c.result.fidelity_history.end());
        r.iterations += c.result.iterations;
      }
      r.seed = c.seed;
      c.result = std::move(r);
      c.ran = true;
      if (c.result.fidelity_sq >= base.threshold) {
        int cur = first_success.load();
        while (rank < cur && !first_success.compare_exchange_weak(cur, rank)) {
        }
      }
    });

    const int winner_rank = first_success.load();
    const int recorded = std::min(count, winner_rank == std::numeric_limits<int>::max() ? count : winner_rank + 1);
    for (int rank = 0; rank < recorded; ++rank) {
      const Candidate& c = pool[order[rank]];
      out.audit.push_back({attempt, static_cast<int>(s) + 1, c.id, c.seed, c.result.fidelity_sq,
                           c.result.iterations, c.result.termination});
    }
    if (winner_rank != std::numeric_limits<int>::max()) {
      out.best = pool[order[winner_rank]].result;
      out.best_candidate = order[winner_rank];
      return out;
    }
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return pool[a].result.fidelity_sq > pool[b].result.fidelity_sq;
    });
  }
  out.best = pool[order.front()].result;
  out.best_candidate = order.front();
  return out;
}

}  // namespace detail

/// Staged tournament: random starts, survivors by best F^2, further iterations.
inline MultiStartResult multistart(const ControlModel& model, const GateTarget& target, double T,
                                   int M, const MultiStartProtocol& protocol,
                                   const OptimizeOptions& options) {
  protocol.validate();
  MultiStartResult total;
  for (int attempt = 0; attempt < protocol.attempts; ++attempt) {
    const std::uint64_t attempt_seed =
        attempt == 0 ? protocol.seed : derive_seed(protocol.seed, 0xA77E3B7ull + attempt);
    MultiStartResult r =
        detail::run_tournament(model, target, T, M, protocol, options, attempt, attempt_seed);
    total.audit.insert(total.audit.end(), r.audit.begin(), r.audit.end());
    total.attempts_used = attempt + 1;
    if (attempt == 0 || r.best.fidelity_sq > total.best.fidelity_sq) {
      total.best = std::move(r.best);
      total.best_candidate = r.best_candidate;
    }
    if (total.best.fidelity_sq >= options.threshold) break;
  }
  return total;
}

// ---------------------------------------------------------------------------

struct SweepPoint {
  double T;
  double best_fidelity;
  bool reached;
  std::uint64_t seed;
  OptimizationResult winner;
};

struct SweepCurve {
  std::vector<SweepPoint> points;
  std::optional<double> minimal_time;
  double threshold = 0.0;
  double resolution = 0.0;
};

/// Uniform duration grid T_min, T_min + res, ... not exceeding T_max.
inline std::vector<double> duration_grid(double T_min, double T_max, double resolution) {
  if (!(resolution > 0.0)) throw std::invalid_argument("sweep resolution must be positive");
  if (!(T_min <= T_max)) throw std::invalid_argument("sweep range is empty");
  if (T_min < 0.0) throw std::invalid_argument("sweep durations must be nonnegative");
  const int n = static_cast<int>(std::floor((T_max - T_min) / resolution + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = std::round((T_min + i * resolution) * 1e9) / 1e9;
  return grid;
}

struct SweepOptions {
  double T_min = 0.5;
  double T_max = 1.5;
  double resolution = 0.05;
  int M = 256;
  bool stop_at_minimal = false;  // skip durations after the first success
  std::function<void(const SweepPoint&)> on_point;  // progress callback
};

inline SweepCurve sweep_min_time(const ControlModel& model, const GateTarget& target,
                                 const SweepOptions& sweep, const MultiStartProtocol& protocol,
                                 const OptimizeOptions& options) {
  SweepCurve curve;
  curve.threshold = options.threshold;
  curve.resolution = sweep.resolution;
  const auto grid = duration_grid(sweep.T_min, sweep.T_max, sweep.resolution);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    MultiStartProtocol p = protocol;
    p.seed = derive_seed(protocol.seed, static_cast<std::uint64_t>(i));
    MultiStartResult r = multistart(model, target, grid[i], sweep.M, p, options);
    SweepPoint pt{grid[i], r.best.fidelity_sq, r.best.fidelity_sq >= options.threshold, p.seed,
                  std::move(r.best)};
    if (pt.reached && !curve.minimal_time) curve.minimal_time = pt.T;
    if (sweep.on_point) sweep.on_point(pt);
    curve.points.push_back(std::move(pt));
    if (sweep.stop_at_minimal && curve.minimal_time) break;
  }
  return curve;
}

// ---------------------------------------------------------------------------

/// Pair negativities while the optimized controls act on `initial`.
inline EntanglementSeries optimized_entanglement(const ControlModel& model,
                                                 const ControlGrid& controls,
                                                 const StateVector& initial, int samples) {
  if (model.n_qubits != 3 || initial.size() != 8)
    throw std::invalid_argument("optimized entanglement needs a 3-qubit model and state");
  detail::check_grid(model, controls);
  const double dt_us = controls.dt() / model.J;
  std::vector<ComplexMatrix> hams;
  hams.reserve(controls.M);
  for (int k = 0; k < controls.M; ++k) hams.push_back(model.hamiltonian(controls.row(k)));

  EntanglementSeries out;
  StateVector psi = initial;
  int done = 0;  // intervals fully applied to psi
  for (double t : sample_times(controls.T, samples)) {
    const double pos = controls.T > 0.0 ? t / controls.dt() : 0.0;
    const int whole = std::min(controls.M, static_cast<int>(std::floor(pos + 1e-12)));
    for (; done < whole; ++done) psi = expm_hermitian(hams[done], dt_us) * psi;
    StateVector now = psi;
    const double frac = pos - whole;
    if (whole < controls.M && frac > 1e-12) now = expm_hermitian(hams[whole], frac * dt_us) * now;
    out.push_back(entanglement_at(t, now));
  }
  return out;
}

inline EntanglementSeries optimized_entanglement(const ControlModel& model,
                                                 const OptimizationResult& result,
                                                 const StateVector& initial, int samples) {
  return optimized_entanglement(model, result.final_controls, initial, samples);
}

}  // namespace grape
