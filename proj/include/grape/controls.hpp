#pragma once

// Piecewise-constant control amplitudes on a uniform time grid.

#include "grape/models.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace grape {

struct ControlGrid {
  int M = 256;                     // interval count
  int K = 0;                       // channel count
  double T = 0.0;                  // total duration, units of 1/J
  std::vector<double> amplitudes;  // row-major M x K, MHz

  ControlGrid() = default;
  ControlGrid(int intervals, int channels, double duration)
      : M(intervals), K(channels), T(duration),
        amplitudes(static_cast<std::size_t>(intervals) * channels, 0.0) {
    if (intervals < 1) throw std::invalid_argument("control grid needs at least one interval");
    if (channels < 0) throw std::invalid_argument("negative channel count");
    if (!(duration >= 0.0) || !std::isfinite(duration))
      throw std::invalid_argument("duration must be finite and nonnegative");
  }

  double dt() const { return T / M; }
  double t_start(int k) const { return T * k / M; }

  double& at(int k, int j) { return amplitudes[static_cast<std::size_t>(k) * K + j]; }
  double at(int k, int j) const { return amplitudes[static_cast<std::size_t>(k) * K + j]; }

  std::span<const double> row(int k) const {
    return {amplitudes.data() + static_cast<std::size_t>(k) * K, static_cast<std::size_t>(K)};
  }

  bool operator==(const ControlGrid&) const = default;
};

inline ControlGrid zero_controls(const ControlModel& model, double T, int M = 256) {
  return ControlGrid(M, model.channel_count(), T);
}

/// Trapezoidal envelope sampled at interval midpoints. Durations in 1/J.
inline std::vector<double> rise_envelope(int M, double T, double rise) {
  std::vector<double> env(static_cast<std::size_t>(M), 1.0);
  if (rise <= 0.0) return env;
  for (int k = 0; k < M; ++k) {
    const double t = T * (k + 0.5) / M;
    env[k] = std::clamp(std::min(t, T - t) / rise, 0.0, 1.0);
  }
  return env;
}

inline double rise_ns_to_tau(const ControlGrid& grid, double rise_ns, double J_mhz) {
  if (!(rise_ns >= 0.0)) throw std::invalid_argument("rise time must be nonnegative");
  if (!(J_mhz > 0.0)) throw std::invalid_argument("coupling J must be positive");
  const double rise = ns_to_tau(rise_ns, J_mhz);
  if (rise > grid.T / 2.0 * (1.0 + 1e-12))
    throw std::invalid_argument("rise time exceeds half the pulse duration");
  return rise;
}

/// Scales every interval by the trapezoidal envelope value at its midpoint.
inline ControlGrid apply_rise_envelope(const ControlGrid& grid, double rise_ns, double J_mhz) {
  const double rise = rise_ns_to_tau(grid, rise_ns, J_mhz);
  ControlGrid out = grid;
  if (rise == 0.0) return out;
  const auto env = rise_envelope(grid.M, grid.T, rise);
  for (int k = 0; k < grid.M; ++k)
    for (int j = 0; j < grid.K; ++j) out.at(k, j) *= env[k];
  return out;
}

/// The same control sequence played backwards in time.
inline ControlGrid time_reversed(const ControlGrid& grid) {
  ControlGrid out = grid;
  for (int k = 0; k < grid.M; ++k)
    for (int j = 0; j < grid.K; ++j) out.at(k, j) = grid.at(grid.M - 1 - k, j);
  return out;
}

}  // namespace grape
