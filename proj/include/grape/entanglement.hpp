#pragma once

// Pairwise logarithmic negativity along a time-dependent 3-qubit evolution.

#include "grape/quantum_core.hpp"

#include <stdexcept>
#include <vector>

namespace grape {

struct EntanglementSample {
  double t;    // units of 1/J
  double e12;  // E_N of qubits (1,2)
  double e23;  // E_N of qubits (2,3)
};

using EntanglementSeries = std::vector<EntanglementSample>;

inline EntanglementSample entanglement_at(double t, const StateVector& psi) {
  const auto [e12, e23] = pair_negativities(psi);
  return {t, e12, e23};
}

/// Uniform sample times over [0, T], endpoints included.
inline std::vector<double> sample_times(double T, int samples) {
  if (samples < 2) throw std::invalid_argument("need at least two entanglement samples");
  std::vector<double> t(samples);
  for (int s = 0; s < samples; ++s) t[s] = T * s / (samples - 1);
  t.back() = T;
  return t;
}

}  // namespace grape
