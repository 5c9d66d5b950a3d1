#pragma once

// Control Hamiltonians for two and three XY-coupled qubits, plus the target gate library.
//
// Units: coupling J and control amplitudes are frequencies in MHz with the
// pi prefactors baked into the operators, so time is in microseconds.
// Durations are quoted in units of 1/J throughout the public API.

#include "grape/quantum_core.hpp"

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace grape {

enum class ModelKind { Ideal2, Ideal3, Real2, Real3 };

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "ideal2") return ModelKind::Ideal2;
  if (s == "ideal3") return ModelKind::Ideal3;
  if (s == "real2") return ModelKind::Real2;
  if (s == "real3") return ModelKind::Real3;
  throw std::invalid_argument("unknown model kind '" + std::string(s) + "'");
}

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::Ideal2: return "ideal2";
    case ModelKind::Ideal3: return "ideal3";
    case ModelKind::Real2: return "real2";
    case ModelKind::Real3: return "real3";
  }
  return "?";
}

inline bool is_realistic(ModelKind k) { return k == ModelKind::Real2 || k == ModelKind::Real3; }
inline int qubit_count(ModelKind k) {
  return (k == ModelKind::Ideal2 || k == ModelKind::Real2) ? 2 : 3;
}

struct ControlChannel {
  std::string label;
  ComplexMatrix op;              // Hermitian, includes the pi prefactor
  std::optional<double> bound;   // MHz; empty = unbounded
};

struct ControlModel {
  ModelKind kind{};
  int n_qubits{};
  double J{};                    // MHz
  ComplexMatrix drift;           // MHz (pi J / 2 ...)
  std::vector<ControlChannel> channels;

  int dim() const { return dim_for_qubits(n_qubits); }
  int channel_count() const { return static_cast<int>(channels.size()); }

  /// Hamiltonian for one set of control amplitudes (MHz).
  ComplexMatrix hamiltonian(std::span<const double> amplitudes) const {
    if (static_cast<int>(amplitudes.size()) != channel_count())
      throw std::invalid_argument("amplitude count does not match channel count");
    ComplexMatrix h = drift;
    for (int j = 0; j < channel_count(); ++j) h += amplitudes[j] * channels[j].op;
    return h;
  }
};

struct ModelParams {
  double J = 21.0;             // MHz
  double delta_max = 1000.0;   // MHz, detuning / z-channel bound
  double omega_max = 50.0;     // MHz, microwave x-channel bound
};

// Conversions between units of 1/J and physical time.
inline double tau_to_ns(double tau, double J_mhz) { return tau / J_mhz * 1e3; }
inline double ns_to_tau(double ns, double J_mhz) { return ns * 1e-3 * J_mhz; }

namespace detail {

inline ComplexMatrix xy_coupling(int a, int b, int n) {
  return embed_pauli(PauliAxis::X, a, n) * embed_pauli(PauliAxis::X, b, n) +
         embed_pauli(PauliAxis::Y, a, n) * embed_pauli(PauliAxis::Y, b, n);
}

}  // namespace detail

inline ControlModel build_model(ModelKind kind, const ModelParams& params = {}) {
  if (!(params.J > 0.0) || !std::isfinite(params.J))
    throw std::invalid_argument("coupling J must be positive");
  if (params.delta_max < 0.0 || params.omega_max < 0.0)
    throw std::invalid_argument("control bounds must be nonnegative");

  ControlModel m;
  m.kind = kind;
  m.n_qubits = qubit_count(kind);
  m.J = params.J;
  const int n = m.n_qubits;
  const double half_pi_j = kPi * params.J / 2.0;

  m.drift = half_pi_j * detail::xy_coupling(1, 2, n);
  if (n == 3) m.drift += half_pi_j * detail::xy_coupling(2, 3, n);

  auto local = [&](PauliAxis axis, int q) { return ComplexMatrix(kPi * embed_pauli(axis, q, n)); };
  auto joint_x = [&](int a, int b) {
    return ComplexMatrix(kPi * (embed_pauli(PauliAxis::X, a, n) + embed_pauli(PauliAxis::X, b, n)));
  };

  switch (kind) {
    case ModelKind::Ideal2:
    case ModelKind::Ideal3:
      for (int q = 1; q <= n; ++q) {
        m.channels.push_back({"Ox" + std::to_string(q), local(PauliAxis::X, q), std::nullopt});
        m.channels.push_back({"Oy" + std::to_string(q), local(PauliAxis::Y, q), std::nullopt});
      }
      break;
    case ModelKind::Real2:
      m.channels.push_back({"D1", local(PauliAxis::Z, 1), params.delta_max});
      m.channels.push_back({"D2", local(PauliAxis::Z, 2), params.delta_max});
      m.channels.push_back({"Omega", joint_x(1, 2), params.omega_max});
      break;
    case ModelKind::Real3:
      m.channels.push_back({"Ox12", joint_x(1, 2), params.omega_max});
      m.channels.push_back({"Ox23", joint_x(2, 3), params.omega_max});
      // The z-channel bound is not pinned independently; it shares the detuning bound.
      for (int q = 1; q <= 3; ++q)
        m.channels.push_back({"Oz" + std::to_string(q), local(PauliAxis::Z, q), params.delta_max});
      break;
  }
  return m;
}

inline ControlModel build_model(std::string_view kind, const ModelParams& params = {}) {
  return build_model(parse_model_kind(kind), params);
}

// ---------------------------------------------------------------------------
// Target gates

struct GateTarget {
  std::string name;
  ComplexMatrix matrix;
  std::pair<int, int> acting_pair;
};

inline ComplexMatrix iswap_matrix() {
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 2) = -kI;
  u(2, 1) = -kI;
  u(3, 3) = 1.0;
  return u;
}

inline ComplexMatrix cnot_matrix() {
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 1) = 1.0;
  u(2, 3) = 1.0;
  u(3, 2) = 1.0;
  return u;
}

inline ComplexMatrix swap_matrix() {
  ComplexMatrix u = ComplexMatrix::Zero(4, 4);
  u(0, 0) = 1.0;
  u(1, 2) = 1.0;
  u(2, 1) = 1.0;
  u(3, 3) = 1.0;
  return u;
}

/// Places a two-qubit gate on qubits (a, b) of an n-qubit register; a is the
/// gate's first (control) qubit.
inline ComplexMatrix embed_two_qubit(const ComplexMatrix& gate, int a, int b, int n) {
  if (gate.rows() != 4 || gate.cols() != 4) throw std::invalid_argument("gate must be 4x4");
  if (a == b || a < 1 || b < 1 || a > n || b > n) throw std::invalid_argument("invalid qubit pair");
  const int dim = dim_for_qubits(n);
  auto bit = [n](int index, int q) { return (index >> (n - q)) & 1; };
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      bool spectators_match = true;
      for (int q = 1; q <= n; ++q)
        if (q != a && q != b && bit(i, q) != bit(j, q)) spectators_match = false;
      if (!spectators_match) continue;
      out(i, j) = gate(2 * bit(i, a) + bit(i, b), 2 * bit(j, a) + bit(j, b));
    }
  }
  return out;
}

inline const std::vector<std::string>& gate_names() {
  static const std::vector<std::string> names = {"iswap12", "cnot12", "swap12",
                                                 "iswap13", "cnot13", "swap13"};
  return names;
}

inline GateTarget gate_target(std::string_view name, int n_qubits) {
  if (n_qubits != 2 && n_qubits != 3)
    throw std::invalid_argument("gate targets exist for 2 or 3 qubits");
  if (name.size() < 3) throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
  const std::string_view base = name.substr(0, name.size() - 2);
  const std::string_view pair = name.substr(name.size() - 2);

  ComplexMatrix gate;
  if (base == "iswap")
    gate = iswap_matrix();
  else if (base == "cnot")
    gate = cnot_matrix();
  else if (base == "swap")
    gate = swap_matrix();
  else
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");

  std::pair<int, int> acting;
  if (pair == "12")
    acting = {1, 2};
  else if (pair == "13")
    acting = {1, 3};
  else
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
  if (acting.second > n_qubits)
    throw std::invalid_argument("gate '" + std::string(name) + "' requires 3 qubits");

  return {std::string(name), embed_two_qubit(gate, acting.first, acting.second, n_qubits), acting};
}

}  // namespace grape
