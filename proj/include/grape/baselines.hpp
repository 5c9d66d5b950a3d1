#pragma once

// Sequential gate constructions from iSWAP evolutions and single-qubit
// rotations, with the time accounting of the sequential schemes.
//
// Idealized model: local rotations take no time. Realistic model: an x or y
// rotation by angle theta costs |theta| / (2 pi Omega_max), i.e. 0.25/Omega_max
// for 90 degrees; z rotations are detuning shifts and cost nothing.
//
// The local interleavings for CNOT (two iSWAPs) and SWAP (three iSWAPs) were
// found by exhaustive search over single-qubit Clifford layers written as
// Rz.Rx.Rz with x angles in {0, 90, 180}, minimizing the total x angle.

#include "grape/engine.hpp"
#include "grape/entanglement.hpp"
#include "grape/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace grape {

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class StepKind { CouplingEvolution, LocalRotation, JointRotation };

inline std::string to_string(StepKind k) {
  switch (k) {
    case StepKind::CouplingEvolution: return "coupling_evolution";
    case StepKind::LocalRotation: return "local_rotation";
    case StepKind::JointRotation: return "joint_rotation";
  }
  return "?";
}

inline char axis_char(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return 'x';
    case PauliAxis::Y: return 'y';
    case PauliAxis::Z: return 'z';
    default: return '?';
  }
}

enum class SequenceModel { Ideal, Realistic };

struct GateStep {
  StepKind kind{};
  std::vector<int> qubits;
  PauliAxis axis = PauliAxis::X;  // rotations only
  double angle_deg = 0.0;         // rotations only
  double duration = 0.0;          // units of 1/J
  ComplexMatrix generator;        // unitary = exp(-i generator * extent)
  double extent = 0.0;
  ComplexMatrix unitary;

  /// Unitary after the given fraction of the step has elapsed.
  ComplexMatrix partial(double fraction) const { return expm_hermitian(generator, extent * fraction); }
};

struct GateSequence {
  std::string name;
  SequenceModel model = SequenceModel::Ideal;
  int n_qubits = 2;
  std::vector<GateStep> steps;
  double total_time = 0.0;
  ComplexMatrix realized_unitary;
};

struct SequenceOptions {
  double J = 21.0;          // MHz
  double omega_max = 50.0;  // MHz
  bool corrupt = false;     // flips one local rotation; exercises the unitary check
};

namespace detail {

class SequenceBuilder {
 public:
  SequenceBuilder(int n, SequenceModel model, const SequenceOptions& opt)
      : n_(n), model_(model), opt_(opt) {}

  void coupling(int a, int b, double tau) {
    GateStep s;
    s.kind = StepKind::CouplingEvolution;
    s.qubits = {a, b};
    s.duration = tau;
    s.generator = kPi / 2.0 *
                  (embed_pauli(PauliAxis::X, a, n_) * embed_pauli(PauliAxis::X, b, n_) +
                   embed_pauli(PauliAxis::Y, a, n_) * embed_pauli(PauliAxis::Y, b, n_));
    s.extent = tau;
    push(std::move(s));
  }

  void iswap(int a, int b) { coupling(a, b, 0.5); }

  void rotate(int q, PauliAxis axis, double deg) {
    if (opt_.corrupt && !corrupted_ && axis != PauliAxis::Z) {
      deg = -deg;
      corrupted_ = true;
    }
    GateStep s;
    s.kind = StepKind::LocalRotation;
    s.qubits = {q};
    s.axis = axis;
    s.angle_deg = deg;
    s.generator = 0.5 * embed_pauli(axis, q, n_);
    s.extent = deg * kPi / 180.0;
    s.duration = rotation_cost(axis, deg);
    push(std::move(s));
  }

  void joint_x(int a, int b, double deg) {
    GateStep s;
    s.kind = StepKind::JointRotation;
    s.qubits = {a, b};
    s.axis = PauliAxis::X;
    s.angle_deg = deg;
    s.generator = 0.5 * (embed_pauli(PauliAxis::X, a, n_) + embed_pauli(PauliAxis::X, b, n_));
    s.extent = deg * kPi / 180.0;
    s.duration = rotation_cost(PauliAxis::X, deg);
    push(std::move(s));
  }

  // CNOT with control c and target t from two iSWAPs; x-cost 2 x 90 degrees.
  void cnot(int c, int t) {
    rotate(t, PauliAxis::Z, 90);
    iswap(c, t);
    rotate(c, PauliAxis::X, 90);
    iswap(c, t);
    rotate(c, PauliAxis::Z, 90);
    rotate(t, PauliAxis::Z, 90);
    rotate(t, PauliAxis::X, -90);
  }

  // SWAP from three iSWAPs; x-cost 3 x 90 degrees.
  void swap(int a, int b) {
    iswap(a, b);
    rotate(b, PauliAxis::X, 90);
    iswap(a, b);
    rotate(a, PauliAxis::X, 90);
    iswap(a, b);
    rotate(b, PauliAxis::X, 90);
  }

  GateSequence finish(std::string name) && {
    GateSequence seq;
    seq.name = std::move(name);
    seq.model = model_;
    seq.n_qubits = n_;
    seq.realized_unitary = ComplexMatrix::Identity(dim_for_qubits(n_), dim_for_qubits(n_));
    for (const auto& s : steps_) {
      seq.realized_unitary = s.unitary * seq.realized_unitary;
      seq.total_time += s.duration;
    }
    seq.steps = std::move(steps_);
    return seq;
  }

 private:
  double rotation_cost(PauliAxis axis, double deg) const {
    if (model_ == SequenceModel::Ideal || axis == PauliAxis::Z) return 0.0;
    return std::abs(deg) / 360.0 / opt_.omega_max * opt_.J;
  }

  void push(GateStep s) {
    s.unitary = expm_hermitian(s.generator, s.extent);
    steps_.push_back(std::move(s));
  }

  int n_;
  SequenceModel model_;
  SequenceOptions opt_;
  bool corrupted_ = false;
  std::vector<GateStep> steps_;
};

}  // namespace detail

inline GateSequence sequential_gate(std::string_view name, SequenceModel model,
                                    const SequenceOptions& options = {}) {
  if (!(options.J > 0.0) || !(options.omega_max > 0.0))
    throw std::invalid_argument("J and Omega_max must be positive");
  const GateTarget target = [&] {
    for (const auto& g : gate_names())
      if (g == name) return gate_target(name, name.ends_with("13") ? 3 : 2);
    throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
  }();
  const int n = static_cast<int>(qubits_for_dim(target.matrix.rows()));
  detail::SequenceBuilder b(n, model, options);

  if (name == "iswap12") {
    b.iswap(1, 2);
  } else if (name == "cnot12") {
    b.cnot(1, 2);
  } else if (name == "swap12") {
    b.swap(1, 2);
  } else if (name == "iswap13") {
    b.swap(1, 2);
    b.iswap(2, 3);
    b.swap(1, 2);
  } else if (name == "swap13") {
    b.swap(1, 2);
    b.swap(2, 3);
    b.swap(1, 2);
  } else if (name == "cnot13") {
    // iSWAP = SWAP . diag(1,-i,-i,1); the diagonal parts around CNOT_23 combine to Z1 Z2.
    b.iswap(1, 2);
    b.cnot(2, 3);
    b.iswap(1, 2);
    b.rotate(1, PauliAxis::Z, 180);
    b.rotate(2, PauliAxis::Z, 180);
  }

  GateSequence seq = std::move(b).finish(std::string(name));
  const double f = fidelity_sq(target.matrix, seq.realized_unitary);
  if (!(f >= 1.0 - 1e-9))
    throw ConstructionError("sequential " + std::string(name) +
                            " does not realize its target (F^2 = " + std::to_string(f) + ")");
  return seq;
}

// ---------------------------------------------------------------------------
// Joint-drive decomposition of a single-qubit x rotation:
//   R1x(2a) = R2z(-z) R12x(a) R2z(z) R12x(a)   with z = 180 degrees.

/// The right-hand product for given z and joint-x angles (degrees), two qubits.
inline ComplexMatrix decomposition_product(double z_deg, double x_deg) {
  detail::SequenceBuilder b(2, SequenceModel::Ideal, {});
  b.joint_x(1, 2, x_deg);
  b.rotate(2, PauliAxis::Z, z_deg);
  b.joint_x(1, 2, x_deg);
  b.rotate(2, PauliAxis::Z, -z_deg);
  return std::move(b).finish("decomposition").realized_unitary;
}

inline ComplexMatrix local_x_rotation(double deg) {
  return expm_hermitian(0.5 * embed_pauli(PauliAxis::X, 1, 2), deg * kPi / 180.0);
}

inline bool local_decomposition_check() {
  return fidelity_sq(local_x_rotation(90.0), decomposition_product(180.0, 45.0)) >= 1.0 - 1e-10;
}

// ---------------------------------------------------------------------------

/// Pair negativities while the sequence runs, sampled uniformly over [0, total_time].
/// Steps with zero duration act at their start time.
inline EntanglementSeries entanglement_schedule(const GateSequence& seq, const StateVector& initial,
                                                int samples) {
  if (seq.n_qubits != 3 || initial.size() != 8)
    throw std::invalid_argument("entanglement schedule needs a 3-qubit sequence and state");
  EntanglementSeries out;
  for (double t : sample_times(seq.total_time, samples)) {
    StateVector psi = initial;
    double start = 0.0;
    for (const auto& s : seq.steps) {
      const double end = start + s.duration;
      if (end <= t) {
        psi = s.unitary * psi;
      } else if (start < t) {
        psi = s.partial((t - start) / s.duration) * psi;
        break;
      } else {
        break;
      }
      start = end;
    }
    out.push_back(entanglement_at(t, psi));
  }
  return out;
}

}  // namespace grape
