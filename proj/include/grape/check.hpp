#pragma once

// Self-checks behind the `check` command: gradient against finite
// differences, propagator unitarity, sequential constructions and the
// joint-drive decomposition.

#include "grape/baselines.hpp"
#include "grape/engine.hpp"
#include "grape/search.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace grape {

struct CheckOutcome {
  std::string name;
  bool passed;
  double value;      // measured error
  double tolerance;
};

struct CheckOptions {
  GradientMode mode = GradientMode::Exact;
  int M = 256;
  double T = 1.0;          // 1/J
  int spots = 5;           // gradient entries compared per model
  std::uint64_t seed = 1;
  bool corrupt_baseline = false;
};

/// Five-point derivative of F^2 in one amplitude (step in units of J), returned per MHz.
inline double finite_difference(const ControlModel& model, const ControlGrid& g,
                                const ComplexMatrix& target, int k, int j, double step = 1e-4) {
  ControlGrid p = g;
  const double h = step * model.J;
  auto at = [&](double offset) {
    p.at(k, j) = g.at(k, j) + offset;
    return grid_fidelity(model, p, target);
  };
  return (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
}

inline double gradient_tolerance(GradientMode mode) { return mode == GradientMode::Exact ? 1e-6 : 1e-3; }

inline std::vector<CheckOutcome> run_self_checks(const CheckOptions& opt) {
  std::vector<CheckOutcome> out;
  std::mt19937_64 rng(opt.seed);
  for (auto kind : {ModelKind::Ideal2, ModelKind::Ideal3, ModelKind::Real2, ModelKind::Real3}) {
    const ControlModel m = build_model(kind);
    const GateTarget t = gate_target(m.n_qubits == 2 ? "cnot12" : "iswap13", m.n_qubits);
    const ControlGrid g = random_initial_controls(m, opt.T, opt.M, 0.2, rng());

    const auto grad = gradient(m, g, t, opt.mode);
    double scale = 0.0;
    for (double v : grad) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (int s = 0; s < opt.spots; ++s) {
      const int k = static_cast<int>(rng() % static_cast<std::uint64_t>(g.M));
      const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(g.K));
      const double fd = finite_difference(m, g, t.matrix, k, j);
      worst = std::max(worst, std::abs(grad[k * g.K + j] - fd) / std::max(std::abs(fd), 1e-3 * scale));
    }
    const double tol = gradient_tolerance(opt.mode);
    out.push_back({"gradient " + to_string(kind) + " (" + to_string(opt.mode) + ")", worst < tol, worst, tol});

    const double u_err = unitarity_error(propagate(m, g).total);
    out.push_back({"unitarity " + to_string(kind), u_err < 1e-10, u_err, 1e-10});
  }

  for (auto model : {SequenceModel::Ideal, SequenceModel::Realistic})
    for (const auto& name : gate_names()) {
      const std::string label =
          "baseline " + name + (model == SequenceModel::Ideal ? " ideal" : " realistic");
      try {
        const GateSequence s = sequential_gate(name, model, {.corrupt = opt.corrupt_baseline});
        const double err = 1.0 - fidelity_sq(gate_target(name, s.n_qubits), s.realized_unitary);
        out.push_back({label, err < 1e-9, err, 1e-9});
      } catch (const ConstructionError&) {
        out.push_back({label, false, 1.0, 1e-9});
      }
    }

  const double d_err = 1.0 - fidelity_sq(local_x_rotation(90.0), decomposition_product(180.0, 45.0));
  out.push_back({"decomposition of local x(90)", d_err < 1e-10, d_err, 1e-10});
  return out;
}

}  // namespace grape
