// grape: command-line front end.
//
// Exit codes: 0 success, 1 usage or input error, 2 threshold not reached,
// 3 self-check failure.

#include "grape/check.hpp"
#include "grape/config.hpp"
#include "grape/io.hpp"
#include "grape/search.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

namespace {

using namespace grape;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kBelowThreshold = 2;
constexpr int kCheckFailed = 3;

constexpr const char* kConfigEnv = "GRAPE_CONFIG";

struct Invocation {
  std::string config_path;
  std::map<std::string, std::string> overrides;
  int jobs = default_jobs();
  bool corrupt_baseline = false;
};

void add_common_options(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--config", inv.config_path,
                  std::string("config file (default: $") + kConfigEnv + ")");
  cmd->add_option("--jobs", inv.jobs, "worker threads")->check(CLI::PositiveNumber);
  for (const auto& key : config_keys())
    cmd->add_option_function<std::string>(
        "--" + key, [&inv, key](const std::string& v) { inv.overrides[key] = v; },
        "override config key '" + key + "'");
}

RunConfig resolve_config(const Invocation& inv) {
  RunConfig cfg;
  std::string path = inv.config_path;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv)) path = env;
  if (!path.empty()) {
    auto in = open_input(path);
    load_config(in, cfg);
  }
  for (const auto& [key, value] : inv.overrides) cfg.set(key, value);
  return cfg;
}

GateTarget require_gate(const RunConfig& cfg, const ControlModel& model) {
  if (cfg.gate.empty()) throw ConfigError("gate", "missing value");
  try {
    return gate_target(cfg.gate, model.n_qubits);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("gate", e.what());
  }
}

double require_T(const RunConfig& cfg) {
  if (!cfg.T) throw ConfigError("T", "missing value");
  return cfg.to_tau(*cfg.T);
}

template <class Fn>
void write_file(const std::string& path, Fn&& fn) {
  auto f = open_output(path);
  fn(f);
  std::cout << "wrote " << path << '\n';
}

Json run_header(const RunConfig& cfg, const char* command) {
  return {{"command", command},
          {"model", to_string(cfg.model)},
          {"gate", cfg.gate},
          {"J_MHz", cfg.J},
          {"delta_max_MHz", cfg.delta_max},
          {"omega_max_MHz", cfg.omega_max},
          {"M", cfg.M},
          {"threshold", cfg.effective_threshold()},
          {"bounds", cfg.effective_bounds()},
          {"envelope", cfg.effective_envelope()},
          {"rise_ns", cfg.rise_ns},
          {"gradient_mode", to_string(cfg.mode)}};
}

int cmd_optimize(const Invocation& inv) {
  const RunConfig cfg = resolve_config(inv);
  const ControlModel model = build_model(cfg.model, cfg.params());
  const GateTarget target = require_gate(cfg, model);
  const double T = require_T(cfg);
  const MultiStartProtocol protocol = cfg.protocol(inv.jobs);
  const MultiStartResult r = multistart(model, target, T, cfg.M, protocol, cfg.optimize_options());
  const double thr = cfg.effective_threshold();

  write_file(cfg.out + "_controls.csv", [&](std::ostream& os) { write_controls_csv(os, model, r.best.final_controls); });
  write_file(cfg.out + "_history.csv", [&](std::ostream& os) { write_history_csv(os, r.best.fidelity_history); });
  write_file(cfg.out + "_result.json", [&](std::ostream& os) {
    Json j = run_header(cfg, "optimize");
    j["protocol"] = to_json(protocol);
    j["result"] = to_json(r.best, thr);
    j["winner_candidate"] = r.best_candidate;
    j["attempts_used"] = r.attempts_used;
    j["audit"] = to_json(r.audit);
    write_json(os, j);
  });
  std::printf("%s on %s at T = %.4g/J (%.4g ns): F^2 = %.10f (1 - F^2 = %.3e), threshold %s\n",
              target.name.c_str(), to_string(cfg.model).c_str(), T, tau_to_ns(T, cfg.J), r.best.fidelity_sq,
              1.0 - r.best.fidelity_sq, r.best.fidelity_sq >= thr ? "reached" : "not reached");
  return r.best.fidelity_sq >= thr ? kOk : kBelowThreshold;
}

int cmd_sweep(const Invocation& inv) {
  const RunConfig cfg = resolve_config(inv);
  const ControlModel model = build_model(cfg.model, cfg.params());
  const GateTarget target = require_gate(cfg, model);
  SweepOptions sweep;
  sweep.T_min = cfg.to_tau(cfg.T_min);
  sweep.T_max = cfg.to_tau(cfg.T_max);
  sweep.resolution = cfg.to_tau(cfg.resolution);
  sweep.M = cfg.M;
  if (sweep.T_max < sweep.T_min) throw ConfigError("T_max", "duration range is empty");
  sweep.on_point = [](const SweepPoint& p) {
    std::printf("T = %.4f/J  best F^2 = %.10f  %s\n", p.T, p.best_fidelity, p.reached ? "reached" : "-");
    std::fflush(stdout);
  };
  const MultiStartProtocol protocol = cfg.protocol(inv.jobs);
  const SweepCurve curve = sweep_min_time(model, target, sweep, protocol, cfg.optimize_options());

  write_file(cfg.out + "_sweep.csv", [&](std::ostream& os) { write_sweep_csv(os, curve); });
  write_file(cfg.out + "_sweep.json", [&](std::ostream& os) {
    Json j = run_header(cfg, "sweep");
    j["protocol"] = to_json(protocol);
    j["curve"] = to_json(curve);
    write_json(os, j);
  });
  if (curve.minimal_time)
    std::printf("minimal_time = %.2f/J (%.4g ns)\n", *curve.minimal_time, tau_to_ns(*curve.minimal_time, cfg.J));
  else
    std::printf("minimal_time = none (threshold %.3g not reached)\n", cfg.effective_threshold());
  return curve.minimal_time ? kOk : kBelowThreshold;
}

int cmd_baseline(const Invocation& inv) {
  const RunConfig cfg = resolve_config(inv);
  if (cfg.gate.empty()) throw ConfigError("gate", "missing value");
  const SequenceModel sm = cfg.effective_sequence_model();
  const GateSequence seq =
      sequential_gate(cfg.gate, sm, {.J = cfg.J, .omega_max = cfg.omega_max, .corrupt = inv.corrupt_baseline});
  const double f = fidelity_sq(gate_target(cfg.gate, seq.n_qubits), seq.realized_unitary);
  write_file(cfg.out + "_steps.csv", [&](std::ostream& os) { write_sequence_csv(os, seq); });
  write_file(cfg.out + "_baseline.json", [&](std::ostream& os) {
    write_json(os, {{"command", "baseline"},
                    {"gate", seq.name},
                    {"sequence_model", sm == SequenceModel::Ideal ? "ideal" : "realistic"},
                    {"J_MHz", cfg.J},
                    {"omega_max_MHz", cfg.omega_max},
                    {"steps", seq.steps.size()},
                    {"total_time", seq.total_time},
                    {"total_time_ns", tau_to_ns(seq.total_time, cfg.J)},
                    {"fidelity_sq", f}});
  });
  std::printf("sequential %s (%s): %zu steps, T_seq = %.4g/J, F^2 = %.15f\n", seq.name.c_str(),
              sm == SequenceModel::Ideal ? "ideal" : "realistic", seq.steps.size(), seq.total_time, f);
  return kOk;
}

int cmd_entangle(const Invocation& inv) {
  RunConfig cfg = resolve_config(inv);
  if (cfg.gate.empty()) cfg.gate = "iswap13";
  const StateVector initial = basis_state(cfg.initial_state);
  EntanglementSeries series;
  int code = kOk;
  Json j = run_header(cfg, "entangle");
  j["source"] = cfg.source;
  j["initial_state"] = cfg.initial_state;
  if (cfg.source == "sequential") {
    const GateSequence seq = sequential_gate(cfg.gate, cfg.effective_sequence_model(),
                                             {.J = cfg.J, .omega_max = cfg.omega_max});
    series = entanglement_schedule(seq, initial, cfg.samples);
    j["T"] = seq.total_time;
  } else {
    const ControlModel model = build_model(cfg.model, cfg.params());
    if (model.n_qubits != 3) throw ConfigError("model", "entanglement needs a 3-qubit model");
    const GateTarget target = require_gate(cfg, model);
    ControlGrid controls;
    if (!cfg.controls.empty()) {
      auto in = open_input(cfg.controls);
      controls = read_controls_csv(in, model, require_T(cfg));
    } else {
      const MultiStartProtocol protocol = cfg.protocol(inv.jobs);
      const MultiStartResult r = multistart(model, target, require_T(cfg), cfg.M, protocol, cfg.optimize_options());
      controls = r.best.final_controls;
      j["protocol"] = to_json(protocol);
      j["seed"] = r.best.seed;
    }
    const double f = grid_fidelity(model, controls, target.matrix);
    j["T"] = controls.T;
    j["fidelity_sq"] = f;
    if (f < cfg.effective_threshold()) code = kBelowThreshold;
    series = optimized_entanglement(model, controls, initial, cfg.samples);
  }
  double peak12 = 0.0, peak23 = 0.0, peak_both = 0.0;
  for (const auto& s : series) {
    peak12 = std::max(peak12, s.e12);
    peak23 = std::max(peak23, s.e23);
    peak_both = std::max(peak_both, std::min(s.e12, s.e23));
  }
  j["samples"] = series.size();
  j["peak_E_N_12"] = peak12;
  j["peak_E_N_23"] = peak23;
  j["peak_min_pair"] = peak_both;
  j["final_E_N_12"] = series.back().e12;
  j["final_E_N_23"] = series.back().e23;
  write_file(cfg.out + "_negativity.csv", [&](std::ostream& os) { write_negativity_csv(os, series); });
  write_file(cfg.out + "_entangle.json", [&](std::ostream& os) { write_json(os, j); });
  std::printf("peak E_N(1,2) = %.4f, peak E_N(2,3) = %.4f, largest simultaneous = %.4f\n", peak12, peak23,
              peak_both);
  return code;
}

int cmd_check(const Invocation& inv) {
  const RunConfig cfg = resolve_config(inv);
  CheckOptions opt;
  opt.mode = cfg.mode;
  opt.M = cfg.M;
  opt.T = cfg.T ? cfg.to_tau(*cfg.T) : 1.0;
  opt.seed = cfg.seed;
  opt.corrupt_baseline = inv.corrupt_baseline;
  const auto outcomes = run_self_checks(opt);
  const CheckOutcome* first_failure = nullptr;
  for (const auto& o : outcomes) {
    std::printf("%-4s  %-40s  err %.3e  tol %.0e\n", o.passed ? "ok" : "FAIL", o.name.c_str(), o.value,
                o.tolerance);
    if (!o.passed && !first_failure) first_failure = &o;
  }
  if (first_failure) {
    std::fprintf(stderr, "check failed: %s\n", first_failure->name.c_str());
    return kCheckFailed;
  }
  std::printf("all %zu checks passed\n", outcomes.size());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GRAPE gate optimization for coupled superconducting qubits"};
  app.require_subcommand(1);
  Invocation inv;

  auto* optimize_cmd = app.add_subcommand("optimize", "multi-start optimization at one duration");
  auto* sweep_cmd = app.add_subcommand("sweep", "minimal-time sweep over a duration grid");
  auto* baseline_cmd = app.add_subcommand("baseline", "sequential iSWAP-based construction");
  auto* entangle_cmd = app.add_subcommand("entangle", "pair negativities along a 3-qubit gate");
  auto* check_cmd = app.add_subcommand("check", "gradient, unitarity and construction self-checks");
  for (auto* cmd : {optimize_cmd, sweep_cmd, baseline_cmd, entangle_cmd, check_cmd}) add_common_options(cmd, inv);
  for (auto* cmd : {baseline_cmd, check_cmd})
    cmd->add_flag("--corrupt-baseline", inv.corrupt_baseline)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*optimize_cmd) return cmd_optimize(inv);
    if (*sweep_cmd) return cmd_sweep(inv);
    if (*baseline_cmd) return cmd_baseline(inv);
    if (*entangle_cmd) return cmd_entangle(inv);
    if (*check_cmd) return cmd_check(inv);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConstructionError& e) {
    std::cerr << "construction check failed: " << e.what() << '\n';
    return kCheckFailed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
