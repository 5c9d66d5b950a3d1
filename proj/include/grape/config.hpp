#pragma once

// Flat `key = value` run configuration. Durations are in 1/J unless
// `units = ns`. Later assignments (and command-line overrides) win.

#include "grape/io.hpp"
#include "grape/models.hpp"
#include "grape/optimize.hpp"
#include "grape/search.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace grape {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class DurationUnits { InverseJ, Nanoseconds };

struct RunConfig {
  ModelKind model = ModelKind::Ideal2;
  std::string gate;
  double J = 21.0;            // MHz
  double delta_max = 1000.0;  // MHz
  double omega_max = 50.0;    // MHz
  DurationUnits units = DurationUnits::InverseJ;
  std::optional<double> T;
  double T_min = 0.5;
  double T_max = 1.5;
  double resolution = 0.05;
  int M = 256;
  std::optional<double> threshold;  // default per model kind
  std::optional<bool> bounds;       // default: on for realistic models
  std::optional<bool> envelope;     // default: follows bounds
  double rise_ns = 4.0;
  std::vector<Stage> stages = MultiStartProtocol{}.stages;
  std::uint64_t seed = 1;
  double init_scale = 0.2;
  int attempts = 1;
  GradientMode mode = GradientMode::Exact;
  std::string out = "grape_out";
  int samples = 281;
  std::string initial_state = "100";
  std::string source = "optimized";  // entangle: optimized | sequential
  std::string controls;              // entangle: optional controls CSV to analyse
  std::optional<SequenceModel> sequence_model;

  ModelParams params() const { return {.J = J, .delta_max = delta_max, .omega_max = omega_max}; }

  double to_tau(double v) const { return units == DurationUnits::Nanoseconds ? ns_to_tau(v, J) : v; }

  double effective_threshold() const { return threshold.value_or(default_threshold(model)); }
  bool effective_bounds() const { return bounds.value_or(is_realistic(model)); }
  bool effective_envelope() const { return envelope.value_or(effective_bounds()); }
  SequenceModel effective_sequence_model() const {
    return sequence_model.value_or(is_realistic(model) ? SequenceModel::Realistic : SequenceModel::Ideal);
  }

  OptimizeOptions optimize_options() const {
    OptimizeOptions o;
    o.threshold = effective_threshold();
    o.bounds_on = effective_bounds();
    o.envelope_on = effective_envelope();
    o.rise_ns = rise_ns;
    o.mode = mode;
    return o;
  }

  MultiStartProtocol protocol(int jobs) const {
    MultiStartProtocol p;
    p.stages = stages;
    p.seed = seed;
    p.init_scale = init_scale;
    p.attempts = attempts;
    p.jobs = jobs;
    return p;
  }

  void set(const std::string& key, const std::string& value);
};

namespace detail {

inline std::string trim(std::string s) {
  auto blank = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), blank));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), blank).base(), s.end());
  return s;
}

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline double config_double(const std::string& key, const std::string& v) {
  try {
    return parse_double(v, key);
  } catch (const FormatError&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

template <class Int>
Int config_int(const std::string& key, const std::string& v) {
  Int out{};
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

inline bool config_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(v);
  if (l == "on" || l == "true" || l == "yes" || l == "1") return true;
  if (l == "off" || l == "false" || l == "no" || l == "0") return false;
  throw ConfigError(key, "expected on/off, got '" + v + "'");
}

// "50x100,10x500,2x1000"
inline std::vector<Stage> config_stages(const std::string& key, const std::string& v) {
  std::vector<Stage> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto x = item.find('x');
    if (x == std::string::npos) throw ConfigError(key, "stage '" + item + "' is not POPULATIONxITERATIONS");
    out.push_back({config_int<int>(key, trim(item.substr(0, x))), config_int<int>(key, trim(item.substr(x + 1)))});
  }
  MultiStartProtocol p;
  p.stages = out;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(key, e.what());
  }
  return out;
}

}  // namespace detail

inline void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = detail::trim(raw_key);
  const std::string v = detail::trim(raw_value);
  if (v.empty()) throw ConfigError(key, "missing value");
  auto positive = [&](double x) {
    if (!(x > 0.0)) throw ConfigError(key, "must be positive");
    return x;
  };
  auto nonnegative = [&](double x) {
    if (!(x >= 0.0)) throw ConfigError(key, "must be nonnegative");
    return x;
  };
  using namespace detail;
  if (key == "model") {
    try {
      model = parse_model_kind(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  } else if (key == "gate") {
    if (std::find(gate_names().begin(), gate_names().end(), v) == gate_names().end())
      throw ConfigError(key, "unknown gate '" + v + "'");
    gate = v;
  } else if (key == "J") {
    J = positive(config_double(key, v));
  } else if (key == "delta_max") {
    delta_max = positive(config_double(key, v));
  } else if (key == "omega_max") {
    omega_max = positive(config_double(key, v));
  } else if (key == "units") {
    const std::string l = lower(v);
    if (l == "ns") units = DurationUnits::Nanoseconds;
    else if (l == "1/j" || l == "j" || l == "tau") units = DurationUnits::InverseJ;
    else throw ConfigError(key, "expected 1/J or ns, got '" + v + "'");
  } else if (key == "T") {
    T = nonnegative(config_double(key, v));
  } else if (key == "T_min") {
    T_min = nonnegative(config_double(key, v));
  } else if (key == "T_max") {
    T_max = nonnegative(config_double(key, v));
  } else if (key == "resolution") {
    resolution = positive(config_double(key, v));
  } else if (key == "M") {
    M = config_int<int>(key, v);
    if (M < 1) throw ConfigError(key, "must be at least 1");
  } else if (key == "threshold") {
    const double t = config_double(key, v);
    if (!(t > 0.0 && t <= 1.0)) throw ConfigError(key, "must lie in (0, 1]");
    threshold = t;
  } else if (key == "bounds") {
    bounds = config_bool(key, v);
  } else if (key == "envelope") {
    envelope = config_bool(key, v);
  } else if (key == "rise_ns") {
    rise_ns = nonnegative(config_double(key, v));
  } else if (key == "stages") {
    stages = config_stages(key, v);
  } else if (key == "seed") {
    seed = config_int<std::uint64_t>(key, v);
  } else if (key == "init_scale") {
    init_scale = nonnegative(config_double(key, v));
  } else if (key == "attempts") {
    attempts = config_int<int>(key, v);
    if (attempts < 1) throw ConfigError(key, "must be at least 1");
  } else if (key == "mode") {
    try {
      mode = parse_gradient_mode(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(key, e.what());
    }
  } else if (key == "out") {
    out = v;
  } else if (key == "samples") {
    samples = config_int<int>(key, v);
    if (samples < 2) throw ConfigError(key, "must be at least 2");
  } else if (key == "initial_state") {
    if (v.size() != 3 || v.find_first_not_of("01") != std::string::npos)
      throw ConfigError(key, "expected three binary digits, got '" + v + "'");
    initial_state = v;
  } else if (key == "source") {
    if (v != "optimized" && v != "sequential") throw ConfigError(key, "expected optimized or sequential");
    source = v;
  } else if (key == "controls") {
    controls = v;
  } else if (key == "sequence_model") {
    const std::string l = lower(v);
    if (l == "ideal") sequence_model = SequenceModel::Ideal;
    else if (l == "realistic") sequence_model = SequenceModel::Realistic;
    else throw ConfigError(key, "expected ideal or realistic");
  } else {
    throw ConfigError(key, "unknown key");
  }
}

/// Applies every `key = value` line of a config text to `cfg`.
inline void load_config(std::istream& is, RunConfig& cfg) {
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(detail::trim(line), "line " + std::to_string(number) + " is not 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(number) + " has an empty key");
    cfg.set(key, line.substr(eq + 1));
  }
}

/// Keys accepted by RunConfig::set, in documentation order.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "model",     "gate",      "J",          "delta_max", "omega_max", "units",   "T",
      "T_min",     "T_max",     "resolution", "M",         "threshold", "bounds",  "envelope",
      "rise_ns",   "stages",    "seed",       "init_scale", "attempts", "mode",    "out",
      "samples",   "initial_state", "source", "controls",  "sequence_model"};
  return keys;
}

}  // namespace grape
