#pragma once

// CSV and JSON export of controls, histories, sweeps, sequences and
// negativity series. Numbers are written with std::to_chars (17 significant
// digits, '.' separator) so files do not depend on the locale.

#include "grape/baselines.hpp"
#include "grape/search.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace grape {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s, std::string_view what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw FormatError("cannot parse " + std::string(what) + " from '" + std::string(s) + "'");
  return v;
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  return out;
}

inline std::string strip_cr(std::string s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Controls: interval,t_start,<channel labels>   (t_start in 1/J, amplitudes in MHz)

inline void write_controls_csv(std::ostream& os, const ControlModel& model, const ControlGrid& g) {
  if (g.K != model.channel_count()) throw std::invalid_argument("controls do not match the model channels");
  os << "interval,t_start";
  for (const auto& c : model.channels) os << ',' << c.label;
  os << '\n';
  for (int k = 0; k < g.M; ++k) {
    os << k << ',' << format_double(g.t_start(k));
    for (int j = 0; j < g.K; ++j) os << ',' << format_double(g.at(k, j));
    os << '\n';
  }
}

/// Reads a controls table. T is the pulse duration in 1/J.
inline ControlGrid read_controls_csv(std::istream& is, const ControlModel& model, double T) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("controls CSV is empty");
  const std::string header_line = detail::strip_cr(line);
  const auto header = detail::split_csv(header_line);
  if (header.size() != static_cast<std::size_t>(model.channel_count()) + 2 || header[0] != "interval" ||
      header[1] != "t_start")
    throw FormatError("controls CSV header does not match model " + to_string(model.kind));
  for (int j = 0; j < model.channel_count(); ++j)
    if (header[j + 2] != model.channels[j].label)
      throw FormatError("controls CSV column '" + std::string(header[j + 2]) + "' should be '" +
                        model.channels[j].label + "'");
  std::vector<double> amps;
  int rows = 0;
  while (std::getline(is, line)) {
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != header.size())
      throw FormatError("controls CSV row " + std::to_string(rows) + " has " + std::to_string(cells.size()) +
                        " cells");
    if (parse_double(cells[0], "interval index") != rows)
      throw FormatError("controls CSV intervals must be consecutive from 0");
    for (std::size_t c = 2; c < cells.size(); ++c) amps.push_back(parse_double(cells[c], "amplitude"));
    ++rows;
  }
  if (rows == 0) throw FormatError("controls CSV has no intervals");
  ControlGrid g(rows, model.channel_count(), T);
  g.amplitudes = std::move(amps);
  return g;
}

inline void write_history_csv(std::ostream& os, const std::vector<double>& history) {
  os << "iteration,fidelity_sq\n";
  for (std::size_t i = 0; i < history.size(); ++i) os << i + 1 << ',' << format_double(history[i]) << '\n';
}

inline void write_sweep_csv(std::ostream& os, const SweepCurve& curve) {
  os << "T,best_F2,reached_threshold\n";
  for (const auto& p : curve.points)
    os << format_double(p.T) << ',' << format_double(p.best_fidelity) << ',' << (p.reached ? 1 : 0) << '\n';
}

inline void write_negativity_csv(std::ostream& os, const EntanglementSeries& series) {
  os << "t,E_N_12,E_N_23\n";
  for (const auto& s : series)
    os << format_double(s.t) << ',' << format_double(s.e12) << ',' << format_double(s.e23) << '\n';
}

inline void write_sequence_csv(std::ostream& os, const GateSequence& seq) {
  os << "step,kind,qubits,axis,angle_deg,t_start,duration\n";
  double t = 0.0;
  for (std::size_t i = 0; i < seq.steps.size(); ++i) {
    const auto& s = seq.steps[i];
    std::string qubits;
    for (int q : s.qubits) qubits += (qubits.empty() ? "" : "-") + std::to_string(q);
    const bool rotation = s.kind != StepKind::CouplingEvolution;
    os << i << ',' << to_string(s.kind) << ',' << qubits << ',' << (rotation ? std::string(1, axis_char(s.axis)) : "")
       << ',' << (rotation ? format_double(s.angle_deg) : "") << ',' << format_double(t) << ','
       << format_double(s.duration) << '\n';
    t += s.duration;
  }
}

// ---------------------------------------------------------------------------
// JSON records

using Json = nlohmann::ordered_json;

inline Json to_json(const MultiStartProtocol& p) {
  Json stages = Json::array();
  for (const auto& s : p.stages) stages.push_back({{"population", s.population}, {"iterations", s.iterations}});
  return {{"stages", stages}, {"seed", p.seed}, {"init_scale", p.init_scale}, {"attempts", p.attempts}};
}

inline Json to_json(const std::vector<AuditRecord>& audit) {
  Json out = Json::array();
  for (const auto& a : audit)
    out.push_back({{"attempt", a.attempt},
                   {"stage", a.stage},
                   {"candidate", a.candidate},
                   {"seed", a.seed},
                   {"fidelity_sq", a.fidelity_sq},
                   {"iterations", a.iterations},
                   {"termination", to_string(a.termination)}});
  return out;
}

inline Json to_json(const OptimizationResult& r, double threshold) {
  return {{"gate", r.target},
          {"model", to_string(r.model)},
          {"J_MHz", r.J},
          {"T", r.final_controls.T},
          {"T_ns", tau_to_ns(r.final_controls.T, r.J)},
          {"M", r.final_controls.M},
          {"fidelity_sq", r.fidelity_sq},
          {"threshold", threshold},
          {"reached_threshold", r.fidelity_sq >= threshold},
          {"iterations", r.iterations},
          {"termination", to_string(r.termination)},
          {"seed", r.seed}};
}

inline Json to_json(const SweepCurve& c) {
  Json pts = Json::array();
  for (const auto& p : c.points)
    pts.push_back({{"T", p.T},
                   {"best_fidelity_sq", p.best_fidelity},
                   {"reached_threshold", p.reached},
                   {"seed", p.seed},
                   {"iterations", p.winner.iterations}});
  Json j = {{"threshold", c.threshold}, {"resolution", c.resolution}, {"points", pts}};
  j["minimal_time"] = c.minimal_time ? Json(*c.minimal_time) : Json(nullptr);
  return j;
}

inline void write_json(std::ostream& os, const Json& j) { os << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

inline std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return f;
}

}  // namespace grape
