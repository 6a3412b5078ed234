#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "floquet_pt/dynamics.hpp"
#include "floquet_pt/presets.hpp"

namespace floquet_pt {

using Json = nlohmann::ordered_json;

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exit status categories of the command front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

/// 17 significant digits, scientific notation: enough to round-trip any
/// double, and byte-stable for a fixed input.
inline std::string format_sci(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

inline void write_text_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  try {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
      out << content;
      if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
  } catch (const fs::filesystem_error& e) {
    throw IoError(e.what());
  }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct SweepConfig {
  std::string x_param = "omega";
  std::string y_param = "gamma0";
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  int x_count = 400, y_count = 400;
};

struct EpConfig {
  std::string param = "gamma0";
  std::string boundary = "plus_one";  // or "minus_one"
  double bracket_lo = 0.0, bracket_hi = 1.0;
};

struct DynamicsConfig {
  int periods = 200;
  int substeps_per_segment = 8;
  int discard = 100;
  double psi0_a_re = 1.0, psi0_a_im = 0.0;
  double psi0_b_re = 0.0, psi0_b_im = 0.0;
};

struct HfCompareConfig {
  double t_start = 0.4;
  int halvings = 10;
};

struct ResonancesConfig {
  int k_max = 6;
};

struct RunConfig {
  DriveProtocol protocol;
  bool protocol_is_static = false;
  double ep_tol = kDefaultEpTol;
  double root_tol = 1e-10;
  std::string out_dir = ".";
  std::optional<SweepConfig> sweep;
  std::optional<EpConfig> ep;
  DynamicsConfig dynamics;
  HfCompareConfig hfcompare;
  ResonancesConfig resonances;
  std::string preset_name;
};

inline ParamAxis axis_from_name(const std::string& name) {
  if (name == "delta0") return single_axis(ProtocolParam::Delta0);
  if (name == "delta1") return single_axis(ProtocolParam::Delta1);
  if (name == "gamma0") return single_axis(ProtocolParam::Gamma0);
  if (name == "gamma1") return single_axis(ProtocolParam::Gamma1);
  if (name == "t0") return single_axis(ProtocolParam::Duration0);
  if (name == "t1") return single_axis(ProtocolParam::Duration1);
  if (name == "omega") return single_axis(ProtocolParam::Omega);
  if (name == "gamma_antisym") {
    ParamAxis a;
    a.assignments = {{ProtocolParam::Gamma0, 1.0, 0.0}, {ProtocolParam::Gamma1, -1.0, 0.0}};
    a.name = name;
    return a;
  }
  if (name == "gamma_common") {
    ParamAxis a;
    a.assignments = {{ProtocolParam::Gamma0, 1.0, 0.0}, {ProtocolParam::Gamma1, 1.0, 0.0}};
    a.name = name;
    return a;
  }
  throw ConfigError("unknown sweep/ray parameter '" + name + "'");
}

namespace detail {

inline void reject_unknown_keys(const Json& obj, const char* block,
                                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError(std::string("unknown key '") + item.key() + "' in " + block);
  }
}

inline double require_number(const Json& obj, const char* block, const std::string& key) {
  if (!obj.contains(key))
    throw ConfigError(std::string("missing required key '") + key + "' in " + block);
  if (!obj[key].is_number())
    throw ConfigError(std::string("key '") + key + "' in " + block + " must be a number");
  return obj[key].get<double>();
}

inline double number_or(const Json& obj, const char* block, const std::string& key,
                        double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw ConfigError(std::string("key '") + key + "' in " + block + " must be a number");
  return obj[key].get<double>();
}

inline int int_or(const Json& obj, const char* block, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ConfigError(std::string("key '") + key + "' in " + block + " must be an integer");
  return obj[key].get<int>();
}

inline std::string string_or(const Json& obj, const char* block, const std::string& key,
                             const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string())
    throw ConfigError(std::string("key '") + key + "' in " + block + " must be a string");
  return obj[key].get<std::string>();
}

}  // namespace detail

/// Parses and validates a full configuration document. Unknown keys are
/// rejected by name; the two time conventions (t0/t1 vs omega/t0_fraction)
/// are mutually exclusive.
inline RunConfig parse_config(const Json& doc) {
  using detail::int_or;
  using detail::number_or;
  using detail::reject_unknown_keys;
  using detail::require_number;
  using detail::string_or;

  if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
  reject_unknown_keys(doc, "config", {"protocol", "tolerances", "sweep", "ep", "dynamics",
                                      "hfcompare", "resonances", "out", "preset"});

  RunConfig cfg;
  cfg.preset_name = string_or(doc, "config", "preset", "");

  if (!doc.contains("protocol")) throw ConfigError("missing required block 'protocol'");
  const Json& proto = doc["protocol"];
  reject_unknown_keys(proto, "protocol", {"delta0", "delta1", "gamma0", "gamma1", "t0", "t1",
                                          "omega", "t0_fraction"});
  const double delta0 = require_number(proto, "protocol", "delta0");
  const double delta1 = require_number(proto, "protocol", "delta1");
  const double gamma0 = require_number(proto, "protocol", "gamma0");
  const double gamma1 = require_number(proto, "protocol", "gamma1");

  const bool has_durations = proto.contains("t0") || proto.contains("t1");
  const bool has_omega = proto.contains("omega") || proto.contains("t0_fraction");
  if (has_durations && has_omega)
    throw ConfigError("protocol: give either t0/t1 or omega/t0_fraction, not both");
  try {
    if (has_durations) {
      const double t0 = require_number(proto, "protocol", "t0");
      const double t1 = require_number(proto, "protocol", "t1");
      cfg.protocol = validate(DriveProtocol{{delta0, gamma0, t0}, {delta1, gamma1, t1}});
    } else if (has_omega) {
      const double omega = require_number(proto, "protocol", "omega");
      const double fraction = number_or(proto, "protocol", "t0_fraction", 0.5);
      cfg.protocol = protocol_from_omega(delta0, delta1, gamma0, gamma1, omega, fraction);
    } else {
      throw ConfigError("protocol: missing time convention (t0/t1 or omega/t0_fraction)");
    }
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  cfg.protocol_is_static = is_static(cfg.protocol);

  if (doc.contains("tolerances")) {
    const Json& tol = doc["tolerances"];
    reject_unknown_keys(tol, "tolerances", {"ep_tol", "root_tol"});
    cfg.ep_tol = number_or(tol, "tolerances", "ep_tol", cfg.ep_tol);
    cfg.root_tol = number_or(tol, "tolerances", "root_tol", cfg.root_tol);
    if (!(cfg.ep_tol > 0.0) || !(cfg.root_tol > 0.0))
      throw ConfigError("tolerances must be positive");
  }

  cfg.out_dir = string_or(doc, "config", "out", ".");

  if (doc.contains("sweep")) {
    const Json& sw = doc["sweep"];
    reject_unknown_keys(sw, "sweep", {"x_param", "y_param", "x_min", "x_max", "x_count",
                                      "y_min", "y_max", "y_count"});
    SweepConfig s;
    s.x_param = string_or(sw, "sweep", "x_param", s.x_param);
    s.y_param = string_or(sw, "sweep", "y_param", s.y_param);
    axis_from_name(s.x_param);  // early name validation
    axis_from_name(s.y_param);
    if (s.x_param == s.y_param)
      throw ConfigError("sweep: x_param and y_param must be distinct");
    s.x_min = require_number(sw, "sweep", "x_min");
    s.x_max = require_number(sw, "sweep", "x_max");
    s.y_min = require_number(sw, "sweep", "y_min");
    s.y_max = require_number(sw, "sweep", "y_max");
    s.x_count = int_or(sw, "sweep", "x_count", s.x_count);
    s.y_count = int_or(sw, "sweep", "y_count", s.y_count);
    if (s.x_count < 2 || s.y_count < 2)
      throw ConfigError("sweep: need at least 2 points per axis");
    cfg.sweep = s;
  }

  if (doc.contains("ep")) {
    const Json& ep = doc["ep"];
    reject_unknown_keys(ep, "ep", {"param", "boundary", "bracket_lo", "bracket_hi"});
    EpConfig e;
    e.param = string_or(ep, "ep", "param", e.param);
    axis_from_name(e.param);
    e.boundary = string_or(ep, "ep", "boundary", e.boundary);
    if (e.boundary != "plus_one" && e.boundary != "minus_one")
      throw ConfigError("ep: boundary must be 'plus_one' or 'minus_one'");
    e.bracket_lo = require_number(ep, "ep", "bracket_lo");
    e.bracket_hi = require_number(ep, "ep", "bracket_hi");
    cfg.ep = e;
  }

  if (doc.contains("dynamics")) {
    const Json& dy = doc["dynamics"];
    reject_unknown_keys(dy, "dynamics", {"periods", "substeps_per_segment", "discard",
                                         "psi0_a_re", "psi0_a_im", "psi0_b_re", "psi0_b_im"});
    cfg.dynamics.periods = int_or(dy, "dynamics", "periods", cfg.dynamics.periods);
    cfg.dynamics.substeps_per_segment =
        int_or(dy, "dynamics", "substeps_per_segment", cfg.dynamics.substeps_per_segment);
    cfg.dynamics.discard = int_or(dy, "dynamics", "discard", cfg.dynamics.discard);
    cfg.dynamics.psi0_a_re = number_or(dy, "dynamics", "psi0_a_re", cfg.dynamics.psi0_a_re);
    cfg.dynamics.psi0_a_im = number_or(dy, "dynamics", "psi0_a_im", cfg.dynamics.psi0_a_im);
    cfg.dynamics.psi0_b_re = number_or(dy, "dynamics", "psi0_b_re", cfg.dynamics.psi0_b_re);
    cfg.dynamics.psi0_b_im = number_or(dy, "dynamics", "psi0_b_im", cfg.dynamics.psi0_b_im);
  }

  if (doc.contains("hfcompare")) {
    const Json& hf = doc["hfcompare"];
    reject_unknown_keys(hf, "hfcompare", {"t_start", "halvings"});
    cfg.hfcompare.t_start = number_or(hf, "hfcompare", "t_start", cfg.hfcompare.t_start);
    cfg.hfcompare.halvings = int_or(hf, "hfcompare", "halvings", cfg.hfcompare.halvings);
    if (!(cfg.hfcompare.t_start > 0.0)) throw ConfigError("hfcompare: t_start must be > 0");
    if (cfg.hfcompare.halvings < 1) throw ConfigError("hfcompare: halvings must be >= 1");
  }

  if (doc.contains("resonances")) {
    const Json& rs = doc["resonances"];
    reject_unknown_keys(rs, "resonances", {"k_max"});
    cfg.resonances.k_max = int_or(rs, "resonances", "k_max", cfg.resonances.k_max);
    if (cfg.resonances.k_max < 1) throw ConfigError("resonances: k_max must be >= 1");
  }

  return cfg;
}

inline RunConfig parse_config(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return parse_config(doc);
}

/// Configuration document equivalent to a figure preset: caption-bound
/// protocol parameters plus the matching sweep block.
inline Json preset_config(const FigurePreset& preset) {
  const double period = preset.base.seg0.duration + preset.base.seg1.duration;
  Json doc;
  doc["preset"] = preset.name;
  doc["protocol"] = {{"delta0", preset.base.seg0.delta},
                     {"delta1", preset.base.seg1.delta},
                     {"gamma0", preset.base.seg0.gamma},
                     {"gamma1", preset.base.seg1.gamma},
                     {"omega", 2.0 * std::numbers::pi / period},
                     {"t0_fraction", preset.base.seg0.duration / period}};
  doc["sweep"] = {{"x_param", preset.x_axis.name}, {"y_param", preset.y_axis.name},
                  {"x_min", preset.x_min},         {"x_max", preset.x_max},
                  {"x_count", preset.x_count},     {"y_min", preset.y_min},
                  {"y_max", preset.y_max},         {"y_count", preset.y_count}};
  return doc;
}

// ---------------------------------------------------------------------------
// Result serialization
// ---------------------------------------------------------------------------

inline Json protocol_json(const DriveProtocol& p) {
  return Json{{"delta0", p.seg0.delta},   {"delta1", p.seg1.delta},
              {"gamma0", p.seg0.gamma},   {"gamma1", p.seg1.gamma},
              {"t0", p.seg0.duration},    {"t1", p.seg1.duration}};
}

inline Json derived_json(const DriveProtocol& p) {
  const DerivedQuantities d = derived_quantities(p);
  return Json{{"period", d.period},
              {"omega", d.omega},
              {"delta_eff", d.delta_eff},
              {"gamma_eff", d.gamma_eff},
              {"static", is_static(p)}};
}

inline Json complex_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

inline Json classification_json(const DriveProtocol& p, double ep_tol) {
  const MonodromyResult mono = monodromy(p);
  const DerivedQuantities d = derived_quantities(p);
  const QuasiEnergies qe = quasi_energies(mono.pi_value, d.omega, ep_tol);
  const EffectiveHamiltonian eff = effective_hamiltonian(p, ep_tol);
  Json j;
  j["protocol"] = protocol_json(p);
  j["derived"] = derived_json(p);
  j["pi"] = mono.pi_value;
  j["trace_imag_residual"] = mono.trace_imag_residual;
  j["label"] = phase_name(qe.label.phase);
  j["n"] = qe.label.n;
  j["margin"] = qe.label.margin;
  j["quasi_energies"] = {{"e_plus", complex_json(qe.e_plus)},
                         {"e_minus", complex_json(qe.e_minus)},
                         {"h", complex_json(qe.h_value)}};
  j["effective_hamiltonian"] = {{"j", eff.j},
                                {"gamma_y", eff.gamma_y},
                                {"gamma_z", eff.gamma_z},
                                {"n", eff.n},
                                {"well_conditioned", eff.well_conditioned}};
  return j;
}

inline std::string sweep_csv(const std::vector<SweepRecord>& records) {
  std::string out = "x,y,pi,label,n,re_e_plus,im_e_plus\n";
  for (const SweepRecord& r : records) {
    out += format_sci(r.x);
    out += ',';
    out += format_sci(r.y);
    out += ',';
    if (r.valid) {
      out += format_sci(r.pi_value);
      out += ',';
      out += phase_name(r.label.phase);
      out += ',';
      out += std::to_string(r.label.n);
      out += ',';
      out += format_sci(r.re_quasi);
      out += ',';
      out += format_sci(r.im_quasi);
    } else {
      out += "nan,Invalid,-1,nan,nan";
    }
    out += '\n';
  }
  return out;
}

/// Same rows, space-delimited, with a blank line between y-blocks so gnuplot
/// `splot ... with pm3d` ingests it directly.
inline std::string sweep_dat(const std::vector<SweepRecord>& records, int x_count) {
  std::string out;
  int col = 0;
  for (const SweepRecord& r : records) {
    out += format_sci(r.x);
    out += ' ';
    out += format_sci(r.y);
    out += ' ';
    if (r.valid) {
      out += format_sci(r.pi_value);
      out += ' ';
      out += phase_name(r.label.phase);
      out += ' ';
      out += std::to_string(r.label.n);
      out += ' ';
      out += format_sci(r.re_quasi);
      out += ' ';
      out += format_sci(r.im_quasi);
    } else {
      out += "nan Invalid -1 nan nan";
    }
    out += '\n';
    if (++col == x_count) {
      out += '\n';
      col = 0;
    }
  }
  return out;
}

inline Json sweep_summary_json(const SweepGrid& grid, const std::vector<SweepRecord>& records) {
  size_t n_sym = 0, n_b0 = 0, n_b1 = 0, n_ep = 0, n_invalid = 0;
  for (const SweepRecord& r : records) {
    if (!r.valid) {
      ++n_invalid;
      continue;
    }
    switch (r.label.phase) {
      case Phase::PTSymmetric: ++n_sym; break;
      case Phase::BrokenN0: ++n_b0; break;
      case Phase::BrokenN1: ++n_b1; break;
      case Phase::ExceptionalPoint: ++n_ep; break;
    }
  }
  // Boundary crossings: label changes between horizontal neighbours, per row.
  Json crossings = Json::array();
  for (int iy = 0; iy < grid.y_count; ++iy) {
    int c = 0;
    for (int ix = 1; ix < grid.x_count; ++ix) {
      const SweepRecord& a = records[static_cast<size_t>(iy) * grid.x_count + ix - 1];
      const SweepRecord& b = records[static_cast<size_t>(iy) * grid.x_count + ix];
      if (a.valid && b.valid && a.label.phase != b.label.phase) ++c;
    }
    crossings.push_back(c);
  }
  Json j;
  j["x_param"] = grid.x_axis.name;
  j["y_param"] = grid.y_axis.name;
  j["x_count"] = grid.x_count;
  j["y_count"] = grid.y_count;
  j["counts"] = {{"PTSymmetric", n_sym},
                 {"BrokenN0", n_b0},
                 {"BrokenN1", n_b1},
                 {"ExceptionalPoint", n_ep},
                 {"Invalid", n_invalid}};
  j["lobes"] = {{"BrokenN0", count_connected_regions(records, grid.x_count, Phase::BrokenN0)},
                {"BrokenN1", count_connected_regions(records, grid.x_count, Phase::BrokenN1)}};
  j["row_boundary_crossings"] = crossings;
  return j;
}

// ---------------------------------------------------------------------------
// Command front end
// ---------------------------------------------------------------------------

enum class Command { Classify, Quasi, Sweep, Ep, Dynamics, HfCompare, Resonances };

inline std::optional<Command> command_from_name(const std::string& name) {
  if (name == "classify") return Command::Classify;
  if (name == "quasi") return Command::Quasi;
  if (name == "sweep") return Command::Sweep;
  if (name == "ep") return Command::Ep;
  if (name == "dynamics") return Command::Dynamics;
  if (name == "hfcompare") return Command::HfCompare;
  if (name == "resonances") return Command::Resonances;
  return std::nullopt;
}

namespace detail {

inline std::filesystem::path out_path(const RunConfig& cfg, const std::string& file) {
  return std::filesystem::path(cfg.out_dir) / file;
}

inline void run_classify(const RunConfig& cfg, std::ostream& os) {
  const Json j = classification_json(cfg.protocol, cfg.ep_tol);
  os << "Pi=" << format_sci(j["pi"].get<double>()) << " label=" << j["label"].get<std::string>()
     << " n=" << j["n"].get<int>()
     << " E+=(" << format_sci(j["quasi_energies"]["e_plus"]["re"].get<double>()) << ","
     << format_sci(j["quasi_energies"]["e_plus"]["im"].get<double>()) << ")"
     << " E-=(" << format_sci(j["quasi_energies"]["e_minus"]["re"].get<double>()) << ","
     << format_sci(j["quasi_energies"]["e_minus"]["im"].get<double>()) << ")";
  if (cfg.protocol_is_static) os << " [static drive]";
  os << "\n";
  Json doc;
  doc["command"] = "classify";
  doc.update(j);
  write_text_atomic(out_path(cfg, "classify_summary.json"), doc.dump(2) + "\n");
}

inline void run_quasi(const RunConfig& cfg, std::ostream& os) {
  const Json j = classification_json(cfg.protocol, cfg.ep_tol);
  const Json& qe = j["quasi_energies"];
  os << "h=(" << format_sci(qe["h"]["re"].get<double>()) << ","
     << format_sci(qe["h"]["im"].get<double>()) << ")"
     << " E+=(" << format_sci(qe["e_plus"]["re"].get<double>()) << ","
     << format_sci(qe["e_plus"]["im"].get<double>()) << ")"
     << " E-=(" << format_sci(qe["e_minus"]["re"].get<double>()) << ","
     << format_sci(qe["e_minus"]["im"].get<double>()) << ")"
     << " label=" << j["label"].get<std::string>() << " n=" << j["n"].get<int>() << "\n"
     << "full ladder: E +- l*omega, integer l (principal branch reported)\n";
  Json doc;
  doc["command"] = "quasi";
  doc.update(j);
  write_text_atomic(out_path(cfg, "quasi_summary.json"), doc.dump(2) + "\n");
}

inline void run_sweep(const RunConfig& cfg, std::ostream& os) {
  if (!cfg.sweep) throw ConfigError("sweep command requires a 'sweep' block");
  const SweepConfig& sc = *cfg.sweep;
  SweepGrid grid;
  grid.base = cfg.protocol;
  grid.x_axis = axis_from_name(sc.x_param);
  grid.y_axis = axis_from_name(sc.y_param);
  grid.x_min = sc.x_min;
  grid.x_max = sc.x_max;
  grid.y_min = sc.y_min;
  grid.y_max = sc.y_max;
  grid.x_count = sc.x_count;
  grid.y_count = sc.y_count;
  grid.ep_tol = cfg.ep_tol;

  const std::vector<SweepRecord> records = sweep(grid);
  write_text_atomic(out_path(cfg, "sweep.csv"), sweep_csv(records));
  write_text_atomic(out_path(cfg, "sweep.dat"), sweep_dat(records, grid.x_count));

  Json doc;
  doc["command"] = "sweep";
  if (!cfg.preset_name.empty()) doc["preset"] = cfg.preset_name;
  doc["protocol"] = protocol_json(cfg.protocol);
  doc.update(sweep_summary_json(grid, records));
  write_text_atomic(out_path(cfg, "sweep_summary.json"), doc.dump(2) + "\n");

  os << "sweep: " << records.size() << " points -> " << out_path(cfg, "sweep.csv").string()
     << " (lobes n0=" << doc["lobes"]["BrokenN0"].get<int>()
     << ", n1=" << doc["lobes"]["BrokenN1"].get<int>() << ")\n";
}

inline void run_ep(const RunConfig& cfg, std::ostream& os) {
  if (!cfg.ep) throw ConfigError("ep command requires an 'ep' block");
  const EpConfig& ec = *cfg.ep;
  const EpBoundary boundary =
      ec.boundary == "plus_one" ? EpBoundary::PlusOne : EpBoundary::MinusOne;
  const EpLocation loc = find_ep(cfg.protocol, axis_from_name(ec.param), boundary,
                                 ec.bracket_lo, ec.bracket_hi, cfg.root_tol);
  os << "ep: " << ec.param << "=" << format_sci(loc.ray_parameter)
     << " Pi=" << format_sci(loc.pi_at_root) << " residual=" << format_sci(loc.residual)
     << "\n";
  Json doc;
  doc["command"] = "ep";
  doc["protocol"] = protocol_json(cfg.protocol);
  doc["param"] = ec.param;
  doc["boundary"] = ec.boundary;
  doc["bracket"] = {ec.bracket_lo, ec.bracket_hi};
  doc["ray_parameter"] = loc.ray_parameter;
  doc["pi_at_root"] = loc.pi_at_root;
  doc["residual"] = loc.residual;
  write_text_atomic(out_path(cfg, "ep_summary.json"), doc.dump(2) + "\n");
}

inline void run_dynamics(const RunConfig& cfg, std::ostream& os) {
  const DynamicsConfig& dc = cfg.dynamics;
  const StateVector psi0{Complex{dc.psi0_a_re, dc.psi0_a_im},
                         Complex{dc.psi0_b_re, dc.psi0_b_im}};
  const Trajectory traj =
      propagate_periods(cfg.protocol, psi0, dc.periods, dc.substeps_per_segment);

  std::string csv = "time,norm,re_a,im_a,re_b,im_b\n";
  for (size_t i = 0; i < traj.times.size(); ++i) {
    csv += format_sci(traj.times[i]);
    csv += ',';
    csv += format_sci(traj.norms[i]);
    csv += ',';
    csv += format_sci(traj.states[i].a.real());
    csv += ',';
    csv += format_sci(traj.states[i].a.imag());
    csv += ',';
    csv += format_sci(traj.states[i].b.real());
    csv += ',';
    csv += format_sci(traj.states[i].b.imag());
    csv += '\n';
  }
  write_text_atomic(out_path(cfg, "trajectory.csv"), csv);

  const MonodromyResult mono = monodromy(cfg.protocol);
  const DerivedQuantities d = derived_quantities(cfg.protocol);
  const QuasiEnergies qe = quasi_energies(mono.pi_value, d.omega, cfg.ep_tol);

  Json doc;
  doc["command"] = "dynamics";
  doc["protocol"] = protocol_json(cfg.protocol);
  doc["periods"] = dc.periods;
  doc["substeps_per_segment"] = dc.substeps_per_segment;
  doc["truncated"] = traj.truncated;
  doc["pi"] = mono.pi_value;
  doc["label"] = phase_name(qe.label.phase);
  doc["expected_rate"] = 2.0 * std::abs(qe.e_plus.imag());
  const int n = static_cast<int>(traj.times.size());
  if (!traj.truncated && n > dc.discard + 10) {
    const double rate = growth_rate(traj, dc.discard);
    doc["growth_rate"] = rate;
    doc["discard"] = dc.discard;
    os << "dynamics: growth_rate=" << format_sci(rate)
       << " expected=" << format_sci(doc["expected_rate"].get<double>()) << "\n";
  } else {
    doc["growth_rate"] = nullptr;
    os << "dynamics: trajectory " << (traj.truncated ? "truncated (norm overflow)" : "too short")
       << ", growth rate not fitted\n";
  }
  write_text_atomic(out_path(cfg, "dynamics_summary.json"), doc.dump(2) + "\n");
}

inline void run_hfcompare(const RunConfig& cfg, std::ostream& os) {
  const DriveProtocol& base = cfg.protocol;
  const double frac = base.seg0.duration / (base.seg0.duration + base.seg1.duration);

  std::string csv = "period,pi_exact,pi_hf,abs_diff\n";
  os << "period          |Pi_exact - Pi_hf|   ratio_vs_previous\n";
  Json rows = Json::array();
  double prev_diff = 0.0;
  double t = cfg.hfcompare.t_start;
  for (int i = 0; i < cfg.hfcompare.halvings; ++i, t *= 0.5) {
    DriveProtocol p = base;
    p.seg0.duration = frac * t;
    p.seg1.duration = (1.0 - frac) * t;
    const double exact = pi_closed_form(p);
    const double approx = hf_pi_approx(p);
    const double diff = std::abs(exact - approx);
    csv += format_sci(t);
    csv += ',';
    csv += format_sci(exact);
    csv += ',';
    csv += format_sci(approx);
    csv += ',';
    csv += format_sci(diff);
    csv += '\n';
    os << format_sci(t) << "  " << format_sci(diff);
    if (i > 0 && diff > 0.0) os << "  " << format_sci(prev_diff / diff);
    os << "\n";
    rows.push_back(Json{{"period", t}, {"pi_exact", exact}, {"pi_hf", approx}, {"diff", diff}});
    prev_diff = diff;
  }
  write_text_atomic(out_path(cfg, "hfcompare.csv"), csv);
  Json doc;
  doc["command"] = "hfcompare";
  doc["protocol"] = protocol_json(cfg.protocol);
  doc["rows"] = rows;
  write_text_atomic(out_path(cfg, "hfcompare_summary.json"), doc.dump(2) + "\n");
}

inline void run_resonances(const RunConfig& cfg, std::ostream& os) {
  const auto predictions = predict_resonances(cfg.protocol, cfg.resonances.k_max);
  Json rows = Json::array();
  if (predictions.empty())
    os << "resonances: delta_eff = 0, no resonance condition applies\n";
  for (const ResonancePrediction& r : predictions) {
    os << "k=" << r.k << " (" << (r.kind == ResonanceKind::OddPhoton ? "odd" : "even")
       << ") omega=" << format_sci(r.omega_resonant)
       << " breaking_expected=" << (r.breaking_expected ? "yes" : "no") << " [" << r.reason
       << "]\n";
    rows.push_back(Json{{"k", r.k},
                        {"kind", r.kind == ResonanceKind::OddPhoton ? "odd" : "even"},
                        {"omega_resonant", r.omega_resonant},
                        {"breaking_expected", r.breaking_expected},
                        {"reason", r.reason}});
  }
  Json doc;
  doc["command"] = "resonances";
  doc["protocol"] = protocol_json(cfg.protocol);
  doc["delta_eff"] = derived_quantities(cfg.protocol).delta_eff;
  doc["predictions"] = rows;
  write_text_atomic(out_path(cfg, "resonances_summary.json"), doc.dump(2) + "\n");
}

}  // namespace detail

/// Executes one command against a validated configuration. Throws on error;
/// see run_command_catching for the exit-status mapping.
inline void run_command(const RunConfig& cfg, Command cmd, std::ostream& os) {
  switch (cmd) {
    case Command::Classify: detail::run_classify(cfg, os); break;
    case Command::Quasi: detail::run_quasi(cfg, os); break;
    case Command::Sweep: detail::run_sweep(cfg, os); break;
    case Command::Ep: detail::run_ep(cfg, os); break;
    case Command::Dynamics: detail::run_dynamics(cfg, os); break;
    case Command::HfCompare: detail::run_hfcompare(cfg, os); break;
    case Command::Resonances: detail::run_resonances(cfg, os); break;
  }
}

inline int run_command_catching(const RunConfig& cfg, Command cmd, std::ostream& os,
                                std::ostream& err) {
  try {
    run_command(cfg, cmd, os);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace floquet_pt
