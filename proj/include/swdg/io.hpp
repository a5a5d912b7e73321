#pragma once

// Batch driver: configuration, output writers and the run loop.
//
// Configuration files are flat `key = value` text. `#` starts a comment.
// Recognised keys (everything else is rejected):
//
//   scenario                  lake_at_rest_1 | lake_at_rest_2 | sloping_beach |
//                             thacker_radial | thacker_planar | conical_island
//   scenario.case             A | C                      (conical_island)
//   scenario.closed           true | false               (conical_island)
//   g, tol_wet                physical constant, thin-layer tolerance (m)
//   form                      strong | weak
//   limiter                   vertex | edge
//   momentum_limiting         velocity | direct
//   dt | cfl                  fixed step or adaptive target (mutually exclusive)
//   dt_floor                  adaptive abort threshold (s)
//   cfl_metric                patch | incircle
//   end_time, max_steps
//   mesh.level | mesh.file    built-in refinement level or mesh file
//   output.dir
//   output.diagnostic_interval, output.snapshot_interval   (steps, 0 = off)
//   output.snapshot_format    csv | vtk
//   output.section_samples    sample points per intersected cell
//   gauge.<id>                "x y"
//   section.<id>              "y=<value>" or "x=<value>"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swdg/diagnostics.hpp"
#include "swdg/mesh_io.hpp"
#include "swdg/scenarios.hpp"
#include "swdg/timestepper.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace swdg {

// ---------------------------------------------------------------------------
// Small parsing helpers

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw InputError("key '" + key + "': expected a number, got '" + v + "'");
  }
  if (pos != v.size() || !std::isfinite(out)) throw InputError("key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

inline long parse_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long out = 0;
  try {
    out = std::stol(v, &pos);
  } catch (const std::exception&) {
    throw InputError("key '" + key + "': expected an integer, got '" + v + "'");
  }
  if (pos != v.size()) throw InputError("key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("key '" + key + "': expected true or false, got '" + v + "'");
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace detail

inline DgForm parse_form(const std::string& v) {
  if (v == "strong") return DgForm::kStrong;
  if (v == "weak") return DgForm::kWeak;
  throw InputError("key 'form': invalid value '" + v + "' (expected strong or weak)");
}

inline LimiterVariant parse_limiter(const std::string& v) {
  if (v == "vertex") return LimiterVariant::kVertexBased;
  if (v == "edge") return LimiterVariant::kEdgeBased;
  throw InputError("key 'limiter': invalid value '" + v + "' (expected vertex or edge)");
}

inline MomentumLimiting parse_momentum_limiting(const std::string& v) {
  if (v == "velocity") return MomentumLimiting::kVelocityBased;
  if (v == "direct") return MomentumLimiting::kDirect;
  throw InputError("key 'momentum_limiting': invalid value '" + v + "' (expected velocity or direct)");
}

inline CflMetric parse_cfl_metric(const std::string& v) {
  if (v == "patch") return CflMetric::kPatchInscribed;
  if (v == "incircle") return CflMetric::kIncircle;
  throw InputError("key 'cfl_metric': invalid value '" + v + "' (expected patch or incircle)");
}

inline std::string to_string(CflMetric m) { return m == CflMetric::kPatchInscribed ? "patch" : "incircle"; }

// ---------------------------------------------------------------------------
// Scenario lookup

struct ScenarioOptions {
  ConicalCase conical_case = ConicalCase::kA;
  bool closed = false;
  double g = kDefaultGravity;
};

inline ScenarioSpec make_scenario(const std::string& name, const ScenarioOptions& opt = {}) {
  ScenarioSpec s;
  if (name == "lake_at_rest_1") {
    s = lake_at_rest_1();
  } else if (name == "lake_at_rest_2") {
    s = lake_at_rest_2();
  } else if (name == "sloping_beach") {
    s = sloping_beach_runup();
  } else if (name == "thacker_radial") {
    ThackerRadialParams p;
    p.g = opt.g;
    return thacker_radial(p);
  } else if (name == "thacker_planar") {
    ThackerPlanarParams p;
    p.g = opt.g;
    return thacker_planar(p);
  } else if (name == "conical_island") {
    ConicalIslandParams p;
    p.which = opt.conical_case;
    p.closed = opt.closed;
    p.g = opt.g;
    return conical_island(p);
  } else {
    throw InputError("key 'scenario': unknown scenario '" + name + "'");
  }
  s.g = opt.g;
  return s;
}

// ---------------------------------------------------------------------------
// Configuration

struct CrossSectionLine {
  enum class Axis { kX, kY };  // kY: the line y = value, sampled along x
  Axis axis = Axis::kY;
  double value = 0.0;
};

inline CrossSectionLine parse_section_line(const std::string& key, const std::string& v) {
  const auto eq = v.find('=');
  if (eq == std::string::npos) throw InputError("key '" + key + "': expected 'y=<value>' or 'x=<value>'");
  const std::string axis = detail::trim(v.substr(0, eq));
  CrossSectionLine line;
  if (axis == "y")
    line.axis = CrossSectionLine::Axis::kY;
  else if (axis == "x")
    line.axis = CrossSectionLine::Axis::kX;
  else
    throw InputError("key '" + key + "': axis must be x or y");
  line.value = detail::parse_double(key, detail::trim(v.substr(eq + 1)));
  return line;
}

struct RunConfig {
  std::string scenario;
  ScenarioOptions scenario_options;
  std::optional<double> tol_wet;  // empty: scenario default
  DgForm form = DgForm::kStrong;
  LimiterVariant limiter = LimiterVariant::kVertexBased;
  MomentumLimiting momentum = MomentumLimiting::kVelocityBased;
  std::optional<double> dt;
  std::optional<double> cfl;
  double dt_floor = 0.0;
  CflMetric cfl_metric = CflMetric::kPatchInscribed;
  std::optional<double> end_time;
  std::optional<long> max_steps;
  std::optional<int> mesh_level;
  std::optional<std::string> mesh_file;
  std::string output_dir = "out";
  long diagnostic_interval = 1;
  long snapshot_interval = 0;
  std::string snapshot_format = "csv";
  int section_samples = 3;
  std::map<std::string, Vec2> gauges;
  std::map<std::string, CrossSectionLine> sections;

  /// The raw key/value pairs after overrides, in key order.
  std::map<std::string, std::string> raw;
};

/// Parses `key = value` lines into a map; later keys win.
inline std::map<std::string, std::string> parse_key_values(std::istream& is, const std::string& origin = "config") {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError(origin + ":" + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw InputError(origin + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = detail::trim(line.substr(eq + 1));
  }
  return kv;
}

inline void apply_override(std::map<std::string, std::string>& kv, const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw InputError("override '" + text + "': expected key=value");
  const std::string key = detail::trim(text.substr(0, eq));
  if (key.empty()) throw InputError("override '" + text + "': empty key");
  kv[key] = detail::trim(text.substr(eq + 1));
}

/// Resolves a key/value map into a RunConfig. Unknown keys are rejected.
inline RunConfig resolve_config(const std::map<std::string, std::string>& kv) {
  RunConfig c;
  c.raw = kv;
  auto it = kv.find("scenario");
  if (it == kv.end() || it->second.empty()) throw InputError("key 'scenario' is required");
  c.scenario = it->second;

  for (const auto& [key, v] : kv) {
    using namespace detail;
    if (key == "scenario") {
      continue;
    } else if (key == "scenario.case") {
      if (v == "A")
        c.scenario_options.conical_case = ConicalCase::kA;
      else if (v == "C")
        c.scenario_options.conical_case = ConicalCase::kC;
      else
        throw InputError("key 'scenario.case': invalid value '" + v + "' (expected A or C)");
    } else if (key == "scenario.closed") {
      c.scenario_options.closed = parse_bool(key, v);
    } else if (key == "g") {
      c.scenario_options.g = parse_double(key, v);
      if (!(c.scenario_options.g > 0.0)) throw InputError("key 'g' must be positive");
    } else if (key == "tol_wet") {
      c.tol_wet = parse_double(key, v);
      if (!(*c.tol_wet > 0.0)) throw InputError("key 'tol_wet' must be positive, got " + v);
    } else if (key == "form") {
      c.form = parse_form(v);
    } else if (key == "limiter") {
      c.limiter = parse_limiter(v);
    } else if (key == "momentum_limiting") {
      c.momentum = parse_momentum_limiting(v);
    } else if (key == "dt") {
      c.dt = parse_double(key, v);
      if (!(*c.dt > 0.0)) throw InputError("key 'dt' must be positive");
    } else if (key == "cfl") {
      c.cfl = parse_double(key, v);
      if (!(*c.cfl > 0.0)) throw InputError("key 'cfl' must be positive");
    } else if (key == "dt_floor") {
      c.dt_floor = parse_double(key, v);
      if (c.dt_floor < 0.0) throw InputError("key 'dt_floor' must be nonnegative");
    } else if (key == "cfl_metric") {
      c.cfl_metric = parse_cfl_metric(v);
    } else if (key == "end_time") {
      c.end_time = parse_double(key, v);
      if (!(*c.end_time > 0.0)) throw InputError("key 'end_time' must be positive");
    } else if (key == "max_steps") {
      c.max_steps = parse_int(key, v);
      if (*c.max_steps < 0) throw InputError("key 'max_steps' must be nonnegative");
    } else if (key == "mesh.level") {
      c.mesh_level = static_cast<int>(parse_int(key, v));
      if (*c.mesh_level < 0) throw InputError("key 'mesh.level' must be nonnegative");
    } else if (key == "mesh.file") {
      c.mesh_file = v;
    } else if (key == "output.dir") {
      if (v.empty()) throw InputError("key 'output.dir' must not be empty");
      c.output_dir = v;
    } else if (key == "output.diagnostic_interval") {
      c.diagnostic_interval = parse_int(key, v);
      if (c.diagnostic_interval < 1) throw InputError("key 'output.diagnostic_interval' must be >= 1");
    } else if (key == "output.snapshot_interval") {
      c.snapshot_interval = parse_int(key, v);
      if (c.snapshot_interval < 0) throw InputError("key 'output.snapshot_interval' must be >= 0");
    } else if (key == "output.snapshot_format") {
      if (v != "csv" && v != "vtk")
        throw InputError("key 'output.snapshot_format': invalid value '" + v + "' (expected csv or vtk)");
      c.snapshot_format = v;
    } else if (key == "output.section_samples") {
      c.section_samples = static_cast<int>(parse_int(key, v));
      if (c.section_samples < 2) throw InputError("key 'output.section_samples' must be >= 2");
    } else if (key.rfind("gauge.", 0) == 0 && key.size() > 6) {
      std::istringstream is(v);
      double x = 0, y = 0;
      std::string rest;
      if (!(is >> x >> y) || (is >> rest)) throw InputError("key '" + key + "': expected 'x y'");
      c.gauges[key.substr(6)] = {x, y};
    } else if (key.rfind("section.", 0) == 0 && key.size() > 8) {
      c.sections[key.substr(8)] = parse_section_line(key, v);
    } else {
      throw InputError("unknown configuration key '" + key + "'");
    }
  }
  if (c.dt && c.cfl) throw InputError("keys 'dt' and 'cfl' are mutually exclusive");
  if (c.mesh_level && c.mesh_file) throw InputError("keys 'mesh.level' and 'mesh.file' are mutually exclusive");
  if (c.dt_floor > 0.0 && !c.cfl) throw InputError("key 'dt_floor' requires adaptive stepping ('cfl')");
  make_scenario(c.scenario, c.scenario_options);  // validates the name
  return c;
}

inline RunConfig parse_config(std::istream& is, const std::vector<std::string>& overrides = {}) {
  auto kv = parse_key_values(is);
  for (const auto& o : overrides) apply_override(kv, o);
  return resolve_config(kv);
}

inline RunConfig parse_config_file(const std::filesystem::path& path, const std::vector<std::string>& overrides = {}) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open configuration file '" + path.string() + "'");
  auto kv = parse_key_values(is, path.string());
  for (const auto& o : overrides) apply_override(kv, o);
  return resolve_config(kv);
}

/// Everything needed to run, with scenario defaults filled in.
struct ResolvedRun {
  ScenarioSpec scenario;
  Mesh mesh;
  SolverSettings settings;
  double end_time = 0.0;
  std::vector<Gauge> gauges;
};

inline ResolvedRun resolve_run(const RunConfig& c) {
  ScenarioSpec s = make_scenario(c.scenario, c.scenario_options);
  Mesh mesh = c.mesh_file ? load_mesh(*c.mesh_file) : build_mesh(s, c.mesh_level);
  SolverSettings st;
  st.rhs.form = c.form;
  st.rhs.g = s.g;
  st.rhs.tol_wet = c.tol_wet.value_or(s.tol_wet);
  st.limiter.variant = c.limiter;
  st.limiter.momentum = c.momentum;
  st.limiter.tol_wet = st.rhs.tol_wet;
  st.metric = c.cfl_metric;
  if (c.cfl) {
    st.step = StepControl::adaptive(*c.cfl, c.dt_floor);
  } else {
    st.step = StepControl::fixed(c.dt.value_or(s.dt));
  }
  std::vector<Gauge> gauges;
  std::map<std::string, Vec2> merged;
  for (const auto& gg : s.gauges) merged[gg.id] = gg.location;
  for (const auto& [id, p] : c.gauges) merged[id] = p;
  const Rect box = mesh.bounding_box();
  for (const auto& [id, p] : merged) {
    if (!box.contains(p)) throw InputError("gauge '" + id + "' lies outside the domain");
    gauges.push_back({id, p});
  }
  return {std::move(s), std::move(mesh), st, c.end_time.value_or(s.end_time), std::move(gauges)};
}

/// Resolved configuration in key=value form; a valid config file itself.
inline std::string manifest_text(const RunConfig& c, const ResolvedRun& r) {
  std::map<std::string, std::string> kv;
  kv["scenario"] = c.scenario;
  if (c.scenario == "conical_island") {
    kv["scenario.case"] = c.scenario_options.conical_case == ConicalCase::kA ? "A" : "C";
    kv["scenario.closed"] = c.scenario_options.closed ? "true" : "false";
  }
  kv["g"] = detail::fmt(r.settings.rhs.g);
  kv["tol_wet"] = detail::fmt(r.settings.rhs.tol_wet);
  kv["form"] = to_string(r.settings.rhs.form);
  kv["limiter"] = to_string(r.settings.limiter.variant);
  kv["momentum_limiting"] = to_string(r.settings.limiter.momentum);
  kv["cfl_metric"] = to_string(r.settings.metric);
  if (r.settings.step.mode == StepControl::Mode::kFixed) {
    kv["dt"] = detail::fmt(r.settings.step.dt);
  } else {
    kv["cfl"] = detail::fmt(r.settings.step.cfl_target);
    if (r.settings.step.dt_floor > 0.0) kv["dt_floor"] = detail::fmt(r.settings.step.dt_floor);
  }
  kv["end_time"] = detail::fmt(r.end_time);
  if (c.max_steps) kv["max_steps"] = std::to_string(*c.max_steps);
  if (c.mesh_file)
    kv["mesh.file"] = *c.mesh_file;
  else
    kv["mesh.level"] = std::to_string(c.mesh_level.value_or(r.scenario.mesh.levels));
  kv["output.dir"] = c.output_dir;
  kv["output.diagnostic_interval"] = std::to_string(c.diagnostic_interval);
  kv["output.snapshot_interval"] = std::to_string(c.snapshot_interval);
  kv["output.snapshot_format"] = c.snapshot_format;
  kv["output.section_samples"] = std::to_string(c.section_samples);
  for (const auto& gg : r.gauges) kv["gauge." + gg.id] = detail::fmt(gg.location.x) + " " + detail::fmt(gg.location.y);
  for (const auto& [id, l] : c.sections)
    kv["section." + id] = std::string(l.axis == CrossSectionLine::Axis::kY ? "y=" : "x=") + detail::fmt(l.value);
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Point sampling

/// Barycentric coordinates of p in cell c.
inline std::array<double, 3> barycentric(const Mesh& mesh, std::size_t c, Vec2 p) {
  const auto pts = mesh.cell_points(c);
  const double a = cross(pts[1] - pts[0], pts[2] - pts[0]);
  return {cross(pts[1] - p, pts[2] - p) / a, cross(pts[2] - p, pts[0] - p) / a, cross(pts[0] - p, pts[1] - p) / a};
}

/// Lowest-index cell containing p (edges and vertices count as inside), or -1.
inline int locate_cell(const Mesh& mesh, Vec2 p, double tol = 1e-10) {
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto l = barycentric(mesh, c, p);
    if (l[0] >= -tol && l[1] >= -tol && l[2] >= -tol) return static_cast<int>(c);
  }
  return -1;
}

struct GaugeSample {
  double time = 0.0;
  double eta = 0.0;  // H - rest level
  double h = 0.0;
  double u = 0.0;
  double v = 0.0;
};

struct GaugeProbe {
  Gauge gauge;
  int cell = -1;
  std::array<double, 3> weights{};

  GaugeSample sample(const CellField& f, const Bathymetry& b, double t, double rest_level, double tol) const {
    const auto& n = f[cell];
    const auto& bn = b.cell(cell);
    State s = n[0] * weights[0] + n[1] * weights[1] + n[2] * weights[2];
    const double bb = bn[0] * weights[0] + bn[1] * weights[1] + bn[2] * weights[2];
    return {t, s.h + bb - rest_level, s.h, nodal_velocity(s.h, s.hu, tol), nodal_velocity(s.h, s.hv, tol)};
  }
};

inline GaugeProbe make_probe(const Mesh& mesh, const Gauge& g) {
  const int c = locate_cell(mesh, g.location);
  if (c < 0) throw InputError("gauge '" + g.id + "' is not inside any cell");
  auto w = barycentric(mesh, c, g.location);
  for (auto& x : w) x = std::clamp(x, 0.0, 1.0);
  const double s = w[0] + w[1] + w[2];
  for (auto& x : w) x /= s;
  return {g, c, w};
}

// ---------------------------------------------------------------------------
// Cross sections

struct TracePoint {
  double coord = 0.0;  // abscissa along the line
  State state;
  double u = 0.0;
  double v = 0.0;
};

struct CellTrace {
  int cell = -1;
  double entry = 0.0;
  double exit = 0.0;
  std::vector<TracePoint> points;
};

/// Per-cell linear traces along an axis-parallel line, ordered by abscissa
/// (ties by cell index). Cells touching the line in a single point are skipped.
inline std::vector<CellTrace> extract_cross_section(const CellField& field, const Mesh& mesh,
                                                    const CrossSectionLine& line, int samples, double tol_wet,
                                                    std::ostream* warn = &std::cerr) {
  if (samples < 2) throw InputError("cross section needs at least two samples per cell");
  const bool along_x = line.axis == CrossSectionLine::Axis::kY;
  auto across = [&](Vec2 p) { return along_x ? p.y : p.x; };
  auto along = [&](Vec2 p) { return along_x ? p.x : p.y; };
  auto point = [&](double s) { return along_x ? Vec2{s, line.value} : Vec2{line.value, s}; };

  std::vector<CellTrace> out;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto pts = mesh.cell_points(c);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < 3; ++k) {
      const Vec2 a = pts[k], b = pts[(k + 1) % 3];
      const double da = across(a) - line.value, db = across(b) - line.value;
      if (da == 0.0) {
        lo = std::min(lo, along(a));
        hi = std::max(hi, along(a));
      }
      if ((da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0)) {
        const double s = along(a) + (along(b) - along(a)) * (da / (da - db));
        lo = std::min(lo, s);
        hi = std::max(hi, s);
      }
    }
    if (!(hi > lo)) continue;
    CellTrace tr{static_cast<int>(c), lo, hi, {}};
    for (int i = 0; i < samples; ++i) {
      const double s = lo + (hi - lo) * i / (samples - 1);
      auto w = barycentric(mesh, c, point(s));
      for (auto& x : w) x = std::max(x, 0.0);
      const double sum = w[0] + w[1] + w[2];
      const auto& n = field[c];
      const State st = (n[0] * w[0] + n[1] * w[1] + n[2] * w[2]) * (1.0 / sum);
      tr.points.push_back({s, st, nodal_velocity(st.h, st.hu, tol_wet), nodal_velocity(st.h, st.hv, tol_wet)});
    }
    out.push_back(std::move(tr));
  }
  std::stable_sort(out.begin(), out.end(), [](const CellTrace& a, const CellTrace& b) {
    return a.entry < b.entry || (a.entry == b.entry && a.cell < b.cell);
  });
  if (out.empty() && warn)
    *warn << "warning: cross section " << (along_x ? "y=" : "x=") << line.value << " does not intersect the mesh\n";
  return out;
}

// ---------------------------------------------------------------------------
// Snapshots

struct SnapshotRow {
  std::size_t cell = 0;
  int node = 0;
  double x = 0, y = 0, b = 0, h = 0, hu = 0, hv = 0, u = 0, v = 0;
  int wet = 0;
};

inline void write_snapshot_csv(std::ostream& os, const CellField& field, const Bathymetry& bathy, const Mesh& mesh,
                               double t, double tol_wet) {
  os << std::setprecision(17);
  os << "# time=" << t << '\n';
  os << "cell,node,x,y,b,h,hu,hv,u,v,wet\n";
  for (std::size_t c = 0; c < field.size(); ++c) {
    const auto pts = mesh.cell_points(c);
    for (int i = 0; i < 3; ++i) {
      const State& s = field[c][i];
      os << c << ',' << i << ',' << pts[i].x << ',' << pts[i].y << ',' << bathy.cell(c)[i] << ',' << s.h << ','
         << s.hu << ',' << s.hv << ',' << nodal_velocity(s.h, s.hu, tol_wet) << ','
         << nodal_velocity(s.h, s.hv, tol_wet) << ',' << (s.h >= tol_wet ? 1 : 0) << '\n';
    }
  }
}

inline std::vector<SnapshotRow> read_snapshot_csv(std::istream& is) {
  std::vector<SnapshotRow> rows;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "cell,node,x,y,b,h,hu,hv,u,v,wet") throw InputError("snapshot csv: unexpected header '" + line + "'");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 11) throw InputError("snapshot csv: expected 11 columns in '" + line + "'");
    SnapshotRow r;
    r.cell = static_cast<std::size_t>(detail::parse_int("cell", f[0]));
    r.node = static_cast<int>(detail::parse_int("node", f[1]));
    r.x = detail::parse_double("x", f[2]);
    r.y = detail::parse_double("y", f[3]);
    r.b = detail::parse_double("b", f[4]);
    r.h = detail::parse_double("h", f[5]);
    r.hu = detail::parse_double("hu", f[6]);
    r.hv = detail::parse_double("hv", f[7]);
    r.u = detail::parse_double("u", f[8]);
    r.v = detail::parse_double("v", f[9]);
    r.wet = static_cast<int>(detail::parse_int("wet", f[10]));
    rows.push_back(r);
  }
  if (!header) throw InputError("snapshot csv: missing header");
  return rows;
}

/// Legacy ASCII VTK with duplicated vertices so the field stays discontinuous.
inline void write_snapshot_vtk(std::ostream& os, const CellField& field, const Bathymetry& bathy, const Mesh& mesh,
                               double t, double tol_wet) {
  const std::size_t nc = field.size();
  os << std::setprecision(17);
  os << "# vtk DataFile Version 3.0\nshallow water DG snapshot t=" << t << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << 3 * nc << " double\n";
  for (std::size_t c = 0; c < nc; ++c)
    for (const auto& p : mesh.cell_points(c)) os << p.x << ' ' << p.y << " 0\n";
  os << "CELLS " << nc << ' ' << 4 * nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) os << "3 " << 3 * c << ' ' << 3 * c + 1 << ' ' << 3 * c + 2 << '\n';
  os << "CELL_TYPES " << nc << '\n';
  for (std::size_t c = 0; c < nc; ++c) os << "5\n";
  os << "POINT_DATA " << 3 * nc << '\n';
  auto scalar = [&](const char* name, auto get) {
    os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (std::size_t c = 0; c < nc; ++c)
      for (int i = 0; i < 3; ++i) os << get(c, i) << '\n';
  };
  scalar("b", [&](std::size_t c, int i) { return bathy.cell(c)[i]; });
  scalar("h", [&](std::size_t c, int i) { return field[c][i].h; });
  scalar("H", [&](std::size_t c, int i) { return field[c][i].h + bathy.cell(c)[i]; });
  os << "VECTORS momentum double\n";
  for (std::size_t c = 0; c < nc; ++c)
    for (int i = 0; i < 3; ++i) os << field[c][i].hu << ' ' << field[c][i].hv << " 0\n";
  os << "VECTORS velocity double\n";
  for (std::size_t c = 0; c < nc; ++c)
    for (int i = 0; i < 3; ++i) {
      const State& s = field[c][i];
      os << nodal_velocity(s.h, s.hu, tol_wet) << ' ' << nodal_velocity(s.h, s.hv, tol_wet) << " 0\n";
    }
}

inline void write_snapshot(const std::filesystem::path& path, const CellField& field, const Bathymetry& bathy,
                           const Mesh& mesh, double t, double tol_wet, const std::string& format) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write snapshot '" + path.string() + "'");
  if (format == "csv")
    write_snapshot_csv(os, field, bathy, mesh, t, tol_wet);
  else if (format == "vtk")
    write_snapshot_vtk(os, field, bathy, mesh, t, tol_wet);
  else
    throw InputError("unknown snapshot format '" + format + "'");
  if (!os) throw std::runtime_error("failed writing snapshot '" + path.string() + "'");
}

/// Exact fields at the vertices of `mesh`.
inline void write_exact_csv(std::ostream& os, const ScenarioSpec& s, const Mesh& mesh, double t) {
  if (!s.has_exact()) throw InputError("scenario '" + s.name + "' has no exact solution");
  os << std::setprecision(17) << "x,y,b,h,hu,hv,u,v\n";
  for (const auto& p : mesh.vertices()) {
    const State e = s.exact(p, t);
    os << p.x << ',' << p.y << ',' << s.bathymetry(p) << ',' << e.h << ',' << e.hu << ',' << e.hv << ','
       << (e.h > 0.0 ? e.hu / e.h : 0.0) << ',' << (e.h > 0.0 ? e.hv / e.h : 0.0) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Run loop

struct RunSummary {
  int exit_code = 0;  // 0 ok, 3 solver abort
  std::string message;
  std::size_t steps = 0;
  double time = 0.0;
  double max_courant = 0.0;
  double min_depth = 0.0;
  double mass_drift = 0.0;
};

/// Honours SWDG_NUM_THREADS as a hint for the OpenMP runtime.
inline void apply_thread_hint() {
#if defined(_OPENMP)
  if (const char* env = std::getenv("SWDG_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) omp_set_num_threads(n);
  }
#endif
}

inline RunSummary run(const RunConfig& config, std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  apply_thread_hint();
  ResolvedRun r = resolve_run(config);
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  if (config.snapshot_interval > 0) fs::create_directories(dir / "snapshots");

  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write '" + (dir / name).string() + "'");
    os << std::setprecision(17);
    return os;
  };

  const ScenarioSpec& s = r.scenario;
  const double tol = r.settings.rhs.tol_wet;
  const Bathymetry bathy = build_bathymetry(s, r.mesh);
  const CellField initial = build_initial(s, r.mesh);
  std::optional<InflowSpec> inflow = s.inflow;
  BoundaryContext bc{inflow ? &*inflow : nullptr};

  std::vector<GaugeProbe> probes;
  for (const auto& gg : r.gauges) probes.push_back(make_probe(r.mesh, gg));

  std::ofstream diag = open("diagnostics.csv");
  std::ofstream gauges = open("gauges.csv");
  std::ofstream sections = open("sections.csv");
  diag << "step,time,dt,mass,mass_drift_rel,energy,energy_drift_rel,max_courant,min_h,gravity_off_cells";
  if (s.has_exact()) diag << ",linf_h,l2_h,linf_m,l2_m";
  diag << '\n';
  gauges << "gauge,x,y,time,eta,h,u,v\n";
  sections << "section,time,cell,entry,exit,s,h,hu,hv,u,v\n";

  RunSummary sum;
  std::optional<Simulator> sim;
  try {
    sim.emplace(r.mesh, bathy, initial, r.settings, bc);
  } catch (const SolverAbort& e) {
    sum.exit_code = 3;
    sum.message = e.what();
  }

  double mass0 = 0.0, energy0 = 0.0;
  // At step 0 the Courant column refers to the first step about to be taken.
  auto write_diag = [&](double dt, double min_h, std::size_t off) {
    const CellField& u = sim->state();
    const double mass = total_mass(u, r.mesh);
    const double energy = total_energy(u, bathy, r.mesh, r.settings.rhs.g, tol);
    const double courant = sim->courant(dt > 0.0 ? dt : sim->next_dt());
    sum.max_courant = std::max(sum.max_courant, courant);
    diag << sim->steps() << ',' << sim->time() << ',' << dt << ',' << mass << ','
         << (mass0 != 0.0 ? (mass - mass0) / mass0 : 0.0) << ',' << energy << ','
         << (energy0 != 0.0 ? (energy - energy0) / energy0 : 0.0) << ',' << courant << ',' << min_h << ',' << off;
    if (s.has_exact()) {
      const ErrorNorms e = error_norms(u, s.exact, r.mesh, sim->time());
      diag << ',' << e.linf_h << ',' << e.l2_h << ',' << e.linf_m << ',' << e.l2_m;
    }
    diag << '\n';
    sum.mass_drift = std::max(sum.mass_drift, mass0 != 0.0 ? std::abs(mass - mass0) / std::abs(mass0) : 0.0);
  };
  auto write_gauges = [&]() {
    for (const auto& p : probes) {
      const GaugeSample g = p.sample(sim->state(), bathy, sim->time(), s.rest_level, tol);
      gauges << p.gauge.id << ',' << p.gauge.location.x << ',' << p.gauge.location.y << ',' << g.time << ','
             << g.eta << ',' << g.h << ',' << g.u << ',' << g.v << '\n';
    }
  };
  auto write_output = [&]() {
    const std::string stem = "snapshots/snapshot_" + std::to_string(sim->steps());
    write_snapshot(dir / (stem + "." + config.snapshot_format), sim->state(), bathy, r.mesh, sim->time(), tol,
                   config.snapshot_format);
    for (const auto& [id, line] : config.sections)
      for (const auto& tr : extract_cross_section(sim->state(), r.mesh, line, config.section_samples, tol, log))
        for (const auto& p : tr.points)
          sections << id << ',' << sim->time() << ',' << tr.cell << ',' << tr.entry << ',' << tr.exit << ','
                   << p.coord << ',' << p.state.h << ',' << p.state.hu << ',' << p.state.hv << ',' << p.u << ','
                   << p.v << '\n';
  };

  if (sim) {
    mass0 = total_mass(sim->state(), r.mesh);
    energy0 = total_energy(sim->state(), bathy, r.mesh, r.settings.rhs.g, tol);
    sum.min_depth = sim->state().min_depth();
    write_diag(0.0, sum.min_depth, classify_cells(sim->state(), bathy, tol).count(CellClass::kSemiDryGravityOff));
    write_gauges();
    if (config.snapshot_interval > 0) write_output();
    const long max_steps = config.max_steps.value_or(std::numeric_limits<long>::max());
    try {
      while (sim->time() < r.end_time && static_cast<long>(sim->steps()) < max_steps) {
        const double dt = sim->step(r.end_time);
        const StepStats& st = sim->last_stats();
        sum.min_depth = std::min(sum.min_depth, st.min_depth());
        const bool last = sim->time() >= r.end_time || static_cast<long>(sim->steps()) >= max_steps;
        if (sim->steps() % config.diagnostic_interval == 0 || last) {
          write_diag(dt, st.min_depth(), std::max(st.stage[0].gravity_off_cells, st.stage[1].gravity_off_cells));
          write_gauges();
        }
        if (config.snapshot_interval > 0 && (sim->steps() % config.snapshot_interval == 0 || last)) write_output();
      }
    } catch (const SolverAbort& e) {
      sum.exit_code = 3;
      sum.message = e.what();
    }
    sum.steps = sim->steps();
    sum.time = sim->time();
  }

  std::ofstream man = open("manifest.txt");
  man << "# status: " << (sum.exit_code == 0 ? "ok" : "solver-abort") << '\n';
  if (!sum.message.empty()) man << "# message: " << sum.message << '\n';
  man << "# steps: " << sum.steps << "\n# final_time: " << sum.time << "\n# cells: " << r.mesh.num_cells() << '\n';
  man << manifest_text(config, r);
  if (log) {
    *log << "scenario " << s.name << ": " << sum.steps << " steps to t=" << sum.time << ", max Courant "
         << sum.max_courant << ", min h " << sum.min_depth << '\n';
    if (sum.exit_code != 0) *log << "solver abort: " << sum.message << '\n';
  }
  return sum;
}

}  // namespace swdg
