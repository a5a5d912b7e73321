#pragma once

// Benchmark setups with their analytic solutions where available.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "swdg/boundary.hpp"
#include "swdg/diagnostics.hpp"
#include "swdg/field.hpp"
#include "swdg/mesh.hpp"

namespace swdg {

/// Recipe for the default mesh: nx-by-ny rectangles, split, refined `levels` times.
struct MeshRecipe {
  int nx = 1;
  int ny = 1;
  BaseSplit split = BaseSplit::kTwoTriangle;
  int levels = 0;

  int cells() const { return nx * ny * (split == BaseSplit::kTwoTriangle ? 2 : 4) * (1 << (2 * levels)); }
};

struct Gauge {
  std::string id;
  Vec2 location;
};

struct ScenarioSpec {
  std::string name;
  Rect domain;
  SideTags sides;
  MeshRecipe mesh;
  double g = kDefaultGravity;
  double tol_wet = 1e-3;
  double end_time = 0.0;
  double dt = 0.0;          // recommended fixed time step
  double period = 0.0;      // oscillation period, 0 when not periodic in time
  double rest_level = 0.0;  // still-water surface elevation for gauge output
  std::function<double(Vec2)> bathymetry;
  std::function<State(Vec2)> initial;
  ExactSolution exact;  // empty when no closed form exists
  std::optional<InflowSpec> inflow;
  std::vector<Gauge> gauges;

  bool has_exact() const { return static_cast<bool>(exact); }
};

inline Mesh build_mesh(const ScenarioSpec& s, std::optional<int> levels = std::nullopt) {
  Mesh m = build_structured_mesh(s.domain, s.mesh.nx, s.mesh.ny, s.mesh.split, s.sides);
  const int l = levels.value_or(s.mesh.levels);
  if (l < 0) throw InputError("refinement level must be >= 0");
  for (int i = 0; i < l; ++i) m = refine_uniform(m);
  return m;
}

inline Bathymetry build_bathymetry(const ScenarioSpec& s, const Mesh& mesh) {
  return Bathymetry::interpolate(mesh, s.bathymetry);
}

/// Nodal initial condition; depth and velocity are interpolated separately
/// and momentum formed nodewise.
inline CellField build_initial(const ScenarioSpec& s, const Mesh& mesh) { return interpolate_field(mesh, s.initial); }

// ---------------------------------------------------------------------------
// Lake at rest on [0,1]^2, periodic, surface at 0.1.

inline double lake_bathymetry_1(Vec2 p) {
  return std::max(0.0, 0.25 - 5.0 * ((p.x - 0.5) * (p.x - 0.5) + (p.y - 0.5) * (p.y - 0.5)));
}

inline double lake_bathymetry_2(Vec2 p) {
  auto dist = [&](double cx, double cy) { return std::hypot(p.x - cx, p.y - cy); };
  const bool in1 = dist(0.35, 0.65) < 0.1;
  const bool in2 = dist(0.55, 0.45) < 0.1;
  const bool in3 = std::abs(p.x - 0.47) < 0.25 && std::abs(p.y - 0.55) < 0.25;
  const bool in4 = dist(0.5, 0.5) < 0.45;
  if (in1) return 0.15;
  if (in2) return 0.05;
  if (in3) return 0.07;
  if (in4) return 0.03;
  return 0.0;
}

namespace detail {

inline ScenarioSpec lake_at_rest(std::string name, std::function<double(Vec2)> bathy) {
  ScenarioSpec s;
  s.name = std::move(name);
  s.domain = {0.0, 1.0, 0.0, 1.0};
  s.sides = SideTags::fully_periodic();
  s.mesh = {1, 1, BaseSplit::kFourTriangle, 5};
  s.tol_wet = 1e-6;
  s.dt = 0.002;
  s.end_time = 40.0;
  s.rest_level = 0.1;
  s.bathymetry = bathy;
  s.initial = [bathy](Vec2 p) { return State{std::max(0.0, 0.1 - bathy(p)), 0.0, 0.0}; };
  s.exact = [bathy](Vec2 p, double) { return State{std::max(0.0, 0.1 - bathy(p)), 0.0, 0.0}; };
  return s;
}

}  // namespace detail

inline ScenarioSpec lake_at_rest_1() { return detail::lake_at_rest("lake_at_rest_1", lake_bathymetry_1); }
inline ScenarioSpec lake_at_rest_2() { return detail::lake_at_rest("lake_at_rest_2", lake_bathymetry_2); }

// ---------------------------------------------------------------------------
// Runup of an N-wave onto a plane beach b = 5000 - 0.1 x, still water at 5000.

struct BeachParams {
  double a1 = 0.006, a2 = 0.018, k1 = 0.4444, k2 = 4.0, x1 = 4.1209, x2 = 1.6384;
  double slope = 0.1;
  double length = 5000.0;
  double rest_level = 5000.0;
};

/// Dimensionless initial surface profile with decaying Gaussians.
inline double beach_profile(double xs, const BeachParams& p = {}) {
  return p.a1 * std::exp(-p.k1 * (xs - p.x1) * (xs - p.x1)) - p.a2 * std::exp(-p.k2 * (xs - p.x2) * (xs - p.x2));
}

/// Initial surface displacement about the still-water level (meters).
inline double beach_surface(double x, const BeachParams& p = {}) {
  return p.slope * p.length * beach_profile(x / p.length, p);
}

inline ScenarioSpec sloping_beach_runup(const BeachParams& p = {}) {
  ScenarioSpec s;
  s.name = "sloping_beach";
  s.domain = {-400.0, 50000.0, 0.0, 400.0};
  s.sides = {BoundaryTag::wall(), BoundaryTag::transparent(), BoundaryTag::periodic(0), BoundaryTag::periodic(0)};
  s.mesh = {126, 1, BaseSplit::kTwoTriangle, 3};  // 1008 x 8 squares, leg 50
  s.tol_wet = 1e-2;
  s.dt = 0.04;
  s.end_time = 220.0;
  s.rest_level = p.rest_level;
  s.bathymetry = [p](Vec2 x) { return p.rest_level - p.slope * x.x; };
  s.initial = [p](Vec2 x) {
    const double b = p.rest_level - p.slope * x.x;
    return State{std::max(0.0, p.rest_level + beach_surface(x.x, p) - b), 0.0, 0.0};
  };
  s.gauges = {{"shore0", {0.0, 200.0}}, {"x200", {200.0, 200.0}}, {"x800", {800.0, 200.0}}};
  return s;
}

// ---------------------------------------------------------------------------
// Radially symmetric oscillation in a paraboloid (Thacker).

struct ThackerRadialParams {
  double depth = 1.0;    // H0
  double r0 = 2000.0;
  double a = 2500.0;
  double g = kDefaultGravity;

  double A() const {
    const double a4 = a * a * a * a, r4 = r0 * r0 * r0 * r0;
    return (a4 - r4) / (a4 + r4);
  }
  double omega() const { return std::sqrt(8.0 * g * depth) / a; }
  double period() const { return 2.0 * std::numbers::pi / omega(); }
};

inline State thacker_radial_exact(Vec2 x, double t, const ThackerRadialParams& p = {}) {
  const double A = p.A(), w = p.omega();
  const double denom = 1.0 - A * std::cos(w * t);
  const double r2 = x.x * x.x + x.y * x.y;
  const double h =
      std::max(0.0, p.depth * (std::sqrt(1.0 - A * A) / denom - r2 * (1.0 - A * A) / (p.a * p.a * denom * denom)));
  if (!(h > 0.0)) return {};
  const double f = w * A * std::sin(w * t) / (2.0 * denom);
  return {h, h * f * x.x, h * f * x.y};
}

inline ScenarioSpec thacker_radial(const ThackerRadialParams& p = {}) {
  ScenarioSpec s;
  s.name = "thacker_radial";
  s.domain = {-4000.0, 4000.0, -4000.0, 4000.0};
  s.sides = SideTags::all(BoundaryTag::wall());
  s.mesh = {1, 1, BaseSplit::kFourTriangle, 6};  // leg 125/sqrt(2)
  s.g = p.g;
  s.tol_wet = 1e-2;
  s.period = p.period();
  s.dt = s.period / 700.0;
  s.end_time = 2.0 * s.period;
  s.bathymetry = [p](Vec2 x) { return p.depth * (x.x * x.x + x.y * x.y) / (p.a * p.a); };
  s.initial = [p](Vec2 x) { return thacker_radial_exact(x, 0.0, p); };
  const Rect dom = s.domain;
  s.exact = [p, dom](Vec2 x, double t) {
    if (!dom.contains(x)) throw InputError("exact solution queried outside the domain");
    return thacker_radial_exact(x, t, p);
  };
  s.gauges = {{"center", {0.0, 0.0}}, {"r1000", {1000.0, 0.0}}};
  return s;
}

// ---------------------------------------------------------------------------
// Planar (rotating) oscillation in a paraboloid (Thacker).

struct ThackerPlanarParams {
  double g = kDefaultGravity;
  double omega() const { return std::sqrt(0.2 * g); }
  double period() const { return 2.0 * std::numbers::pi / omega(); }
};

inline State thacker_planar_exact(Vec2 x, double t, const ThackerPlanarParams& p = {}) {
  const double w = p.omega();
  const double b = 0.1 * (x.x * x.x + x.y * x.y);
  const double h = std::max(0.0, 0.1 * (x.x * std::cos(w * t) + x.y * std::sin(w * t) + 0.75) - b);
  if (!(h > 0.0)) return {};
  return {h, h * (-0.5 * w * std::sin(w * t)), h * (0.5 * w * std::cos(w * t))};
}

inline ScenarioSpec thacker_planar(const ThackerPlanarParams& p = {}) {
  ScenarioSpec s;
  s.name = "thacker_planar";
  s.domain = {-2.0, 2.0, -2.0, 2.0};
  s.sides = SideTags::all(BoundaryTag::wall());
  s.mesh = {1, 1, BaseSplit::kTwoTriangle, 6};  // 64^2 squares, 8192 cells
  s.g = p.g;
  s.tol_wet = 1e-3;
  s.period = p.period();
  s.dt = s.period / 1000.0;
  s.end_time = 2.0 * s.period;
  s.bathymetry = [](Vec2 x) { return 0.1 * (x.x * x.x + x.y * x.y); };
  s.initial = [p](Vec2 x) { return thacker_planar_exact(x, 0.0, p); };
  s.exact = [p](Vec2 x, double t) { return thacker_planar_exact(x, t, p); };
  s.gauges = {{"center", {0.0, 0.0}}, {"east", {1.0, 0.0}}};
  return s;
}

// ---------------------------------------------------------------------------
// Solitary wave runup on a conical island.

enum class ConicalCase { kA, kC };

struct ConicalIslandParams {
  ConicalCase which = ConicalCase::kA;
  double rest_depth = 0.32;
  double g = kDefaultGravity;
  bool closed = false;  // all walls, wave placed inside the domain at t = 0

  double amplitude() const { return which == ConicalCase::kA ? 0.014 : 0.057; }
  double time_shift() const { return which == ConicalCase::kA ? 8.85 : 7.77; }
  double x0() const { return which == ConicalCase::kA ? 5.76 : 7.56; }
  double K() const { return std::sqrt(3.0 * amplitude() / (4.0 * rest_depth * rest_depth * rest_depth)); }
  double celerity() const { return std::sqrt(g * rest_depth) * (1.0 + amplitude() / (2.0 * rest_depth)); }
};

inline constexpr Vec2 kIslandCenter{12.96, 13.8};

inline double conical_island_bathymetry(Vec2 x) {
  const double r = norm(x - kIslandCenter);
  if (r <= 1.1) return 0.625;
  if (r <= 3.6) return (3.6 - r) / 4.0;
  return 0.0;
}

/// Boundary depth h_b(t) = h0 + a sech^2(K (cT - ct - x0)).
inline double solitary_inflow_depth(double t, const ConicalIslandParams& p) {
  const double c = p.celerity();
  const double s = 1.0 / std::cosh(p.K() * (c * p.time_shift() - c * t - p.x0()));
  return p.rest_depth + p.amplitude() * s * s;
}

inline ScenarioSpec conical_island(const ConicalIslandParams& p = {}) {
  ScenarioSpec s;
  s.name = "conical_island";
  s.domain = {0.0, 25.92, 0.0, 27.6};
  s.g = p.g;
  s.mesh = {1, 1, BaseSplit::kTwoTriangle, 6};
  s.tol_wet = 1e-3;
  s.dt = 0.01;
  s.end_time = 20.0;
  s.rest_level = p.rest_depth;
  s.bathymetry = conical_island_bathymetry;
  if (p.closed) {
    s.name = "conical_island_closed";
    s.sides = SideTags::all(BoundaryTag::wall());
    // wave crest a few metres from the left wall, moving right
    const double crest = 4.0;
    s.initial = [p, crest](Vec2 x) {
      const double b = conical_island_bathymetry(x);
      const double sech = 1.0 / std::cosh(p.K() * (x.x - crest));
      const double h = std::max(0.0, p.rest_depth + p.amplitude() * sech * sech - b);
      return State{h, h * simple_wave_speed(h, p.rest_depth, p.g) * (b > 0.0 ? 0.0 : 1.0), 0.0};
    };
  } else {
    s.sides = {BoundaryTag::inflow(), BoundaryTag::transparent(), BoundaryTag::wall(), BoundaryTag::wall()};
    s.initial = [p](Vec2 x) { return State{std::max(0.0, p.rest_depth - conical_island_bathymetry(x)), 0.0, 0.0}; };
    s.inflow = InflowSpec{[p](double t) { return solitary_inflow_depth(t, p); }, p.rest_depth};
  }
  s.gauges = {{"g6", {9.36, 13.80}}, {"g9", {10.36, 13.80}}, {"g16", {12.96, 11.22}}, {"g22", {15.56, 13.80}}};
  return s;
}

inline std::vector<std::string> scenario_names() {
  return {"lake_at_rest_1", "lake_at_rest_2", "sloping_beach", "thacker_radial", "thacker_planar", "conical_island"};
}

}  // namespace swdg
