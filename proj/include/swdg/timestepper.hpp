#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "swdg/field.hpp"
#include "swdg/limiter.hpp"
#include "swdg/mesh.hpp"
#include "swdg/rhs.hpp"
#include "swdg/wetdry.hpp"

namespace swdg {

/// Reference 2D linear-stability limit for RKDG2 and the positivity limit.
inline constexpr double kCfl2dReference = 0.233;
inline constexpr double kCflPositivity = 1.0 / 3.0;

/// The 1D-to-2D CFL relation 2^(-1/(p-1)) cfl_1d; evaluates to 1/6 for p = 2
/// and 0.2333 for p = 3.
inline double cfl_2d_from_1d(double cfl_1d, int order) { return std::pow(2.0, -1.0 / (order - 1)) * cfl_1d; }

struct StepControl {
  enum class Mode { kFixed, kAdaptive };
  Mode mode = Mode::kFixed;
  double dt = 0.0;         // fixed mode
  double cfl_target = 0.2;  // adaptive mode
  double dt_floor = 0.0;    // adaptive mode; 0 selects 1e-9 times the initial step

  static StepControl fixed(double dt) { return {Mode::kFixed, dt, 0.0, 0.0}; }
  static StepControl adaptive(double cfl, double floor = 0.0) { return {Mode::kAdaptive, 0.0, cfl, floor}; }
};

/// Everything a step needs besides the state itself.
struct SolverContext {
  const Mesh* mesh = nullptr;
  const Bathymetry* bathy = nullptr;
  RhsParams rhs;
  LimiterOptions limiter;
  BoundaryContext bc;
};

struct StageStats {
  double min_depth = 0.0;  // min nodal h after limiting
  std::size_t gravity_off_cells = 0;
  std::size_t momentum_fallback_cells = 0;
};

struct StepStats {
  std::array<StageStats, 2> stage;
  double min_depth() const { return std::min(stage[0].min_depth, stage[1].min_depth); }
};

/// One limited Runge-Kutta stage: Lambda(U + dt H(U)) with H evaluated at time t.
inline CellField euler_stage(const CellField& u, double t, double dt, const SolverContext& ctx, StageStats* stats) {
  const WetDryFlags flags = classify_cells(u, *ctx.bathy, ctx.rhs.tol_wet);
  const CellField k = compute_rhs(u, *ctx.bathy, *ctx.mesh, flags, ctx.rhs, t, ctx.bc);
  LimiterReport rep;
  CellField out = apply_limiter(axpy(u, dt, k), *ctx.bathy, *ctx.mesh, ctx.limiter, &rep);
  if (stats) {
    stats->gravity_off_cells = flags.count(CellClass::kSemiDryGravityOff);
    stats->momentum_fallback_cells = rep.momentum_fallback_cells;
    stats->min_depth = out.min_depth();
  }
  return out;
}

/// Heun's method (TVD-RK2) with the limiter applied after each stage.
inline CellField heun_step(const CellField& u, double t, double dt, const SolverContext& ctx,
                           StepStats* stats = nullptr) {
  if (!(dt > 0.0)) throw InputError("time step must be positive");
  StageStats s1, s2;
  const CellField u1 = euler_stage(u, t, dt, ctx, &s1);
  const WetDryFlags flags = classify_cells(u1, *ctx.bathy, ctx.rhs.tol_wet);
  const CellField k = compute_rhs(u1, *ctx.bathy, *ctx.mesh, flags, ctx.rhs, t + dt, ctx.bc);
  CellField combo(u.size());
  for (std::size_t c = 0; c < u.size(); ++c)
    for (int i = 0; i < 3; ++i) combo[c][i] = u[c][i] * 0.5 + (u1[c][i] + k[c][i] * dt) * 0.5;
  LimiterReport rep;
  CellField out = apply_limiter(combo, *ctx.bathy, *ctx.mesh, ctx.limiter, &rep);
  if (stats) {
    s2.gravity_off_cells = flags.count(CellClass::kSemiDryGravityOff);
    s2.momentum_fallback_cells = rep.momentum_fallback_cells;
    s2.min_depth = out.min_depth();
    stats->stage = {s1, s2};
  }
  return out;
}

/// Largest nodal signal speed |u| + sqrt(g h) in a cell.
inline double cell_max_speed(const NodalStates& n, double g, double tol_wet) {
  double c = 0.0;
  for (const auto& s : n) {
    const double u = nodal_velocity(s.h, s.hu, tol_wet), v = nodal_velocity(s.h, s.hv, tol_wet);
    c = std::max(c, std::hypot(u, v) + std::sqrt(g * std::max(s.h, 0.0)));
  }
  return c;
}

struct CourantField {
  double max = 0.0;
  std::vector<double> per_cell;
};

inline CourantField courant_number(const CellField& field, const std::vector<double>& radius, double dt, double g,
                                   double tol_wet) {
  CourantField out{0.0, std::vector<double>(field.size())};
  for (std::size_t c = 0; c < field.size(); ++c) {
    out.per_cell[c] = dt * cell_max_speed(field[c], g, tol_wet) / radius[c];
    out.max = std::max(out.max, out.per_cell[c]);
  }
  return out;
}

/// dt = cfl * min(radius / c_max) over cells with nonzero signal speed.
/// Returns +inf when the whole domain is at rest and dry.
inline double stable_dt(const CellField& field, const std::vector<double>& radius, double cfl, double g,
                        double tol_wet) {
  if (!(cfl > 0.0)) throw InputError("cfl target must be positive");
  double dt = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < field.size(); ++c) {
    const double cmax = cell_max_speed(field[c], g, tol_wet);
    if (cmax > 0.0) dt = std::min(dt, cfl * radius[c] / cmax);
  }
  return dt;
}

/// Adaptive time step with a lower bound; falling below it aborts the run.
inline double adaptive_dt(const CellField& field, const std::vector<double>& radius, double cfl, double g,
                          double tol_wet, double dt_floor) {
  const double dt = stable_dt(field, radius, cfl, g, tol_wet);
  if (dt < dt_floor)
    throw SolverAbort("spurious-velocity collapse: adaptive time step " + std::to_string(dt) +
                      " fell below the floor " + std::to_string(dt_floor));
  return dt;
}

struct SolverSettings {
  RhsParams rhs;
  LimiterOptions limiter;
  StepControl step;
  CflMetric metric = CflMetric::kPatchInscribed;
};

/// Owns the evolving state of one simulation.
class Simulator {
 public:
  Simulator(const Mesh& mesh, const Bathymetry& bathy, const CellField& initial, const SolverSettings& settings,
            BoundaryContext bc = {})
      : mesh_(&mesh), bathy_(&bathy), settings_(settings), radius_(cfl_radius(mesh, settings.metric)) {
    ctx_.mesh = mesh_;
    ctx_.bathy = bathy_;
    ctx_.rhs = settings.rhs;
    ctx_.limiter = settings.limiter;
    ctx_.limiter.tol_wet = settings.rhs.tol_wet;
    ctx_.bc = bc;
    state_ = apply_limiter(initial, bathy, mesh, ctx_.limiter);
    if (settings_.step.mode == StepControl::Mode::kFixed) {
      if (!(settings_.step.dt > 0.0)) throw InputError("fixed time step must be positive");
    } else {
      initial_dt_ = stable_dt(state_, radius_, settings_.step.cfl_target, settings_.rhs.g, settings_.rhs.tol_wet);
      if (!std::isfinite(initial_dt_)) throw InputError("adaptive time step undefined for a state at rest and dry");
      if (settings_.step.dt_floor <= 0.0) settings_.step.dt_floor = 1e-9 * initial_dt_;
    }
  }

  double time() const { return t_; }
  std::size_t steps() const { return steps_; }
  const CellField& state() const { return state_; }
  const Mesh& mesh() const { return *mesh_; }
  const Bathymetry& bathymetry() const { return *bathy_; }
  const SolverSettings& settings() const { return settings_; }
  const std::vector<double>& radius() const { return radius_; }
  const StepStats& last_stats() const { return last_; }
  double initial_dt() const { return initial_dt_; }

  /// Step size the next step would use, before clipping to an end time.
  double next_dt() const {
    if (settings_.step.mode == StepControl::Mode::kFixed) return settings_.step.dt;
    return adaptive_dt(state_, radius_, settings_.step.cfl_target, settings_.rhs.g, settings_.rhs.tol_wet,
                       settings_.step.dt_floor);
  }

  /// Advances by one step, never past t_end. Returns the step size used.
  double step(double t_end = std::numeric_limits<double>::infinity()) {
    double dt = next_dt();
    if (t_ + dt >= t_end - 1e-9 * dt) dt = t_end - t_;
    state_ = heun_step(state_, t_, dt, ctx_, &last_);
    t_ = t_ + dt >= t_end - 1e-9 * dt ? t_end : t_ + dt;
    ++steps_;
    return dt;
  }

  double courant(double dt) const {
    return courant_number(state_, radius_, dt, settings_.rhs.g, settings_.rhs.tol_wet).max;
  }

 private:
  const Mesh* mesh_;
  const Bathymetry* bathy_;
  SolverSettings settings_;
  std::vector<double> radius_;
  SolverContext ctx_;
  CellField state_;
  double t_ = 0.0;
  std::size_t steps_ = 0;
  double initial_dt_ = 0.0;
  StepStats last_{};
};

}  // namespace swdg
