#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "swdg/field.hpp"
#include "swdg/mesh.hpp"
#include "swdg/quadrature.hpp"
#include "swdg/wetdry.hpp"

namespace swdg {

/// Total fluid volume sum(area * mean h).
inline double total_mass(const CellField& field, const Mesh& mesh) {
  double m = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c) m += mesh.area(c) * field.mean(c).h;
  return m;
}

/// E = int h |u|^2 / 2 + g h (h/2 + b), with the volume rule; velocities follow
/// the thin-layer convention.
inline double total_energy(const CellField& field, const Bathymetry& bathy, const Mesh& mesh, double g,
                           double tol_wet) {
  double e = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c) {
    const auto& n = field[c];
    const auto& b = bathy.cell(c);
    double cell = 0.0;
    for (const auto& qp : volume_quadrature()) {
      const State u = n[0] * qp.bary[0] + n[1] * qp.bary[1] + n[2] * qp.bary[2];
      const double bq = b[0] * qp.bary[0] + b[1] * qp.bary[1] + b[2] * qp.bary[2];
      const double vx = nodal_velocity(u.h, u.hu, tol_wet), vy = nodal_velocity(u.h, u.hv, tol_wet);
      cell += qp.weight * (0.5 * u.h * (vx * vx + vy * vy) + g * u.h * (0.5 * u.h + bq));
    }
    e += 2.0 * mesh.area(c) * cell;
  }
  return e;
}

struct ErrorNorms {
  double l2_h = 0.0;
  double linf_h = 0.0;
  double l2_m = 0.0;    // momentum vector, Euclidean in the components
  double linf_m = 0.0;
};

using ExactSolution = std::function<State(Vec2, double)>;

/// Errors against the nodal interpolant of the exact solution. L-infinity is
/// the largest nodal deviation; L2 integrates the (P1) difference exactly
/// with the volume rule.
inline ErrorNorms error_norms(const CellField& field, const ExactSolution& exact, const Mesh& mesh, double t) {
  std::vector<State> ex(mesh.num_vertices());
  for (std::size_t v = 0; v < ex.size(); ++v) ex[v] = exact(mesh.vertices()[v], t);
  ErrorNorms e;
  double sh = 0.0, sm = 0.0;
  for (std::size_t c = 0; c < field.size(); ++c) {
    NodalStates d;
    for (int i = 0; i < 3; ++i) {
      d[i] = field[c][i] - ex[mesh.cell(c)[i]];
      e.linf_h = std::max(e.linf_h, std::abs(d[i].h));
      e.linf_m = std::max(e.linf_m, std::hypot(d[i].hu, d[i].hv));
    }
    double ch = 0.0, cm = 0.0;
    for (const auto& qp : volume_quadrature()) {
      const State u = d[0] * qp.bary[0] + d[1] * qp.bary[1] + d[2] * qp.bary[2];
      ch += qp.weight * u.h * u.h;
      cm += qp.weight * (u.hu * u.hu + u.hv * u.hv);
    }
    sh += 2.0 * mesh.area(c) * ch;
    sm += 2.0 * mesh.area(c) * cm;
  }
  e.l2_h = std::sqrt(sh);
  e.l2_m = std::sqrt(sm);
  return e;
}

struct ConvergenceRates {
  std::vector<std::optional<double>> pairwise;  // empty optional: undefined (zero error)
  std::optional<double> fitted;                 // least-squares slope of log e over log dx
};

/// Experimental rates log(e_c/e_f)/log(dx_c/dx_f) for consecutive levels,
/// ordered from coarse to fine.
inline ConvergenceRates convergence_rate(const std::vector<double>& errors, const std::vector<double>& dxs) {
  if (errors.size() != dxs.size() || errors.size() < 2)
    throw InputError("convergence_rate needs matching error and resolution lists with at least two entries");
  for (std::size_t i = 0; i < dxs.size(); ++i) {
    if (!(dxs[i] > 0.0)) throw InputError("resolutions must be positive");
    if (i > 0 && !(dxs[i] < dxs[i - 1])) throw InputError("resolutions must decrease monotonically");
  }
  ConvergenceRates r;
  bool all_positive = true;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    if (errors[i] > 0.0 && errors[i + 1] > 0.0)
      r.pairwise.push_back(std::log(errors[i] / errors[i + 1]) / std::log(dxs[i] / dxs[i + 1]));
    else
      r.pairwise.push_back(std::nullopt);
  }
  for (double e : errors) all_positive = all_positive && e > 0.0;
  if (all_positive) {
    const double n = static_cast<double>(errors.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
      const double x = std::log(dxs[i]), y = std::log(errors[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    r.fitted = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return r;
}

}  // namespace swdg
