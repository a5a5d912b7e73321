#pragma once

// Post-stage limiting for wetting and drying:
//   1. Barth/Jespersen-type limiting of the total height H = h + b against the
//      centroid range of an edge or vertex neighbourhood,
//   2. positive-depth redistribution of the limited depth,
//   3. velocity-based limiting of each momentum component.
// All cells read centroid values of the unlimited input field only, so the
// result does not depend on the cell traversal order.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "swdg/field.hpp"
#include "swdg/mesh.hpp"
#include "swdg/wetdry.hpp"

namespace swdg {

inline Neighborhood neighborhood_of(LimiterVariant v) {
  return v == LimiterVariant::kEdgeBased ? Neighborhood::kEdge : Neighborhood::kVertex;
}

/// Min and max of per-cell centroid values over the cell and its neighbours.
inline std::pair<double, double> neighborhood_bounds(const Mesh& mesh, std::size_t c, LimiterVariant variant,
                                                     std::span<const double> centroid) {
  double lo = centroid[c], hi = centroid[c];
  const auto nb = variant == LimiterVariant::kEdgeBased ? mesh.edge_neighbors(c) : mesh.vertex_neighbors(c);
  for (int o : nb) {
    lo = std::min(lo, centroid[o]);
    hi = std::max(hi, centroid[o]);
  }
  return {lo, hi};
}

/// Correction factor alpha in [0,1] such that mean + alpha (v_i - mean)
/// stays within [lo, hi] at all three nodes.
inline double barth_jespersen_factor(const NodalValues& v, double mean, double lo, double hi) {
  double alpha = 1.0;
  for (double vi : v) {
    const double d = vi - mean;
    if (d > 0.0)
      alpha = std::min(alpha, std::min(1.0, (hi - mean) / d));
    else if (d < 0.0)
      alpha = std::min(alpha, std::min(1.0, (lo - mean) / d));
  }
  return std::max(alpha, 0.0);
}

inline NodalValues limit_linear(const NodalValues& v, double mean, double alpha) {
  return {mean + alpha * (v[0] - mean), mean + alpha * (v[1] - mean), mean + alpha * (v[2] - mean)};
}

struct DepthLimit {
  std::vector<NodalValues> depth;  // limited depth h^ = H^ - b
  std::vector<double> alpha;
};

inline DepthLimit limit_total_height(const CellField& field, const Bathymetry& bathy, const Mesh& mesh,
                                     LimiterVariant variant) {
  const std::size_t nc = mesh.num_cells();
  std::vector<double> centroid(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& b = bathy.cell(c);
    const auto& n = field[c];
    centroid[c] = ((n[0].h + b[0]) + (n[1].h + b[1]) + (n[2].h + b[2])) / 3.0;
  }
  DepthLimit out{std::vector<NodalValues>(nc), std::vector<double>(nc)};
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t ic = 0; ic < static_cast<std::ptrdiff_t>(nc); ++ic) {
    const auto c = static_cast<std::size_t>(ic);
    const auto& b = bathy.cell(c);
    const auto& n = field[c];
    const NodalValues total{n[0].h + b[0], n[1].h + b[1], n[2].h + b[2]};
    const auto [lo, hi] = neighborhood_bounds(mesh, c, variant, centroid);
    const double alpha = barth_jespersen_factor(total, centroid[c], lo, hi);
    out.alpha[c] = alpha;
    if (alpha == 1.0) {
      out.depth[c] = {n[0].h, n[1].h, n[2].h};
    } else {
      const auto lim = limit_linear(total, centroid[c], alpha);
      out.depth[c] = {lim[0] - b[0], lim[1] - b[1], lim[2] - b[2]};
    }
  }
  return out;
}

/// Mass-conserving redistribution that makes all nodal depths nonnegative.
/// Throws SolverAbort if the cell mean is negative by more than `roundoff`;
/// a mean within round-off of zero yields an empty cell.
inline NodalValues positive_depth(const NodalValues& h, double roundoff = 0.0) {
  if (h[0] >= 0.0 && h[1] >= 0.0 && h[2] >= 0.0) return h;
  const double sum = h[0] + h[1] + h[2];
  if (sum < 0.0) {
    if (sum < -roundoff)
      throw SolverAbort("negative cell-mean depth " + std::to_string(sum / 3.0) +
                        " (CFL condition for positivity violated)");
    return {0.0, 0.0, 0.0};
  }
  // ascending order, ties resolved by node index
  std::array<int, 3> o{0, 1, 2};
  std::stable_sort(o.begin(), o.end(), [&](int a, int b) { return h[a] < h[b]; });
  NodalValues out;
  out[o[0]] = 0.0;
  out[o[1]] = std::max(0.0, h[o[1]] - (out[o[0]] - h[o[0]]) / 2.0);
  out[o[2]] = std::max(0.0, h[o[2]] - (out[o[0]] - h[o[0]]) - (out[o[1]] - h[o[1]]));
  return out;
}

/// Result of limiting one momentum component in one cell.
struct CellMomentumLimit {
  NodalValues momentum;
  int candidate = -1;     // node whose velocity was reconstructed, -1 when none qualified
  bool fallback = false;  // momentum mean not preserved
};

/// Velocity-based limiting of one momentum component in one cell.
///   m       nodal momentum component
///   h       unlimited nodal depth (nodal velocities use it)
///   h_lim   limited nodal depth (reconstruction uses it)
///   lo, hi  admissible range of centroid velocities in the neighbourhood
inline CellMomentumLimit limit_cell_momentum(const NodalValues& m, const NodalValues& h, const NodalValues& h_lim,
                                             double lo, double hi, double tol_wet) {
  const double m_mean = (m[0] + m[1] + m[2]) / 3.0;
  NodalValues u_hat;
  for (int i = 0; i < 3; ++i) u_hat[i] = std::clamp(nodal_velocity(h[i], m[i], tol_wet), lo, hi);

  constexpr double kExcluded = std::numeric_limits<double>::infinity();
  std::array<double, 3> spread{kExcluded, kExcluded, kExcluded};
  NodalValues candidate{};
  for (int i = 0; i < 3; ++i) {
    if (h_lim[i] < tol_wet) continue;
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    candidate[i] = (3.0 * m_mean - h_lim[j] * u_hat[j] - h_lim[k] * u_hat[k]) / h_lim[i];
    spread[i] = std::max({candidate[i], u_hat[j], u_hat[k]}) - std::min({candidate[i], u_hat[j], u_hat[k]});
  }
  // spreads equal up to round-off count as ties; the lowest index wins
  const double scale = std::max({std::abs(lo), std::abs(hi), std::abs(u_hat[0]), std::abs(u_hat[1]), std::abs(u_hat[2])});
  const double tie = 64.0 * std::numeric_limits<double>::epsilon() * scale;
  int best = -1;
  for (int i = 0; i < 3; ++i)
    if (spread[i] != kExcluded && (best < 0 || spread[i] < spread[best] - tie)) best = i;

  CellMomentumLimit out;
  if (best < 0) {
    const double h_mean = (h_lim[0] + h_lim[1] + h_lim[2]) / 3.0;
    const double v = h_mean >= tol_wet ? m_mean : 0.0;
    out.momentum = {v, v, v};
    out.fallback = true;
    return out;
  }
  // In a thin cell (mean depth below tol_wet) the surviving candidates divide
  // by a depth barely above the tolerance and can carry arbitrary velocities.
  // They are held to the admissible range; the momentum mean then changes.
  const double h_mean = (h_lim[0] + h_lim[1] + h_lim[2]) / 3.0;
  if (h_mean < tol_wet) {
    const double bounded = std::clamp(candidate[best], lo, hi);
    if (bounded != candidate[best]) {
      candidate[best] = bounded;
      out.fallback = true;
    }
  }
  for (int i = 0; i < 3; ++i) out.momentum[i] = h_lim[i] * (i == best ? candidate[i] : u_hat[i]);
  out.candidate = best;
  return out;
}

struct LimiterOptions {
  LimiterVariant variant = LimiterVariant::kVertexBased;
  MomentumLimiting momentum = MomentumLimiting::kVelocityBased;
  double tol_wet = 1e-6;
  bool enabled = true;  // off only for temporal order studies on smooth data
};

struct MomentumLimit {
  std::vector<NodalValues> hu;
  std::vector<NodalValues> hv;
  std::size_t fallback_cells = 0;  // cells where the momentum mean was not preserved
};

/// Momentum limiting for all cells. `field` carries the unlimited depth and
/// momentum; `h_lim` the output of the depth limiter.
inline MomentumLimit limit_momentum(const CellField& field, const std::vector<NodalValues>& h_lim, const Mesh& mesh,
                                    LimiterVariant variant, double tol_wet,
                                    MomentumLimiting mode = MomentumLimiting::kVelocityBased) {
  const std::size_t nc = mesh.num_cells();
  std::vector<double> cx(nc), cy(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const State mean = field.mean(c);
    if (mode == MomentumLimiting::kVelocityBased) {
      cx[c] = nodal_velocity(mean.h, mean.hu, tol_wet);
      cy[c] = nodal_velocity(mean.h, mean.hv, tol_wet);
    } else {
      cx[c] = mean.hu;
      cy[c] = mean.hv;
    }
  }
  MomentumLimit out{std::vector<NodalValues>(nc), std::vector<NodalValues>(nc), 0};
  std::vector<unsigned char> fell_back(nc, 0);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t ic = 0; ic < static_cast<std::ptrdiff_t>(nc); ++ic) {
    const auto c = static_cast<std::size_t>(ic);
    const auto& n = field[c];
    const NodalValues h{n[0].h, n[1].h, n[2].h};
    const NodalValues mx{n[0].hu, n[1].hu, n[2].hu};
    const NodalValues my{n[0].hv, n[1].hv, n[2].hv};
    const auto [xlo, xhi] = neighborhood_bounds(mesh, c, variant, cx);
    const auto [ylo, yhi] = neighborhood_bounds(mesh, c, variant, cy);
    if (mode == MomentumLimiting::kVelocityBased) {
      const auto rx = limit_cell_momentum(mx, h, h_lim[c], xlo, xhi, tol_wet);
      const auto ry = limit_cell_momentum(my, h, h_lim[c], ylo, yhi, tol_wet);
      out.hu[c] = rx.momentum;
      out.hv[c] = ry.momentum;
      fell_back[c] = (rx.fallback || ry.fallback) ? 1 : 0;
    } else {
      out.hu[c] = limit_linear(mx, cx[c], barth_jespersen_factor(mx, cx[c], xlo, xhi));
      out.hv[c] = limit_linear(my, cy[c], barth_jespersen_factor(my, cy[c], ylo, yhi));
    }
  }
  for (auto f : fell_back) out.fallback_cells += f;
  return out;
}

struct LimiterReport {
  std::size_t momentum_fallback_cells = 0;
};

/// Full limiter: total height -> positive depth -> momentum.
inline CellField apply_limiter(const CellField& field, const Bathymetry& bathy, const Mesh& mesh,
                               const LimiterOptions& opt, LimiterReport* report = nullptr) {
  check_tolerance(opt.tol_wet);
  if (field.size() != mesh.num_cells() || bathy.num_cells() != mesh.num_cells())
    throw InputError("apply_limiter: field, bathymetry and mesh sizes are inconsistent");
  if (!opt.enabled) return field;

  DepthLimit depth = limit_total_height(field, bathy, mesh, opt.variant);

  double scale = 0.0;
  for (const auto& n : field.nodes)
    for (const auto& s : n) scale = std::max(scale, std::abs(s.h));
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);

  const std::size_t nc = mesh.num_cells();
  std::vector<NodalValues> h_lim(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    const auto& n = field[c];
    if (n[0].h == 0.0 && n[1].h == 0.0 && n[2].h == 0.0)
      h_lim[c] = {0.0, 0.0, 0.0};  // nothing to limit in an empty cell
    else
      h_lim[c] = positive_depth(depth.depth[c], roundoff);
  }

  MomentumLimit mom = limit_momentum(field, h_lim, mesh, opt.variant, opt.tol_wet, opt.momentum);
  CellField out(nc);
  for (std::size_t c = 0; c < nc; ++c)
    for (int i = 0; i < 3; ++i) out[c][i] = {h_lim[c][i], mom.hu[c][i], mom.hv[c][i]};
  if (report) report->momentum_fallback_cells = mom.fallback_cells;
  return out;
}

}  // namespace swdg
