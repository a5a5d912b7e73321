#pragma once

// Element residuals of the P1 nodal DG discretisation and the resulting
// nodal time derivative.
//
// Volume integrals use the edge-midpoint rule and edge integrals two-point
// Gauss-Legendre, both exact for the h^2 pressure and h*grad(b) source terms
// of P1 data, which keeps the lake at rest in balance.

#include <array>
#include <cmath>
#include <vector>

#include "swdg/boundary.hpp"
#include "swdg/field.hpp"
#include "swdg/flux.hpp"
#include "swdg/mesh.hpp"
#include "swdg/quadrature.hpp"
#include "swdg/wetdry.hpp"

namespace swdg {

struct RhsParams {
  DgForm form = DgForm::kStrong;
  double g = kDefaultGravity;
  double tol_wet = 1e-6;
};

/// Time-dependent boundary data.
struct BoundaryContext {
  const InflowSpec* inflow = nullptr;
};

namespace detail {

/// Value of the P1 field on local edge k at parameter s (0 at vertex k).
inline State edge_trace(const NodalStates& n, int k, double s) {
  return n[k] * (1.0 - s) + n[(k + 1) % 3] * s;
}

/// In-cell divergence of the advective momentum flux hu (x) u for linear h and
/// m, evaluated analytically. Zero at dry points.
inline std::array<double, 2> advective_divergence(const State& u, Vec2 gh, Vec2 gmx, Vec2 gmy, double tol_wet) {
  if (u.h < tol_wet) return {0.0, 0.0};
  const double a = u.hu, b = u.hv, h = u.h;
  const double ih = 1.0 / h, ih2 = ih * ih;
  const double dx_aa = 2.0 * a * gmx.x * ih - a * a * gh.x * ih2;
  const double dy_ab = (gmx.y * b + a * gmy.y) * ih - a * b * gh.y * ih2;
  const double dx_ab = (gmx.x * b + a * gmy.x) * ih - a * b * gh.x * ih2;
  const double dy_bb = 2.0 * b * gmy.y * ih - b * b * gh.y * ih2;
  return {dx_aa + dy_ab, dx_ab + dy_bb};
}

/// Apply the inverse of the exact P1 mass matrix (area/12 [[2,1,1],[1,2,1],[1,1,2]]).
inline NodalStates apply_inverse_mass(const NodalStates& r, double area) {
  const double s = 3.0 / area;
  const State sum = r[0] + r[1] + r[2];
  NodalStates out;
  for (int i = 0; i < 3; ++i) out[i] = (r[i] * 4.0 - sum) * s;
  return out;
}

}  // namespace detail

/// Nodal time derivative dU/dt of the semi-discrete system. `flags` must be
/// computed from `field`; time t is passed to the boundary data.
inline CellField compute_rhs(const CellField& field, const Bathymetry& bathy, const Mesh& mesh,
                             const WetDryFlags& flags, const RhsParams& params, double t,
                             const BoundaryContext& bc = {}) {
  const std::size_t nc = mesh.num_cells();
  if (field.size() != nc || bathy.num_cells() != nc || flags.cell.size() != nc)
    throw InputError("compute_rhs: field, bathymetry, flags and mesh sizes are inconsistent");

  const double g = params.g, tol = params.tol_wet;
  const auto eq = edge_quadrature();
  const auto vq = volume_quadrature();

  // Numerical flux per edge and quadrature point, oriented along the left
  // normal, plus the edge-mean depth seen on each side (for the weak-form
  // wet-edge test).
  struct EdgeData {
    std::array<State, 2> flux;
    std::array<double, 2> mean_depth;  // [left, right or ghost]
  };
  std::vector<EdgeData> ed(mesh.num_edges());
  const auto& edges = mesh.edges();
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t ie = 0; ie < static_cast<std::ptrdiff_t>(edges.size()); ++ie) {
    const Edge& e = edges[ie];
    const auto& ln = field[e.left.cell];
    EdgeData& d = ed[ie];
    d.mean_depth = {0.0, 0.0};
    for (int q = 0; q < 2; ++q) {
      const State in = detail::edge_trace(ln, e.left.local, eq[q].s);
      State out;
      if (e.has_neighbor()) {
        // the right cell traverses the edge in the opposite direction
        out = detail::edge_trace(field[e.right.cell], e.right.local, 1.0 - eq[q].s);
      } else {
        out = ghost_state(*e.tag, in, e.normal, t, g, bc.inflow);
      }
      d.flux[q] = rusanov_flux(in, out, e.normal, g, tol);
      d.mean_depth[0] += eq[q].weight * in.h;
      d.mean_depth[1] += eq[q].weight * out.h;
    }
  }

  CellField rhs(nc);
#if defined(_OPENMP)
#pragma omp parallel for schedule(static)
#endif
  for (std::ptrdiff_t ic = 0; ic < static_cast<std::ptrdiff_t>(nc); ++ic) {
    const std::size_t c = static_cast<std::size_t>(ic);
    const auto& n = field[c];
    const double area = mesh.area(c);
    const auto& grad = mesh.basis_gradients(c);
    const Vec2 grad_b = bathy.gradient(c);
    const bool gravity = !flags.gravity_off(c);
    const double g_vol = gravity ? g : 0.0;

    NodalStates r{};

    // Volume terms.
    if (params.form == DgForm::kStrong) {
      // Gravity terms always use the strong form g h grad(h + b). The
      // advective terms use the analytic divergence only in fully wet cells:
      // near a thin layer m (x) m / h is far from linear, the midpoint rule
      // and the edge traces no longer agree, and the mismatch feeds spurious
      // shoreline velocities. Semi-dry cells therefore integrate advection by
      // parts, as does the mass equation everywhere, which keeps every cell
      // mean update a pure sum of edge fluxes.
      const bool analytic = flags.cell[c] == CellClass::kWet;
      const Vec2 gh = grad[0] * n[0].h + grad[1] * n[1].h + grad[2] * n[2].h;
      const Vec2 gmx = grad[0] * n[0].hu + grad[1] * n[1].hu + grad[2] * n[2].hu;
      const Vec2 gmy = grad[0] * n[0].hv + grad[1] * n[1].hv + grad[2] * n[2].hv;
      for (const auto& qp : vq) {
        const State u = n[0] * qp.bary[0] + n[1] * qp.bary[1] + n[2] * qp.bary[2];
        const FluxTensor fa = physical_flux(u, 0.0, tol);  // advective part only
        State res{0.0, g_vol * u.h * (gh.x + grad_b.x), g_vol * u.h * (gh.y + grad_b.y)};
        if (analytic) {
          const auto adv = detail::advective_divergence(u, gh, gmx, gmy, tol);
          res.hu += adv[0];
          res.hv += adv[1];
        }
        const double w = qp.weight * 2.0 * area;
        for (int k = 0; k < 3; ++k) {
          r[k] -= res * (w * qp.bary[k]);
          r[k].h += w * dot(fa.mass, grad[k]);
          if (!analytic) {
            r[k].hu += w * dot(fa.xmom, grad[k]);
            r[k].hv += w * dot(fa.ymom, grad[k]);
          }
        }
      }
    } else {
      for (const auto& qp : vq) {
        const State u = n[0] * qp.bary[0] + n[1] * qp.bary[1] + n[2] * qp.bary[2];
        FluxTensor f = physical_flux(u, g, tol);
        if (!gravity) {
          const double p = 0.5 * g * u.h * u.h;
          f.xmom.x -= p;
          f.ymom.y -= p;
        }
        const State src{0.0, -g_vol * u.h * grad_b.x, -g_vol * u.h * grad_b.y};
        const double w = qp.weight * 2.0 * area;
        for (int k = 0; k < 3; ++k) r[k] += (f.dot(grad[k]) + src * qp.bary[k]) * w;
      }
    }

    // Edge terms.
    for (int k = 0; k < 3; ++k) {
      const int ie = mesh.cell_edges(c)[k];
      const Edge& e = edges[ie];
      const bool is_left = e.left.cell == static_cast<int>(c) && e.left.local == k;
      const Vec2 nrm = is_left ? e.normal : -e.normal;
      const double other_mean_depth = ed[ie].mean_depth[is_left ? 1 : 0];
      const bool wet_edge = other_mean_depth >= tol;
      for (int q = 0; q < 2; ++q) {
        const double s = eq[q].s;
        const State own = detail::edge_trace(n, k, s);
        // the left side's point 1-q coincides with this side's point q
        State fstar = is_left ? ed[ie].flux[q] : ed[ie].flux[1 - q] * -1.0;
        if (params.form == DgForm::kStrong) {
          const double p = 0.5 * g * own.h * own.h;
          fstar.hu -= p * nrm.x;
          fstar.hv -= p * nrm.y;
          if (flags.cell[c] == CellClass::kWet) {
            const State fa = physical_flux(own, 0.0, tol).dot(nrm);
            fstar.hu -= fa.hu;
            fstar.hv -= fa.hv;
          }
        } else if (!gravity && wet_edge) {
          const double p = 0.5 * g * own.h * own.h;
          fstar.hu -= p * nrm.x;
          fstar.hv -= p * nrm.y;
        }
        const double w = eq[q].weight * e.length;
        r[k] -= fstar * (w * (1.0 - s));
        r[(k + 1) % 3] -= fstar * (w * s);
      }
    }
    rhs[c] = detail::apply_inverse_mass(r, area);
  }
  return rhs;
}

}  // namespace swdg
