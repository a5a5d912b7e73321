#pragma once

#include <algorithm>
#include <cmath>

#include "swdg/types.hpp"
#include "swdg/wetdry.hpp"

namespace swdg {

/// Physical flux F(U): one 2-vector per conserved variable.
struct FluxTensor {
  Vec2 mass;
  Vec2 xmom;
  Vec2 ymom;

  State dot(Vec2 n) const { return {swdg::dot(mass, n), swdg::dot(xmom, n), swdg::dot(ymom, n)}; }
};

/// F(U) = (hu, hu (x) u + g/2 h^2 I). Below tol_wet the velocity is zero, so a
/// thin layer carries neither mass nor momentum by advection; only pressure
/// and the Rusanov dissipation act there.
inline FluxTensor physical_flux(const State& u, double g, double tol_wet) {
  const double p = 0.5 * g * u.h * u.h;
  if (!(u.h >= tol_wet)) return {{0.0, 0.0}, {p, 0.0}, {0.0, p}};
  const double vx = u.hu / u.h;
  const double vy = u.hv / u.h;
  return {{u.hu, u.hv}, {u.hu * vx + p, u.hu * vy}, {u.hv * vx, u.hv * vy + p}};
}

/// Largest characteristic speed |u.n| + sqrt(g h) of one state.
inline double normal_wave_speed(const State& u, Vec2 n, double g, double tol_wet) {
  const double un = nodal_velocity(u.h, u.hu, tol_wet) * n.x + nodal_velocity(u.h, u.hv, tol_wet) * n.y;
  return std::abs(un) + std::sqrt(g * std::max(u.h, 0.0));
}

/// Rusanov (local Lax-Friedrichs) flux through a unit normal n pointing from
/// the interior state to the exterior one.
inline State rusanov_flux(const State& interior, const State& exterior, Vec2 n, double g, double tol_wet) {
  const State fl = physical_flux(interior, g, tol_wet).dot(n);
  const State fr = physical_flux(exterior, g, tol_wet).dot(n);
  const double lambda =
      std::max(normal_wave_speed(interior, n, g, tol_wet), normal_wave_speed(exterior, n, g, tol_wet));
  return (fl + fr) * 0.5 - (exterior - interior) * (0.5 * lambda);
}

}  // namespace swdg
