#pragma once

#include <cmath>
#include <functional>

#include "swdg/mesh.hpp"
#include "swdg/types.hpp"

namespace swdg {

/// Prescribed inflow: boundary depth as a function of time, with the normal
/// velocity of a right-going simple wave u = 2(sqrt(g h) - sqrt(g h0)).
struct InflowSpec {
  std::function<double(double)> depth;
  double rest_depth = 0.0;
};

inline double simple_wave_speed(double h, double rest_depth, double g) {
  return 2.0 * (std::sqrt(g * h) - std::sqrt(g * rest_depth));
}

/// Exterior state for a boundary edge with outward unit normal n.
/// Periodic edges are resolved by the mesh and never reach this function.
inline State ghost_state(const BoundaryTag& tag, const State& interior, Vec2 n, double t, double g,
                         const InflowSpec* inflow = nullptr) {
  switch (tag.kind) {
    case BoundaryKind::kWall: {
      const double mn = interior.hu * n.x + interior.hv * n.y;
      return {interior.h, interior.hu - 2.0 * mn * n.x, interior.hv - 2.0 * mn * n.y};
    }
    case BoundaryKind::kTransparent:
      return interior;
    case BoundaryKind::kInflow: {
      if (inflow == nullptr || !inflow->depth) throw InputError("inflow boundary without an inflow specification");
      const double h = inflow->depth(t);
      const double speed = simple_wave_speed(h, inflow->rest_depth, g);
      return {h, -n.x * speed * h, -n.y * speed * h};
    }
    case BoundaryKind::kPeriodic:
      break;
  }
  throw InputError("periodic boundary edge has no partner in the mesh");
}

}  // namespace swdg
