#pragma once

#include <array>
#include <cmath>

#include "swdg/types.hpp"

namespace swdg {

/// Quadrature point on the reference triangle {(x,y): x,y >= 0, x+y <= 1}.
/// `bary` holds the barycentric weights of the three vertices
/// (0,0), (1,0), (0,1); `weight` integrates over the reference area 1/2.
struct TrianglePoint {
  Vec2 ref;
  std::array<double, 3> bary;
  double weight;
};

/// Line point on [0,1] with weight summing to 1.
struct LinePoint {
  double s;
  double weight;
};

/// Edge-midpoint rule: three points, equal weights, exact for total degree <= 2.
inline constexpr std::array<TrianglePoint, 3> volume_quadrature() {
  return {{
      {{0.5, 0.0}, {0.5, 0.5, 0.0}, 1.0 / 6.0},
      {{0.5, 0.5}, {0.0, 0.5, 0.5}, 1.0 / 6.0},
      {{0.0, 0.5}, {0.5, 0.0, 0.5}, 1.0 / 6.0},
  }};
}

/// Two-point Gauss-Legendre rule on [0,1], exact for degree <= 3.
inline std::array<LinePoint, 2> edge_quadrature() {
  const double d = 0.5 / std::sqrt(3.0);
  return {{{0.5 - d, 0.5}, {0.5 + d, 0.5}}};
}

}  // namespace swdg
