#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "swdg/field.hpp"

namespace swdg {

enum class CellClass : std::uint8_t { kWet, kSemiDryPhysical, kSemiDryGravityOff, kDry };

/// Per-cell wet/dry classification and per-node dry masks (h < TOL_wet).
struct WetDryFlags {
  std::vector<CellClass> cell;
  std::vector<std::array<bool, 3>> dry_node;

  bool gravity_off(std::size_t c) const { return cell[c] == CellClass::kSemiDryGravityOff; }
  std::size_t count(CellClass k) const { return static_cast<std::size_t>(std::count(cell.begin(), cell.end(), k)); }
};

/// Velocity component at a point: m/h where h >= tol_wet, zero otherwise.
inline double nodal_velocity(double h, double m, double tol_wet) { return h >= tol_wet ? m / h : 0.0; }

inline void check_tolerance(double tol_wet) {
  if (!(tol_wet > 0.0)) throw InputError("TOL_wet must be positive");
}

/// Classification of a single cell from its nodal depths and bathymetry.
/// A cell with dry nodes is a lake-at-rest candidate (gravity terms switched
/// off) when max H - max b < tol_wet; ties count as physical.
inline CellClass classify_cell(const NodalValues& h, const NodalValues& b, double tol_wet) {
  int dry = 0;
  for (double hi : h) dry += hi < tol_wet ? 1 : 0;
  if (dry == 0) return CellClass::kWet;
  if (dry == 3) return CellClass::kDry;
  const double max_h_total = std::max({h[0] + b[0], h[1] + b[1], h[2] + b[2]});
  const double max_b = std::max({b[0], b[1], b[2]});
  return max_h_total - max_b < tol_wet ? CellClass::kSemiDryGravityOff : CellClass::kSemiDryPhysical;
}

inline WetDryFlags classify_cells(const CellField& field, const Bathymetry& bathy, double tol_wet) {
  check_tolerance(tol_wet);
  if (field.size() != bathy.num_cells()) throw InputError("field and bathymetry sizes differ");
  WetDryFlags flags;
  flags.cell.resize(field.size());
  flags.dry_node.resize(field.size());
  for (std::size_t c = 0; c < field.size(); ++c) {
    const auto& n = field[c];
    const NodalValues h{n[0].h, n[1].h, n[2].h};
    flags.cell[c] = classify_cell(h, bathy.cell(c), tol_wet);
    for (int i = 0; i < 3; ++i) flags.dry_node[c][i] = h[i] < tol_wet;
  }
  return flags;
}

}  // namespace swdg
