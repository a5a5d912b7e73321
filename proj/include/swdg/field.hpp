#pragma once

#include <array>
#include <functional>
#include <limits>
#include <vector>

#include "swdg/mesh.hpp"
#include "swdg/types.hpp"

namespace swdg {

/// Discrete DG solution: per cell, nodal (vertex) values of (h, hu, hv) in the
/// linear Lagrange basis. Nodal values of neighbouring cells are independent.
struct CellField {
  std::vector<NodalStates> nodes;

  CellField() = default;
  explicit CellField(std::size_t num_cells) : nodes(num_cells) {}

  std::size_t size() const { return nodes.size(); }
  NodalStates& operator[](std::size_t c) { return nodes[c]; }
  const NodalStates& operator[](std::size_t c) const { return nodes[c]; }

  /// Cell mean, equal to the centroid value for P1.
  State mean(std::size_t c) const {
    const auto& n = nodes[c];
    return (n[0] + n[1] + n[2]) * (1.0 / 3.0);
  }

  double min_depth() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& n : nodes)
      for (const auto& s : n) m = std::min(m, s.h);
    return m;
  }
};

/// a + s*b, nodewise.
inline CellField axpy(const CellField& a, double s, const CellField& b) {
  CellField out(a.size());
  for (std::size_t c = 0; c < a.size(); ++c)
    for (int i = 0; i < 3; ++i) out[c][i] = a[c][i] + b[c][i] * s;
  return out;
}

/// Continuous piecewise-linear bottom elevation, stored per vertex.
class Bathymetry {
 public:
  Bathymetry() = default;
  Bathymetry(const Mesh& mesh, std::vector<double> vertex_values) : vertex_(std::move(vertex_values)) {
    if (vertex_.size() != mesh.num_vertices())
      throw InputError("bathymetry size does not match the number of mesh vertices");
    cell_.resize(mesh.num_cells());
    grad_.resize(mesh.num_cells());
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto& v = mesh.cell(c);
      const auto& g = mesh.basis_gradients(c);
      cell_[c] = {vertex_[v[0]], vertex_[v[1]], vertex_[v[2]]};
      grad_[c] = g[0] * cell_[c][0] + g[1] * cell_[c][1] + g[2] * cell_[c][2];
    }
  }

  static Bathymetry interpolate(const Mesh& mesh, const std::function<double(Vec2)>& b) {
    std::vector<double> vals(mesh.num_vertices());
    for (std::size_t v = 0; v < vals.size(); ++v) vals[v] = b(mesh.vertices()[v]);
    return Bathymetry(mesh, std::move(vals));
  }

  static Bathymetry flat(const Mesh& mesh, double level = 0.0) {
    return Bathymetry(mesh, std::vector<double>(mesh.num_vertices(), level));
  }

  const std::vector<double>& vertex_values() const { return vertex_; }
  const NodalValues& cell(std::size_t c) const { return cell_[c]; }
  Vec2 gradient(std::size_t c) const { return grad_[c]; }
  std::size_t num_cells() const { return cell_.size(); }

 private:
  std::vector<double> vertex_;
  std::vector<NodalValues> cell_;
  std::vector<Vec2> grad_;
};

/// Nodal interpolation of a pointwise state into the DG space.
inline CellField interpolate_field(const Mesh& mesh, const std::function<State(Vec2)>& f) {
  CellField out(mesh.num_cells());
  std::vector<State> at_vertex(mesh.num_vertices());
  for (std::size_t v = 0; v < at_vertex.size(); ++v) at_vertex[v] = f(mesh.vertices()[v]);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (int i = 0; i < 3; ++i) out[c][i] = at_vertex[mesh.cell(c)[i]];
  return out;
}

}  // namespace swdg
