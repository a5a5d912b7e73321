#pragma once

// Conforming triangular meshes: construction, uniform refinement, adjacency
// and the CFL grid metric.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "swdg/types.hpp"

namespace swdg {

enum class BoundaryKind { kWall, kTransparent, kInflow, kPeriodic };

struct BoundaryTag {
  BoundaryKind kind = BoundaryKind::kWall;
  int pair_id = -1;  // only meaningful for kPeriodic

  static BoundaryTag wall() { return {BoundaryKind::kWall, -1}; }
  static BoundaryTag transparent() { return {BoundaryKind::kTransparent, -1}; }
  static BoundaryTag inflow() { return {BoundaryKind::kInflow, -1}; }
  static BoundaryTag periodic(int id) { return {BoundaryKind::kPeriodic, id}; }

  bool operator==(const BoundaryTag&) const = default;
};

inline std::string to_string(const BoundaryTag& tag) {
  switch (tag.kind) {
    case BoundaryKind::kWall:
      return "wall";
    case BoundaryKind::kTransparent:
      return "transparent";
    case BoundaryKind::kInflow:
      return "inflow";
    case BoundaryKind::kPeriodic:
      return "periodic:" + std::to_string(tag.pair_id);
  }
  return "wall";
}

inline BoundaryTag parse_boundary_tag(const std::string& text) {
  if (text == "wall") return BoundaryTag::wall();
  if (text == "transparent") return BoundaryTag::transparent();
  if (text == "inflow") return BoundaryTag::inflow();
  if (text.rfind("periodic:", 0) == 0) {
    const std::string id = text.substr(9);
    if (id.empty() || !std::all_of(id.begin(), id.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
      throw InputError("invalid periodic pair id in boundary tag '" + text + "'");
    return BoundaryTag::periodic(std::stoi(id));
  }
  throw InputError("unknown boundary tag '" + text + "'");
}

/// One tagged boundary segment as it appears in mesh files.
struct BoundarySegment {
  int va = -1;
  int vb = -1;
  BoundaryTag tag;
};

struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Vec2 p, double slack = 1e-12) const {
    const double ex = slack * std::max(1.0, width()), ey = slack * std::max(1.0, height());
    return p.x >= x0 - ex && p.x <= x1 + ex && p.y >= y0 - ey && p.y <= y1 + ey;
  }
};

enum class BaseSplit { kTwoTriangle, kFourTriangle };

/// Boundary conditions on the four sides of a rectangle. Periodic sides must
/// come in opposite pairs.
struct SideTags {
  BoundaryTag left = BoundaryTag::wall();
  BoundaryTag right = BoundaryTag::wall();
  BoundaryTag bottom = BoundaryTag::wall();
  BoundaryTag top = BoundaryTag::wall();

  static SideTags all(BoundaryTag t) { return {t, t, t, t}; }
  static SideTags fully_periodic() {
    return {BoundaryTag::periodic(0), BoundaryTag::periodic(0), BoundaryTag::periodic(1),
            BoundaryTag::periodic(1)};
  }
};

/// Cell side of an edge: which cell and which of its local edges.
struct EdgeSide {
  int cell = -1;
  int local = -1;
};

/// Local edge k of a cell runs from vertex k to vertex (k+1)%3.
struct Edge {
  std::array<int, 2> vertices{-1, -1};  // in the left cell's traversal order
  EdgeSide left;
  EdgeSide right;  // right.cell < 0 on a non-periodic boundary
  Vec2 normal;     // unit, pointing out of the left cell
  double length = 0.0;
  std::optional<BoundaryTag> tag;  // set for every domain boundary edge, including periodic pairs

  bool has_neighbor() const { return right.cell >= 0; }
  bool is_periodic() const { return tag && tag->kind == BoundaryKind::kPeriodic; }
};

enum class Neighborhood { kEdge, kVertex };

/// Grid parameter used for the CFL restriction.
///  - kPatchInscribed: radius of the largest circle centred at a vertex that
///    fits inside the patch of triangles around it (the smallest altitude
///    from that vertex), aggregated to cells by the minimum over the three
///    vertices. For right isosceles triangles with leg l this is l/sqrt(2).
///  - kIncircle: same vertex/cell aggregation but using triangle inradii.
enum class CflMetric { kPatchInscribed, kIncircle };

/// Immutable conforming triangulation with adjacency data.
class Mesh {
 public:
  Mesh() = default;

  /// Builds and validates a mesh. Clockwise cells are reoriented; every edge
  /// that belongs to a single cell must be covered by exactly one boundary
  /// segment.
  static Mesh from_connectivity(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
                                std::vector<BoundarySegment> boundary);

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  const std::vector<Vec2>& vertices() const { return vertices_; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<BoundarySegment>& boundary() const { return boundary_; }

  const std::array<int, 3>& cell(std::size_t c) const { return cells_[c]; }
  const std::array<int, 3>& cell_edges(std::size_t c) const { return cell_edges_[c]; }
  double area(std::size_t c) const { return areas_[c]; }
  Vec2 centroid(std::size_t c) const {
    const auto& v = cells_[c];
    return (vertices_[v[0]] + vertices_[v[1]] + vertices_[v[2]]) * (1.0 / 3.0);
  }
  std::array<Vec2, 3> cell_points(std::size_t c) const {
    const auto& v = cells_[c];
    return {vertices_[v[0]], vertices_[v[1]], vertices_[v[2]]};
  }
  /// Gradients of the three barycentric (P1 nodal) basis functions.
  const std::array<Vec2, 3>& basis_gradients(std::size_t c) const { return gradients_[c]; }

  /// Outward unit normal of local edge k seen from cell c.
  Vec2 outward_normal(std::size_t c, int k) const {
    const Edge& e = edges_[cell_edges_[c][k]];
    return e.left.cell == static_cast<int>(c) && e.left.local == k ? e.normal : -e.normal;
  }

  /// Cells sharing an edge with c (periodic partners included), excluding c.
  std::span<const int> edge_neighbors(std::size_t c) const {
    return {edge_nbr_.data() + edge_nbr_off_[c], edge_nbr_off_[c + 1] - edge_nbr_off_[c]};
  }
  /// Cells sharing at least one (periodically identified) vertex with c, excluding c.
  std::span<const int> vertex_neighbors(std::size_t c) const {
    return {vert_nbr_.data() + vert_nbr_off_[c], vert_nbr_off_[c + 1] - vert_nbr_off_[c]};
  }
  /// Representative of the periodic equivalence class of vertex v.
  int vertex_class(std::size_t v) const { return vertex_class_[v]; }

  Rect bounding_box() const;

 private:
  void build_edges(std::vector<BoundarySegment> boundary);
  void pair_periodic_edges(std::vector<std::pair<EdgeSide, BoundaryTag>>& periodic_sides);
  void build_vertex_classes();
  void build_neighbors();
  void check_hanging_nodes() const;

  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<BoundarySegment> boundary_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<double> areas_;
  std::vector<std::array<Vec2, 3>> gradients_;
  std::vector<int> vertex_class_;
  std::vector<std::size_t> edge_nbr_off_;
  std::vector<int> edge_nbr_;
  std::vector<std::size_t> vert_nbr_off_;
  std::vector<int> vert_nbr_;
};

namespace detail {

inline double signed_area(Vec2 a, Vec2 b, Vec2 c) { return 0.5 * cross(b - a, c - a); }

inline std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smallest index is the representative
  }
};

}  // namespace detail

inline Mesh Mesh::from_connectivity(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
                                    std::vector<BoundarySegment> boundary) {
  Mesh m;
  m.vertices_ = std::move(vertices);
  m.cells_ = std::move(cells);
  const int nv = static_cast<int>(m.vertices_.size());
  if (m.cells_.empty()) throw InputError("mesh has no cells");

  m.areas_.resize(m.cells_.size());
  m.gradients_.resize(m.cells_.size());
  for (std::size_t c = 0; c < m.cells_.size(); ++c) {
    auto& v = m.cells_[c];
    for (int k = 0; k < 3; ++k)
      if (v[k] < 0 || v[k] >= nv)
        throw InputError("cell " + std::to_string(c) + " references vertex " + std::to_string(v[k]) +
                         " out of range");
    if (v[0] == v[1] || v[1] == v[2] || v[0] == v[2])
      throw InputError("cell " + std::to_string(c) + " repeats a vertex");
    double a = detail::signed_area(m.vertices_[v[0]], m.vertices_[v[1]], m.vertices_[v[2]]);
    if (a < 0.0) {
      std::swap(v[1], v[2]);
      a = -a;
    }
    if (!(a > 0.0)) throw InputError("cell " + std::to_string(c) + " is degenerate (zero area)");
    m.areas_[c] = a;
    const Vec2 p0 = m.vertices_[v[0]], p1 = m.vertices_[v[1]], p2 = m.vertices_[v[2]];
    const double inv2a = 1.0 / (2.0 * a);
    m.gradients_[c] = {Vec2{p1.y - p2.y, p2.x - p1.x} * inv2a, Vec2{p2.y - p0.y, p0.x - p2.x} * inv2a,
                       Vec2{p0.y - p1.y, p1.x - p0.x} * inv2a};
  }
  for (const auto& s : boundary)
    if (s.va < 0 || s.va >= nv || s.vb < 0 || s.vb >= nv || s.va == s.vb)
      throw InputError("boundary segment references invalid vertices " + std::to_string(s.va) + " " +
                       std::to_string(s.vb));

  m.build_edges(std::move(boundary));
  m.check_hanging_nodes();
  m.build_vertex_classes();
  m.build_neighbors();
  return m;
}

inline void Mesh::build_edges(std::vector<BoundarySegment> boundary) {
  // Collect the cell sides incident to each unordered vertex pair.
  std::unordered_map<std::uint64_t, std::vector<EdgeSide>> sides;
  sides.reserve(cells_.size() * 2);
  for (std::size_t c = 0; c < cells_.size(); ++c)
    for (int k = 0; k < 3; ++k)
      sides[detail::edge_key(cells_[c][k], cells_[c][(k + 1) % 3])].push_back({static_cast<int>(c), k});

  std::unordered_map<std::uint64_t, BoundaryTag> tags;
  for (const auto& s : boundary) {
    const auto key = detail::edge_key(s.va, s.vb);
    auto it = sides.find(key);
    if (it == sides.end())
      throw InputError("boundary segment " + std::to_string(s.va) + " " + std::to_string(s.vb) +
                       " is not an edge of the mesh");
    if (it->second.size() != 1)
      throw InputError("boundary segment " + std::to_string(s.va) + " " + std::to_string(s.vb) +
                       " is an interior edge");
    if (!tags.emplace(key, s.tag).second)
      throw InputError("boundary segment " + std::to_string(s.va) + " " + std::to_string(s.vb) +
                       " listed twice");
  }
  boundary_ = std::move(boundary);

  cell_edges_.assign(cells_.size(), {-1, -1, -1});
  std::vector<std::pair<EdgeSide, BoundaryTag>> periodic_sides;

  auto make_edge = [&](EdgeSide left, EdgeSide right) {
    Edge e;
    const auto& cv = cells_[left.cell];
    e.vertices = {cv[left.local], cv[(left.local + 1) % 3]};
    e.left = left;
    e.right = right;
    const Vec2 d = vertices_[e.vertices[1]] - vertices_[e.vertices[0]];
    e.length = norm(d);
    e.normal = Vec2{d.y, -d.x} * (1.0 / e.length);  // CCW cell => right-hand normal points outward
    return e;
  };

  // Deterministic traversal: by cell, then local edge.
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    for (int k = 0; k < 3; ++k) {
      if (cell_edges_[c][k] >= 0) continue;
      const auto key = detail::edge_key(cells_[c][k], cells_[c][(k + 1) % 3]);
      const auto& s = sides.at(key);
      if (s.size() > 2)
        throw InputError("non-conforming mesh: edge " + std::to_string(cells_[c][k]) + "-" +
                         std::to_string(cells_[c][(k + 1) % 3]) + " is shared by " +
                         std::to_string(s.size()) + " cells");
      if (s.size() == 2) {
        EdgeSide a = s[0], b = s[1];
        if (a.cell == b.cell) throw InputError("cell " + std::to_string(a.cell) + " folds onto itself");
        // Conforming neighbours traverse a shared edge in opposite directions.
        if (cells_[a.cell][a.local] != cells_[b.cell][(b.local + 1) % 3])
          throw InputError("inconsistent orientation across edge " + std::to_string(cells_[c][k]) + "-" +
                           std::to_string(cells_[c][(k + 1) % 3]) + " (overlapping cells)");
        if (b.cell < a.cell) std::swap(a, b);
        const int idx = static_cast<int>(edges_.size());
        edges_.push_back(make_edge(a, b));
        cell_edges_[a.cell][a.local] = idx;
        cell_edges_[b.cell][b.local] = idx;
      } else {
        auto t = tags.find(key);
        if (t == tags.end())
          throw InputError("boundary edge " + std::to_string(cells_[c][k]) + "-" +
                           std::to_string(cells_[c][(k + 1) % 3]) +
                           " has no boundary tag (non-conforming mesh or missing BOUNDARY entry)");
        if (t->second.kind == BoundaryKind::kPeriodic) {
          periodic_sides.push_back({s[0], t->second});
          continue;
        }
        const int idx = static_cast<int>(edges_.size());
        edges_.push_back(make_edge(s[0], EdgeSide{}));
        edges_.back().tag = t->second;
        cell_edges_[c][k] = idx;
      }
    }
  }
  pair_periodic_edges(periodic_sides);
}

inline void Mesh::pair_periodic_edges(std::vector<std::pair<EdgeSide, BoundaryTag>>& periodic_sides) {
  if (periodic_sides.empty()) return;
  const Rect box = bounding_box();
  const double tol = 1e-9 * std::max(box.width(), box.height());

  auto endpoints = [&](EdgeSide s) {
    const auto& cv = cells_[s.cell];
    return std::pair{vertices_[cv[s.local]], vertices_[cv[(s.local + 1) % 3]]};
  };
  auto close = [&](Vec2 a, Vec2 b) { return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol; };

  std::map<int, std::vector<EdgeSide>> groups;
  for (const auto& [side, tag] : periodic_sides) groups[tag.pair_id].push_back(side);

  for (auto& [pair_id, group] : groups) {
    const std::string where = "periodic pair " + std::to_string(pair_id);
    if (group.size() % 2 != 0) throw InputError(where + " has an odd number of edges");
    // A partner of edge s under translation T runs b+T -> a+T.
    auto matches = [&](EdgeSide s, EdgeSide t, Vec2 shift) {
      auto [a, b] = endpoints(s);
      auto [c, d] = endpoints(t);
      return close(c, b + shift) && close(d, a + shift);
    };
    const EdgeSide first = group.front();
    std::optional<Vec2> shift;
    std::vector<int> partner;
    for (std::size_t j = 1; j < group.size() && !shift; ++j) {
      auto [a, b] = endpoints(first);
      auto [c, d] = endpoints(group[j]);
      const Vec2 cand = c - b;
      if (!close(d, a + cand) || norm(cand) <= tol) continue;
      // Try to pair every edge with translation +cand or -cand.
      std::vector<int> p(group.size(), -1);
      bool ok = true;
      for (std::size_t i = 0; i < group.size() && ok; ++i) {
        if (p[i] >= 0) continue;
        bool found = false;
        for (std::size_t jdx = i + 1; jdx < group.size() && !found; ++jdx) {
          if (p[jdx] >= 0) continue;
          for (Vec2 sh : {cand, -cand}) {
            if (!matches(group[i], group[jdx], sh)) continue;
            p[i] = static_cast<int>(jdx);
            p[jdx] = static_cast<int>(i);
            found = true;
            break;
          }
        }
        ok = found;
      }
      if (ok) {
        shift = cand;
        partner = std::move(p);
      }
    }
    if (!shift) throw InputError(where + " edges do not form geometrically matching pairs");

    for (std::size_t i = 0; i < group.size(); ++i) {
      const auto j = static_cast<std::size_t>(partner[i]);
      if (j < i) continue;
      EdgeSide a = group[i], b = group[j];
      if (a.cell == b.cell) throw InputError(where + " pairs a cell with itself");
      if (b.cell < a.cell) std::swap(a, b);
      Edge e;
      const auto& cv = cells_[a.cell];
      e.vertices = {cv[a.local], cv[(a.local + 1) % 3]};
      e.left = a;
      e.right = b;
      const Vec2 d = vertices_[e.vertices[1]] - vertices_[e.vertices[0]];
      e.length = norm(d);
      e.normal = Vec2{d.y, -d.x} * (1.0 / e.length);
      e.tag = BoundaryTag::periodic(pair_id);
      const int idx = static_cast<int>(edges_.size());
      edges_.push_back(e);
      cell_edges_[a.cell][a.local] = idx;
      cell_edges_[b.cell][b.local] = idx;
    }
  }
}

inline void Mesh::check_hanging_nodes() const {
  // A hanging node shows up as a vertex lying in the interior of an edge that
  // has only one incident cell.
  std::vector<int> bverts;
  std::vector<const Edge*> bedges;
  for (const auto& e : edges_)
    if (e.tag) {
      bedges.push_back(&e);
      bverts.push_back(e.vertices[0]);
      bverts.push_back(e.vertices[1]);
    }
  std::sort(bverts.begin(), bverts.end());
  bverts.erase(std::unique(bverts.begin(), bverts.end()), bverts.end());
  for (const Edge* e : bedges) {
    const Vec2 a = vertices_[e->vertices[0]], b = vertices_[e->vertices[1]];
    const Vec2 d = b - a;
    const double len2 = dot(d, d);
    for (int v : bverts) {
      if (v == e->vertices[0] || v == e->vertices[1]) continue;
      const Vec2 p = vertices_[v] - a;
      const double s = dot(p, d) / len2;
      if (s <= 1e-12 || s >= 1.0 - 1e-12) continue;
      if (std::abs(cross(d, p)) <= 1e-12 * len2)
        throw InputError("hanging node: vertex " + std::to_string(v) + " lies on edge " +
                         std::to_string(e->vertices[0]) + "-" + std::to_string(e->vertices[1]));
    }
  }
}

inline void Mesh::build_vertex_classes() {
  detail::UnionFind uf(vertices_.size());
  for (const auto& e : edges_) {
    if (!e.is_periodic()) continue;
    const auto& lv = cells_[e.left.cell];
    const auto& rv = cells_[e.right.cell];
    const int a = lv[e.left.local], b = lv[(e.left.local + 1) % 3];
    const int c = rv[e.right.local], d = rv[(e.right.local + 1) % 3];
    uf.unite(a, d);
    uf.unite(b, c);
  }
  vertex_class_.resize(vertices_.size());
  for (std::size_t v = 0; v < vertices_.size(); ++v) vertex_class_[v] = uf.find(static_cast<int>(v));
}

inline void Mesh::build_neighbors() {
  const std::size_t nc = cells_.size();
  edge_nbr_off_.assign(nc + 1, 0);
  edge_nbr_.clear();
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<int> nb;
    for (int k = 0; k < 3; ++k) {
      const Edge& e = edges_[cell_edges_[c][k]];
      if (!e.has_neighbor()) continue;
      const int other = e.left.cell == static_cast<int>(c) ? e.right.cell : e.left.cell;
      nb.push_back(other);
    }
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    edge_nbr_.insert(edge_nbr_.end(), nb.begin(), nb.end());
    edge_nbr_off_[c + 1] = edge_nbr_.size();
  }

  std::vector<std::vector<int>> star(vertices_.size());
  for (std::size_t c = 0; c < nc; ++c)
    for (int v : cells_[c]) star[vertex_class_[v]].push_back(static_cast<int>(c));
  vert_nbr_off_.assign(nc + 1, 0);
  vert_nbr_.clear();
  std::vector<int> nb;
  for (std::size_t c = 0; c < nc; ++c) {
    nb.clear();
    for (int v : cells_[c])
      for (int o : star[vertex_class_[v]])
        if (o != static_cast<int>(c)) nb.push_back(o);
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    vert_nbr_.insert(vert_nbr_.end(), nb.begin(), nb.end());
    vert_nbr_off_[c + 1] = vert_nbr_.size();
  }
}

inline Rect Mesh::bounding_box() const {
  Rect r{vertices_.front().x, vertices_.front().x, vertices_.front().y, vertices_.front().y};
  for (const auto& p : vertices_) {
    r.x0 = std::min(r.x0, p.x);
    r.x1 = std::max(r.x1, p.x);
    r.y0 = std::min(r.y0, p.y);
    r.y1 = std::max(r.y1, p.y);
  }
  return r;
}

/// The considered cell followed by its edge- or vertex-connected cells.
inline std::vector<int> neighborhood(const Mesh& mesh, std::size_t cell, Neighborhood variant) {
  const auto nb = variant == Neighborhood::kEdge ? mesh.edge_neighbors(cell) : mesh.vertex_neighbors(cell);
  std::vector<int> out;
  out.reserve(nb.size() + 1);
  out.push_back(static_cast<int>(cell));
  out.insert(out.end(), nb.begin(), nb.end());
  return out;
}

inline double triangle_inradius(Vec2 a, Vec2 b, Vec2 c) {
  const double area = std::abs(detail::signed_area(a, b, c));
  const double semi = 0.5 * (norm(b - a) + norm(c - b) + norm(a - c));
  return area / semi;
}

/// Per-cell CFL grid parameter (meters).
inline std::vector<double> cfl_radius(const Mesh& mesh, CflMetric metric = CflMetric::kPatchInscribed) {
  std::vector<double> at_vertex(mesh.num_vertices(), std::numeric_limits<double>::infinity());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto p = mesh.cell_points(c);
    const auto& v = mesh.cell(c);
    for (int i = 0; i < 3; ++i) {
      double r;
      if (metric == CflMetric::kIncircle) {
        r = triangle_inradius(p[0], p[1], p[2]);
      } else {
        // distance from vertex i to the opposite edge
        r = 2.0 * mesh.area(c) / norm(p[(i + 2) % 3] - p[(i + 1) % 3]);
      }
      const int cls = mesh.vertex_class(v[i]);
      at_vertex[cls] = std::min(at_vertex[cls], r);
    }
  }
  std::vector<double> out(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cell(c);
    out[c] = std::min({at_vertex[mesh.vertex_class(v[0])], at_vertex[mesh.vertex_class(v[1])],
                       at_vertex[mesh.vertex_class(v[2])]});
  }
  return out;
}

namespace detail {

template <class CornerIndex>
std::vector<BoundarySegment> rect_boundary(int nx, int ny, const SideTags& sides, CornerIndex corner) {
  std::vector<BoundarySegment> b;
  for (int i = 0; i < nx; ++i) b.push_back({corner(i, 0), corner(i + 1, 0), sides.bottom});
  for (int j = 0; j < ny; ++j) b.push_back({corner(nx, j), corner(nx, j + 1), sides.right});
  for (int i = nx; i > 0; --i) b.push_back({corner(i, ny), corner(i - 1, ny), sides.top});
  for (int j = ny; j > 0; --j) b.push_back({corner(0, j), corner(0, j - 1), sides.left});
  return b;
}

inline void check_side_tags(const SideTags& s) {
  auto per = [](const BoundaryTag& t) { return t.kind == BoundaryKind::kPeriodic; };
  if (per(s.left) != per(s.right) || (per(s.left) && s.left.pair_id != s.right.pair_id))
    throw InputError("left/right sides must be periodic together with the same pair id");
  if (per(s.bottom) != per(s.top) || (per(s.bottom) && s.bottom.pair_id != s.top.pair_id))
    throw InputError("bottom/top sides must be periodic together with the same pair id");
  if (per(s.left) && per(s.bottom) && s.left.pair_id == s.bottom.pair_id)
    throw InputError("x- and y-periodic sides need distinct pair ids");
}

}  // namespace detail

/// nx-by-ny grid of rectangles, each split into two (diagonal from lower-left
/// to upper-right) or four (both diagonals) triangles.
inline Mesh build_structured_mesh(const Rect& domain, int nx, int ny, BaseSplit split,
                                  const SideTags& sides = {}) {
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw InputError("degenerate rectangle: extent must be positive in both directions");
  if (nx < 1 || ny < 1) throw InputError("structured mesh needs at least one rectangle per direction");
  detail::check_side_tags(sides);

  std::vector<Vec2> verts;
  auto corner = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) {
      const double x = i == nx ? domain.x1 : domain.x0 + domain.width() * i / nx;
      const double y = j == ny ? domain.y1 : domain.y0 + domain.height() * j / ny;
      verts.push_back({x, y});
    }
  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int v00 = corner(i, j), v10 = corner(i + 1, j), v11 = corner(i + 1, j + 1), v01 = corner(i, j + 1);
      if (split == BaseSplit::kTwoTriangle) {
        cells.push_back({v00, v10, v11});
        cells.push_back({v00, v11, v01});
      } else {
        const int ctr = static_cast<int>(verts.size());
        verts.push_back((verts[v00] + verts[v11]) * 0.5);
        cells.push_back({v00, v10, ctr});
        cells.push_back({v10, v11, ctr});
        cells.push_back({v11, v01, ctr});
        cells.push_back({v01, v00, ctr});
      }
    }
  auto boundary = detail::rect_boundary(nx, ny, sides, corner);
  return Mesh::from_connectivity(std::move(verts), std::move(cells), std::move(boundary));
}

/// Uniform red refinement: every triangle is split into four congruent
/// children through its edge midpoints.
inline Mesh refine_uniform(const Mesh& mesh) {
  std::vector<Vec2> verts = mesh.vertices();
  std::unordered_map<std::uint64_t, int> mid;
  auto midpoint = [&](int a, int b) {
    const auto key = detail::edge_key(a, b);
    auto it = mid.find(key);
    if (it != mid.end()) return it->second;
    const int idx = static_cast<int>(verts.size());
    verts.push_back((verts[a] + verts[b]) * 0.5);
    mid.emplace(key, idx);
    return idx;
  };
  std::vector<std::array<int, 3>> cells;
  cells.reserve(mesh.num_cells() * 4);
  for (const auto& c : mesh.cells()) {
    const int a = c[0], b = c[1], cc = c[2];
    const int ab = midpoint(a, b), bc = midpoint(b, cc), ca = midpoint(cc, a);
    cells.push_back({a, ab, ca});
    cells.push_back({ab, b, bc});
    cells.push_back({ca, bc, cc});
    cells.push_back({ab, bc, ca});
  }
  std::vector<BoundarySegment> boundary;
  boundary.reserve(mesh.boundary().size() * 2);
  for (const auto& s : mesh.boundary()) {
    const int m = midpoint(s.va, s.vb);
    boundary.push_back({s.va, m, s.tag});
    boundary.push_back({m, s.vb, s.tag});
  }
  return Mesh::from_connectivity(std::move(verts), std::move(cells), std::move(boundary));
}

/// Single rectangle split into two or four triangles, refined uniformly
/// `levels` times (2*4^L or 4*4^L cells).
inline Mesh build_uniform_mesh(const Rect& domain, BaseSplit split, int levels, const SideTags& sides = {}) {
  if (levels < 0) throw InputError("refinement_levels must be >= 0");
  Mesh m = build_structured_mesh(domain, 1, 1, split, sides);
  for (int l = 0; l < levels; ++l) m = refine_uniform(m);
  return m;
}

}  // namespace swdg
