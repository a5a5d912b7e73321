#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <set>
#include <sstream>

#include "test_support.hpp"

namespace swdg {
namespace {

using testing::unit_square;

TEST(Mesh, TwoTriangleSquareCounts) {
  const Mesh m = unit_square();
  EXPECT_EQ(m.num_cells(), 2u);
  EXPECT_EQ(m.num_vertices(), 4u);
  EXPECT_EQ(m.num_edges(), 5u);
}

TEST(Mesh, RefinementQuadruplesCells) {
  for (int level = 0; level <= 4; ++level) {
    const Mesh m = unit_square(BaseSplit::kTwoTriangle, level);
    EXPECT_EQ(m.num_cells(), 2u << (2 * level)) << "level " << level;
  }
  // level 1 and 2 against the structured constructor with 2^L squares per side
  EXPECT_EQ(build_structured_mesh({0, 1, 0, 1}, 2, 2, BaseSplit::kTwoTriangle).num_cells(), 8u);
  EXPECT_EQ(build_structured_mesh({0, 1, 0, 1}, 4, 4, BaseSplit::kTwoTriangle).num_cells(), 32u);
}

TEST(Mesh, PlanarOscillationGridHas8192Cells) {
  EXPECT_EQ(build_mesh(thacker_planar()).num_cells(), 8192u);
  EXPECT_EQ(build_structured_mesh({-2, 2, -2, 2}, 64, 64, BaseSplit::kTwoTriangle).num_cells(), 8192u);
}

TEST(Mesh, AreasSumToDomain) {
  const Rect r{-400.0, 50000.0, 0.0, 400.0};
  for (auto split : {BaseSplit::kTwoTriangle, BaseSplit::kFourTriangle}) {
    const Mesh m = build_uniform_mesh(r, split, 3);
    double s = 0.0;
    for (std::size_t c = 0; c < m.num_cells(); ++c) s += m.area(c);
    EXPECT_NEAR(s / r.area(), 1.0, 1e-12);
  }
}

TEST(Mesh, EdgeNormalsAreUnitAndOutward) {
  const Mesh m = unit_square(BaseSplit::kFourTriangle, 2);
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    const auto p = m.cell_points(c);
    for (int k = 0; k < 3; ++k) {
      const Vec2 n = m.outward_normal(c, k);
      EXPECT_NEAR(norm(n), 1.0, 1e-14);
      const Vec2 mid = (p[k] + p[(k + 1) % 3]) * 0.5;
      EXPECT_GT(dot(n, mid - m.centroid(c)), 0.0);
    }
  }
}

TEST(Mesh, ClockwiseCellsAreReoriented) {
  const Mesh m = Mesh::from_connectivity({{0, 0}, {1, 0}, {0, 1}}, {{{0, 2, 1}}},
                                         {{0, 1, BoundaryTag::wall()}, {1, 2, BoundaryTag::wall()},
                                          {2, 0, BoundaryTag::wall()}});
  EXPECT_NEAR(m.area(0), 0.5, 1e-15);
}

TEST(Mesh, ThreeCellsOnOneEdgeAreRejected) {
  // edge 0-1 is shared by cells 0, 1 and 2
  std::vector<Vec2> v{{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}};
  std::vector<std::array<int, 3>> c{{0, 1, 2}, {1, 0, 3}, {0, 1, 4}};
  EXPECT_THROW(Mesh::from_connectivity(v, c, {}), InputError);
}

TEST(Mesh, HangingNodeIsRejected) {
  // right square split at (1, 0.5) while the left square keeps edge 1-2 whole
  std::vector<Vec2> v{{0, 0}, {1, 0}, {1, 1}, {0, 1}, {2, 0}, {2, 1}, {1, 0.5}};
  std::vector<std::array<int, 3>> c{{0, 1, 2}, {0, 2, 3}, {1, 4, 6}, {6, 4, 5}, {6, 5, 2}};
  std::vector<BoundarySegment> b;
  const int loop[] = {0, 1, 4, 5, 2, 3, 0};
  for (int i = 0; i + 1 < 7; ++i) b.push_back({loop[i], loop[i + 1], BoundaryTag::wall()});
  // tag the three interior single-cell edges too so only the hanging node remains
  b.push_back({1, 2, BoundaryTag::wall()});
  b.push_back({1, 6, BoundaryTag::wall()});
  b.push_back({6, 2, BoundaryTag::wall()});
  try {
    Mesh::from_connectivity(v, c, b);
    FAIL() << "expected rejection";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("hanging"), std::string::npos) << e.what();
  }
}

TEST(Mesh, RepeatedVertexAndUncoveredBoundaryAreRejected) {
  EXPECT_THROW(Mesh::from_connectivity({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 1}}}, {}), InputError);
  EXPECT_THROW(Mesh::from_connectivity({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}}, {{0, 1, BoundaryTag::wall()}}),
               InputError);
}

TEST(Mesh, BadPeriodicSidesAreRejected) {
  SideTags s;
  s.left = BoundaryTag::periodic(0);
  EXPECT_THROW(build_uniform_mesh({0, 1, 0, 1}, BaseSplit::kTwoTriangle, 1, s), InputError);
}

TEST(MeshIo, RoundTripIsExact) {
  const Mesh m = build_uniform_mesh({-1.0 / 3.0, 2.0, 0.1, 1.7}, BaseSplit::kFourTriangle, 2,
                                    {BoundaryTag::inflow(), BoundaryTag::transparent(), BoundaryTag::periodic(1),
                                     BoundaryTag::periodic(1)});
  std::stringstream ss;
  write_mesh(ss, m);
  const Mesh r = read_mesh(ss);
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  ASSERT_EQ(r.num_cells(), m.num_cells());
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    EXPECT_EQ(r.vertices()[i].x, m.vertices()[i].x);
    EXPECT_EQ(r.vertices()[i].y, m.vertices()[i].y);
  }
  EXPECT_EQ(r.cells(), m.cells());
  ASSERT_EQ(r.boundary().size(), m.boundary().size());
  for (std::size_t i = 0; i < m.boundary().size(); ++i) {
    EXPECT_EQ(r.boundary()[i].va, m.boundary()[i].va);
    EXPECT_EQ(to_string(r.boundary()[i].tag), to_string(m.boundary()[i].tag));
  }
}

TEST(MeshIo, MalformedFilesAreRejected) {
  std::istringstream unknown_tag("VERTICES\n3\n0 0\n1 0\n0 1\nCELLS\n1\n0 1 2\nBOUNDARY\n3\n0 1 wall\n1 2 wall\n2 0 lava\n");
  EXPECT_THROW(read_mesh(unknown_tag), InputError);
  std::istringstream truncated("VERTICES\n3\n0 0\n1 0\n");
  EXPECT_THROW(read_mesh(truncated), InputError);
}

TEST(CflRadius, RightTriangleIncircle) {
  EXPECT_NEAR(triangle_inradius({0, 0}, {1, 0}, {0, 1}), (2.0 - std::sqrt(2.0)) / 2.0, 1e-15);
  EXPECT_NEAR(triangle_inradius({0, 0}, {1, 0}, {0, 1}), 0.292893, 1e-6);
}

TEST(CflRadius, EquilateralTriangle) {
  const double s = 3.0;
  const Vec2 a{0, 0}, b{s, 0}, c{0.5 * s, 0.5 * s * std::sqrt(3.0)};
  const Mesh m = Mesh::from_connectivity(
      {a, b, c}, {{{0, 1, 2}}},
      {{0, 1, BoundaryTag::wall()}, {1, 2, BoundaryTag::wall()}, {2, 0, BoundaryTag::wall()}});
  EXPECT_NEAR(cfl_radius(m, CflMetric::kIncircle)[0], s / (2.0 * std::sqrt(3.0)), 1e-14);
  // the largest circle centred at a vertex inside the triangle touches the opposite side
  EXPECT_NEAR(cfl_radius(m, CflMetric::kPatchInscribed)[0], s * std::sqrt(3.0) / 2.0, 1e-14);
}

TEST(CflRadius, RightIsoscelesPatchRadius) {
  // legs 1: the right-angle vertex is 1/sqrt(2) from the hypotenuse
  const auto r = cfl_radius(unit_square(), CflMetric::kPatchInscribed);
  for (double x : r) EXPECT_NEAR(x, 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(CflRadius, UniformMeshHasUniformRadius) {
  for (auto metric : {CflMetric::kIncircle, CflMetric::kPatchInscribed}) {
    const auto r = cfl_radius(unit_square(BaseSplit::kTwoTriangle, 3, SideTags::fully_periodic()), metric);
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    EXPECT_NEAR(*lo, *hi, 1e-15);
  }
}

TEST(CflRadius, RefinementHalvesRadius) {
  for (auto split : {BaseSplit::kTwoTriangle, BaseSplit::kFourTriangle})
    for (auto metric : {CflMetric::kIncircle, CflMetric::kPatchInscribed}) {
      const Mesh coarse = build_structured_mesh({0, 3, 0, 2}, 3, 2, split);
      const Mesh fine = refine_uniform(coarse);
      const auto rc = cfl_radius(coarse, metric);
      const auto rf = cfl_radius(fine, metric);
      // children 4c..4c+3 come from cell c; uniform structured meshes share one value
      for (std::size_t c = 0; c < coarse.num_cells(); ++c)
        for (int k = 0; k < 4; ++k) EXPECT_NEAR(rf[4 * c + k], 0.5 * rc[c], 1e-14);
    }
}

TEST(CflRadius, TranslationInvariantAndScalesLinearly) {
  const Mesh base = build_structured_mesh({0, 1, 0, 1}, 3, 3, BaseSplit::kFourTriangle);
  const Mesh shifted = build_structured_mesh({10.5, 11.5, -7.0, -6.0}, 3, 3, BaseSplit::kFourTriangle);
  const Mesh scaled = build_structured_mesh({0, 2.5, 0, 2.5}, 3, 3, BaseSplit::kFourTriangle);
  for (auto metric : {CflMetric::kIncircle, CflMetric::kPatchInscribed}) {
    const auto r0 = cfl_radius(base, metric), r1 = cfl_radius(shifted, metric), r2 = cfl_radius(scaled, metric);
    for (std::size_t c = 0; c < r0.size(); ++c) {
      EXPECT_NEAR(r1[c], r0[c], 1e-13);
      EXPECT_NEAR(r2[c], 2.5 * r0[c], 1e-13);
    }
  }
}

TEST(Neighborhood, InteriorCellOnStructuredGrid) {
  const Mesh m = build_structured_mesh({0, 4, 0, 4}, 4, 4, BaseSplit::kTwoTriangle);
  const std::size_t interior = (1 * 4 + 1) * 2;  // lower triangle of square (1,1)
  EXPECT_EQ(neighborhood(m, interior, Neighborhood::kEdge).size(), 4u);
  EXPECT_EQ(neighborhood(m, interior, Neighborhood::kVertex).size(), 13u);
  EXPECT_EQ(neighborhood(m, interior, Neighborhood::kEdge).front(), static_cast<int>(interior));
}

TEST(Neighborhood, VertexCountByEnumeration) {
  // oracle: cells sharing any vertex index with the interior cell
  const Mesh m = build_structured_mesh({0, 4, 0, 4}, 4, 4, BaseSplit::kTwoTriangle);
  for (std::size_t c : {10u, 11u, 12u, 19u}) {
    std::set<int> expect;
    for (std::size_t o = 0; o < m.num_cells(); ++o) {
      if (o == c) continue;
      for (int a : m.cell(c))
        for (int b : m.cell(o))
          if (a == b) expect.insert(static_cast<int>(o));
    }
    const auto nb = m.vertex_neighbors(c);
    EXPECT_EQ(std::set<int>(nb.begin(), nb.end()), expect) << "cell " << c;
  }
}

TEST(Neighborhood, CornerCellDropsMissingNeighbors) {
  const Mesh m = build_structured_mesh({0, 4, 0, 4}, 4, 4, BaseSplit::kTwoTriangle);
  EXPECT_LE(neighborhood(m, 0, Neighborhood::kEdge).size(), 3u);
  EXPECT_GE(neighborhood(m, 0, Neighborhood::kEdge).size(), 2u);
}

TEST(Neighborhood, PeriodicPairingCountsAsAdjacency) {
  const Mesh m = build_structured_mesh({0, 4, 0, 4}, 4, 4, BaseSplit::kTwoTriangle, SideTags::fully_periodic());
  for (std::size_t c = 0; c < m.num_cells(); ++c) {
    EXPECT_EQ(m.edge_neighbors(c).size(), 3u);
    EXPECT_EQ(m.vertex_neighbors(c).size(), 12u);
  }
}

TEST(Neighborhood, VertexContainsEdge) {
  for (const auto& sides : {SideTags{}, SideTags::fully_periodic()}) {
    const Mesh m = unit_square(BaseSplit::kFourTriangle, 2, sides);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      const auto e = neighborhood(m, c, Neighborhood::kEdge);
      const auto v = neighborhood(m, c, Neighborhood::kVertex);
      const std::set<int> vs(v.begin(), v.end());
      for (int x : e) EXPECT_TRUE(vs.count(x)) << "cell " << c << " neighbour " << x;
    }
  }
}

}  // namespace
}  // namespace swdg
