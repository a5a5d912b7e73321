#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"

namespace swdg {
namespace {

using testing::integrate_triangle;
using testing::max_abs;
using testing::max_abs_diff;
using testing::unit_square;

constexpr double kG = 9.80616;

TEST(PhysicalFlux, StillWater) {
  const FluxTensor f = physical_flux({1, 0, 0}, kG, 1e-6);
  EXPECT_EQ(f.mass.x, 0.0);
  EXPECT_EQ(f.mass.y, 0.0);
  EXPECT_NEAR(f.xmom.x, 4.90308, 1e-12);
  EXPECT_EQ(f.xmom.y, 0.0);
  EXPECT_EQ(f.ymom.x, 0.0);
  EXPECT_NEAR(f.ymom.y, 4.90308, 1e-12);
}

TEST(PhysicalFlux, DryStateIsZero) {
  const FluxTensor f = physical_flux({0, 0, 0}, kG, 1e-6);
  for (Vec2 v : {f.mass, f.xmom, f.ymom}) {
    EXPECT_EQ(v.x, 0.0);
    EXPECT_EQ(v.y, 0.0);
  }
}

TEST(PhysicalFlux, MovingWater) {
  const FluxTensor f = physical_flux({2, 2, 0}, kG, 1e-6);
  EXPECT_EQ(f.mass.x, 2.0);
  EXPECT_EQ(f.mass.y, 0.0);
  EXPECT_NEAR(f.xmom.x, 21.61232, 1e-12);
  EXPECT_EQ(f.xmom.y, 0.0);
}

TEST(PhysicalFlux, ThinLayerCarriesPressureOnly) {
  const FluxTensor f = physical_flux({1e-9, 1e-9, -1e-9}, kG, 1e-6);
  EXPECT_EQ(f.mass.x, 0.0);
  EXPECT_EQ(f.xmom.y, 0.0);
  EXPECT_NEAR(f.xmom.x, 0.5 * kG * 1e-18, 1e-30);
}

TEST(Rusanov, ConsistentWithEqualStates) {
  const State r = rusanov_flux({1, 0, 0}, {1, 0, 0}, {1, 0}, kG, 1e-6);
  EXPECT_EQ(r.h, 0.0);
  EXPECT_NEAR(r.hu, 4.90308, 1e-12);
  EXPECT_EQ(r.hv, 0.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const State u{1.5 + d(rng), d(rng), d(rng)};
    const double a = 3.14159 * d(rng);
    const Vec2 n{std::cos(a), std::sin(a)};
    const State f = rusanov_flux(u, u, n, kG, 1e-6);
    const State p = physical_flux(u, kG, 1e-6).dot(n);
    EXPECT_NEAR(f.h, p.h, 1e-15);
    EXPECT_NEAR(f.hu, p.hu, 1e-14);
    EXPECT_NEAR(f.hv, p.hv, 1e-14);
  }
}

TEST(Rusanov, DryDryEdge) {
  const State r = rusanov_flux({0, 0, 0}, {0, 0, 0}, {0, 1}, kG, 1e-6);
  EXPECT_EQ(r.h, 0.0);
  EXPECT_EQ(r.hu, 0.0);
  EXPECT_EQ(r.hv, 0.0);
}

TEST(Rusanov, DepthJump) {
  const State r = rusanov_flux({1, 0, 0}, {0.5, 0, 0}, {1, 0}, kG, 1e-6);
  EXPECT_NEAR(r.h, 0.782870, 1e-6);
  EXPECT_NEAR(r.hu, 3.064425, 1e-6);
  EXPECT_EQ(r.hv, 0.0);
}

TEST(Rusanov, FlippingNormalAndSidesNegates) {
  const State a{0.7, 0.2, -0.1}, b{0.4, -0.3, 0.05};
  const Vec2 n{0.6, 0.8};
  const State f = rusanov_flux(a, b, n, kG, 1e-6);
  const State g = rusanov_flux(b, a, -n, kG, 1e-6);
  EXPECT_NEAR(f.h, -g.h, 1e-15);
  EXPECT_NEAR(f.hu, -g.hu, 1e-15);
  EXPECT_NEAR(f.hv, -g.hv, 1e-15);
}

TEST(Quadrature, VolumeRule) {
  auto integrate = [](auto f) {
    double s = 0.0;
    for (const auto& q : volume_quadrature()) s += q.weight * f(q.ref.x, q.ref.y);
    return s;
  };
  EXPECT_NEAR(integrate([](double, double) { return 1.0; }), 0.5, 1e-15);
  EXPECT_NEAR(integrate([](double x, double y) { return x * y; }), 1.0 / 24.0, 1e-15);
  EXPECT_NEAR(integrate([](double x, double) { return x * x; }), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(integrate([](double, double y) { return y * y; }), 1.0 / 12.0, 1e-15);
  for (const auto& q : volume_quadrature()) {
    EXPECT_NEAR(q.bary[0] + q.bary[1] + q.bary[2], 1.0, 1e-15);
    EXPECT_NEAR(q.bary[1], q.ref.x, 1e-15);
    EXPECT_NEAR(q.bary[2], q.ref.y, 1e-15);
  }
}

TEST(Quadrature, EdgeRule) {
  double one = 0.0, cube = 0.0;
  for (const auto& q : edge_quadrature()) {
    one += q.weight;
    cube += q.weight * q.s * q.s * q.s;
  }
  EXPECT_NEAR(one, 1.0, 1e-15);
  EXPECT_NEAR(cube, 0.25, 1e-15);
}

TEST(GhostState, Wall) {
  const State g = ghost_state(BoundaryTag::wall(), {1, 0.3, 0.2}, {1, 0}, 0.0, kG);
  EXPECT_EQ(g.h, 1.0);
  EXPECT_NEAR(g.hu, -0.3, 1e-15);
  EXPECT_NEAR(g.hv, 0.2, 1e-15);
}

TEST(GhostState, Transparent) {
  const State u{0.4, 0.1, -0.2};
  const State g = ghost_state(BoundaryTag::transparent(), u, {0, 1}, 0.0, kG);
  EXPECT_EQ(g.h, u.h);
  EXPECT_EQ(g.hu, u.hu);
  EXPECT_EQ(g.hv, u.hv);
}

TEST(GhostState, InflowAtRestDepth) {
  InflowSpec in{[](double) { return 0.13535; }, 0.13535};
  const State g = ghost_state(BoundaryTag::inflow(), {0.2, 0, 0}, {-1, 0}, 0.0, kG, &in);
  EXPECT_EQ(g.h, 0.13535);
  EXPECT_EQ(g.hu, 0.0);
  EXPECT_EQ(g.hv, 0.0);
}

TEST(GhostState, InflowSimpleWave) {
  InflowSpec in{[](double) { return 0.14; }, 0.13535};
  EXPECT_NEAR(simple_wave_speed(0.14, 0.13535, kG), 0.039246, 1e-6);
  // the left boundary has outward normal -x; the wave enters along +x
  const State g = ghost_state(BoundaryTag::inflow(), {0.2, 0, 0}, {-1, 0}, 0.0, kG, &in);
  EXPECT_NEAR(g.hu / g.h, 0.039246, 1e-6);
  EXPECT_EQ(g.hv, 0.0);
}

TEST(GhostState, InflowWithoutSpecificationThrows) {
  EXPECT_THROW(ghost_state(BoundaryTag::inflow(), {1, 0, 0}, {-1, 0}, 0.0, kG), InputError);
}

// ---------------------------------------------------------------------------
// Residual assembly

CellField rhs_of(const CellField& u, const Bathymetry& b, const Mesh& m, DgForm form, double tol = 1e-6) {
  const auto flags = classify_cells(u, b, tol);
  return compute_rhs(u, b, m, flags, {form, kG, tol}, 0.0);
}

TEST(Rhs, ConstantStateIsSteady) {
  const Mesh m = unit_square(BaseSplit::kFourTriangle, 3, SideTags::fully_periodic());
  const Bathymetry b = Bathymetry::flat(m);
  const CellField u = interpolate_field(m, [](Vec2) { return State{1.0, 0.0, 0.0}; });
  for (auto form : {DgForm::kStrong, DgForm::kWeak}) EXPECT_LE(max_abs(rhs_of(u, b, m, form)), 1e-13);
  const CellField moving = interpolate_field(m, [](Vec2) { return State{1.0, 0.3, -0.2}; });
  // the inverse mass matrix scales by 1/area, so round-off is amplified
  for (auto form : {DgForm::kStrong, DgForm::kWeak}) EXPECT_LE(max_abs(rhs_of(moving, b, m, form)), 1e-11);
}

TEST(Rhs, LakeAtRestIsWellBalanced) {
  for (const auto& spec : {lake_at_rest_1(), lake_at_rest_2()}) {
    const Mesh m = build_mesh(spec, 3);
    const Bathymetry b = build_bathymetry(spec, m);
    const CellField u = build_initial(spec, m);
    for (auto form : {DgForm::kStrong, DgForm::kWeak})
      EXPECT_LE(max_abs(rhs_of(u, b, m, form, spec.tol_wet)), 1e-12) << spec.name << ' ' << to_string(form);
  }
}

// Oracle for a continuous field at rest over a flat bottom: the edge fluxes
// reduce to the physical pressure, so the momentum tendency is the local L2
// projection of -g h grad h. Assembled with dense quadrature and a direct
// 3x3 solve.
TEST(Rhs, TwoCellPatchMatchesHandAssembly) {
  const Mesh m = unit_square();
  const Bathymetry b = Bathymetry::flat(m);
  auto h = [](Vec2 p) { return 1.0 + 0.3 * p.x - 0.2 * p.y; };
  const Vec2 gh{0.3, -0.2};
  const CellField u = interpolate_field(m, [&](Vec2 p) { return State{h(p), 0.0, 0.0}; });
  for (auto form : {DgForm::kStrong, DgForm::kWeak}) {
    const CellField r = rhs_of(u, b, m, form);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
      const auto p = m.cell_points(c);
      std::array<double, 3> rx{}, ry{};
      for (int i = 0; i < 3; ++i) {
        rx[i] = integrate_triangle(p[0], p[1], p[2], [&](Vec2 x, auto l) { return -kG * h(x) * gh.x * l[i]; });
        ry[i] = integrate_triangle(p[0], p[1], p[2], [&](Vec2 x, auto l) { return -kG * h(x) * gh.y * l[i]; });
      }
      const auto ex = testing::solve_mass(p[0], p[1], p[2], rx);
      const auto ey = testing::solve_mass(p[0], p[1], p[2], ry);
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(r[c][i].h, 0.0, 1e-13);
        EXPECT_NEAR(r[c][i].hu, ex[i], 1e-13) << to_string(form) << " cell " << c << " node " << i;
        EXPECT_NEAR(r[c][i].hv, ey[i], 1e-13);
      }
    }
  }
}

TEST(Rhs, InverseMassMatchesDenseSolve) {
  const Vec2 a{0.1, 0.2}, b{1.3, 0.4}, c{0.5, 1.1};
  const double area = 0.5 * cross(b - a, c - a);
  const NodalStates r{State{0.3, -1.0, 2.0}, State{0.7, 0.5, 0.0}, State{-0.2, 1.5, 0.25}};
  const NodalStates got = detail::apply_inverse_mass(r, area);
  const auto eh = testing::solve_mass(a, b, c, {r[0].h, r[1].h, r[2].h});
  const auto eu = testing::solve_mass(a, b, c, {r[0].hu, r[1].hu, r[2].hu});
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(got[i].h, eh[i], 1e-12);
    EXPECT_NEAR(got[i].hu, eu[i], 1e-12);
  }
}

TEST(Rhs, WeakAndStrongAgreeOnWetConstantVelocityData) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(0.5, 1.5);
  const Mesh m = unit_square(BaseSplit::kFourTriangle, 2);
  const Bathymetry b = Bathymetry::flat(m, 0.25);
  const double vx = 0.4, vy = -0.25;
  CellField u(m.num_cells());
  for (auto& n : u.nodes)
    for (auto& s : n) {
      s.h = d(rng);
      s.hu = s.h * vx;
      s.hv = s.h * vy;
    }
  const CellField weak = rhs_of(u, b, m, DgForm::kWeak);
  const CellField strong = rhs_of(u, b, m, DgForm::kStrong);
  EXPECT_LE(max_abs_diff(weak, strong), 1e-12);
  EXPECT_GT(max_abs(weak), 1e-3);
}

TEST(Rhs, RotationEquivariance) {
  const Mesh m = build_structured_mesh({-1, 1, -1, 1}, 3, 3, BaseSplit::kFourTriangle);
  std::vector<Vec2> rv;
  for (Vec2 p : m.vertices()) rv.push_back({-p.y, p.x});
  const Mesh rot = Mesh::from_connectivity(rv, m.cells(), m.boundary());
  ASSERT_EQ(rot.cells(), m.cells());

  auto bath = [](Vec2 p) { return 0.1 * p.x * p.x + 0.05 * p.y; };
  auto state = [](Vec2 p) { return State{1.0 + 0.2 * p.x - 0.1 * p.y * p.y, 0.3 + 0.1 * p.y, -0.2 * p.x}; };
  // fields on the rotated mesh are the pull-back of the originals
  auto unrotate = [](Vec2 q) { return Vec2{q.y, -q.x}; };
  const Bathymetry b = Bathymetry::interpolate(m, bath);
  const Bathymetry br = Bathymetry::interpolate(rot, [&](Vec2 q) { return bath(unrotate(q)); });
  const CellField u = interpolate_field(m, state);
  const CellField ur = interpolate_field(rot, [&](Vec2 q) {
    const State s = state(unrotate(q));
    return State{s.h, -s.hv, s.hu};
  });
  for (auto form : {DgForm::kStrong, DgForm::kWeak}) {
    const CellField r = rhs_of(u, b, m, form);
    const CellField rr = rhs_of(ur, br, rot, form);
    for (std::size_t c = 0; c < m.num_cells(); ++c)
      for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(rr[c][i].h, r[c][i].h, 1e-12);
        EXPECT_NEAR(rr[c][i].hu, -r[c][i].hv, 1e-12);
        EXPECT_NEAR(rr[c][i].hv, r[c][i].hu, 1e-12);
      }
  }
}

TEST(Rhs, MassTendencySumsToZero) {
  std::mt19937 rng(3);
  for (const auto& sides : {SideTags{}, SideTags::fully_periodic()}) {
    const Mesh m = unit_square(BaseSplit::kTwoTriangle, 3, sides);
    const Bathymetry b = Bathymetry::interpolate(m, [](Vec2 p) { return 0.3 * p.x * p.y; });
    for (int trial = 0; trial < 20; ++trial) {
      // includes dry and thin nodes
      CellField u = testing::random_field(m.num_cells(), rng, -0.2, 1.0, -0.5, 0.5);
      for (auto& n : u.nodes)
        for (auto& s : n)
          if (s.h < 0.0) s = {0.0, 0.0, 0.0};
      for (auto form : {DgForm::kStrong, DgForm::kWeak}) {
        const CellField r = rhs_of(u, b, m, form, 1e-3);
        double sum = 0.0, scale = 0.0;
        for (std::size_t c = 0; c < m.num_cells(); ++c) {
          sum += m.area(c) * r.mean(c).h;
          scale += m.area(c) * std::abs(r.mean(c).h);
        }
        EXPECT_LE(std::abs(sum), 1e-12 * std::max(scale, 1.0));
      }
    }
  }
}

TEST(Rhs, InconsistentSizesAreRejected) {
  const Mesh m = unit_square(BaseSplit::kTwoTriangle, 1);
  const Mesh other = unit_square(BaseSplit::kTwoTriangle, 2);
  const CellField u = interpolate_field(m, [](Vec2) { return State{1, 0, 0}; });
  const auto flags = classify_cells(u, Bathymetry::flat(m), 1e-6);
  EXPECT_THROW(compute_rhs(u, Bathymetry::flat(other), m, flags, {}, 0.0), InputError);
}

}  // namespace
}  // namespace swdg
