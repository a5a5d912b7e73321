#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace swdg {

inline constexpr double kDefaultGravity = 9.80616;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr Vec2 operator-() const { return {-x, -y}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }
constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Conserved variables (h, hu, hv) at one point.
struct State {
  double h = 0.0;
  double hu = 0.0;
  double hv = 0.0;

  constexpr State operator+(const State& o) const { return {h + o.h, hu + o.hu, hv + o.hv}; }
  constexpr State operator-(const State& o) const { return {h - o.h, hu - o.hu, hv - o.hv}; }
  constexpr State operator*(double s) const { return {h * s, hu * s, hv * s}; }
  constexpr State& operator+=(const State& o) {
    h += o.h;
    hu += o.hu;
    hv += o.hv;
    return *this;
  }
  constexpr State& operator-=(const State& o) {
    h -= o.h;
    hu -= o.hu;
    hv -= o.hv;
    return *this;
  }
  constexpr Vec2 momentum() const { return {hu, hv}; }
  constexpr bool operator==(const State&) const = default;
};

constexpr State operator*(double s, const State& u) { return u * s; }

/// Nodal values on the three vertices of a triangle.
using NodalStates = std::array<State, 3>;
using NodalValues = std::array<double, 3>;

/// Thrown for invalid input data (meshes, configs, parameters).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when the solver cannot continue (positivity loss, time step collapse).
class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DgForm { kWeak, kStrong };
enum class LimiterVariant { kEdgeBased, kVertexBased };
enum class MomentumLimiting { kVelocityBased, kDirect };

inline std::string to_string(DgForm f) { return f == DgForm::kWeak ? "weak" : "strong"; }
inline std::string to_string(LimiterVariant v) {
  return v == LimiterVariant::kEdgeBased ? "edge" : "vertex";
}
inline std::string to_string(MomentumLimiting m) {
  return m == MomentumLimiting::kVelocityBased ? "velocity" : "direct";
}

}  // namespace swdg
