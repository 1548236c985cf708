#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace acgeo {

inline constexpr double kPi = 3.14159265358979323846;

// error taxonomy; the CLI maps these onto exit codes
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct chart_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct regime_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct collapse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// the two area-minimizing arcs landed on the same geodesic (no width to sweep)
struct coincidence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Chart { Polar, Patch };

// A point in one of the two charts.
//   Polar: x1 = r (> 0), x2 = phi (unwrapped real lift)
//   Patch: x1 = u,        x2 = v   (Cartesian around the pole)
struct ChartPoint {
  Chart chart = Chart::Polar;
  double x1 = 0.0;
  double x2 = 0.0;

  static ChartPoint polar(double r, double phi) { return {Chart::Polar, r, phi}; }
  static ChartPoint patch(double u, double v) { return {Chart::Patch, u, v}; }

  double radius() const {
    return chart == Chart::Polar ? x1 : std::hypot(x1, x2);
  }
  bool is_polar() const { return chart == Chart::Polar; }
  bool is_patch() const { return chart == Chart::Patch; }
};

// Tangent vector components in the chart of the base point.
struct Vec2 {
  double x1 = 0.0;
  double x2 = 0.0;
  Vec2 operator+(Vec2 o) const { return {x1 + o.x1, x2 + o.x2}; }
  Vec2 operator-(Vec2 o) const { return {x1 - o.x1, x2 - o.x2}; }
  Vec2 operator*(double c) const { return {c * x1, c * x2}; }
};

// 2x2 symmetric metric tensor components in a chart.
struct Metric2 {
  double g11 = 1.0;
  double g12 = 0.0;
  double g22 = 1.0;

  double det() const { return g11 * g22 - g12 * g12; }
  bool positive_definite() const { return g11 > 0.0 && det() > 0.0; }
  double dot(Vec2 a, Vec2 b) const {
    return g11 * a.x1 * b.x1 + g12 * (a.x1 * b.x2 + a.x2 * b.x1) + g22 * a.x2 * b.x2;
  }
  double norm2(Vec2 a) const { return dot(a, a); }
  double norm(Vec2 a) const { return std::sqrt(norm2(a)); }
};

// Metric components together with their first partial derivatives.
struct MetricJet {
  Metric2 g;
  Metric2 d1;  // d/dx1 of (g11, g12, g22)
  Metric2 d2;  // d/dx2 of (g11, g12, g22)
};

// Christoffel symbols Gamma^k_{ij}, symmetric in (i, j).
struct Christoffel {
  double c1_11 = 0.0, c1_12 = 0.0, c1_22 = 0.0;
  double c2_11 = 0.0, c2_12 = 0.0, c2_22 = 0.0;
};

// 2x2 Jacobian of a chart transition, row-major: out_i = J[i][j] * in_j.
struct Jac2 {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
  Vec2 apply(Vec2 v) const { return {a11 * v.x1 + a12 * v.x2, a21 * v.x1 + a22 * v.x2}; }
  Vec2 apply_transpose(Vec2 v) const {
    return {a11 * v.x1 + a21 * v.x2, a12 * v.x1 + a22 * v.x2};
  }
  static Jac2 identity() { return {}; }
};

}  // namespace acgeo
