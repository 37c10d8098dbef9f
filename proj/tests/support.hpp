#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "bilayer/constructions.hpp"
#include "bilayer/fields.hpp"
#include "bilayer/limits.hpp"
#include "bilayer/quadrature.hpp"

namespace bilayer::testing {

inline const Domain2D kUnitDomain{0.0, 1.0, -1.0, 1.0};

inline Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

// d = a u + b v by Cramer's rule.
inline void cramer(const Vec2& d, const Vec2& u, const Vec2& v, double& a, double& b) {
  const double det = u.x * v.y - u.y * v.x;
  a = (d.x * v.y - d.y * v.x) / det;
  b = (u.x * d.y - u.y * d.x) / det;
}

// Composite trapezoid on [a, b].
inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + (b - a) * i / n);
  return s * (b - a) / n;
}

// Tensor midpoint rule on a rectangle.
inline double midpoint2d(const std::function<double(double, double)>& f, double x0, double x1, double y0, double y1,
                         int nx, int ny) {
  const double hx = (x1 - x0) / nx;
  const double hy = (y1 - y0) / ny;
  double s = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) s += f(x0 + (i + 0.5) * hx, y0 + (j + 0.5) * hy);
  return s * hx * hy;
}

// Tensor composite Simpson rule on a rectangle; nx and ny must be even.
inline double simpson2d(const std::function<double(double, double)>& f, double x0, double x1, double y0, double y1,
                        int nx, int ny) {
  const double hx = (x1 - x0) / nx;
  const double hy = (y1 - y0) / ny;
  auto w = [](int i, int n) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  double s = 0.0;
  for (int i = 0; i <= nx; ++i)
    for (int j = 0; j <= ny; ++j) s += w(i, nx) * w(j, ny) * f(x0 + i * hx, y0 + j * hy);
  return s * hx * hy / 9.0;
}

inline LimitDeformation identity_limit(const Domain2D& dom = kUnitDomain) {
  return LimitDeformation(dom, RotationProfile1D::constant(dom.a, dom.b, 0.0),
                          BVFunction1D::constant(dom.a, dom.b, {0.0, 0.0}));
}

// The two-rotation single jump used throughout the examples.
inline LimitDeformation pi6_limit() { return single_jump_limit(kUnitDomain, -kPi / 3.0, kPi / 6.0, {0.0, 0.0}, {0.3, 0.4}); }

inline PiecewiseAffineField uniform_field(const Mat2& soft, const Mat2& rigid, double eps = 0.25, double lambda = 0.5,
                                          const Domain2D& dom = kUnitDomain) {
  FieldBuilder b(dom, eps, lambda);
  b.add_band(dom.a, dom.b, soft, rigid);
  return b.finish();
}

inline Cell rectangle_cell(double x0, double x1, double y0, double y1, const Mat2& g, Layer layer = Layer::Soft) {
  Cell c;
  c.polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  c.gradient = g;
  c.layer = layer;
  return c;
}

// Rectangle of the four corners, for hand-made complexes.
inline PiecewiseAffineField hand_field(std::vector<Cell> cells, const Domain2D& dom = kUnitDomain) {
  return integrate_offsets(dom, 1.0, 0.5, std::move(cells));
}

}  // namespace bilayer::testing
