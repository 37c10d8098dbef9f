#pragma once

#include <vector>

#include "bilayer/algebra.hpp"

namespace bilayer::quad {

// Gauss-Legendre rule on [-1, 1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Points in barycentric-free form: (xi, eta) on the reference triangle
// {xi, eta >= 0, xi + eta <= 1}; weights sum to 1.
struct TriangleRule {
  std::vector<Vec2> p;
  std::vector<double> w;
};

const Rule1D& gauss_legendre(int n);

// Symmetric 6-point rule, exact for total degree 4.
const TriangleRule& triangle_order4();

// Collapsed (Duffy) tensor Gauss rule with n points per direction,
// exact for total degree 2n - 2.
const TriangleRule& triangle_collapsed(int n);

template <class F>
double integrate_interval(double a, double b, int n, F&& f) {
  const Rule1D& r = gauss_legendre(n);
  const double h = 0.5 * (b - a);
  const double m = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(m + h * r.x[i]);
  return s * h;
}

template <class F>
double integrate_triangle(const Vec2& a, const Vec2& b, const Vec2& c, const TriangleRule& rule, F&& f) {
  const Vec2 e1 = b - a;
  const Vec2 e2 = c - a;
  const double area = 0.5 * std::abs(cross(e1, e2));
  double s = 0.0;
  for (std::size_t i = 0; i < rule.p.size(); ++i) s += rule.w[i] * f(a + rule.p[i].x * e1 + rule.p[i].y * e2);
  return s * area;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly);
double polygon_area(const std::vector<Vec2>& poly);

// Fan triangulation from the vertex centroid.
template <class F>
double integrate_polygon(const std::vector<Vec2>& poly, const TriangleRule& rule, F&& f) {
  Vec2 c{0.0, 0.0};
  for (const Vec2& v : poly) c += v;
  c = c / static_cast<double>(poly.size());
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    s += integrate_triangle(c, poly[i], poly[(i + 1) % poly.size()], rule, f);
  }
  return s;
}

// int_{t0}^{t1} |p + t q| dt, split at the minimizer of the norm and refined
// adaptively until two Gauss orders agree to tol.
double integrate_norm_affine(const Vec2& p, const Vec2& q, double t0, double t1, double tol = 1e-12);

// Sutherland-Hodgman clip of a convex polygon against {x : dot(n, x) <= c}.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& n, double c);

}  // namespace bilayer::quad
