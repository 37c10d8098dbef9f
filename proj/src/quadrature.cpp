#include "bilayer/quadrature.hpp"

#include <array>
#include <cmath>
#include <mutex>

#include "bilayer/errors.hpp"

namespace bilayer::quad {

namespace {

constexpr int kMaxGauss = 64;

Rule1D build_gauss(int n) {
  Rule1D r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

TriangleRule build_collapsed(int n) {
  const Rule1D& g = gauss_legendre(n);
  TriangleRule t;
  for (int i = 0; i < n; ++i) {
    const double u = 0.5 * (g.x[i] + 1.0);
    for (int j = 0; j < n; ++j) {
      const double v = 0.5 * (g.x[j] + 1.0);
      // (u, v) in the unit square -> (u, (1 - u) v) with Jacobian (1 - u).
      t.p.push_back({u, (1.0 - u) * v});
      // Square weights 1/4 each, reference area 1/2.
      t.w.push_back(0.25 * g.w[i] * g.w[j] * (1.0 - u) * 2.0);
    }
  }
  return t;
}

}  // namespace

const Rule1D& gauss_legendre(int n) {
  if (n < 1 || n > kMaxGauss) throw Error(ErrorKind::InvalidInput, "Gauss order out of range");
  static std::array<Rule1D, kMaxGauss + 1> cache;
  static std::array<std::once_flag, kMaxGauss + 1> flags;
  std::call_once(flags[n], [n] { cache[n] = build_gauss(n); });
  return cache[n];
}

const TriangleRule& triangle_order4() {
  static const TriangleRule rule = [] {
    TriangleRule t;
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    const double b1 = 1.0 - 2.0 * a1, b2 = 1.0 - 2.0 * a2;
    t.p = {{a1, a1}, {b1, a1}, {a1, b1}, {a2, a2}, {b2, a2}, {a2, b2}};
    t.w = {w1, w1, w1, w2, w2, w2};
    return t;
  }();
  return rule;
}

const TriangleRule& triangle_collapsed(int n) {
  if (n < 1 || n > 16) throw Error(ErrorKind::InvalidInput, "collapsed rule order out of range");
  static std::array<TriangleRule, 17> cache;
  static std::array<std::once_flag, 17> flags;
  std::call_once(flags[n], [n] { cache[n] = build_collapsed(n); });
  return cache[n];
}

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  double a = 0.0;
  Vec2 c{0.0, 0.0};
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

namespace {

double norm_affine_adaptive(const Vec2& p, const Vec2& q, double a, double b, double tol, int depth) {
  auto f = [&](double t) { return norm(p + t * q); };
  const double coarse = integrate_interval(a, b, 8, f);
  const double fine = integrate_interval(a, b, 16, f);
  if (std::abs(fine - coarse) <= tol || depth > 60) return fine;
  const double m = 0.5 * (a + b);
  return norm_affine_adaptive(p, q, a, m, 0.5 * tol, depth + 1) +
         norm_affine_adaptive(p, q, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate_norm_affine(const Vec2& p, const Vec2& q, double t0, double t1, double tol) {
  if (t1 < t0) return -integrate_norm_affine(p, q, t1, t0, tol);
  if (t1 == t0) return 0.0;
  const double qq = dot(q, q);
  if (qq == 0.0) return norm(p) * (t1 - t0);
  const double tstar = -dot(p, q) / qq;
  const double scale = std::max(1.0, norm(p) + norm(q) * std::max(std::abs(t0), std::abs(t1)));
  const double abs_tol = tol * scale * (t1 - t0);
  if (tstar > t0 && tstar < t1) {
    return norm_affine_adaptive(p, q, t0, tstar, 0.5 * abs_tol, 0) +
           norm_affine_adaptive(p, q, tstar, t1, 0.5 * abs_tol, 0);
  }
  return norm_affine_adaptive(p, q, t0, t1, abs_tol, 0);
}

std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, const Vec2& n, double c) {
  std::vector<Vec2> out;
  if (poly.empty()) return out;
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& p = poly[i];
    const Vec2& q = poly[(i + 1) % poly.size()];
    const double dp = dot(n, p) - c;
    const double dq = dot(n, q) - c;
    if (dp <= 0.0) out.push_back(p);
    if ((dp < 0.0 && dq > 0.0) || (dp > 0.0 && dq < 0.0)) {
      const double t = dp / (dp - dq);
      Vec2 x = p + t * (q - p);
      // Land exactly on axis-aligned cut lines so that neighbouring cells
      // share bit-identical vertices.
      if (n.x == 0.0) x.y = c / n.y;
      if (n.y == 0.0) x.x = c / n.x;
      out.push_back(x);
    }
  }
  return out;
}

}  // namespace bilayer::quad
