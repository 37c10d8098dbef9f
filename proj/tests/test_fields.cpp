#include <cmath>
#include <deque>
#include <map>

#include "bilayer/constructions.hpp"
#include "bilayer/energy.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/fields.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bilayer;
using namespace bilayer::testing;

TEST_CASE("validate_admissibility examples") {
  CHECK(validate_admissibility(uniform_field(Mat2::identity(), Mat2::identity())).pass);

  const PiecewiseAffineField bad = uniform_field(Mat2::identity(), shear(5.0));
  const AdmissibilityReport rep = validate_admissibility(bad);
  CHECK_FALSE(rep.pass);
  REQUIRE(rep.failures > 0);
  for (const CellCheck& c : rep.cells) {
    const bool rigid = bad.cells[c.index].layer == Layer::Rigid;
    CHECK(c.in_me1);
    CHECK(c.rigid_ok == !rigid);
  }

  const PiecewiseAffineField gadget = single_jump_general(pi6_limit(), kPi / 2.0, 1.0 / 64);
  CHECK(validate_admissibility(gadget, 1e-10).pass);
}

TEST_CASE("validate_compatibility examples") {
  const PiecewiseAffineField one = hand_field({rectangle_cell(0.0, 1.0, -1.0, 1.0, Mat2::identity())});
  CHECK(validate_compatibility(one) == 0.0);

  const PiecewiseAffineField strips = hand_field(
      {rectangle_cell(0.0, 1.0, -1.0, 0.0, Mat2::identity()), rectangle_cell(0.0, 1.0, 0.0, 1.0, shear(2.0))});
  CHECK(validate_compatibility(strips) <= 1e-15);
  CHECK(continuity_defect(strips) <= 1e-15);

  std::vector<Cell> side{rectangle_cell(0.0, 0.5, -1.0, 1.0, Mat2::identity()),
                         rectangle_cell(0.5, 1.0, -1.0, 1.0, shear(2.0))};
  PiecewiseAffineField pair;
  pair.domain = kUnitDomain;
  pair.eps = 1.0;
  pair.cells = side;
  pair.adjacency = compute_adjacency(pair.cells);
  REQUIRE(pair.adjacency.size() == 1);
  CHECK(validate_compatibility(pair) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("integrate_offsets examples") {
  const PiecewiseAffineField one = hand_field({rectangle_cell(0.0, 1.0, -1.0, 1.0, Mat2::identity())});
  // u(x) = x - centroid, centroid (1/2, 0).
  CHECK(one.cells[0].offset.x == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(std::abs(one.cells[0].offset.y) <= 1e-15);

  const PiecewiseAffineField strips = hand_field(
      {rectangle_cell(0.0, 1.0, -1.0, 0.0, Mat2::identity()), rectangle_cell(0.0, 1.0, 0.0, 1.0, shear(2.0))});
  for (const Vec2& v : {Vec2{0.0, 0.0}, Vec2{1.0, 0.0}}) {
    CHECK(norm(strips.cells[0].eval(v) - strips.cells[1].eval(v)) <= 1e-15);
  }
  CHECK(norm(field_integral(strips)) <= 1e-14);

  std::vector<Cell> bad{rectangle_cell(0.0, 0.5, -1.0, 1.0, Mat2::identity()),
                        rectangle_cell(0.5, 1.0, -1.0, 1.0, shear(2.0))};
  CHECK_THROWS_AS(integrate_offsets(kUnitDomain, 1.0, 0.5, bad), Error);

  std::vector<Cell> apart{rectangle_cell(0.0, 1.0, -1.0, -0.5, Mat2::identity()),
                          rectangle_cell(0.0, 1.0, 0.5, 1.0, Mat2::identity())};
  CHECK_THROWS_AS(integrate_offsets(kUnitDomain, 1.0, 0.5, apart), Error);
}

TEST_CASE("offset propagation is path independent on a gadget complex") {
  const PiecewiseAffineField f = single_jump_general(pi6_limit(), kPi / 2.0, 1.0 / 16);
  // Depth-first propagation from the last cell with reversed neighbor order.
  const std::size_t n = f.cells.size();
  std::vector<std::vector<const Adjacency*>> nb(n);
  for (const Adjacency& a : f.adjacency) {
    nb[a.i].push_back(&a);
    nb[a.j].push_back(&a);
  }
  std::vector<Vec2> off(n);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{n - 1};
  seen[n - 1] = true;
  while (!stack.empty()) {
    const std::size_t c = stack.back();
    stack.pop_back();
    for (auto it = nb[c].rbegin(); it != nb[c].rend(); ++it) {
      const Adjacency& a = **it;
      const std::size_t o = a.i == c ? a.j : a.i;
      if (seen[o]) continue;
      seen[o] = true;
      off[o] = f.cells[c].gradient * a.p + off[c] - f.cells[o].gradient * a.p;
      stack.push_back(o);
    }
  }
  const Vec2 shift = f.cells[0].offset - off[0];
  for (std::size_t i = 0; i < n; ++i) {
    REQUIRE(seen[i]);
    CHECK(norm(off[i] + shift - f.cells[i].offset) <= 1e-10);
  }
}

TEST_CASE("l1_distance_to_limit examples") {
  const LimitDeformation id = identity_limit();
  const PiecewiseAffineField f = uniform_field(Mat2::identity(), Mat2::identity());
  CHECK(l1_distance_to_limit(f, id) <= 1e-12);

  // A limit without jumps: psi' = Re1 through the parallel recovery at the
  // matching eps, measured after both sides are normalized to mean zero.
  const LimitDeformation shear_limit(kUnitDomain, RotationProfile1D::constant(-1.0, 1.0, 0.0),
                                     BVFunction1D::linear(-1.0, 1.0, {-1.0, 0.0}, {1.0, 0.0}));
  CHECK(l1_distance_to_limit(parallel_recovery(shear_limit, 1.0 / 256), shear_limit) <= 1e-2);

  const LimitDeformation u = pi6_limit();
  double prev = 0.0;
  for (int k = 6; k <= 9; ++k) {
    const double d = l1_distance_to_limit(single_jump_general(u, kPi / 2.0, std::ldexp(0.5, -k)), u);
    if (k > 6) CHECK(d / prev == doctest::Approx(0.5).epsilon(0.1));
    prev = d;
  }
}

TEST_CASE("gradient_total_variation examples") {
  CHECK(gradient_total_variation(uniform_field(Mat2::identity(), Mat2::identity())) ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));
  const PiecewiseAffineField strip = hand_field({rectangle_cell(0.0, 1.0, -1.0, 1.0, shear(1.5))});
  CHECK(gradient_total_variation(strip) == doctest::Approx(std::sqrt(2.0 + 2.25) * 2.0).epsilon(1e-15));

  // Jump parallel to R e1: the gadget's band mass |alpha| + |beta| equals
  // int |J|, so the total variation tends to |Du| + 2.
  const double eps = std::ldexp(0.5, -9);
  const LimitDeformation par = single_jump_limit(kUnitDomain, 0.0, 0.0, {0.0, 0.0}, {0.45, 0.0});
  const double du = std::sqrt(2.0) * 2.0 + jump_mass(par);
  CHECK(std::abs(gradient_total_variation(single_jump_general(par, kPi / 2.0, eps)) - (du + 2.0)) <= 5e-2);

  // With a rotation jump the band carries |alpha| + |beta| + 2 instead.
  const LimitDeformation u = pi6_limit();
  double a = 0.0;
  double b = 0.0;
  cramer({0.3, 0.4}, unit(kPi / 6.0), unit(kPi / 2.0), a, b);
  const double tv = gradient_total_variation(single_jump_general(u, kPi / 2.0, eps));
  CHECK(std::abs(tv - (std::sqrt(2.0) * 2.0 + std::abs(a) + std::abs(b) + 2.0)) <= 5e-2);
  CHECK(tv < std::sqrt(2.0) * 2.0 + jump_mass(u) + 2.0 - 0.5);
}

TEST_CASE("extract_rotation_profile examples") {
  const PiecewiseAffineField g = uniform_field(rotation_from_angle(0.4), rotation_from_angle(0.4), 0.125);
  const RotationProfileResult r = extract_rotation_profile(g);
  CHECK(r.tv == 0.0);
  CHECK(r.profile.is_global());
  CHECK(r.profile.angle_at(0.3) == doctest::Approx(0.4).epsilon(1e-14));

  const PiecewiseAffineField f = single_jump_general(pi6_limit(), kPi / 2.0, 1.0 / 64);
  const RotationProfileResult p = extract_rotation_profile(f);
  const double want = std::sqrt(2.0) * norm(unit(kPi / 6.0) - unit(-kPi / 3.0));
  CHECK(p.tv == doctest::Approx(want).epsilon(1e-12));
  CHECK(p.profile.angle_at(-0.5) == doctest::Approx(-kPi / 3.0).epsilon(1e-12));
  CHECK(p.profile.angle_at(0.5) == doctest::Approx(kPi / 6.0).epsilon(1e-12));
  CHECK(p.tv <= 4.0 * std::sqrt(2.0) * gradient_total_variation(f));

  FieldBuilder b(kUnitDomain, 0.5, 0.5);
  b.add_band(-1.0, -0.25, Mat2::identity(), Mat2::identity());
  b.add_band(-0.25, 1.0, Mat2::identity(), Mat2::identity());
  PiecewiseAffineField thin = b.finish();
  // Drop the rigid strip of the first period.
  std::vector<Cell> keep;
  for (const Cell& c : thin.cells)
    if (!(c.layer == Layer::Rigid && quad::polygon_centroid(c.polygon).y < -0.5)) keep.push_back(c);
  thin.cells = keep;
  CHECK_THROWS_AS(extract_rotation_profile(thin), Error);
}

TEST_CASE("gadget fields tile the domain with unit determinant") {
  for (int k = 4; k <= 8; ++k) {
    const double eps = std::ldexp(0.5, -k);
    for (const PiecewiseAffineField& f :
         {single_jump_general(pi6_limit(), kPi / 2.0, eps), single_jump_variant_i(pi6_limit(), 0.5, eps)}) {
      CHECK(total_area(f) == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(layer_tags_consistent(f));
      CHECK(validate_compatibility(f) <= 1e-10);
      CHECK(continuity_defect(f) <= 1e-10);
      CHECK(norm(field_integral(f)) <= 1e-10);
      for (const Cell& c : f.cells) CHECK(std::abs(c.gradient.det() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("gradient_pairing integrates polynomials exactly") {
  const PiecewiseAffineField f = single_jump_general(pi6_limit(), kPi / 2.0, 1.0 / 16);
  const TestFunction phi = default_battery(kUnitDomain)[2];
  const Mat2 lib = gradient_pairing(f, phi);
  Mat2 sum = Mat2::zero();
  for (const Cell& c : f.cells) {
    // Oracle: order-4 triangle rule on a fan, refined by splitting each fan triangle into four.
    double s = 0.0;
    const Vec2 ctr = quad::polygon_centroid(c.polygon);
    for (std::size_t i = 0; i < c.polygon.size(); ++i) {
      const Vec2 a = ctr;
      const Vec2 b = c.polygon[i];
      const Vec2 d = c.polygon[(i + 1) % c.polygon.size()];
      const Vec2 ab = 0.5 * (a + b);
      const Vec2 bd = 0.5 * (b + d);
      const Vec2 da = 0.5 * (d + a);
      auto tri = [&](const Vec2& p, const Vec2& q, const Vec2& r) {
        return quad::integrate_triangle(p, q, r, quad::triangle_collapsed(6), [&](const Vec2& x) { return phi(x); });
      };
      s += tri(a, ab, da) + tri(ab, b, bd) + tri(da, bd, d) + tri(ab, bd, da);
    }
    sum += c.gradient * s;
  }
  CHECK(max_abs_diff(lib, sum) <= 1e-12);
}
