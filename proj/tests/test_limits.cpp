#include <cmath>
#include <random>

#include "bilayer/bv1d.hpp"
#include "bilayer/energy.hpp"
#include "bilayer/errors.hpp"
#include "bilayer/limits.hpp"
#include "bilayer/test_function.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bilayer;
using namespace bilayer::testing;

namespace {

Vec2 psi_slope_linear(double slope_x, double slope_y) { return {slope_x, slope_y}; }

LimitDeformation ac_limit(double angle, const Vec2& slope) {
  return LimitDeformation(kUnitDomain, RotationProfile1D::constant(-1.0, 1.0, angle),
                          BVFunction1D::linear(-1.0, 1.0, -1.0 * slope, slope));
}

double phi_integral(const TestFunction& phi) {
  return simpson2d([&](double x, double y) { return phi({x, y}); }, 0.0, 1.0, -1.0, 1.0, 200, 400);
}

double phi_line(const TestFunction& phi, double x2) {
  return simpson2d([&](double x, double) { return phi({x, x2}); }, 0.0, 1.0, 0.0, 1.0, 200, 2);
}

}  // namespace

TEST_CASE("classify examples") {
  const LimitDeformation shear_x = ac_limit(0.0, psi_slope_linear(1.0, 0.0));
  CHECK(shear_x.tag() == ClassTag::A_PARALLEL);

  const LimitDeformation two_pieces(kUnitDomain, RotationProfile1D(-1.0, 1.0, {{-1.0, 0.0, 0.0}, {0.0, 1.0, kPi / 4.0}}),
                                    BVFunction1D::constant(-1.0, 1.0, {0.0, 0.0}));
  CHECK(two_pieces.tag() == ClassTag::A_SBV_INF);
  CHECK_FALSE(two_pieces.is_parallel());

  const LimitDeformation bad = ac_limit(0.0, psi_slope_linear(0.0, 1.0));
  CHECK(bad.tag() == ClassTag::B);
  CHECK_FALSE(bad.in_class_a());

  const LimitDeformation stair(kUnitDomain, RotationProfile1D::constant(-1.0, 1.0, 0.0),
                               BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}}, {},
                                            Staircase{4, {0.0, 1.0}, 0.0, 1.0}));
  CHECK(stair.tag() == ClassTag::A);
}

TEST_CASE("jump_trace examples") {
  const JumpTrace one = jump_trace(single_jump_limit(kUnitDomain, 0.0, 0.0, {0.0, 0.0}, {0.3, 0.4}));
  REQUIRE(one.size() == 1);
  for (double x1 : {0.0, 0.5, 1.0}) {
    CHECK(one[0].amplitude(x1).x == doctest::Approx(0.3));
    CHECK(one[0].amplitude(x1).y == doctest::Approx(0.4));
  }

  const JumpTrace rot = jump_trace(single_jump_limit(kUnitDomain, 0.0, kPi / 2.0, {0.0, 0.0}, {0.0, 0.0}));
  REQUIRE(rot.size() == 1);
  // (R+ - R-) e1 x1 = ((0, 1) - (1, 0)) x1.
  for (double x1 : {0.0, 0.3, 1.0}) {
    CHECK(rot[0].amplitude(x1).x == doctest::Approx(-x1).epsilon(1e-15));
    CHECK(rot[0].amplitude(x1).y == doctest::Approx(x1).epsilon(1e-15));
  }

  const LimitDeformation two(kUnitDomain, RotationProfile1D::constant(-1.0, 1.0, 0.0),
                             BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}},
                                          {{-0.3, {0.1, 0.0}}, {0.6, {0.0, 0.2}}}));
  const JumpTrace t2 = jump_trace(two);
  REQUIRE(t2.size() == 2);
  CHECK(t2[0].a == -0.3);
  CHECK(t2[1].a == 0.6);

  const LimitDeformation stair(kUnitDomain, RotationProfile1D::constant(-1.0, 1.0, 0.0),
                               BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}}, {},
                                            Staircase{4, {1.0, 0.0}, 0.0, 1.0}));
  CHECK_THROWS_AS(jump_trace(stair), Error);
}

TEST_CASE("du_pairing examples") {
  const TestFunction phi = default_battery(kUnitDomain)[1];
  const double ip = phi_integral(phi);

  const Mat2 id = du_pairing(identity_limit(), phi);
  CHECK(max_abs_diff(id, Mat2::identity() * ip) <= 1e-10);

  const Mat2 j = du_pairing(single_jump_limit(kUnitDomain, 0.0, 0.0, {0.0, 0.0}, {0.3, 0.4}), phi);
  const double line = phi_line(phi, 0.0);
  const Mat2 want = Mat2::identity() * ip + Mat2::outer({0.3, 0.4}, {0.0, 1.0}) * line;
  CHECK(max_abs_diff(j, want) <= 1e-10);
}

TEST_CASE("du_pairing of a staircase equals the depth-8 piecewise integral") {
  const TestFunction phi = default_battery(kUnitDomain)[2];
  const Vec2 rise{0.5, 0.0};
  const LimitDeformation u(kUnitDomain, RotationProfile1D::constant(-1.0, 1.0, 0.0),
                           BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}}, {},
                                        Staircase{8, rise, 0.0, 1.0}));
  const Mat2 p = du_pairing(u, phi);
  // The depth-8 staircase rises with slope 1.5^8 on 2^8 intervals of length 3^-8.
  const double slope = std::pow(1.5, 8);
  double singular = 0.0;
  for (int k = 0; k < 256; ++k) {
    double left = 0.0;
    double scale = 1.0;
    for (int bit = 7; bit >= 0; --bit) {
      scale /= 3.0;
      if ((k >> bit) & 1) left += 2.0 * scale;
    }
    singular += slope * simpson2d([&](double x, double y) { return phi({x, y}); }, 0.0, 1.0, left, left + scale, 100, 4);
  }
  const Mat2 want = Mat2::identity() * phi_integral(phi) + Mat2::outer(rise, {0.0, 1.0}) * singular;
  CHECK(max_abs_diff(p, want) <= 1e-9);
}

TEST_CASE("du_pairing is linear in the test function and the jump amplitudes") {
  const Domain2D d = kUnitDomain;
  const TestFunction a(d, {{0, 0, 1.0}}, "a");
  const TestFunction b(d, {{1, 1, 1.0}, {0, 2, -0.5}}, "b");
  const TestFunction ab(d, {{0, 0, 2.0}, {1, 1, -3.0}, {0, 2, 1.5}}, "2a-3b");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const Vec2 j1{u(rng), u(rng)};
    const Vec2 j2{u(rng), u(rng)};
    const double ra = u(rng);
    const double rb = u(rng);
    auto limit = [&](const Vec2& p, const Vec2& q) {
      return LimitDeformation(d, RotationProfile1D(-1.0, 1.0, {{-1.0, -0.2, ra}, {-0.2, 1.0, rb}}),
                              BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}},
                                           {{-0.2, p}, {0.5, q}}));
    };
    const LimitDeformation l = limit(j1, j2);
    const Mat2 lhs = du_pairing(l, ab);
    const Mat2 rhs = du_pairing(l, a) * 2.0 - du_pairing(l, b) * 3.0;
    CHECK(max_abs_diff(lhs, rhs) <= 1e-9);

    // Jump amplitudes enter linearly once the rotation part is fixed.
    const Mat2 base = du_pairing(limit({0.0, 0.0}, {0.0, 0.0}), a);
    const Mat2 s1 = du_pairing(limit(j1, {0.0, 0.0}), a) - base;
    const Mat2 s2 = du_pairing(limit({0.0, 0.0}, j2), a) - base;
    const Mat2 both = du_pairing(limit(2.0 * j1, -1.0 * j2), a) - base;
    CHECK(max_abs_diff(both, s1 * 2.0 - s2) <= 1e-9);
  }
}

TEST_CASE("class A limits have unit-determinant gradients") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    const double r0 = u(rng);
    const double r1 = u(rng);
    // psi' parallel to R e1 on each rotation piece, continuous at the break.
    const Vec2 s0 = u(rng) * unit(r0);
    const Vec2 s1 = u(rng) * unit(r1);
    const Vec2 mid{0.0, 0.0};
    const LimitDeformation l(kUnitDomain, RotationProfile1D(-1.0, 1.0, {{-1.0, 0.1, r0}, {0.1, 1.0, r1}}),
                             BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 0.1, 1.0}, {mid - 1.1 * s0, mid, mid + 0.9 * s1}}));
    REQUIRE(l.in_class_a());
    for (int k = 0; k < 50; ++k) {
      const double x2 = -0.99 + 1.98 * k / 49.0;
      CHECK(std::abs(l.ac_gradient(x2).det() - 1.0) <= 1e-10);
    }
  }
}

TEST_CASE("classify is monotone along the class chain") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double r = u(rng);
    const bool parallel_jump = u(rng) > 0.0;
    const bool split_rotation = u(rng) > 0.3;
    const Vec2 amp = parallel_jump ? u(rng) * unit(r) : Vec2{u(rng), u(rng)};
    std::vector<RotationPiece> pieces{{-1.0, 1.0, r}};
    if (split_rotation) pieces = {{-1.0, 0.2, r}, {0.2, 1.0, r + 0.5}};
    const LimitDeformation l(kUnitDomain, RotationProfile1D(-1.0, 1.0, pieces),
                             BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}},
                                          {{-0.4, amp}}));
    if (l.is_parallel()) CHECK(l.in_class_a());
    if (l.is_sbv_inf()) CHECK(l.in_class_a());
    if (l.tag() == ClassTag::A_PARALLEL) CHECK(l.is_parallel());
    CHECK(l.tag() >= ClassTag::A);
  }
}

TEST_CASE("jump mass matches the singular part of the limit energy") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const LimitDeformation l(kUnitDomain,
                             RotationProfile1D(-1.0, 1.0, {{-1.0, -0.3, u(rng)}, {-0.3, 0.4, u(rng)}, {0.4, 1.0, u(rng)}}),
                             BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}},
                                          {{-0.3, {u(rng), u(rng)}}, {0.7, {u(rng), u(rng)}}}));
    const double mass = jump_mass(l);
    CHECK(std::abs(mass - e_limit(l).part("jump")) <= 1e-10);
    double oracle = 0.0;
    for (const JumpEntry& e : jump_trace(l))
      oracle += trapezoid([&](double x) { return norm(e.amplitude(x)); }, 0.0, 1.0, 20000);
    CHECK(mass == doctest::Approx(oracle).epsilon(1e-7));
  }
}

TEST_CASE("b_recovery examples") {
  const StructuredField id = b_recovery(identity_limit(), 1.0 / 32, 0.5);
  for (double x2 : {-0.9, -0.1, 0.37, 0.8}) CHECK(max_abs_diff(id.gradient({0.4, x2}), Mat2::identity()) <= 1e-15);

  const LimitDeformation lin(kUnitDomain, RotationProfile1D::constant(-1.0, 1.0, 0.0),
                             BVFunction1D::constant(-1.0, 1.0, {0.0, 0.0}));
  const double eps = 1.0 / 32;
  // theta(x2) = x2 needs a continuous angle profile, which lives on StructuredField.
  StructuredField f{kUnitDomain, eps, 0.5, stop_go_reparametrize(BVFunction1D::linear(-1.0, 1.0, {-1.0, 0.0}, {1.0, 0.0}), eps, 0.5),
                    BVFunction1D::constant(-1.0, 1.0, {0.0, 0.0})};
  for (int i = 0; i < 200; ++i) {
    const double x2 = -1.0 + 2.0 * (i + 0.5) / 200.0;
    if (in_soft_layer(x2, eps, 0.5)) continue;
    const Mat2 g = f.gradient({0.7, x2});
    CHECK(std::abs(g.det() - 1.0) <= 1e-14);
    CHECK(std::abs(dot(g.col(0), g.col(1))) <= 1e-14);
    CHECK(std::abs(norm(g.col(1)) - 1.0) <= 1e-14);
  }
  CHECK(strict_gap(f.angle, BVFunction1D::linear(-1.0, 1.0, {-1.0, 0.0}, {1.0, 0.0})).tv_gap <= 1e-14);
  (void)lin;
}

TEST_CASE("b_recovery keeps the angle variation and converges in L1") {
  const LimitDeformation u(kUnitDomain, RotationProfile1D(-1.0, 1.0, {{-1.0, 0.2, 0.0}, {0.2, 1.0, 0.9}}),
                           BVFunction1D(-1.0, 1.0, PiecewiseLinear{{-1.0, 1.0}, {{0.0, 0.0}, {0.0, 1.0}}},
                                        {{-0.5, {0.2, 0.1}}}));
  double prev = 1e9;
  for (int k = 4; k <= 8; ++k) {
    const double eps = std::ldexp(0.5, -k);
    const StructuredField f = b_recovery(u, eps, 0.5);
    CHECK(total_variation(f.angle) == doctest::Approx(0.9).epsilon(1e-12));
    const double d = l1_distance(f, u);
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev <= 0.02);
}
