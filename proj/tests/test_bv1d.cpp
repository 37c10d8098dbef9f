#include <algorithm>
#include <cmath>
#include <random>

#include "bilayer/bv1d.hpp"
#include "bilayer/errors.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bilayer;
using bilayer::testing::trapezoid;

namespace {

BVFunction1D identity_profile() { return BVFunction1D::linear(0.0, 1.0, {0.0, 0.0}, {1.0, 0.0}); }

BVFunction1D staircase_only(int depth) {
  return BVFunction1D(0.0, 1.0, PiecewiseLinear{{0.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}}, {},
                      Staircase{depth, {1.0, 0.0}, 0.0, 1.0});
}

// Stop-and-go map written out from its defining formula on period i:
// slope 1/lambda on [i eps, i eps + lambda eps), flat on the rest, clamped at b.
double stop_go_oracle(double t, double eps, double lambda, double b) {
  const double i = std::floor(t / eps);
  const double s = t - i * eps;
  const double v = i * eps + std::min(s / lambda, eps);
  return std::min(v, b);
}

// Random continuous piecewise-linear path on (0, 1).
PiecewiseLinear random_path(std::mt19937_64& rng, double& lip) {
  std::uniform_int_distribution<int> pieces(1, 6);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  const int n = pieces(rng);
  PiecewiseLinear p;
  p.t.push_back(0.0);
  std::vector<double> cut;
  std::uniform_real_distribution<double> loc(0.05, 0.95);
  for (int i = 1; i < n; ++i) cut.push_back(loc(rng));
  std::sort(cut.begin(), cut.end());
  for (double c : cut)
    if (c - p.t.back() > 1e-3) p.t.push_back(c);
  p.t.push_back(1.0);
  for (std::size_t i = 0; i < p.t.size(); ++i) p.v.push_back({val(rng), val(rng)});
  lip = 0.0;
  for (std::size_t i = 0; i < p.pieces(); ++i) lip = std::max(lip, norm(p.slope_on(i)));
  return p;
}

}  // namespace

TEST_CASE("total_variation examples") {
  CHECK(total_variation(identity_profile()) == doctest::Approx(1.0).epsilon(1e-15));
  const BVFunction1D jump(0.0, 1.0, PiecewiseLinear{{0.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}}, {{0.5, {0.3, 0.4}}});
  CHECK(total_variation(jump) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(total_variation(staircase_only(3)) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("total_variation is additive over the three parts") {
  const BVFunction1D w(0.0, 1.0, PiecewiseLinear{{0.0, 0.5, 1.0}, {{0.0, 0.0}, {0.3, 0.4}, {0.3, 0.0}}},
                       {{0.25, {0.0, -2.0}}, {0.75, {1.0, 0.0}}}, Staircase{5, {0.6, 0.8}, 0.1, 0.9});
  CHECK(total_variation(w) == doctest::Approx(0.5 + 0.4 + 2.0 + 1.0 + 1.0).epsilon(1e-14));
  CHECK(total_variation(w) == doctest::Approx(w.ac_variation() + w.jump_variation() + w.staircase_variation()));
}

TEST_CASE("stop_go_reparametrize on the identity path") {
  const BVFunction1D w = identity_profile();
  const BVFunction1D out = stop_go_reparametrize(w, 0.5, 0.5);
  CHECK(total_variation(out) == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 0; i < 400; ++i) {
    const double t = (i + 0.5) / 400.0;
    CHECK(out(t).x == doctest::Approx(stop_go_oracle(t, 0.5, 0.5, 1.0)).epsilon(1e-14));
  }
  // Slopes: 2 on (0, 1/4) and (1/2, 3/4), 0 elsewhere.
  const double h = 1e-4;
  for (double t : {0.1, 0.2, 0.6, 0.7}) CHECK((out(t + h).x - out(t - h).x) / (2 * h) == doctest::Approx(2.0));
  for (double t : {0.3, 0.45, 0.8, 0.95}) CHECK(std::abs(out(t + h).x - out(t - h).x) <= 1e-14);
}

TEST_CASE("stop_go_reparametrize leaves constants alone and keeps angle ranges") {
  const BVFunction1D c = BVFunction1D::constant(0.0, 1.0, {0.4, -0.2});
  const BVFunction1D out = stop_go_reparametrize(c, 0.125, 0.5);
  CHECK(total_variation(out) == 0.0);
  CHECK(out(0.3).x == 0.4);
  CHECK(out(0.3).y == -0.2);

  const BVFunction1D theta(0.0, 1.0, PiecewiseLinear{{0.0, 0.3, 1.0}, {{-0.5, 0.0}, {1.2, 0.0}, {0.1, 0.0}}});
  const BVFunction1D st = stop_go_reparametrize(theta, 1.0 / 16.0, 0.25);
  for (int i = 0; i <= 1000; ++i) {
    const double v = st(i / 1000.0 * 0.999999).x;
    CHECK(v >= -0.5 - 1e-15);
    CHECK(v <= 1.2 + 1e-15);
  }
}

TEST_CASE("stop_go_reparametrize rejects jumps") {
  const BVFunction1D jump(0.0, 1.0, PiecewiseLinear{{0.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}}, {{0.5, {1.0, 0.0}}});
  CHECK_THROWS_AS(stop_go_reparametrize(jump, 0.25, 0.5), Error);
}

TEST_CASE("cantor_staircase structure") {
  const BVFunction1D c1 = cantor_staircase(1).flattened();
  CHECK(c1.ac().pieces() == 3);
  for (double t : {0.34, 0.5, 0.66}) CHECK(c1(t).x == doctest::Approx(0.5).epsilon(1e-15));

  const BVFunction1D c2 = cantor_staircase(2).flattened();
  const double flats[3][2] = {{1.0 / 9, 2.0 / 9}, {1.0 / 3, 2.0 / 3}, {7.0 / 9, 8.0 / 9}};
  const double levels[3] = {0.25, 0.5, 0.75};
  for (int k = 0; k < 3; ++k)
    for (int i = 1; i < 10; ++i) {
      const double t = flats[k][0] + (flats[k][1] - flats[k][0]) * i / 10.0;
      CHECK(c2(t).x == doctest::Approx(levels[k]).epsilon(1e-14));
    }
  for (int d = 1; d <= 12; ++d) CHECK(total_variation(cantor_staircase(d)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(cantor_staircase(25), Error);
}

TEST_CASE("piecewise_constant_approximation examples") {
  const BVFunction1D jump(0.0, 1.0, PiecewiseLinear{{0.0, 1.0}, {{0.1, 0.0}, {0.1, 0.0}}}, {{0.4, {0.3, 0.4}}});
  for (int n : {1, 2, 7}) {
    const BVFunction1D p = piecewise_constant_approximation(jump, n);
    const StrictGap g = strict_gap(p, jump);
    CHECK(g.l1_distance <= 1e-15);
    CHECK(g.tv_gap <= 1e-15);
  }

  const BVFunction1D st = staircase_only(8);
  const BVFunction1D p64 = piecewise_constant_approximation(st, 64);
  CHECK(std::abs(total_variation(p64) - 1.0) <= 0.02);

  const BVFunction1D p2 = piecewise_constant_approximation(st, 2);
  CHECK(total_variation(p2) <= 1.0 + 1e-15);
  CHECK(p2.jumps().size() + 1 == 3);
  CHECK(p2.ac_is_constant());

  CHECK_THROWS_AS(piecewise_constant_approximation(identity_profile(), 4), Error);
}

TEST_CASE("piecewise_constant_approximation converges strictly") {
  const BVFunction1D st = staircase_only(8);
  double prev = 1e9;
  for (int n : {4, 16, 64, 256}) {
    const StrictGap g = strict_gap(piecewise_constant_approximation(st, n), st);
    CHECK(g.l1_distance < prev);
    prev = g.l1_distance;
  }
  CHECK(prev <= 5e-3);
}

TEST_CASE("strict_gap examples") {
  const BVFunction1D w = identity_profile();
  const StrictGap same = strict_gap(w, w);
  CHECK(same.l1_distance == 0.0);
  CHECK(same.tv_gap == 0.0);

  for (double eps : {0.25, 0.125, 1.0 / 64}) {
    const StrictGap g = strict_gap(stop_go_reparametrize(w, eps, 0.5), w);
    CHECK(g.tv_gap <= 1e-14);
    CHECK(g.l1_distance <= eps * 0.5 + 1e-15);
    const double direct = trapezoid([&](double t) { return std::abs(stop_go_oracle(t, eps, 0.5, 1.0) - t); }, 0.0, 1.0,
                                    1 << 16);
    CHECK(g.l1_distance == doctest::Approx(direct).epsilon(1e-6));
  }

  // Staircase against its quantile approximation, by fine midpoint sampling.
  const BVFunction1D st = staircase_only(8);
  const BVFunction1D p = piecewise_constant_approximation(st, 64);
  const StrictGap g = strict_gap(p, st);
  const int n = 1 << 20;
  double direct = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    direct += std::abs(p(t).x - cantor_value(8, t));
  }
  direct /= n;
  CHECK(g.l1_distance == doctest::Approx(direct).epsilon(1e-4));
  CHECK(g.tv_gap == doctest::Approx(std::abs(total_variation(p) - 1.0)).epsilon(1e-12));

  const BVFunction1D other = BVFunction1D::constant(0.0, 2.0, {0.0, 0.0});
  CHECK_THROWS_AS(strict_gap(w, other), Error);
}

TEST_CASE("stop-and-go properties on random continuous paths") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    double lip = 0.0;
    const BVFunction1D w(0.0, 1.0, random_path(rng, lip));
    for (int k = 2; k <= 6; ++k) {
      for (double lambda : {0.25, 0.5, 0.75}) {
        const double eps = std::ldexp(1.0, -k);
        const BVFunction1D s = stop_go_reparametrize(w, eps, lambda);
        CHECK(std::abs(total_variation(s) - total_variation(w)) <= 1e-12);
        const StrictGap g = strict_gap(s, w);
        CHECK(g.l1_distance <= lip * eps * (1.0 - lambda) + 1e-12);
        // Derivative vanishes on every rigid sub-interval.
        const PiecewiseLinear& ac = s.ac();
        for (std::size_t i = 0; i < ac.pieces(); ++i) {
          const double mid = 0.5 * (ac.t[i] + ac.t[i + 1]);
          if (!in_soft_layer(mid, eps, lambda)) CHECK(norm(ac.slope_on(i)) == 0.0);
        }
      }
    }
  }
}
