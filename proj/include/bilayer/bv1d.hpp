#pragma once

#include <optional>
#include <vector>

#include "bilayer/algebra.hpp"

namespace bilayer {

// Continuous piecewise-linear function: values at strictly increasing
// breakpoints, first and last breakpoint are the domain ends. Scalar
// functions use the x component and keep y = 0.
struct PiecewiseLinear {
  std::vector<double> t;
  std::vector<Vec2> v;

  Vec2 operator()(double s) const;
  Vec2 slope_on(std::size_t piece) const { return (v[piece + 1] - v[piece]) / (t[piece + 1] - t[piece]); }
  std::size_t pieces() const { return t.size() - 1; }
  double total_variation() const;
};

struct Jump {
  double location = 0.0;
  Vec2 amplitude;
};

// Truncated middle-thirds staircase of the given depth, rescaled to the
// carrier [c0, c1] and multiplied by the rise vector.
struct Staircase {
  int depth = 1;
  Vec2 rise{1.0, 0.0};
  double c0 = 0.0;
  double c1 = 1.0;
};

class BVFunction1D {
 public:
  BVFunction1D(double a, double b, PiecewiseLinear ac, std::vector<Jump> jumps = {},
               std::optional<Staircase> cantor = std::nullopt);

  static BVFunction1D constant(double a, double b, Vec2 value);
  static BVFunction1D linear(double a, double b, Vec2 va, Vec2 vb);

  double a() const { return a_; }
  double b() const { return b_; }
  const PiecewiseLinear& ac() const { return ac_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  const std::optional<Staircase>& cantor() const { return cantor_; }

  bool has_jumps() const { return !jumps_.empty(); }
  bool has_staircase() const { return cantor_.has_value(); }
  bool ac_is_constant() const;

  // Right-continuous representative.
  Vec2 operator()(double t) const;
  Vec2 left_limit(double t) const;
  Vec2 staircase_value(double t) const;

  double ac_variation() const { return ac_.total_variation(); }
  double jump_variation() const;
  double staircase_variation() const { return cantor_ ? norm(cantor_->rise) : 0.0; }

  // Staircase merged into the AC part; jumps kept.
  BVFunction1D flattened() const;

 private:
  double a_;
  double b_;
  PiecewiseLinear ac_;
  std::vector<Jump> jumps_;
  std::optional<Staircase> cantor_;
};

struct RotationPiece {
  double lo = 0.0;
  double hi = 0.0;
  double angle = 0.0;
};

class RotationProfile1D {
 public:
  RotationProfile1D(double a, double b, std::vector<RotationPiece> pieces);
  static RotationProfile1D constant(double a, double b, double angle);

  double a() const { return pieces_.front().lo; }
  double b() const { return pieces_.back().hi; }
  const std::vector<RotationPiece>& pieces() const { return pieces_; }
  // Right-continuous: at a breakpoint returns the upper piece.
  double angle_at(double t) const;
  Mat2 rotation_at(double t) const { return rotation_from_angle(angle_at(t)); }
  bool is_global() const { return pieces_.size() == 1; }

 private:
  std::vector<RotationPiece> pieces_;
};

// Standard middle-thirds staircase value C_depth(x) on [0, 1].
double cantor_value(int depth, double x);
// Generalized inverse inf{x : C_depth(x) >= y}.
double cantor_quantile(int depth, double y);

double total_variation(const BVFunction1D& w);

BVFunction1D cantor_staircase(int depth);

// Composition w o phi with the stop-and-go map for layers of period eps and
// soft fraction lambda anchored on the lattice eps*Z. Exact TV preservation
// requires the left domain end to lie on that lattice.
BVFunction1D stop_go_reparametrize(const BVFunction1D& w, double eps, double lambda);

// Lattice-based stop-and-go map and its clamp at b.
double stop_go_map(double t, double eps, double lambda);

BVFunction1D piecewise_constant_approximation(const BVFunction1D& w, int n);

struct StrictGap {
  double l1_distance = 0.0;
  double tv_gap = 0.0;
};

StrictGap strict_gap(const BVFunction1D& seq_member, const BVFunction1D& target);

// Replaces every jump by a linear ramp of the given width starting at the
// jump location (ramps that would leave the domain end at b).
BVFunction1D ramp_jumps(const BVFunction1D& w, double width);

}  // namespace bilayer
