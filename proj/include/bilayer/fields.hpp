#pragma once

#include <cstddef>
#include <vector>

#include "bilayer/algebra.hpp"
#include "bilayer/bv1d.hpp"
#include "bilayer/limits.hpp"
#include "bilayer/test_function.hpp"

namespace bilayer {

enum class Layer { Soft, Rigid };

struct Cell {
  std::vector<Vec2> polygon;  // counterclockwise, convex
  Mat2 gradient;
  Vec2 offset;
  Layer layer = Layer::Soft;

  double area() const;
  Vec2 eval(const Vec2& x) const { return gradient * x + offset; }
  std::vector<Vec2> image() const;  // {F v + b}
};

struct Adjacency {
  std::size_t i = 0;
  std::size_t j = 0;
  Vec2 p;  // shared segment endpoints
  Vec2 q;
};

struct PiecewiseAffineField {
  Domain2D domain;
  double eps = 0.0;
  double lambda = 0.5;
  std::vector<Cell> cells;
  std::vector<Adjacency> adjacency;
};

// Soft layers are x2 in eps [j, j + lambda), rigid ones eps [j + lambda, j + 1).
bool in_soft_layer(double x2, double eps, double lambda);

// x2 = slope * x1 + intercept
struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double at(double x1) const { return slope * x1 + intercept; }
  static Line horizontal(double y) { return {0.0, y}; }
};

// Assembles a field from regions {lower <= x2 <= upper, ylo <= x2 <= yhi}
// of the domain; every region is split at the layer boundaries so that each
// cell lies in a single layer.
class FieldBuilder {
 public:
  FieldBuilder(Domain2D dom, double eps, double lambda);

  double lattice(long long j) const { return static_cast<double>(j) * eps_; }
  double soft_top(long long j) const { return static_cast<double>(j) * eps_ + lambda_ * eps_; }
  long long period_of(double x2) const;

  void add_region(const Line& lower, const Line& upper, double ylo, double yhi, const Mat2& soft, const Mat2& rigid);
  void add_region(const Line& lower, const Line& upper, double ylo, double yhi, const Mat2& grad) {
    add_region(lower, upper, ylo, yhi, grad, grad);
  }
  // Horizontal band between two heights.
  void add_band(double ylo, double yhi, const Mat2& soft, const Mat2& rigid) {
    add_region(Line::horizontal(ylo), Line::horizontal(yhi), ylo, yhi, soft, rigid);
  }

  std::size_t cell_count() const { return cells_.size(); }
  PiecewiseAffineField finish(const Vec2& anchor = {0.0, 0.0});

 private:
  Domain2D dom_;
  double eps_;
  double lambda_;
  std::vector<Cell> cells_;
};

std::vector<Adjacency> compute_adjacency(const std::vector<Cell>& cells);

struct CellCheck {
  std::size_t index = 0;
  bool in_me1 = true;
  bool rigid_ok = true;
};

struct AdmissibilityReport {
  std::vector<CellCheck> cells;
  std::size_t failures = 0;
  bool pass = true;
};

AdmissibilityReport validate_admissibility(const PiecewiseAffineField& f, double tol = kDefaultMembershipTol);
double validate_compatibility(const PiecewiseAffineField& f);
// Largest mismatch of F_i v + b_i and F_j v + b_j over shared edge endpoints.
double continuity_defect(const PiecewiseAffineField& f);
// True when every cell lies inside the layer its tag names.
bool layer_tags_consistent(const PiecewiseAffineField& f, double tol = 1e-12);
double total_area(const PiecewiseAffineField& f);
// Integral of u over the domain.
Vec2 field_integral(const PiecewiseAffineField& f);

// Gradients and polygons in, offsets out. Offsets are propagated breadth
// first from cell 0 (which gets the anchor) and then shifted to mean zero.
PiecewiseAffineField integrate_offsets(Domain2D dom, double eps, double lambda, std::vector<Cell> cells,
                                       const Vec2& anchor = {0.0, 0.0});

Vec2 limit_mean(const LimitDeformation& u);
// int |f - (u - mean u)| over the domain.
double l1_distance_to_limit(const PiecewiseAffineField& f, const LimitDeformation& u);

double gradient_total_variation(const PiecewiseAffineField& f);

struct RotationProfileResult {
  RotationProfile1D profile;
  double tv = 0.0;
};

RotationProfileResult extract_rotation_profile(const PiecewiseAffineField& f);

// int (grad f) phi dx, per cell with a collapsed Gauss rule exact for the
// polynomial test functions.
Mat2 gradient_pairing(const PiecewiseAffineField& f, const TestFunction& phi);

}  // namespace bilayer
