#include "bilayer/limits.hpp"

#include <algorithm>
#include <cmath>

#include "bilayer/errors.hpp"
#include "bilayer/quadrature.hpp"

namespace bilayer {

namespace {

const Vec2 kE1{1.0, 0.0};
const Vec2 kE2{0.0, 1.0};

// Slope of a piecewise-linear function on the piece containing s (right piece at breakpoints).
Vec2 slope_at(const PiecewiseLinear& f, double s) {
  auto it = std::upper_bound(f.t.begin(), f.t.end(), s);
  std::size_t k = it == f.t.begin() ? 0 : static_cast<std::size_t>(it - f.t.begin()) - 1;
  if (k + 1 >= f.t.size()) k = f.t.size() - 2;
  return f.slope_on(k);
}

JumpTrace collect_jumps(const LimitDeformation& u) {
  JumpTrace out;
  const auto& pieces = u.rotation().pieces();
  std::vector<double> locs;
  for (std::size_t k = 1; k < pieces.size(); ++k) locs.push_back(pieces[k].lo);
  for (const Jump& j : u.psi().jumps()) locs.push_back(j.location);
  std::sort(locs.begin(), locs.end());
  locs.erase(std::unique(locs.begin(), locs.end()), locs.end());
  for (double s : locs) {
    JumpEntry e;
    e.a = s;
    e.r_plus = u.rotation().rotation_at(s);
    double below = pieces.front().angle;
    for (const RotationPiece& p : pieces)
      if (p.hi <= s) below = p.angle;
    e.r_minus = rotation_from_angle(below);
    e.dpsi = {0.0, 0.0};
    for (const Jump& j : u.psi().jumps())
      if (j.location == s) e.dpsi = j.amplitude;
    out.push_back(e);
  }
  return out;
}

std::vector<double> merged_breaks(double a, double b, std::vector<double> extra) {
  extra.push_back(a);
  extra.push_back(b);
  std::sort(extra.begin(), extra.end());
  std::vector<double> out;
  for (double s : extra) {
    if (s < a || s > b) continue;
    if (out.empty() || s > out.back()) out.push_back(s);
  }
  return out;
}

std::vector<double> limit_breaks(const LimitDeformation& u, const BVFunction1D& flat_psi) {
  std::vector<double> br(flat_psi.ac().t.begin(), flat_psi.ac().t.end());
  for (const RotationPiece& p : u.rotation().pieces()) br.push_back(p.lo);
  for (const Jump& j : u.psi().jumps()) br.push_back(j.location);
  return br;
}

}  // namespace

const char* to_string(ClassTag tag) {
  switch (tag) {
    case ClassTag::B: return "B";
    case ClassTag::A: return "A";
    case ClassTag::A_SBV_INF: return "A_SBV_INF";
    case ClassTag::A_PARALLEL: return "A_PARALLEL";
  }
  return "?";
}

ClassTag classify(const Domain2D& domain, const RotationProfile1D& rotation, const BVFunction1D& psi) {
  validate_domain(domain);
  if (rotation.a() != domain.a || rotation.b() != domain.b || psi.a() != domain.a || psi.b() != domain.b) {
    throw Error(ErrorKind::InvalidInput, "profiles must live on the x2 range of the domain");
  }
  const PiecewiseLinear& ac = psi.ac();
  for (std::size_t k = 0; k < ac.pieces(); ++k) {
    const Vec2 slope = ac.slope_on(k);
    for (const RotationPiece& p : rotation.pieces()) {
      if (std::max(p.lo, ac.t[k]) >= std::min(p.hi, ac.t[k + 1])) continue;
      const Mat2 r = rotation_from_angle(p.angle);
      if (std::abs(dot(slope, r * kE2)) > kClassTol) return ClassTag::B;
    }
  }
  bool parallel = rotation.is_global();
  if (parallel) {
    const Vec2 re1 = rotation_from_angle(rotation.pieces().front().angle) * kE1;
    for (const Jump& j : psi.jumps())
      if (std::abs(cross(re1, j.amplitude)) > kClassTol) parallel = false;
    if (psi.cantor() && std::abs(cross(re1, psi.cantor()->rise)) > kClassTol) parallel = false;
  }
  if (parallel) return ClassTag::A_PARALLEL;
  if (!psi.has_staircase()) return ClassTag::A_SBV_INF;
  return ClassTag::A;
}

LimitDeformation::LimitDeformation(Domain2D domain, RotationProfile1D rotation, BVFunction1D psi)
    : domain_(domain), rotation_(std::move(rotation)), psi_(std::move(psi)), tag_(classify(domain_, rotation_, psi_)) {}

Vec2 LimitDeformation::operator()(const Vec2& x) const { return rotation_.rotation_at(x.y) * x + psi_(x.y); }

Mat2 LimitDeformation::ac_gradient(double x2) const {
  return rotation_.rotation_at(x2) + Mat2::outer(slope_at(psi_.ac(), x2), kE2);
}

bool LimitDeformation::in_class_a() const { return tag_ != ClassTag::B; }
bool LimitDeformation::is_sbv_inf() const { return tag_ != ClassTag::B && !psi_.has_staircase(); }
bool LimitDeformation::is_parallel() const { return tag_ == ClassTag::A_PARALLEL; }

JumpTrace jump_trace(const LimitDeformation& u) {
  if (u.psi().has_staircase()) throw Error(ErrorKind::InfiniteJumps, "jump trace needs finitely many jumps");
  return collect_jumps(u);
}

double jump_mass(const LimitDeformation& u) {
  double s = 0.0;
  for (const JumpEntry& e : jump_trace(u))
    s += quad::integrate_norm_affine(e.j0(), e.j1(), u.domain().c, u.domain().d, 1e-13);
  return s;
}

Mat2 du_pairing(const LimitDeformation& u, const TestFunction& phi) {
  const Domain2D& dom = u.domain();
  const BVFunction1D flat = u.psi().flattened();
  const std::vector<double> br = merged_breaks(dom.a, dom.b, limit_breaks(u, flat));
  Mat2 sum = Mat2::zero();
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double mid = 0.5 * (br[k] + br[k + 1]);
    const Mat2 g = u.rotation().rotation_at(mid) + Mat2::outer(slope_at(flat.ac(), mid), kE2);
    sum += g * phi.rectangle_integral(br[k], br[k + 1]);
  }
  for (const JumpEntry& e : collect_jumps(u)) {
    sum += Mat2::outer(phi.weighted_line_integral(e.a, e.j0(), e.j1()), kE2);
  }
  return sum;
}

Vec2 StructuredField::operator()(const Vec2& x) const {
  return rotation_from_angle(angle(x.y).x) * x + psi(x.y);
}

Mat2 StructuredField::gradient(const Vec2& x) const {
  const Mat2 r = rotation_from_angle(angle(x.y).x);
  const double dtheta = slope_at(angle.ac(), x.y).x;
  const Vec2 dpsi = slope_at(psi.ac(), x.y);
  const Mat2 j{0.0, -1.0, 1.0, 0.0};
  const Vec2 col2 = r * kE2 + dtheta * (r * (j * x)) + dpsi;
  const Vec2 col1 = r * kE1;
  return {col1.x, col2.x, col1.y, col2.y};
}

std::vector<double> StructuredField::breakpoints() const {
  std::vector<double> br(angle.ac().t.begin(), angle.ac().t.end());
  br.insert(br.end(), psi.ac().t.begin(), psi.ac().t.end());
  return merged_breaks(domain.a, domain.b, br);
}

StructuredField b_recovery(const LimitDeformation& u, double eps, double lambda) {
  if (!(eps > 0.0) || !(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidInput, "need eps > 0 and lambda in (0, 1)");
  const Domain2D& dom = u.domain();
  const auto& pieces = u.rotation().pieces();
  std::vector<Jump> angle_jumps;
  for (std::size_t k = 1; k < pieces.size(); ++k) {
    angle_jumps.push_back({pieces[k].lo, {normalize_angle(pieces[k].angle - pieces[k - 1].angle), 0.0}});
  }
  const double theta0 = pieces.front().angle;
  const BVFunction1D theta(dom.a, dom.b, PiecewiseLinear{{dom.a, dom.b}, {{theta0, 0.0}, {theta0, 0.0}}},
                           std::move(angle_jumps));
  const double width = eps * eps;
  const BVFunction1D theta_c = ramp_jumps(theta, width);
  const BVFunction1D psi_c = ramp_jumps(u.psi().flattened(), width);
  return StructuredField{dom, eps, lambda, stop_go_reparametrize(theta_c, eps, lambda),
                         stop_go_reparametrize(psi_c, eps, lambda)};
}

double l1_distance(const StructuredField& f, const LimitDeformation& u) {
  const BVFunction1D flat = u.psi().flattened();
  std::vector<double> br = limit_breaks(u, flat);
  const std::vector<double> fb = f.breakpoints();
  br.insert(br.end(), fb.begin(), fb.end());
  br = merged_breaks(u.domain().a, u.domain().b, br);
  double s = 0.0;
  const Domain2D& dom = u.domain();
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double y0 = br[k];
    const double y1 = br[k + 1];
    s += quad::integrate_interval(y0, y1, 6, [&](double x2) {
      // Evaluate strictly inside the piece so that jumps at its ends use
      // the correct one-sided value.
      const double y = std::clamp(x2, y0 + 1e-15, y1 - 1e-15);
      return quad::integrate_interval(dom.c, dom.d, 6, [&](double x1) { return norm(f({x1, y}) - u({x1, y})); });
    });
  }
  return s;
}

Mat2 gradient_pairing(const StructuredField& f, const TestFunction& phi) {
  const std::vector<double> br = f.breakpoints();
  Mat2 sum = Mat2::zero();
  const Domain2D& dom = f.domain;
  const auto& gl = quad::gauss_legendre(8);
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double h2 = 0.5 * (br[k + 1] - br[k]);
    const double m2 = 0.5 * (br[k + 1] + br[k]);
    const double h1 = 0.5 * dom.width();
    const double m1 = 0.5 * (dom.c + dom.d);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      for (std::size_t j = 0; j < gl.x.size(); ++j) {
        const Vec2 x{m1 + h1 * gl.x[i], m2 + h2 * gl.x[j]};
        sum += f.gradient(x) * (gl.w[i] * gl.w[j] * h1 * h2 * phi(x));
      }
    }
  }
  return sum;
}

LimitDeformation single_jump_limit(const Domain2D& dom, double angle_minus, double angle_plus, const Vec2& psi_minus,
                                   const Vec2& psi_plus, double at) {
  std::vector<RotationPiece> pieces;
  if (angle_minus == angle_plus) {
    pieces.push_back({dom.a, dom.b, angle_minus});
  } else {
    pieces.push_back({dom.a, at, angle_minus});
    pieces.push_back({at, dom.b, angle_plus});
  }
  std::vector<Jump> jumps;
  const Vec2 d = psi_plus - psi_minus;
  if (d.x != 0.0 || d.y != 0.0) jumps.push_back({at, d});
  return LimitDeformation(dom, RotationProfile1D(dom.a, dom.b, std::move(pieces)),
                          BVFunction1D(dom.a, dom.b, PiecewiseLinear{{dom.a, dom.b}, {psi_minus, psi_minus}},
                                       std::move(jumps)));
}

}  // namespace bilayer
