#include "bilayer/fields.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "bilayer/errors.hpp"
#include "bilayer/quadrature.hpp"

namespace bilayer {

namespace {

constexpr double kSliver = 1e-14;

std::vector<Vec2> clean_polygon(std::vector<Vec2> poly) {
  std::vector<Vec2> out;
  for (const Vec2& v : poly) {
    if (!out.empty() && norm(v - out.back()) <= 1e-15) continue;
    out.push_back(v);
  }
  while (out.size() > 1 && norm(out.front() - out.back()) <= 1e-15) out.pop_back();
  return out;
}

void y_range(const std::vector<Vec2>& poly, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const Vec2& v : poly) {
    lo = std::min(lo, v.y);
    hi = std::max(hi, v.y);
  }
}

std::vector<Vec2> clip_y(const std::vector<Vec2>& poly, double ylo, double yhi) {
  std::vector<Vec2> out = quad::clip_halfplane(poly, {0.0, -1.0}, -ylo);
  return quad::clip_halfplane(out, {0.0, 1.0}, yhi);
}

std::vector<double> sorted_limit_breaks(const LimitDeformation& u) {
  std::vector<double> br;
  const BVFunction1D flat = u.psi().flattened();
  br.insert(br.end(), flat.ac().t.begin(), flat.ac().t.end());
  for (const RotationPiece& p : u.rotation().pieces()) br.push_back(p.lo);
  for (const Jump& j : u.psi().jumps()) br.push_back(j.location);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  return br;
}

}  // namespace

double Cell::area() const { return quad::polygon_area(polygon); }

std::vector<Vec2> Cell::image() const {
  std::vector<Vec2> out;
  out.reserve(polygon.size());
  for (const Vec2& v : polygon) out.push_back(eval(v));
  return out;
}

bool in_soft_layer(double x2, double eps, double lambda) {
  const double j = std::floor(x2 / eps);
  return x2 - j * eps < lambda * eps;
}

FieldBuilder::FieldBuilder(Domain2D dom, double eps, double lambda) : dom_(dom), eps_(eps), lambda_(lambda) {
  validate_domain(dom_);
  if (!(eps > 0.0) || !(lambda > 0.0 && lambda < 1.0)) throw Error(ErrorKind::InvalidInput, "need eps > 0 and lambda in (0, 1)");
}

long long FieldBuilder::period_of(double x2) const {
  const double q = x2 / eps_;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-12 * std::max(1.0, std::abs(q))) return static_cast<long long>(r);
  return static_cast<long long>(std::floor(q));
}

void FieldBuilder::add_region(const Line& lower, const Line& upper, double ylo, double yhi, const Mat2& soft,
                              const Mat2& rigid) {
  const double ymin = std::max({ylo, std::min(lower.at(dom_.c), lower.at(dom_.d)), dom_.a});
  const double ymax = std::min({yhi, std::max(upper.at(dom_.c), upper.at(dom_.d)), dom_.b});
  if (!(ymax > ymin)) return;
  std::vector<Vec2> base{{dom_.c, ymin}, {dom_.d, ymin}, {dom_.d, ymax}, {dom_.c, ymax}};
  if (lower.slope != 0.0 || lower.intercept > ymin) base = quad::clip_halfplane(base, {lower.slope, -1.0}, -lower.intercept);
  if (upper.slope != 0.0 || upper.intercept < ymax) base = quad::clip_halfplane(base, {-upper.slope, 1.0}, upper.intercept);
  base = clean_polygon(base);
  if (base.size() < 3 || quad::polygon_area(base) <= 0.0) return;
  double py0 = 0.0;
  double py1 = 0.0;
  y_range(base, py0, py1);
  const double scale = std::max(1.0, std::max(std::abs(py0), std::abs(py1)));
  for (long long j = period_of(py0) - 1; j <= period_of(py1); ++j) {
    const double cuts[3] = {lattice(j), soft_top(j), lattice(j + 1)};
    for (int s = 0; s < 2; ++s) {
      const double s0 = std::max(cuts[s], py0);
      const double s1 = std::min(cuts[s + 1], py1);
      if (!(s1 - s0 > kSliver * scale)) continue;
      std::vector<Vec2> poly = base;
      if (s0 > py0) poly = quad::clip_halfplane(poly, {0.0, -1.0}, -s0);
      if (s1 < py1) poly = quad::clip_halfplane(poly, {0.0, 1.0}, s1);
      poly = clean_polygon(poly);
      if (poly.size() < 3 || quad::polygon_area(poly) <= 1e-300) continue;
      Cell cell;
      cell.polygon = std::move(poly);
      cell.layer = s == 0 ? Layer::Soft : Layer::Rigid;
      cell.gradient = s == 0 ? soft : rigid;
      cells_.push_back(std::move(cell));
    }
  }
}

PiecewiseAffineField FieldBuilder::finish(const Vec2& anchor) {
  return integrate_offsets(dom_, eps_, lambda_, std::move(cells_), anchor);
}

std::vector<Adjacency> compute_adjacency(const std::vector<Cell>& cells) {
  struct Edge {
    double angle;
    double offset;
    double t0;
    double t1;
    Vec2 dir;
    Vec2 origin;
    std::size_t cell;
  };
  std::vector<Edge> edges;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto& poly = cells[c].polygon;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      Vec2 p = poly[k];
      Vec2 q = poly[(k + 1) % poly.size()];
      Vec2 d = q - p;
      const double len = norm(d);
      if (len <= 1e-15) continue;
      d = d / len;
      if (d.x < 0.0 || (d.x == 0.0 && d.y < 0.0)) {
        d = -d;
        std::swap(p, q);
      }
      const double off = cross(d, p);
      edges.push_back({std::atan2(d.y, d.x), off, dot(d, p), dot(d, q), d, p, c});
    }
  }
  std::vector<Adjacency> out;
  const double line_tol = 1e-9;
  const double overlap_tol = 1e-12;
  auto match_line = [&](std::vector<const Edge*>& group) {
    std::sort(group.begin(), group.end(), [](const Edge* x, const Edge* y) { return x->t0 < y->t0; });
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size() && group[j]->t0 < group[i]->t1 - overlap_tol; ++j) {
        if (group[i]->cell == group[j]->cell) continue;
        const double lo = std::max(group[i]->t0, group[j]->t0);
        const double hi = std::min(group[i]->t1, group[j]->t1);
        if (hi - lo <= overlap_tol) continue;
        const Edge& e = *group[i];
        Adjacency adj;
        adj.i = std::min(group[i]->cell, group[j]->cell);
        adj.j = std::max(group[i]->cell, group[j]->cell);
        adj.p = e.origin + (lo - e.t0) * e.dir;
        adj.q = e.origin + (hi - e.t0) * e.dir;
        out.push_back(adj);
      }
    }
  };
  // Group by direction first, then by offset within a direction, so that
  // rounding in the angles cannot interleave different lines.
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) { return x.angle < y.angle; });
  std::size_t start = 0;
  while (start < edges.size()) {
    std::size_t end = start + 1;
    while (end < edges.size() && edges[end].angle - edges[end - 1].angle <= line_tol) ++end;
    std::vector<const Edge*> same_dir;
    for (std::size_t k = start; k < end; ++k) same_dir.push_back(&edges[k]);
    std::sort(same_dir.begin(), same_dir.end(), [](const Edge* x, const Edge* y) { return x->offset < y->offset; });
    std::size_t a = 0;
    while (a < same_dir.size()) {
      std::size_t b = a + 1;
      while (b < same_dir.size() && same_dir[b]->offset - same_dir[b - 1]->offset <= line_tol) ++b;
      std::vector<const Edge*> line(same_dir.begin() + static_cast<std::ptrdiff_t>(a),
                                    same_dir.begin() + static_cast<std::ptrdiff_t>(b));
      match_line(line);
      a = b;
    }
    start = end;
  }
  return out;
}

PiecewiseAffineField integrate_offsets(Domain2D dom, double eps, double lambda, std::vector<Cell> cells,
                                       const Vec2& anchor) {
  PiecewiseAffineField f;
  f.domain = dom;
  f.eps = eps;
  f.lambda = lambda;
  f.cells = std::move(cells);
  if (f.cells.empty()) throw Error(ErrorKind::InvalidInput, "field has no cells");
  f.adjacency = compute_adjacency(f.cells);

  std::vector<std::vector<std::size_t>> nbr(f.cells.size());
  for (std::size_t k = 0; k < f.adjacency.size(); ++k) {
    nbr[f.adjacency[k].i].push_back(k);
    nbr[f.adjacency[k].j].push_back(k);
  }
  std::vector<char> seen(f.cells.size(), 0);
  std::deque<std::size_t> queue;
  f.cells[0].offset = anchor;
  seen[0] = 1;
  queue.push_back(0);
  constexpr double kTol = 1e-8;
  while (!queue.empty()) {
    const std::size_t c = queue.front();
    queue.pop_front();
    for (std::size_t k : nbr[c]) {
      const Adjacency& adj = f.adjacency[k];
      const std::size_t o = adj.i == c ? adj.j : adj.i;
      const Vec2 mid = 0.5 * (adj.p + adj.q);
      const Vec2 target = f.cells[c].eval(mid);
      if (!seen[o]) {
        f.cells[o].offset = target - f.cells[o].gradient * mid;
        seen[o] = 1;
        queue.push_back(o);
      }
      for (const Vec2& v : {adj.p, adj.q}) {
        if (norm(f.cells[o].eval(v) - f.cells[c].eval(v)) > kTol) {
          throw Error(ErrorKind::IncompatibleComplex, "offsets disagree across a shared edge");
        }
      }
    }
  }
  for (char s : seen)
    if (!s) throw Error(ErrorKind::InvalidInput, "cell adjacency graph is not connected");

  const Vec2 shift = field_integral(f) / total_area(f);
  for (Cell& c : f.cells) c.offset -= shift;
  return f;
}

double total_area(const PiecewiseAffineField& f) {
  double s = 0.0;
  for (const Cell& c : f.cells) s += c.area();
  return s;
}

Vec2 field_integral(const PiecewiseAffineField& f) {
  Vec2 s{0.0, 0.0};
  for (const Cell& c : f.cells) {
    const double a = c.area();
    s += a * c.eval(quad::polygon_centroid(c.polygon));
  }
  return s;
}

AdmissibilityReport validate_admissibility(const PiecewiseAffineField& f, double tol) {
  AdmissibilityReport rep;
  rep.cells.reserve(f.cells.size());
  for (std::size_t k = 0; k < f.cells.size(); ++k) {
    const Cell& c = f.cells[k];
    CellCheck chk;
    chk.index = k;
    chk.in_me1 = in_me1(c.gradient, tol);
    if (c.layer == Layer::Rigid) {
      chk.rigid_ok = chk.in_me1 && std::abs(decompose_me1(c.gradient).gamma) <= tol;
    }
    if (!chk.in_me1 || !chk.rigid_ok) ++rep.failures;
    rep.cells.push_back(chk);
  }
  rep.pass = rep.failures == 0;
  return rep;
}

double validate_compatibility(const PiecewiseAffineField& f) {
  double m = 0.0;
  for (const Adjacency& adj : f.adjacency) {
    const Vec2 d = adj.q - adj.p;
    m = std::max(m, rank_one_defect(f.cells[adj.i].gradient, f.cells[adj.j].gradient, d / norm(d)));
  }
  return m;
}

double continuity_defect(const PiecewiseAffineField& f) {
  double m = 0.0;
  for (const Adjacency& adj : f.adjacency) {
    for (const Vec2& v : {adj.p, adj.q}) m = std::max(m, norm(f.cells[adj.i].eval(v) - f.cells[adj.j].eval(v)));
  }
  return m;
}

bool layer_tags_consistent(const PiecewiseAffineField& f, double tol) {
  for (const Cell& c : f.cells) {
    double lo = 0.0;
    double hi = 0.0;
    y_range(c.polygon, lo, hi);
    const double mid = 0.5 * (lo + hi);
    const bool soft = in_soft_layer(mid, f.eps, f.lambda);
    if (soft != (c.layer == Layer::Soft)) return false;
    const double j = std::floor(mid / f.eps);
    const double s0 = soft ? j * f.eps : j * f.eps + f.lambda * f.eps;
    const double s1 = soft ? j * f.eps + f.lambda * f.eps : (j + 1.0) * f.eps;
    if (lo < s0 - tol || hi > s1 + tol) return false;
  }
  return true;
}

Vec2 limit_mean(const LimitDeformation& u) {
  const Domain2D& dom = u.domain();
  std::vector<double> br = sorted_limit_breaks(u);
  br.push_back(dom.a);
  br.push_back(dom.b);
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());
  const double w = dom.width();
  const double m1 = 0.5 * (dom.d * dom.d - dom.c * dom.c);
  Vec2 s{0.0, 0.0};
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    if (br[k] < dom.a || br[k + 1] > dom.b) continue;
    const auto& gl = quad::gauss_legendre(4);
    const double h = 0.5 * (br[k + 1] - br[k]);
    const double m = 0.5 * (br[k + 1] + br[k]);
    for (std::size_t i = 0; i < gl.x.size(); ++i) {
      const double x2 = m + h * gl.x[i];
      const Vec2 val = u.rotation().rotation_at(x2) * Vec2{m1, x2 * w} + w * u.psi()(x2);
      s += (gl.w[i] * h) * val;
    }
  }
  return s / dom.area();
}

double l1_distance_to_limit(const PiecewiseAffineField& f, const LimitDeformation& u) {
  if (!(f.domain == u.domain())) throw Error(ErrorKind::DomainMismatch, "field and limit live on different domains");
  const Vec2 mean = limit_mean(u);
  const std::vector<double> br = sorted_limit_breaks(u);
  const auto& rule = quad::triangle_order4();
  double total = 0.0;
  for (const Cell& c : f.cells) {
    double lo = 0.0;
    double hi = 0.0;
    y_range(c.polygon, lo, hi);
    std::vector<double> cuts{lo};
    for (auto it = std::upper_bound(br.begin(), br.end(), lo); it != br.end() && *it < hi; ++it) cuts.push_back(*it);
    cuts.push_back(hi);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      std::vector<Vec2> piece = c.polygon;
      if (cuts.size() > 2) piece = clean_polygon(clip_y(piece, cuts[k], cuts[k + 1]));
      if (piece.size() < 3) continue;
      total += quad::integrate_polygon(piece, rule, [&](const Vec2& x) { return norm(c.eval(x) - (u(x) - mean)); });
    }
  }
  return total;
}

double gradient_total_variation(const PiecewiseAffineField& f) {
  double s = 0.0;
  for (const Cell& c : f.cells) s += c.gradient.frobenius() * c.area();
  return s;
}

RotationProfileResult extract_rotation_profile(const PiecewiseAffineField& f) {
  const double eps = f.eps;
  auto period = [&](double x2) { return static_cast<long long>(std::floor(x2 / eps)); };
  const long long p0 = period(f.domain.a);
  long long p1 = period(f.domain.b);
  if (static_cast<double>(p1) * eps >= f.domain.b) --p1;
  const std::size_t n = static_cast<std::size_t>(p1 - p0 + 1);
  std::vector<double> angle(n, 0.0);
  std::vector<char> found(n, 0);
  for (const Cell& c : f.cells) {
    if (c.layer != Layer::Rigid) continue;
    double lo = 0.0;
    double hi = 0.0;
    y_range(c.polygon, lo, hi);
    const long long p = period(0.5 * (lo + hi));
    if (p < p0 || p > p1) continue;
    const std::size_t k = static_cast<std::size_t>(p - p0);
    if (!found[k]) {
      angle[k] = angle_of(c.gradient.col(0));
      found[k] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (found[k]) continue;
    if (k + 1 == n && k > 0) {
      angle[k] = angle[k - 1];
      continue;
    }
    throw Error(ErrorKind::NoRigidLayer, "a period below the top has no rigid strip");
  }
  std::vector<RotationPiece> pieces;
  double tv = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = std::max(f.domain.a, static_cast<double>(p0 + static_cast<long long>(k)) * eps);
    const double hi = std::min(f.domain.b, static_cast<double>(p0 + static_cast<long long>(k) + 1) * eps);
    if (k > 0) tv += (rotation_from_angle(angle[k]) - rotation_from_angle(angle[k - 1])).frobenius();
    if (!pieces.empty() && pieces.back().angle == angle[k]) {
      pieces.back().hi = hi;
    } else {
      pieces.push_back({lo, hi, angle[k]});
    }
  }
  pieces.back().hi = f.domain.b;
  pieces.front().lo = f.domain.a;
  return {RotationProfile1D(f.domain.a, f.domain.b, std::move(pieces)), tv};
}

Mat2 gradient_pairing(const PiecewiseAffineField& f, const TestFunction& phi) {
  const auto& rule = quad::triangle_collapsed(6);
  Mat2 s = Mat2::zero();
  for (const Cell& c : f.cells) s += c.gradient * quad::integrate_polygon(c.polygon, rule, phi);
  return s;
}

}  // namespace bilayer
