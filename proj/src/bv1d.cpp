#include "bilayer/bv1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "bilayer/errors.hpp"
#include "bilayer/quadrature.hpp"

namespace bilayer {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw Error(ErrorKind::InvalidInput, msg);
}

// Floor of t / eps that snaps to the lattice when t is within rounding of it.
std::int64_t lattice_index(double t, double eps) {
  const double q = t / eps;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-12 * std::max(1.0, std::abs(q))) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(q));
}

// Breakpoints and values of the flattened unit staircase on [0, 1].
void unit_staircase_nodes(int depth, std::vector<double>& x, std::vector<double>& y) {
  const std::int64_t n = std::int64_t{1} << depth;
  double p3 = 1.0;
  for (int j = 0; j < depth; ++j) p3 *= 3.0;
  x.clear();
  y.clear();
  x.reserve(2 * n);
  y.reserve(2 * n);
  for (std::int64_t k = 0; k < n; ++k) {
    std::int64_t left = 0;
    for (int j = depth - 1; j >= 0; --j) left = 3 * left + 2 * ((k >> j) & 1);
    const double lo = static_cast<double>(left) / p3;
    const double hi = static_cast<double>(left + 1) / p3;
    const double ylo = static_cast<double>(k) / static_cast<double>(n);
    const double yhi = static_cast<double>(k + 1) / static_cast<double>(n);
    if (x.empty() || x.back() < lo) {
      x.push_back(lo);
      y.push_back(ylo);
    }
    x.push_back(hi);
    y.push_back(yhi);
  }
}

PiecewiseLinear merge_sum(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  PiecewiseLinear out;
  out.t.reserve(f.t.size() + g.t.size());
  std::merge(f.t.begin(), f.t.end(), g.t.begin(), g.t.end(), std::back_inserter(out.t));
  out.t.erase(std::unique(out.t.begin(), out.t.end()), out.t.end());
  out.v.reserve(out.t.size());
  for (double s : out.t) out.v.push_back(f(s) + g(s));
  return out;
}

}  // namespace

Vec2 PiecewiseLinear::operator()(double s) const {
  if (s <= t.front()) return v.front();
  if (s >= t.back()) return v.back();
  const auto it = std::upper_bound(t.begin(), t.end(), s);
  const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
  if (t[k] == s) return v[k];
  const double lam = (s - t[k]) / (t[k + 1] - t[k]);
  return v[k] + lam * (v[k + 1] - v[k]);
}

double PiecewiseLinear::total_variation() const {
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < v.size(); ++k) s += norm(v[k + 1] - v[k]);
  return s;
}

BVFunction1D::BVFunction1D(double a, double b, PiecewiseLinear ac, std::vector<Jump> jumps,
                           std::optional<Staircase> cantor)
    : a_(a), b_(b), ac_(std::move(ac)), jumps_(std::move(jumps)), cantor_(cantor) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, "BV domain must be a nonempty interval");
  require(ac_.t.size() >= 2 && ac_.t.size() == ac_.v.size(), "AC part needs at least two breakpoints");
  require(ac_.t.front() == a && ac_.t.back() == b, "AC breakpoints must start at a and end at b");
  for (std::size_t k = 0; k + 1 < ac_.t.size(); ++k) require(ac_.t[k] < ac_.t[k + 1], "AC breakpoints must increase");
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    require(jumps_[k].location > a && jumps_[k].location < b, "jump locations must lie inside the domain");
    if (k > 0) require(jumps_[k - 1].location < jumps_[k].location, "jump locations must increase");
  }
  if (cantor_) {
    require(cantor_->depth >= 1 && cantor_->depth <= 24, "staircase depth must be in [1, 24]");
    require(cantor_->c0 >= a && cantor_->c1 <= b && cantor_->c0 < cantor_->c1, "staircase carrier must lie in the domain");
  }
}

BVFunction1D BVFunction1D::constant(double a, double b, Vec2 value) {
  return BVFunction1D(a, b, PiecewiseLinear{{a, b}, {value, value}});
}

BVFunction1D BVFunction1D::linear(double a, double b, Vec2 va, Vec2 vb) {
  return BVFunction1D(a, b, PiecewiseLinear{{a, b}, {va, vb}});
}

bool BVFunction1D::ac_is_constant() const {
  for (const Vec2& v : ac_.v)
    if (v.x != ac_.v.front().x || v.y != ac_.v.front().y) return false;
  return true;
}

Vec2 BVFunction1D::staircase_value(double t) const {
  if (!cantor_) return {0.0, 0.0};
  const double x = (t - cantor_->c0) / (cantor_->c1 - cantor_->c0);
  return cantor_value(cantor_->depth, x) * cantor_->rise;
}

Vec2 BVFunction1D::operator()(double t) const {
  Vec2 s = ac_(t) + staircase_value(t);
  for (const Jump& j : jumps_) {
    if (j.location > t) break;
    s += j.amplitude;
  }
  return s;
}

Vec2 BVFunction1D::left_limit(double t) const {
  Vec2 s = ac_(t) + staircase_value(t);
  for (const Jump& j : jumps_) {
    if (j.location >= t) break;
    s += j.amplitude;
  }
  return s;
}

double BVFunction1D::jump_variation() const {
  double s = 0.0;
  for (const Jump& j : jumps_) s += norm(j.amplitude);
  return s;
}

BVFunction1D BVFunction1D::flattened() const {
  if (!cantor_) return *this;
  std::vector<double> x;
  std::vector<double> y;
  unit_staircase_nodes(cantor_->depth, x, y);
  const double len = cantor_->c1 - cantor_->c0;
  PiecewiseLinear st;
  if (cantor_->c0 > a_) {
    st.t.push_back(a_);
    st.v.push_back({0.0, 0.0});
  }
  for (std::size_t k = 0; k < x.size(); ++k) {
    double t = cantor_->c0 + len * x[k];
    if (k == 0) t = cantor_->c0;
    if (k + 1 == x.size()) t = cantor_->c1;
    st.t.push_back(t);
    st.v.push_back(y[k] * cantor_->rise);
  }
  if (cantor_->c1 < b_) {
    st.t.push_back(b_);
    st.v.push_back(cantor_->rise);
  }
  return BVFunction1D(a_, b_, merge_sum(ac_, st), jumps_);
}

RotationProfile1D::RotationProfile1D(double a, double b, std::vector<RotationPiece> pieces) : pieces_(std::move(pieces)) {
  require(!pieces_.empty(), "rotation profile needs at least one piece");
  require(pieces_.front().lo == a && pieces_.back().hi == b, "rotation pieces must cover the domain");
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    require(pieces_[k].lo < pieces_[k].hi, "rotation pieces must be nonempty");
    require(std::isfinite(pieces_[k].angle), "rotation angles must be finite");
    if (k > 0) require(pieces_[k - 1].hi == pieces_[k].lo, "rotation pieces must be contiguous");
  }
}

RotationProfile1D RotationProfile1D::constant(double a, double b, double angle) {
  return RotationProfile1D(a, b, {{a, b, angle}});
}

double RotationProfile1D::angle_at(double t) const {
  for (const RotationPiece& p : pieces_)
    if (t < p.hi) return p.angle;
  return pieces_.back().angle;
}

double cantor_value(int depth, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double acc = 0.0;
  double scale = 1.0;
  for (int k = 0; k < depth; ++k) {
    if (x < 1.0 / 3.0) {
      x *= 3.0;
      scale *= 0.5;
    } else if (x <= 2.0 / 3.0) {
      return acc + 0.5 * scale;
    } else {
      acc += 0.5 * scale;
      x = 3.0 * x - 2.0;
      scale *= 0.5;
    }
  }
  return acc + scale * x;
}

double cantor_quantile(int depth, double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) y = 1.0;
  double off = 0.0;
  double sc = 1.0;
  for (int k = 0; k < depth; ++k) {
    if (y <= 0.5) {
      y *= 2.0;
    } else {
      y = 2.0 * y - 1.0;
      off += 2.0 * sc / 3.0;
    }
    sc /= 3.0;
  }
  return off + sc * y;
}

double total_variation(const BVFunction1D& w) {
  return w.ac_variation() + w.jump_variation() + w.staircase_variation();
}

BVFunction1D cantor_staircase(int depth) {
  if (depth < 1 || depth > 24) throw Error(ErrorKind::InvalidInput, "staircase depth must be in [1, 24]");
  return BVFunction1D(0.0, 1.0, PiecewiseLinear{{0.0, 1.0}, {{0.0, 0.0}, {0.0, 0.0}}}, {},
                      Staircase{depth, {1.0, 0.0}, 0.0, 1.0});
}

double stop_go_map(double t, double eps, double lambda) {
  const std::int64_t i = lattice_index(t, eps);
  const double base = static_cast<double>(i) * eps;
  const double r = t - base;
  if (r <= lambda * eps) return base + r / lambda;
  return static_cast<double>(i + 1) * eps;
}

BVFunction1D stop_go_reparametrize(const BVFunction1D& w_in, double eps, double lambda) {
  if (w_in.has_jumps()) throw Error(ErrorKind::InvalidInput, "stop-and-go needs a continuous input");
  require(eps > 0.0 && lambda > 0.0 && lambda < 1.0, "stop-and-go needs eps > 0 and lambda in (0, 1)");
  const BVFunction1D w = w_in.flattened();
  const double a = w.a();
  const double b = w.b();

  // (t, phi(t)) pairs; lattice nodes carry exact images so that both ends
  // of a rigid interval evaluate w at the same point.
  struct Node {
    double t;
    double phi;
    int priority;
  };
  std::vector<Node> nodes;
  nodes.push_back({a, stop_go_map(a, eps, lambda), 0});
  const std::int64_t i0 = lattice_index(a, eps) - 1;
  const std::int64_t i1 = lattice_index(b, eps) + 1;
  for (std::int64_t i = i0; i <= i1; ++i) {
    const double base = static_cast<double>(i) * eps;
    const double next = static_cast<double>(i + 1) * eps;
    const double rigid_start = base + lambda * eps;
    if (base > a && base < b) nodes.push_back({base, base, 0});
    if (rigid_start > a && rigid_start < b) nodes.push_back({rigid_start, next, 0});
  }
  for (double s : w.ac().t) {
    if (s <= a || s >= b) continue;
    const std::int64_t i = lattice_index(s, eps);
    const double base = static_cast<double>(i) * eps;
    const double r = s - base;
    if (r <= 0.0) continue;  // on the lattice: already a node
    const double p = base + lambda * r;
    if (p > a && p < b) nodes.push_back({p, s, 1});
  }
  // Smallest b_eps with phi(b_eps) = b.
  {
    const std::int64_t i = lattice_index(b, eps);
    const double base = static_cast<double>(i) * eps;
    const double r = b - base;
    double b_eps;
    if (r <= 0.0) {
      b_eps = static_cast<double>(i - 1) * eps + lambda * eps;
    } else {
      b_eps = base + lambda * r;
    }
    if (b_eps > a && b_eps < b) nodes.push_back({b_eps, b, 0});
  }
  nodes.push_back({b, b, 0});

  std::sort(nodes.begin(), nodes.end(), [](const Node& x, const Node& y) {
    if (x.t != y.t) return x.t < y.t;
    return x.priority < y.priority;
  });
  PiecewiseLinear out;
  const double tol = 1e-14 * std::max(1.0, std::max(std::abs(a), std::abs(b)));
  for (const Node& n : nodes) {
    if (!out.t.empty() && n.t - out.t.back() <= tol) continue;
    out.t.push_back(n.t);
    out.v.push_back(w.ac()(std::min(n.phi, b)));
  }
  out.t.back() = b;
  out.v.back() = w.ac()(b);
  return BVFunction1D(a, b, std::move(out));
}

namespace {

// inf{t : V(t) >= v} for the variation function of a purely singular w.
double variation_quantile(const BVFunction1D& w, double v) {
  const auto& st = w.cantor();
  const double rise = st ? norm(st->rise) : 0.0;
  auto k_at = [&](double t) {
    if (!st) return 0.0;
    return rise * cantor_value(st->depth, (t - st->c0) / (st->c1 - st->c0));
  };
  auto k_inv = [&](double y) {
    return st->c0 + (st->c1 - st->c0) * cantor_quantile(st->depth, y / rise);
  };
  double acc = 0.0;
  double prev = w.a();
  for (const Jump& j : w.jumps()) {
    if (st && acc + k_at(j.location) >= v && acc + k_at(prev) < v) return std::max(prev, k_inv(v - acc));
    if (acc + k_at(j.location) < v && v <= acc + norm(j.amplitude) + k_at(j.location)) return j.location;
    if (v <= acc + k_at(j.location)) return prev;
    acc += norm(j.amplitude);
    prev = j.location;
  }
  if (st && acc + k_at(prev) < v) return std::min(w.b(), std::max(prev, k_inv(v - acc)));
  return prev;
}

}  // namespace

BVFunction1D piecewise_constant_approximation(const BVFunction1D& w, int n) {
  if (!w.ac_is_constant()) throw Error(ErrorKind::InvalidInput, "piecewise-constant approximation needs a purely singular input");
  require(n >= 1, "need at least one quantile bin");
  const double tv = total_variation(w);
  auto sample = [&](double t) { return t >= w.b() ? w.left_limit(w.b()) : w(t); };
  // Levels are sampled at the variation quantiles k/n, k = 0..n; the step
  // from level k-1 to level k sits at the quantile (k - 1/2)/n.
  Vec2 base = w(w.a());
  std::vector<Jump> jumps;
  Vec2 level = base;
  for (int k = 1; k <= n && tv > 0.0; ++k) {
    const Vec2 value = sample(variation_quantile(w, tv * static_cast<double>(k) / n));
    const Vec2 amp = value - level;
    if (amp.x == 0.0 && amp.y == 0.0) continue;
    const double sk = variation_quantile(w, tv * (static_cast<double>(k) - 0.5) / n);
    if (sk <= w.a()) {
      base = value;
    } else if (sk >= w.b()) {
      continue;
    } else if (!jumps.empty() && jumps.back().location == sk) {
      jumps.back().amplitude += amp;
    } else {
      jumps.push_back({sk, amp});
    }
    level = value;
  }
  return BVFunction1D(w.a(), w.b(), PiecewiseLinear{{w.a(), w.b()}, {base, base}}, std::move(jumps));
}

StrictGap strict_gap(const BVFunction1D& seq_member, const BVFunction1D& target) {
  if (seq_member.a() != target.a() || seq_member.b() != target.b()) {
    throw Error(ErrorKind::DomainMismatch, "strict gap needs identical domains");
  }
  const BVFunction1D f = seq_member.flattened();
  const BVFunction1D g = target.flattened();
  std::vector<double> ts;
  ts.insert(ts.end(), f.ac().t.begin(), f.ac().t.end());
  ts.insert(ts.end(), g.ac().t.begin(), g.ac().t.end());
  for (const Jump& j : f.jumps()) ts.push_back(j.location);
  for (const Jump& j : g.jumps()) ts.push_back(j.location);
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  double l1 = 0.0;
  for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
    const double t0 = ts[k];
    const double t1 = ts[k + 1];
    const Vec2 d0 = f(t0) - g(t0);
    const Vec2 d1 = f.left_limit(t1) - g.left_limit(t1);
    l1 += (t1 - t0) * quad::integrate_norm_affine(d0, d1 - d0, 0.0, 1.0);
  }
  return {l1, std::abs(total_variation(seq_member) - total_variation(target))};
}

BVFunction1D ramp_jumps(const BVFunction1D& w, double width) {
  require(width > 0.0, "ramp width must be positive");
  PiecewiseLinear acc = w.ac();
  for (const Jump& j : w.jumps()) {
    const double lo = std::min(j.location, w.b() - width);
    const double hi = lo + width;
    PiecewiseLinear r;
    r.t.push_back(w.a());
    r.v.push_back({0.0, 0.0});
    if (lo > w.a()) {
      r.t.push_back(lo);
      r.v.push_back({0.0, 0.0});
    }
    if (hi < w.b()) {
      r.t.push_back(hi);
      r.v.push_back(j.amplitude);
    }
    r.t.push_back(w.b());
    r.v.push_back(j.amplitude);
    acc = merge_sum(acc, r);
  }
  return BVFunction1D(w.a(), w.b(), std::move(acc), {}, w.cantor());
}

}  // namespace bilayer
