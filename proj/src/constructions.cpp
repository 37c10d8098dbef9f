#include "bilayer/constructions.hpp"

#include <algorithm>
#include <cmath>

#include "bilayer/errors.hpp"

namespace bilayer {

namespace {

const Vec2 kE1{1.0, 0.0};
const Vec2 kE2{0.0, 1.0};

Vec2 dir(double angle) { return rotation_from_angle(angle) * kE1; }

double half_tan(double theta) { return std::tan(0.5 * theta); }

void require_unit_x1_range(const Domain2D& dom) {
  if (dom.c != 0.0 || dom.d != 1.0) throw Error(ErrorKind::InvalidInput, "jump gadgets need the x1-range (0, 1)");
}

void require_class_a(const LimitDeformation& u) {
  if (!u.in_class_a()) throw Error(ErrorKind::WrongClass, "construction needs a limit in class A");
}

// Soft strips carry R(I + (gamma / lambda) e1 (x) e2) with gamma = psi' . R e1,
// rigid strips carry R.
void add_background(FieldBuilder& fb, const LimitDeformation& u, double ylo, double yhi, double angle, double lambda) {
  if (!(yhi > ylo)) return;
  const PiecewiseLinear& ac = u.psi().ac();
  const Vec2 re1 = dir(angle);
  const Mat2 rigid = rotation_from_angle(angle);
  for (std::size_t k = 0; k < ac.pieces(); ++k) {
    const double lo = std::max(ylo, ac.t[k]);
    const double hi = std::min(yhi, ac.t[k + 1]);
    if (!(hi > lo)) continue;
    const double gamma = dot(ac.slope_on(k), re1);
    fb.add_band(lo, hi, recompose(angle, gamma / lambda), rigid);
  }
}

struct Band {
  long long period = 0;
  double y0 = 0.0;
  double top = 0.0;
};

Band band_for(const FieldBuilder& fb, double location) {
  Band b;
  b.period = fb.period_of(location);
  b.y0 = fb.lattice(b.period);
  b.top = fb.soft_top(b.period);
  return b;
}

// Constant part of the jump the gadget must produce when it sits at y0; the
// x1-dependent part (R+ - R-) x1 e1 comes from the slanted interfaces.
Vec2 shifted_delta(const SingleJumpData& j, double y0) {
  const Mat2 dr = rotation_from_angle(j.angle_plus) - rotation_from_angle(j.angle_minus);
  return j.dpsi + dr * Vec2{0.0, y0};
}

void add_general_gadget(FieldBuilder& fb, const Band& band, const SingleJumpParams& p) {
  const double h = band.top - band.y0;
  const double s = 0.25 * h;
  const double q1 = band.y0 + 0.25 * h;
  const double q2 = band.y0 + 0.5 * h;
  const double q3 = band.y0 + 0.75 * h;
  const double rm = p.angle_minus;
  const double rp = p.angle_plus;
  const double sa = p.s_angle;
  const Line rise{s, band.y0};
  const Line fall{-s, q3};
  fb.add_region(Line::horizontal(band.y0), rise, band.y0, q1, recompose(rm, p.mu_minus(h)));
  fb.add_region(rise, Line::horizontal(q1), band.y0, q1, recompose(sa, p.mu_tilde_minus(h)));
  fb.add_band(q1, q2, recompose(sa, p.gamma_minus(h)), recompose(sa, p.gamma_minus(h)));
  fb.add_region(Line::horizontal(q2), fall, q2, q3, recompose(sa, p.mu_tilde_plus(h)));
  fb.add_region(fall, Line::horizontal(q3), q2, q3, recompose(rp, p.mu_plus(h)));
  fb.add_band(q3, band.top, recompose(rp, p.gamma_plus(h)), recompose(rp, p.gamma_plus(h)));
}

void check_band_fits(const Domain2D& dom, const Band& band, double eps, ErrorKind kind) {
  if (band.y0 < dom.a || band.y0 + eps > dom.b + 1e-12 * eps) {
    throw Error(kind, "the eps-cell of a jump does not fit inside the domain");
  }
}

}  // namespace

double SingleJumpParams::mu_plus(double h) const { return 4.0 / h + half_tan(theta_plus); }
double SingleJumpParams::mu_minus(double h) const { return -4.0 / h + half_tan(theta_minus); }
double SingleJumpParams::mu_tilde_plus(double h) const { return 4.0 / h - half_tan(theta_plus); }
double SingleJumpParams::mu_tilde_minus(double h) const { return -4.0 / h - half_tan(theta_minus); }
double SingleJumpParams::predicted_limit() const { return std::abs(alpha) + std::abs(beta) + 2.0; }

void solve_pair(const Vec2& delta, const Vec2& u, const Vec2& v, double& a, double& b) {
  const double det = cross(u, v);
  if (std::abs(det) <= kAuxTol) throw Error(ErrorKind::BadAuxiliaryRotation, "directions are linearly dependent");
  a = cross(delta, v) / det;
  b = cross(u, delta) / det;
}

bool auxiliary_rotation_ok(double angle_minus, double angle_plus, double s_angle) {
  const double tp = normalize_angle(angle_plus - s_angle);
  const double tm = normalize_angle(angle_minus - s_angle);
  if (std::abs(tp) <= kAuxTol || std::abs(tm) <= kAuxTol) return false;
  // theta must lie in the open interval (-pi, pi).
  if (std::abs(tp + kPi) <= kAuxTol || std::abs(tm + kPi) <= kAuxTol) return false;
  return std::abs(cross(dir(s_angle), dir(angle_plus))) > kAuxTol;
}

std::optional<double> default_auxiliary_rotation(double angle_minus, double angle_plus) {
  for (int k = 1; k <= 5; ++k) {
    const double s = normalize_angle(angle_plus + k * kPi / 6.0);
    if (auxiliary_rotation_ok(angle_minus, angle_plus, s)) return s;
  }
  return std::nullopt;
}

SingleJumpParams SingleJumpParams::make(double angle_minus, double angle_plus, const Vec2& delta, double s_angle) {
  if (!auxiliary_rotation_ok(angle_minus, angle_plus, s_angle)) {
    throw Error(ErrorKind::BadAuxiliaryRotation, "auxiliary rotation violates the gadget constraints");
  }
  SingleJumpParams p;
  p.angle_minus = angle_minus;
  p.angle_plus = angle_plus;
  p.s_angle = s_angle;
  p.delta = delta;
  solve_pair(delta, dir(angle_plus), dir(s_angle), p.alpha, p.beta);
  p.theta_plus = normalize_angle(angle_plus - s_angle);
  p.theta_minus = normalize_angle(angle_minus - s_angle);
  return p;
}

double VariantIParams::predicted_limit() const { return std::abs(alpha) + std::abs(beta - 1.0) + 1.0; }
double VariantIIParams::predicted_limit() const { return std::abs(alpha - iota) + std::abs(beta) + 1.0; }

SingleJumpData single_jump_data(const LimitDeformation& u) {
  require_class_a(u);
  const JumpTrace trace = jump_trace(u);
  SingleJumpData d;
  // A limit without any jump is read as a zero jump at x2 = 0.
  if (trace.empty() && u.rotation().is_global() && u.domain().a < 0.0 && u.domain().b > 0.0) {
    d.angle_minus = d.angle_plus = u.rotation().pieces().front().angle;
    return d;
  }
  if (trace.size() != 1) throw Error(ErrorKind::InvalidInput, "construction needs exactly one jump line");
  d.location = trace.front().a;
  d.angle_plus = u.rotation().angle_at(d.location);
  d.angle_minus = u.rotation().pieces().front().angle;
  for (const RotationPiece& p : u.rotation().pieces())
    if (p.hi <= d.location) d.angle_minus = p.angle;
  d.dpsi = trace.front().dpsi;
  return d;
}

VariantIParams variant_i_params(const LimitDeformation& u, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::InvalidInput, "rho must lie in (0, 1)");
  const SingleJumpData j = single_jump_data(u);
  VariantIParams p;
  p.rho = rho;
  p.theta = normalize_angle(j.angle_plus - j.angle_minus);
  if (std::abs(std::sin(p.theta)) <= kAuxTol) {
    throw Error(ErrorKind::RotationsNotGeneric, "variant (i) needs R+ different from R- and -R-");
  }
  solve_pair(j.dpsi, dir(j.angle_plus), dir(j.angle_minus), p.alpha, p.beta);
  return p;
}

namespace {

int sign_or_plus(double v) { return v < 0.0 ? -1 : 1; }

void require_global_rotation(const SingleJumpData& j) {
  if (normalize_angle(j.angle_plus - j.angle_minus) != 0.0) {
    throw Error(ErrorKind::InvalidInput, "construction needs R+ = R-");
  }
}

}  // namespace

VariantIIParams variant_ii_params(const LimitDeformation& u, std::optional<double> s_angle) {
  const SingleJumpData j = single_jump_data(u);
  require_global_rotation(j);
  const Vec2 re1 = dir(j.angle_plus);
  if (std::abs(cross(re1, j.dpsi)) <= kAuxTol) {
    throw Error(ErrorKind::ParallelJump, "jump is parallel to R e1; use variant (iii)");
  }
  VariantIIParams p;
  if (s_angle) {
    p.s_angle = *s_angle;
  } else {
    auto s = default_auxiliary_rotation(j.angle_plus, j.angle_plus);
    if (!s) throw Error(ErrorKind::BadAuxiliaryRotation, "no admissible auxiliary rotation found");
    p.s_angle = *s;
  }
  if (!auxiliary_rotation_ok(j.angle_plus, j.angle_plus, p.s_angle)) {
    throw Error(ErrorKind::BadAuxiliaryRotation, "S e1 must not be parallel to R e1");
  }
  solve_pair(j.dpsi, re1, dir(p.s_angle), p.alpha, p.beta);
  if (std::abs(p.beta) <= kAuxTol) throw Error(ErrorKind::ParallelJump, "variant (ii) needs beta != 0");
  p.iota = sign_or_plus(p.beta);
  p.rho = p.iota / (2.0 * p.beta + p.iota);
  p.theta = normalize_angle(j.angle_plus - p.s_angle);
  return p;
}

VariantIIIParams variant_iii_params(const LimitDeformation& u) {
  const SingleJumpData j = single_jump_data(u);
  require_global_rotation(j);
  const Vec2 re1 = dir(j.angle_plus);
  if (std::abs(cross(re1, j.dpsi)) > kAuxTol) {
    throw Error(ErrorKind::NonParallelJump, "variant (iii) needs a jump parallel to R e1");
  }
  VariantIIIParams p;
  p.iota = sign_or_plus(dot(j.dpsi, re1));
  p.alpha = p.iota * norm(j.dpsi);
  return p;
}

PiecewiseAffineField single_jump_general(const LimitDeformation& u, std::optional<double> s_angle, double eps,
                                         double lambda) {
  const SingleJumpData j = single_jump_data(u);
  require_unit_x1_range(u.domain());
  FieldBuilder fb(u.domain(), eps, lambda);
  const Band band = band_for(fb, j.location);
  check_band_fits(u.domain(), band, eps, ErrorKind::BandOverflow);
  double s = 0.0;
  if (s_angle) {
    s = *s_angle;
  } else {
    auto d = default_auxiliary_rotation(j.angle_minus, j.angle_plus);
    if (!d) throw Error(ErrorKind::BadAuxiliaryRotation, "no admissible auxiliary rotation found");
    s = *d;
  }
  const SingleJumpParams p = SingleJumpParams::make(j.angle_minus, j.angle_plus, shifted_delta(j, band.y0), s);
  add_background(fb, u, u.domain().a, band.y0, j.angle_minus, lambda);
  add_general_gadget(fb, band, p);
  add_background(fb, u, band.top, u.domain().b, j.angle_plus, lambda);
  return fb.finish();
}

PiecewiseAffineField single_jump_variant_i(const LimitDeformation& u, double rho, double eps, double lambda) {
  variant_i_params(u, rho);
  const SingleJumpData j = single_jump_data(u);
  require_unit_x1_range(u.domain());
  FieldBuilder fb(u.domain(), eps, lambda);
  const Band band = band_for(fb, j.location);
  check_band_fits(u.domain(), band, eps, ErrorKind::BandOverflow);
  double alpha = 0.0;
  double beta = 0.0;
  solve_pair(shifted_delta(j, band.y0), dir(j.angle_plus), dir(j.angle_minus), alpha, beta);
  const double theta = normalize_angle(j.angle_plus - j.angle_minus);
  const double h = band.top - band.y0;
  const double rh = rho * h;
  const double hr = 0.5 * (h - rh);
  const double l1 = band.y0 + hr;
  const double l2 = band.y0 + hr + rh;
  const double g_plus = 1.0 / rh + half_tan(theta);
  const double g_minus = 1.0 / rh - half_tan(theta);
  const Line slant{-rh, l2};
  add_background(fb, u, u.domain().a, band.y0, j.angle_minus, lambda);
  fb.add_band(band.y0, l1, recompose(j.angle_minus, (beta - 1.0) / hr), recompose(j.angle_minus, (beta - 1.0) / hr));
  fb.add_region(Line::horizontal(l1), slant, l1, l2, recompose(j.angle_minus, g_minus));
  fb.add_region(slant, Line::horizontal(l2), l1, l2, recompose(j.angle_plus, g_plus));
  fb.add_band(l2, band.top, recompose(j.angle_plus, alpha / hr), recompose(j.angle_plus, alpha / hr));
  add_background(fb, u, band.top, u.domain().b, j.angle_plus, lambda);
  return fb.finish();
}

PiecewiseAffineField single_jump_variant_ii(const LimitDeformation& u, std::optional<double> s_angle, double eps,
                                            double lambda) {
  const VariantIIParams p = variant_ii_params(u, s_angle);
  const SingleJumpData j = single_jump_data(u);
  require_unit_x1_range(u.domain());
  FieldBuilder fb(u.domain(), eps, lambda);
  const Band band = band_for(fb, j.location);
  check_band_fits(u.domain(), band, eps, ErrorKind::BandOverflow);
  const double r = j.angle_plus;
  const double h = band.top - band.y0;
  const double rh = p.rho * h;
  const double hr = 0.5 * (h - rh);
  const double l1 = band.y0 + hr;
  const double l2 = band.y0 + hr + rh;
  const double t = half_tan(p.theta);
  const double g_plus = p.iota / rh + t;
  const double g_minus = p.iota / rh - t;
  const double g_tilde = (p.alpha - p.iota) / hr;
  // Mirror the slanted lines in x1 when iota = -1.
  const Line lower = p.iota > 0 ? Line{-rh, band.y0 + rh} : Line{rh, band.y0};
  const Line upper = p.iota > 0 ? Line{-rh, l2} : Line{rh, l1};
  add_background(fb, u, u.domain().a, band.y0, r, lambda);
  fb.add_region(Line::horizontal(band.y0), lower, band.y0, band.y0 + rh, recompose(r, g_plus));
  fb.add_region(lower, upper, band.y0, l2, recompose(p.s_angle, g_minus));
  fb.add_region(upper, Line::horizontal(l2), l1, l2, recompose(r, g_plus));
  fb.add_band(l2, band.top, recompose(r, g_tilde), recompose(r, g_tilde));
  add_background(fb, u, band.top, u.domain().b, r, lambda);
  return fb.finish();
}

PiecewiseAffineField single_jump_variant_iii(const LimitDeformation& u, double eps, double lambda) {
  const VariantIIIParams p = variant_iii_params(u);
  const SingleJumpData j = single_jump_data(u);
  FieldBuilder fb(u.domain(), eps, lambda);
  const Band band = band_for(fb, j.location);
  check_band_fits(u.domain(), band, eps, ErrorKind::BandOverflow);
  const double h = band.top - band.y0;
  const Mat2 g = recompose(j.angle_plus, p.alpha / h);
  add_background(fb, u, u.domain().a, band.y0, j.angle_plus, lambda);
  fb.add_band(band.y0, band.top, g, g);
  add_background(fb, u, band.top, u.domain().b, j.angle_plus, lambda);
  return fb.finish();
}

std::vector<SingleJumpParams> multi_jump_params(const LimitDeformation& u) {
  require_class_a(u);
  std::vector<SingleJumpParams> out;
  for (const JumpEntry& e : jump_trace(u)) {
    const double am = rotation_angle(e.r_minus);
    const double ap = rotation_angle(e.r_plus);
    auto s = default_auxiliary_rotation(am, ap);
    if (!s) throw Error(ErrorKind::BadAuxiliaryRotation, "no admissible auxiliary rotation found");
    out.push_back(SingleJumpParams::make(am, ap, e.j0(), *s));
  }
  return out;
}

PiecewiseAffineField multi_jump(const LimitDeformation& u, double eps, double lambda) {
  require_class_a(u);
  require_unit_x1_range(u.domain());
  const JumpTrace trace = jump_trace(u);
  const std::vector<SingleJumpParams> params = multi_jump_params(u);
  FieldBuilder fb(u.domain(), eps, lambda);
  std::vector<Band> bands;
  for (const JumpEntry& e : trace) {
    const Band b = band_for(fb, e.a);
    check_band_fits(u.domain(), b, eps, ErrorKind::CellsCollide);
    if (!bands.empty() && b.period <= bands.back().period) {
      throw Error(ErrorKind::CellsCollide, "two jumps share an eps-cell; decrease eps");
    }
    bands.push_back(b);
  }
  double below = u.domain().a;
  double angle = u.rotation().pieces().front().angle;
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const SingleJumpParams& p0 = params[i];
    SingleJumpData j{trace[i].a, p0.angle_minus, p0.angle_plus, trace[i].dpsi};
    const SingleJumpParams p = SingleJumpParams::make(p0.angle_minus, p0.angle_plus,
                                                      shifted_delta(j, bands[i].y0), p0.s_angle);
    add_background(fb, u, below, bands[i].y0, angle, lambda);
    add_general_gadget(fb, bands[i], p);
    below = bands[i].top;
    angle = p0.angle_plus;
  }
  add_background(fb, u, below, u.domain().b, angle, lambda);
  return fb.finish();
}

PiecewiseAffineField parallel_recovery(const LimitDeformation& u, double eps, double lambda) {
  if (!u.is_parallel()) throw Error(ErrorKind::WrongClass, "parallel recovery needs a limit in the parallel class");
  const Domain2D& dom = u.domain();
  const double angle = u.rotation().pieces().front().angle;
  const Vec2 re1 = dir(angle);
  const Mat2 rigid = rotation_from_angle(angle);
  const BVFunction1D& psi = u.psi();

  // Scalar singular part theta_s, stored in the x component.
  std::vector<Jump> jumps;
  for (const Jump& jp : psi.jumps()) jumps.push_back({jp.location, {dot(jp.amplitude, re1), 0.0}});
  std::optional<Staircase> st;
  if (psi.cantor()) {
    Staircase c = *psi.cantor();
    c.rise = {dot(c.rise, re1), 0.0};
    st = c;
  }
  const BVFunction1D singular(dom.a, dom.b, PiecewiseLinear{{dom.a, dom.b}, {{0.0, 0.0}, {0.0, 0.0}}},
                              std::move(jumps), st);
  const BVFunction1D smooth = stop_go_reparametrize(ramp_jumps(singular, eps * eps).flattened(), eps, lambda);

  std::vector<double> br(smooth.ac().t.begin(), smooth.ac().t.end());
  br.insert(br.end(), psi.ac().t.begin(), psi.ac().t.end());
  std::sort(br.begin(), br.end());
  br.erase(std::unique(br.begin(), br.end()), br.end());

  FieldBuilder fb(dom, eps, lambda);
  const PiecewiseLinear& ac = psi.ac();
  const PiecewiseLinear& sm = smooth.ac();
  std::size_t ka = 0;
  std::size_t ks = 0;
  for (std::size_t k = 0; k + 1 < br.size(); ++k) {
    const double lo = br[k];
    const double hi = br[k + 1];
    if (!(hi > lo) || lo < dom.a || hi > dom.b) continue;
    while (ka + 2 < ac.t.size() && ac.t[ka + 1] <= lo) ++ka;
    while (ks + 2 < sm.t.size() && sm.t[ks + 1] <= lo) ++ks;
    const double gamma = dot(ac.slope_on(ka), re1) / lambda + sm.slope_on(ks).x;
    fb.add_band(lo, hi, recompose(angle, gamma), rigid);
  }
  return fb.finish();
}

}  // namespace bilayer
