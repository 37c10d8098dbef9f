#include "bilayer/algebra.hpp"

#include <algorithm>

#include "bilayer/errors.hpp"

namespace bilayer {

Mat2::Mat2(double a11, double a12, double a21, double a22) : m_{a11, a12, a21, a22} {
  if (!std::isfinite(a11) || !std::isfinite(a12) || !std::isfinite(a21) || !std::isfinite(a22)) {
    throw Error(ErrorKind::InvalidInput, "Mat2 entries must be finite");
  }
}

double Mat2::frobenius() const {
  return std::sqrt(m_[0] * m_[0] + m_[1] * m_[1] + m_[2] * m_[2] + m_[3] * m_[3]);
}

Mat2 Mat2::operator*(const Mat2& o) const {
  return {m_[0] * o.m_[0] + m_[1] * o.m_[2], m_[0] * o.m_[1] + m_[1] * o.m_[3],
          m_[2] * o.m_[0] + m_[3] * o.m_[2], m_[2] * o.m_[1] + m_[3] * o.m_[3]};
}

Mat2 Mat2::operator+(const Mat2& o) const {
  return {m_[0] + o.m_[0], m_[1] + o.m_[1], m_[2] + o.m_[2], m_[3] + o.m_[3]};
}

Mat2 Mat2::operator-(const Mat2& o) const {
  return {m_[0] - o.m_[0], m_[1] - o.m_[1], m_[2] - o.m_[2], m_[3] - o.m_[3]};
}

Mat2 Mat2::operator*(double s) const { return {m_[0] * s, m_[1] * s, m_[2] * s, m_[3] * s}; }

Mat2& Mat2::operator+=(const Mat2& o) {
  for (int i = 0; i < 4; ++i) m_[i] += o.m_[i];
  return *this;
}

double max_abs_diff(const Mat2& a, const Mat2& b) {
  double m = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

double normalize_angle(double theta) {
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  t -= kPi;
  // fmod can land exactly on +pi after the shift for inputs just below -pi.
  if (t >= kPi) t -= 2.0 * kPi;
  return t;
}

Mat2 rotation_from_angle(double theta) {
  if (!std::isfinite(theta)) throw Error(ErrorKind::InvalidInput, "rotation angle must be finite");
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return {c, -s, s, c};
}

Mat2 shear(double gamma) { return {1.0, gamma, 0.0, 1.0}; }

Mat2 recompose(double angle, double gamma) { return rotation_from_angle(angle) * shear(gamma); }

double angle_of(const Vec2& v) {
  const double a = std::atan2(v.y, v.x);
  return a >= kPi ? a - 2.0 * kPi : a;
}

double rotation_angle(const Mat2& r) { return angle_of(r.col(0)); }

bool in_me1(const Mat2& f, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tolerance must be positive");
  return std::abs(f.det() - 1.0) <= tol && std::abs(norm(f.col(0)) - 1.0) <= tol;
}

SlipDecomposition decompose_me1(const Mat2& f) {
  if (!in_me1(f, 1e-9)) throw Error(ErrorKind::NotInMe1, "matrix is not in M_e1");
  const double theta = angle_of(f.col(0));
  const Mat2 r = rotation_from_angle(theta);
  const double gamma = dot(r.col(0), f.col(1));
  return {theta, gamma};
}

double intrinsic_slip_squared(const Mat2& f) {
  // |F|^2 - 2 det F rewritten as a sum of squares, which avoids cancellation
  // when F is close to a rotation.
  const double u = f.a11() - f.a22();
  const double v = f.a12() + f.a21();
  return u * u + v * v;
}

double rank_one_defect(const Mat2& f, const Mat2& g, const Vec2& tangent) {
  return norm((f - g) * tangent);
}

double optimal_translation_gap(const Vec2& a) { return norm(a) / 4.0; }

}  // namespace bilayer
