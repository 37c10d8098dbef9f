#pragma once

#include <cmath>

namespace bilayer {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

// Row-major 2x2 matrix. Constructors reject non-finite entries.
class Mat2 {
 public:
  Mat2() = default;
  Mat2(double a11, double a12, double a21, double a22);

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {0.0, 0.0, 0.0, 0.0}; }
  // a (x) b
  static Mat2 outer(const Vec2& a, const Vec2& b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

  double a11() const { return m_[0]; }
  double a12() const { return m_[1]; }
  double a21() const { return m_[2]; }
  double a22() const { return m_[3]; }
  double operator()(int i, int j) const { return m_[2 * i + j]; }

  Vec2 col(int j) const { return {m_[j], m_[2 + j]}; }
  double det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }
  double frobenius() const;
  Mat2 transpose() const { return {m_[0], m_[2], m_[1], m_[3]}; }

  Vec2 operator*(const Vec2& v) const { return {m_[0] * v.x + m_[1] * v.y, m_[2] * v.x + m_[3] * v.y}; }
  Mat2 operator*(const Mat2& o) const;
  Mat2 operator+(const Mat2& o) const;
  Mat2 operator-(const Mat2& o) const;
  Mat2 operator*(double s) const;
  Mat2& operator+=(const Mat2& o);

 private:
  double m_[4] = {0.0, 0.0, 0.0, 0.0};
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

double max_abs_diff(const Mat2& a, const Mat2& b);

// F = R(theta) (I + gamma e1 (x) e2)
struct SlipDecomposition {
  double angle = 0.0;
  double gamma = 0.0;
};

constexpr double kPi = 3.14159265358979323846;
constexpr double kDefaultMembershipTol = 1e-9;

// Maps to [-pi, pi).
double normalize_angle(double theta);

Mat2 rotation_from_angle(double theta);
Mat2 shear(double gamma);  // I + gamma e1 (x) e2
Mat2 recompose(double angle, double gamma);
inline Mat2 recompose(const SlipDecomposition& d) { return recompose(d.angle, d.gamma); }

// Rotation angle of a matrix assumed to lie in SO(2), in [-pi, pi).
double rotation_angle(const Mat2& r);
double angle_of(const Vec2& v);

bool in_me1(const Mat2& f, double tol = kDefaultMembershipTol);
SlipDecomposition decompose_me1(const Mat2& f);

// |F|^2 - 2 det F, which equals gamma^2 on M_e1.
double intrinsic_slip_squared(const Mat2& f);

double rank_one_defect(const Mat2& f, const Mat2& g, const Vec2& tangent);

// min over b of int_0^1 |t a + b| dt, which is |a| / 4.
double optimal_translation_gap(const Vec2& a);

}  // namespace bilayer
