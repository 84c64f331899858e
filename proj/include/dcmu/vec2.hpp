#pragma once

#include <cmath>
#include <ostream>

namespace dcmu {

/// Planar position/velocity vector in meters (or m/s).
struct Vec2 {
  double x{0.0};
  double y{0.0};

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

  [[nodiscard]] double norm() const { return std::hypot(x, y); }
  [[nodiscard]] constexpr double squared_norm() const { return x * x + y * y; }
  [[nodiscard]] bool finite() const { return std::isfinite(x) && std::isfinite(y); }

  friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend constexpr Vec2 operator/(const Vec2& a, double s) { return {a.x / s, a.y / s}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;

  friend std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << '(' << v.x << ", " << v.y << ')';
  }
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Unit vector along v, or zero when |v| is below `min_norm`.
inline Vec2 unit_or_zero(const Vec2& v, double min_norm = 1e-9) {
  const double n = v.norm();
  return n < min_norm ? Vec2{} : v / n;
}

/// Clamp each component to [-limit, limit].
inline Vec2 clamp_components(const Vec2& v, double limit) {
  auto c = [limit](double a) { return a > limit ? limit : (a < -limit ? -limit : a); };
  return {c(v.x), c(v.y)};
}

/// 2x2 matrix, row-major: [[xx, xy], [yx, yy]].
struct Mat2 {
  double xx{0.0}, xy{0.0}, yx{0.0}, yy{0.0};

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 scaled_identity(double s) { return {s, 0.0, 0.0, s}; }
  static constexpr Mat2 diag(double a, double b) { return {a, 0.0, 0.0, b}; }

  [[nodiscard]] constexpr double trace() const { return xx + yy; }
  [[nodiscard]] constexpr double det() const { return xx * yy - xy * yx; }
  [[nodiscard]] constexpr Mat2 transpose() const { return {xx, yx, xy, yy}; }
  [[nodiscard]] bool finite() const {
    return std::isfinite(xx) && std::isfinite(xy) && std::isfinite(yx) && std::isfinite(yy);
  }
  [[nodiscard]] bool is_zero() const { return xx == 0.0 && xy == 0.0 && yx == 0.0 && yy == 0.0; }

  /// Inverse; throws std::domain_error when |det| <= tol.
  [[nodiscard]] Mat2 inverse(double tol = 0.0) const;

  /// Largest and smallest eigenvalue of the symmetric part, closed form.
  [[nodiscard]] double max_sym_eigenvalue() const;
  [[nodiscard]] double min_sym_eigenvalue() const;

  friend constexpr Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yx + b.yx, a.yy + b.yy};
  }
  friend constexpr Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.xx - b.xx, a.xy - b.xy, a.yx - b.yx, a.yy - b.yy};
  }
  friend constexpr Mat2 operator*(const Mat2& a, double s) {
    return {a.xx * s, a.xy * s, a.yx * s, a.yy * s};
  }
  friend constexpr Mat2 operator*(double s, const Mat2& a) { return a * s; }
  friend constexpr Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.xx * b.xx + a.xy * b.yx, a.xx * b.xy + a.xy * b.yy,
            a.yx * b.xx + a.yy * b.yx, a.yx * b.xy + a.yy * b.yy};
  }
  friend constexpr Vec2 operator*(const Mat2& m, const Vec2& v) {
    return {m.xx * v.x + m.xy * v.y, m.yx * v.x + m.yy * v.y};
  }
  friend constexpr bool operator==(const Mat2&, const Mat2&) = default;
};

}  // namespace dcmu
