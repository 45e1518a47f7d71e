#pragma once

#include <array>
#include <cmath>

namespace qlflow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double norm_inf(Vec2 v) { return std::fmax(std::fabs(v.x), std::fabs(v.y)); }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

  [[nodiscard]] double det() const { return a11 * a22 - a12 * a21; }

  /// Caller guarantees det() != 0.
  [[nodiscard]] Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend Vec2 operator*(const Mat2& a, Vec2 v) {
    return {a.a11 * v.x + a.a12 * v.y, a.a21 * v.x + a.a22 * v.y};
  }
  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
};

/// M(theta): counter-clockwise rotation.
inline Mat2 rotation(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c, -s, s, c};
}

/// M^(theta): reflection.
inline Mat2 reflection(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c, s, s, -c};
}

/// Value of a scalar function of time together with its first two derivatives.
struct Jet {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  static Jet constant(double c) { return {c, 0.0, 0.0}; }

  friend Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
  friend Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
  friend Jet operator-(Jet a) { return {-a.v, -a.d1, -a.d2}; }
  friend Jet operator*(Jet a, Jet b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
  }
  friend Jet operator*(double s, Jet a) { return {s * a.v, s * a.d1, s * a.d2}; }
  friend Jet operator/(Jet a, Jet b) {
    // q = a/b, q' = (a' - q b')/b, q'' = (a'' - 2 q' b' - q b'')/b
    const double q = a.v / b.v;
    const double q1 = (a.d1 - q * b.d1) / b.v;
    const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
    return {q, q1, q2};
  }
};

inline Jet sin(Jet a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return {s, c * a.d1, -s * a.d1 * a.d1 + c * a.d2};
}

inline Jet cos(Jet a) {
  const double s = std::sin(a.v), c = std::cos(a.v);
  return {c, -s * a.d1, -c * a.d1 * a.d1 - s * a.d2};
}

inline Jet exp(Jet a) {
  const double e = std::exp(a.v);
  return {e, e * a.d1, e * (a.d1 * a.d1 + a.d2)};
}

/// Up to 2x4 real matrix; k is the active column count.
struct Mat2xK {
  int k = 0;
  std::array<std::array<double, 4>, 2> a{};

  [[nodiscard]] double operator()(int row, int col) const { return a[row][col]; }
  double& operator()(int row, int col) { return a[row][col]; }

  [[nodiscard]] Vec2 column(int j) const { return {a[0][j], a[1][j]}; }
};

inline Mat2xK operator*(const Mat2& m, const Mat2xK& b) {
  Mat2xK out;
  out.k = b.k;
  for (int j = 0; j < b.k; ++j) {
    out(0, j) = m.a11 * b(0, j) + m.a12 * b(1, j);
    out(1, j) = m.a21 * b(0, j) + m.a22 * b(1, j);
  }
  return out;
}

inline Mat2xK operator+(const Mat2xK& a, const Mat2xK& b) {
  Mat2xK out;
  out.k = a.k;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < a.k; ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

inline Mat2xK operator*(double s, const Mat2xK& b) {
  Mat2xK out = b;
  for (auto& row : out.a)
    for (double& x : row) x *= s;
  return out;
}

}  // namespace qlflow
