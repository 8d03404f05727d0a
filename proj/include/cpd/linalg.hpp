#pragma once

// Small fixed-size 3-vector and 3x3 matrix types used by every module.

#include <array>
#include <cmath>
#include <cstddef>

namespace cpd {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

constexpr double norm_sq(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm_sq(a)); }

inline double max_abs(const Vec3& a) {
  return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z)));
}

inline bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> a{};

  constexpr double operator()(std::size_t r, std::size_t c) const { return a[3 * r + c]; }
  constexpr double& operator()(std::size_t r, std::size_t c) { return a[3 * r + c]; }

  static constexpr Mat3 identity() { return Mat3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static constexpr Mat3 zero() { return Mat3{}; }

  friend constexpr bool operator==(const Mat3&, const Mat3&) = default;
};

constexpr Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y + m(0, 2) * v.z,
          m(1, 0) * v.x + m(1, 1) * v.y + m(1, 2) * v.z,
          m(2, 0) * v.x + m(2, 1) * v.y + m(2, 2) * v.z};
}

constexpr Mat3 operator*(const Mat3& l, const Mat3& r) {
  Mat3 out;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < 3; ++k) s += l(i, k) * r(k, j);
      out(i, j) = s;
    }
  return out;
}

constexpr Mat3 operator+(const Mat3& l, const Mat3& r) {
  Mat3 out;
  for (std::size_t i = 0; i < 9; ++i) out.a[i] = l.a[i] + r.a[i];
  return out;
}

constexpr Mat3 operator-(const Mat3& l, const Mat3& r) {
  Mat3 out;
  for (std::size_t i = 0; i < 9; ++i) out.a[i] = l.a[i] - r.a[i];
  return out;
}

constexpr Mat3 operator*(double s, const Mat3& m) {
  Mat3 out;
  for (std::size_t i = 0; i < 9; ++i) out.a[i] = s * m.a[i];
  return out;
}

constexpr Mat3 transpose(const Mat3& m) {
  Mat3 out;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out(i, j) = m(j, i);
  return out;
}

inline double max_abs(const Mat3& m) {
  double out = 0.0;
  for (double e : m.a) out = std::fmax(out, std::fabs(e));
  return out;
}

constexpr bool is_symmetric(const Mat3& m) {
  return m(0, 1) == m(1, 0) && m(0, 2) == m(2, 0) && m(1, 2) == m(2, 1);
}

constexpr bool is_skew(const Mat3& m) {
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (m(i, j) != -m(j, i)) return false;
  return true;
}

/// A matrix known to satisfy transpose(m) == -m. Construction validates.
class SkewMatrix3 {
 public:
  SkewMatrix3() = default;

  /// Throws InvalidParameter when `m` is not exactly skew-symmetric.
  explicit SkewMatrix3(const Mat3& m);

  const Mat3& matrix() const { return m_; }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  Mat3 m_{};
};

/// The matrix B~ with B~ v == v x B.
constexpr Mat3 skew_matrix_of(const Vec3& b) {
  return Mat3{{0.0, b.z, -b.y, -b.z, 0.0, b.x, b.y, -b.x, 0.0}};
}

}  // namespace cpd
