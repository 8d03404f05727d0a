#pragma once

// Independent reference computations used only by the tests. Nothing here calls
// into the closed-form paths it is used to check.

#include <cmath>
#include <functional>
#include <memory>
#include <random>

#include "cpd/fields.hpp"
#include "cpd/linalg.hpp"

namespace cpd::testing {

/// exp(t M) v by the truncated series sum_{k <= terms} (tM)^k v / k!.
inline Vec3 series_exp_apply(const Mat3& m, double t, const Vec3& v, int terms = 30) {
  Vec3 term = v;
  Vec3 sum = v;
  for (int k = 1; k <= terms; ++k) {
    term = (t / k) * (m * term);
    sum += term;
  }
  return sum;
}

/// Series exp with squaring for large |tM|: exp(tM) = exp(tM/2^s)^(2^s).
inline Vec3 series_exp_apply_scaled(const Mat3& m, double t, const Vec3& v) {
  int s = 0;
  double scale = std::fabs(t) * max_abs(m) * 3.0;
  while (scale > 0.5) {
    scale *= 0.5;
    ++s;
  }
  const double tt = std::ldexp(t, -s);
  Mat3 e = Mat3::identity();
  Mat3 term = Mat3::identity();
  for (int k = 1; k <= 30; ++k) {
    term = (tt / k) * (term * m);
    e = e + term;
  }
  for (int i = 0; i < s; ++i) e = e * e;
  return e * v;
}

/// The matrix with B~ v = v x b, written out entry by entry.
inline Mat3 btilde(const Vec3& b) {
  Mat3 m = Mat3::zero();
  m(0, 1) = b.z;
  m(0, 2) = -b.y;
  m(1, 0) = -b.z;
  m(1, 2) = b.x;
  m(2, 0) = b.y;
  m(2, 1) = -b.x;
  return m;
}

inline Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& x, double step = 1e-6) {
  Vec3 g;
  for (std::size_t i = 0; i < 3; ++i) {
    Vec3 p = x, m = x;
    p[i] += step;
    m[i] -= step;
    g[i] = (f(p) - f(m)) / (2.0 * step);
  }
  return g;
}

/// Column j holds d f / d x_j.
inline Mat3 fd_jacobian(const std::function<Vec3(const Vec3&)>& f, const Vec3& x, double step = 1e-6) {
  Mat3 jac;
  for (std::size_t j = 0; j < 3; ++j) {
    Vec3 p = x, m = x;
    p[j] += step;
    m[j] -= step;
    const Vec3 d = (f(p) - f(m)) / (2.0 * step);
    for (std::size_t i = 0; i < 3; ++i) jac(i, j) = d[i];
  }
  return jac;
}

inline Vec3 fd_curl(const std::function<Vec3(const Vec3&)>& a, const Vec3& x, double step = 1e-6) {
  const Mat3 j = fd_jacobian(a, x, step);  // j(i, k) = d a_i / d x_k
  return {j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)};
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 20241018) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  Vec3 vec(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
  /// Point with cylindrical radius in [r_lo, r_hi] and |x3| <= z.
  Vec3 off_axis(double r_lo, double r_hi, double z) {
    const double r = uniform(r_lo, r_hi);
    const double phi = uniform(0.0, 2.0 * 3.141592653589793);
    return {r * std::cos(phi), r * std::sin(phi), uniform(-z, z)};
  }

 private:
  std::mt19937_64 gen_;
};

/// U = 0 potential.
class ZeroPotential final : public ScalarPotential {
 public:
  double value(const Vec3&) const override { return 0.0; }
  Vec3 gradient(const Vec3&) const override { return {}; }
};

/// U = x1^4; E = (-4 x1^3, 0, 0).
class QuarticPotential final : public ScalarPotential {
 public:
  double value(const Vec3& x) const override { return x.x * x.x * x.x * x.x; }
  Vec3 gradient(const Vec3& x) const override { return {4.0 * x.x * x.x * x.x, 0.0, 0.0}; }
};

inline FieldModel make_field(std::shared_ptr<const ScalarPotential> u, const Vec3& b) {
  return FieldModel(std::move(u), std::make_shared<ConstantMagneticField>(b));
}

}  // namespace cpd::testing
