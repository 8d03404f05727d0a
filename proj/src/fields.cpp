#include "cpd/fields.hpp"

#include <cmath>
#include <utility>

#include "cpd/errors.hpp"

namespace cpd {

namespace {

constexpr double kAxisGuard = 1e-12;
constexpr double kBuiltinPotentialScale = 1.0 / 100.0;

double radius_checked(const Vec3& x) {
  const double r = std::hypot(x.x, x.y);
  if (!(r >= kAxisGuard)) {
    throw DomainError("potential evaluated on the singular x3 axis (r = " + std::to_string(r) + ")");
  }
  return r;
}

}  // namespace

SkewMatrix3::SkewMatrix3(const Mat3& m) : m_(m) {
  if (!is_skew(m)) throw InvalidParameter("matrix is not skew-symmetric");
}

Mat3 ScalarPotential::hessian(const Vec3&) const {
  throw InvalidParameter("potential does not provide a Hessian");
}

QuadraticScalarPotential::QuadraticScalarPotential(QuadraticPotential p) : p_(p) {
  if (!is_symmetric(p_.Q)) throw InvalidParameter("quadratic potential matrix Q is not symmetric");
}

double QuadraticScalarPotential::value(const Vec3& x) const {
  return 0.5 * dot(x, p_.Q * x) + dot(p_.q, x);
}

Vec3 QuadraticScalarPotential::gradient(const Vec3& x) const { return p_.Q * x + p_.q; }

double InverseRadiusPotential::value(const Vec3& x) const { return c_ / radius_checked(x); }

Vec3 InverseRadiusPotential::gradient(const Vec3& x) const {
  const double r = radius_checked(x);
  const double f = -c_ / (r * r * r);
  return {f * x.x, f * x.y, 0.0};
}

Mat3 InverseRadiusPotential::hessian(const Vec3& x) const {
  const double r = radius_checked(x);
  const double r3 = r * r * r;
  const double r5 = r3 * r * r;
  Mat3 h;
  h(0, 0) = c_ * (3.0 * x.x * x.x / r5 - 1.0 / r3);
  h(1, 1) = c_ * (3.0 * x.y * x.y / r5 - 1.0 / r3);
  h(0, 1) = h(1, 0) = c_ * 3.0 * x.x * x.y / r5;
  return h;
}

Vec3 ConstantMagneticField::vector_potential(const Vec3& x) const {
  return vector_potential_constant_B(x, b_);
}

Vec3 AxialRadialMagneticField::field(const Vec3& x) const {
  return {0.0, 0.0, s_ * std::hypot(x.x, x.y)};
}

Vec3 AxialRadialMagneticField::vector_potential(const Vec3& x) const {
  const double k = s_ * std::hypot(x.x, x.y) / 3.0;
  return {-k * x.y, k * x.x, 0.0};
}

FieldModel::FieldModel(std::shared_ptr<const ScalarPotential> potential,
                       std::shared_ptr<const MagneticField> magnetic)
    : potential_(std::move(potential)), magnetic_(std::move(magnetic)) {
  if (!potential_ || !magnetic_) throw InvalidParameter("field model requires a potential and a magnetic field");
}

SkewMatrix3 default_momentum_matrix() {
  return SkewMatrix3(Mat3{{0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0}});
}

std::vector<std::string> builtin_problem_names() { return {"problem1", "problem2", "problem3"}; }

ProblemSpec builtin_problem(std::string_view name, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameter("epsilon must be positive and finite");
  }
  const double inv_eps = 1.0 / epsilon;

  std::shared_ptr<const ScalarPotential> potential;
  std::shared_ptr<const MagneticField> magnetic;
  if (name == "problem1") {
    // |x|^2/100 == 1/2 x^T (I/50) x
    const double d = 2.0 * kBuiltinPotentialScale;
    potential = std::make_shared<QuadraticScalarPotential>(
        QuadraticPotential{Mat3{{d, 0, 0, 0, d, 0, 0, 0, d}}, Vec3{}});
    magnetic = std::make_shared<ConstantMagneticField>(Vec3{0.0, 0.0, inv_eps});
  } else if (name == "problem2") {
    potential = std::make_shared<InverseRadiusPotential>(kBuiltinPotentialScale);
    magnetic = std::make_shared<ConstantMagneticField>(Vec3{0.0, 0.0, inv_eps});
  } else if (name == "problem3") {
    potential = std::make_shared<InverseRadiusPotential>(kBuiltinPotentialScale);
    magnetic = std::make_shared<AxialRadialMagneticField>(inv_eps);
  } else {
    throw NotFound("unknown built-in problem '" + std::string(name) + "'");
  }

  return ProblemSpec{std::string(name),
                     FieldModel(std::move(potential), std::move(magnetic)),
                     Vec3{0.0, 1.0, 0.1},
                     Vec3{0.09, 0.05, 0.20},
                     epsilon,
                     default_momentum_matrix()};
}

Vec3 vector_potential_constant_B(const Vec3& x, const Vec3& b) { return -0.5 * cross(x, b); }

SkewMatrix3 skew_of(const Vec3& b) { return SkewMatrix3(skew_matrix_of(b)); }

}  // namespace cpd
