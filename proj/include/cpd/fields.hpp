#pragma once

// Electric and magnetic field models for charged-particle dynamics
//
//   x'' = v x B(x) + E(x),   E = -grad U,   B = curl A,
//
// together with the three built-in benchmark problems.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cpd/linalg.hpp"

namespace cpd {

/// U(x) = 1/2 x^T Q x + q^T x with symmetric Q.
struct QuadraticPotential {
  Mat3 Q = Mat3::zero();
  Vec3 q{};
};

class ScalarPotential {
 public:
  virtual ~ScalarPotential() = default;

  virtual double value(const Vec3& x) const = 0;
  virtual Vec3 gradient(const Vec3& x) const = 0;

  virtual bool has_hessian() const { return false; }
  /// Throws InvalidParameter when has_hessian() is false.
  virtual Mat3 hessian(const Vec3& x) const;

  /// Set only for potentials that are exactly quadratic.
  virtual std::optional<QuadraticPotential> quadratic() const { return std::nullopt; }
};

class MagneticField {
 public:
  virtual ~MagneticField() = default;

  virtual Vec3 field(const Vec3& x) const = 0;
  virtual Vec3 vector_potential(const Vec3& x) const = 0;

  /// Set only for spatially uniform fields.
  virtual std::optional<Vec3> constant_value() const { return std::nullopt; }
};

class QuadraticScalarPotential final : public ScalarPotential {
 public:
  /// Throws InvalidParameter unless Q is symmetric.
  explicit QuadraticScalarPotential(QuadraticPotential p);

  double value(const Vec3& x) const override;
  Vec3 gradient(const Vec3& x) const override;
  bool has_hessian() const override { return true; }
  Mat3 hessian(const Vec3&) const override { return p_.Q; }
  std::optional<QuadraticPotential> quadratic() const override { return p_; }

 private:
  QuadraticPotential p_;
};

/// U(x) = c / sqrt(x1^2 + x2^2). Singular on the x3 axis: evaluation closer
/// than 1e-12 to it throws DomainError.
class InverseRadiusPotential final : public ScalarPotential {
 public:
  explicit InverseRadiusPotential(double coefficient) : c_(coefficient) {}

  double value(const Vec3& x) const override;
  Vec3 gradient(const Vec3& x) const override;
  bool has_hessian() const override { return true; }
  Mat3 hessian(const Vec3& x) const override;

 private:
  double c_;
};

/// Uniform B with the symmetric-gauge potential A(x) = -1/2 x x B.
class ConstantMagneticField final : public MagneticField {
 public:
  explicit ConstantMagneticField(const Vec3& b) : b_(b) {}

  Vec3 field(const Vec3&) const override { return b_; }
  Vec3 vector_potential(const Vec3& x) const override;
  std::optional<Vec3> constant_value() const override { return b_; }

 private:
  Vec3 b_;
};

/// B(x) = s * (0, 0, r) with r = sqrt(x1^2 + x2^2), and
/// A(x) = (s/3) * (-x2 r, x1 r, 0) so that curl A == B.
class AxialRadialMagneticField final : public MagneticField {
 public:
  explicit AxialRadialMagneticField(double scale) : s_(scale) {}

  Vec3 field(const Vec3& x) const override;
  Vec3 vector_potential(const Vec3& x) const override;

 private:
  double s_;
};

/// Immutable pairing of a scalar potential and a magnetic field. Cheap to copy;
/// the underlying models are shared and safe to use from several threads.
class FieldModel {
 public:
  FieldModel(std::shared_ptr<const ScalarPotential> potential,
             std::shared_ptr<const MagneticField> magnetic);

  double U(const Vec3& x) const { return potential_->value(x); }
  Vec3 grad_U(const Vec3& x) const { return potential_->gradient(x); }
  Vec3 E(const Vec3& x) const { return -potential_->gradient(x); }
  bool has_hessian() const { return potential_->has_hessian(); }
  Mat3 hess_U(const Vec3& x) const { return potential_->hessian(x); }

  Vec3 B(const Vec3& x) const { return magnetic_->field(x); }
  Vec3 A(const Vec3& x) const { return magnetic_->vector_potential(x); }

  bool is_constant_B() const { return magnetic_->constant_value().has_value(); }
  bool is_quadratic_U() const { return potential_->quadratic().has_value(); }
  std::optional<QuadraticPotential> quadratic() const { return potential_->quadratic(); }
  std::optional<Vec3> constant_B() const { return magnetic_->constant_value(); }

  const std::shared_ptr<const ScalarPotential>& potential() const { return potential_; }
  const std::shared_ptr<const MagneticField>& magnetic() const { return magnetic_; }

 private:
  std::shared_ptr<const ScalarPotential> potential_;
  std::shared_ptr<const MagneticField> magnetic_;
};

struct ProblemSpec {
  std::string name;
  FieldModel field;
  Vec3 x0;
  Vec3 v0;
  double epsilon = 1.0;
  SkewMatrix3 S;
};

/// The momentum matrix used by all built-in problems, S = [0 1 0; -1 0 0; 0 0 0].
SkewMatrix3 default_momentum_matrix();

std::vector<std::string> builtin_problem_names();

/// "problem1": quadratic U = |x|^2/100, B = (0,0,1)/eps.
/// "problem2": U = 1/(100 r), same B.
/// "problem3": U as problem2, B = (0,0,r)/eps.
/// Throws NotFound for unknown names and InvalidParameter for eps <= 0.
ProblemSpec builtin_problem(std::string_view name, double epsilon = 1.0);

Vec3 vector_potential_constant_B(const Vec3& x, const Vec3& b);

/// B~ with B~ v == v x B.
SkewMatrix3 skew_of(const Vec3& b);

}  // namespace cpd
