#include "cpd/fields.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "cpd/errors.hpp"
#include "cpd/problem_config.hpp"
#include "oracles.hpp"

namespace cpd {
namespace {

using testing::Rng;

TEST(BuiltinProblem, Problem1PotentialAtInitialPoint) {
  const ProblemSpec p = builtin_problem("problem1", 1.0);
  EXPECT_NEAR(p.field.U(p.x0), 0.0101, 1e-16);
  EXPECT_EQ(p.x0, (Vec3{0.0, 1.0, 0.1}));
  EXPECT_EQ(p.v0, (Vec3{0.09, 0.05, 0.20}));
}

TEST(BuiltinProblem, Problem1FieldIsUniform) {
  const ProblemSpec p = builtin_problem("problem1", 1.0);
  Rng rng;
  for (int i = 0; i < 50; ++i) EXPECT_EQ(p.field.B(rng.vec(-5, 5)), (Vec3{0, 0, 1}));
}

TEST(BuiltinProblem, Problem3FieldMagnitudeIsCylindricalRadius) {
  EXPECT_EQ(builtin_problem("problem3", 1.0).field.B({3, 4, 0}), (Vec3{0, 0, 5}));
  EXPECT_EQ(builtin_problem("problem3", 0.5).field.B({3, 4, 7}), (Vec3{0, 0, 10}));
}

TEST(BuiltinProblem, FieldScalesInverselyWithEpsilon) {
  const ProblemSpec p = builtin_problem("problem2", 1.0 / 8.0);
  EXPECT_EQ(p.field.B({1, 2, 3}), (Vec3{0, 0, 8}));
  EXPECT_EQ(p.epsilon, 0.125);
}

TEST(BuiltinProblem, Flags) {
  const auto p1 = builtin_problem("problem1");
  const auto p2 = builtin_problem("problem2");
  const auto p3 = builtin_problem("problem3");
  EXPECT_TRUE(p1.field.is_quadratic_U());
  EXPECT_TRUE(p1.field.is_constant_B());
  EXPECT_FALSE(p2.field.is_quadratic_U());
  EXPECT_TRUE(p2.field.is_constant_B());
  EXPECT_FALSE(p3.field.is_quadratic_U());
  EXPECT_FALSE(p3.field.is_constant_B());
  EXPECT_TRUE(p1.field.has_hessian());
  EXPECT_TRUE(p2.field.has_hessian());
}

TEST(BuiltinProblem, Errors) {
  EXPECT_THROW(builtin_problem("problem4", 1.0), NotFound);
  EXPECT_THROW(builtin_problem("problem1", 0.0), InvalidParameter);
  EXPECT_THROW(builtin_problem("problem1", -1.0), InvalidParameter);
}

TEST(BuiltinProblem, QuadraticGradientIsExactlyAffine) {
  const auto p = builtin_problem("problem1");
  const auto quad = p.field.quadratic();
  ASSERT_TRUE(quad.has_value());
  Rng rng;
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = rng.vec(-3, 3);
    EXPECT_EQ(p.field.grad_U(x), quad->Q * x + quad->q);
  }
}

TEST(BuiltinProblem, InverseRadiusSingularAxisIsADomainError) {
  const auto p = builtin_problem("problem2");
  EXPECT_THROW(p.field.U({0, 0, 1}), DomainError);
  EXPECT_THROW(p.field.E({1e-13, 0, 0}), DomainError);
  EXPECT_NO_THROW(p.field.U({1e-11, 0, 0}));
}

TEST(VectorPotentialConstantB, Examples) {
  EXPECT_EQ(vector_potential_constant_B({0, 1, 0.1}, {0, 0, 1}), (Vec3{-0.5, 0, 0}));
  EXPECT_EQ(norm(vector_potential_constant_B({0, 0, 0}, {1, 2, 3})), 0.0);
  EXPECT_EQ(norm(vector_potential_constant_B({2, 4, 6}, {1, 2, 3})), 0.0);
}

TEST(SkewOf, Examples) {
  EXPECT_EQ((skew_of({0, 0, 1}) * Vec3{1, 0, 0}), (Vec3{0, -1, 0}));
  EXPECT_EQ(max_abs(skew_of({0, 0, 0}).matrix()), 0.0);
  const Mat3 m = skew_of({0.3, -1.2, 2.5}).matrix();
  EXPECT_EQ(max_abs(m + transpose(m)), 0.0);
}

TEST(SkewOf, MatchesCrossProductOnRandomInputs) {
  Rng rng;
  for (int i = 0; i < 1000; ++i) {
    const Vec3 b = rng.vec(-10, 10);
    const Vec3 v = rng.vec(-10, 10);
    EXPECT_EQ(skew_of(b) * v, cross(v, b));
  }
}

TEST(SkewMatrix3, RejectsNonSkew) {
  EXPECT_THROW(SkewMatrix3(Mat3::identity()), InvalidParameter);
  EXPECT_NO_THROW(default_momentum_matrix());
}

// Finite-difference checks on all built-in models.

class BuiltinModels : public ::testing::TestWithParam<std::string> {};

TEST_P(BuiltinModels, GradientMatchesFiniteDifferences) {
  const auto p = builtin_problem(GetParam(), 1.0);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = rng.off_axis(0.3, 3.0, 2.0);
    const Vec3 g = p.field.grad_U(x);
    const Vec3 fd = testing::fd_gradient([&](const Vec3& y) { return p.field.U(y); }, x);
    EXPECT_LE(norm(g - fd), 1e-6 * (1.0 + norm(g))) << "x = " << x.x << "," << x.y << "," << x.z;
  }
}

TEST_P(BuiltinModels, HessianMatchesFiniteDifferences) {
  const auto p = builtin_problem(GetParam(), 1.0);
  if (!p.field.has_hessian()) GTEST_SKIP();
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Vec3 x = rng.off_axis(0.3, 3.0, 2.0);
    const Mat3 hess = p.field.hess_U(x);
    const Mat3 fd = testing::fd_jacobian([&](const Vec3& y) { return p.field.grad_U(y); }, x);
    EXPECT_LE(max_abs(hess - fd), 1e-6 * (1.0 + max_abs(hess)));
    EXPECT_TRUE(is_symmetric(hess));
  }
}

TEST_P(BuiltinModels, CurlOfVectorPotentialIsB) {
  for (double eps : {1.0, 0.125}) {
    const auto p = builtin_problem(GetParam(), eps);
    Rng rng(3);
    for (int i = 0; i < 100; ++i) {
      const Vec3 x = rng.off_axis(0.3, 3.0, 2.0);
      const Vec3 b = p.field.B(x);
      const Vec3 curl = testing::fd_curl([&](const Vec3& y) { return p.field.A(y); }, x);
      EXPECT_LE(norm(curl - b), 1e-6 * std::max(1.0, norm(b)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(All, BuiltinModels, ::testing::Values("problem1", "problem2", "problem3"));

// The literal (-x2 r, -x1 r, 0)/3 potential does not reproduce B = (0, 0, r);
// its curl is (0, 0, (x2^2 - x1^2) / (3r)). The stored potential flips the
// sign of the second component.
TEST(Problem3VectorPotential, LiteralFormHasWrongCurl) {
  auto literal = [](const Vec3& x) {
    const double r = std::hypot(x.x, x.y);
    return Vec3{-x.y * r / 3.0, -x.x * r / 3.0, 0.0};
  };
  const Vec3 x{3, 4, 0};
  const Vec3 curl = testing::fd_curl(literal, x);
  EXPECT_NEAR(curl.z, (16.0 - 9.0) / 15.0, 1e-8);
  EXPECT_GT(std::fabs(curl.z - 5.0), 1.0);
  EXPECT_NEAR(testing::fd_curl([](const Vec3& y) { return builtin_problem("problem3").field.A(y); }, x).z, 5.0,
              1e-8);
}

// Problem config files.

constexpr const char* kQuadraticConfig = R"(
# problem 1 written out explicitly
name = custom1
epsilon = 0.5
potential.kind = quadratic
potential.Q = 0.02 0 0, 0 0.02 0, 0 0 0.02
potential.q = 0 0 0
field.kind = constant
field.B = 0 0 1
x0 = 0 1 0.1
v0 = 0.09 0.05 0.20
S = 0 1 0 -1 0 0 0 0 0
)";

TEST(ProblemConfig, ParsesQuadraticConstantField) {
  const ProblemSpec p = parse_problem(kQuadraticConfig);
  const ProblemSpec ref = builtin_problem("problem1", 0.5);
  EXPECT_EQ(p.name, "custom1");
  EXPECT_EQ(p.epsilon, 0.5);
  EXPECT_TRUE(p.field.is_quadratic_U());
  EXPECT_TRUE(p.field.is_constant_B());
  EXPECT_EQ(p.field.B({}), (Vec3{0, 0, 2}));
  Rng rng;
  for (int i = 0; i < 20; ++i) {
    const Vec3 x = rng.vec(-2, 2);
    EXPECT_NEAR(p.field.U(x), ref.field.U(x), 1e-15);
    EXPECT_EQ(p.field.A(x), ref.field.A(x));
  }
  EXPECT_EQ(p.x0, ref.x0);
  EXPECT_EQ(p.v0, ref.v0);
}

TEST(ProblemConfig, BuiltinKindsAndDefaults) {
  const ProblemSpec p = parse_problem(
      "name = p3\nepsilon = 1\npotential.kind = builtin:problem3\nfield.kind = builtin:problem3\n"
      "x0 = 0 1 0.1\nv0 = 0.09, 0.05, 0.2\n");
  const ProblemSpec ref = builtin_problem("problem3");
  EXPECT_EQ(p.field.B({3, 4, 0}), ref.field.B({3, 4, 0}));
  EXPECT_EQ(p.field.U({3, 4, 0}), ref.field.U({3, 4, 0}));
  EXPECT_EQ(p.S.matrix(), default_momentum_matrix().matrix());
}

TEST(ProblemConfig, InverseRadiusCoefficient) {
  const ProblemSpec p = parse_problem(
      "name = ir\nepsilon = 1\npotential.kind = inverse_radius\npotential.coefficient = 2\n"
      "field.kind = constant\nfield.B = 0 0 1\nx0 = 1 0 0\nv0 = 0 0 0\n");
  EXPECT_DOUBLE_EQ(p.field.U({0, 4, 0}), 0.5);
}

TEST(ProblemConfig, Errors) {
  // Syntax.
  EXPECT_THROW(parse_problem("name custom\n"), ParseError);
  EXPECT_THROW(parse_problem("name = a\nname = b\n"), ParseError);
  const std::string base =
      "name = c\nepsilon = 1\nfield.kind = constant\nfield.B = 0 0 1\nx0 = 0 1 0\nv0 = 1 0 0\n";
  EXPECT_THROW(parse_problem(base + "potential.kind = quadratic\npotential.Q = 1 0 0 0 1 0 0 0\n"), ParseError);
  EXPECT_THROW(parse_problem(base + "potential.kind = quadratic\npotential.Q = 1 0 0 0 1 0 0 0 x\n"), ParseError);
  // Content.
  EXPECT_THROW(parse_problem(base + "potential.kind = quadratic\npotential.Q = 1 2 0 0 1 0 0 0 1\n"),
               InvalidParameter);
  EXPECT_THROW(parse_problem(base + "potential.kind = quadratic\npotential.Q = 1 0 0 0 1 0 0 0 1\nS = 1 0 0 0 0 0 0 0 0\n"),
               InvalidParameter);
  EXPECT_THROW(parse_problem(base + "potential.kind = quadratic\n"), InvalidParameter);
  EXPECT_THROW(parse_problem(base + "potential.kind = cubic\n"), InvalidParameter);
  // A key that belongs to another potential kind.
  EXPECT_THROW(parse_problem(base + "potential.kind = quadratic\npotential.Q = 1 0 0 0 1 0 0 0 1\n"
                                    "potential.coefficient = 3\n"),
               InvalidParameter);
  EXPECT_THROW(parse_problem(base + "potential.kind = inverse_radius\npotential.cubic = 1\n"), InvalidParameter);
  EXPECT_THROW(
      parse_problem("name = c\nepsilon = 0\npotential.kind = inverse_radius\nfield.kind = constant\n"
                    "field.B = 0 0 1\nx0 = 0 1 0\nv0 = 1 0 0\n"),
      InvalidParameter);
  EXPECT_THROW(parse_problem(base + "potential.kind = builtin:problem9\n"), NotFound);
}

TEST(ProblemConfig, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "cpd_fields_test_problem.cfg";
  {
    std::ofstream f(path);
    f << kQuadraticConfig;
  }
  EXPECT_EQ(load_problem(path).name, "custom1");
  std::filesystem::remove(path);
  EXPECT_THROW(load_problem(path), NotFound);
}

}  // namespace
}  // namespace cpd
