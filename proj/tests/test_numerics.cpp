#include <gtest/gtest.h>

#include <cmath>

#include "mrepath/errors.hpp"
#include "mrepath/grad_check.hpp"
#include "mrepath/matrix.hpp"
#include "mrepath/ops.hpp"
#include "mrepath/params.hpp"
#include "mrepath/rng.hpp"
#include "mrepath/tape.hpp"

using namespace mrepath;

namespace {

Matrix triple_loop(const Matrix& a, const Matrix& b) {
  Matrix c = Matrix::Zero(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

}  // namespace

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
  Rng rng(3);
  const Matrix a = rng.normal_matrix(3, 4, 1.0);
  EXPECT_EQ(matmul(Matrix::Identity(3, 3), a), a);
}

TEST(Matmul, HandArithmetic) {
  Matrix a(2, 2), b(2, 1);
  a << 1, 2, 3, 4;
  b << 0, 1;
  const Matrix c = matmul(a, b);
  ASSERT_EQ(c.rows(), 2);
  EXPECT_EQ(c(0, 0), 2.0);
  EXPECT_EQ(c(1, 0), 4.0);
}

TEST(Matmul, MatchesTripleLoop) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    const Matrix a = rng.normal_matrix(5, 7, 1.0), b = rng.normal_matrix(7, 3, 1.0);
    EXPECT_LT((matmul(a, b) - triple_loop(a, b)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Matmul, ShapeMismatchThrows) {
  EXPECT_THROW(matmul(Matrix::Zero(2, 3), Matrix::Zero(2, 3)), ShapeError);
}

TEST(Matmul, AssociativeOnRandomTriples) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto n = [&] { return static_cast<Eigen::Index>(1 + rng.below(8)); };
    const Eigen::Index p = n(), q = n(), r = n(), s = n();
    const Matrix a = rng.normal_matrix(p, q, 1.0), b = rng.normal_matrix(q, r, 1.0), c = rng.normal_matrix(r, s, 1.0);
    const Matrix lhs = matmul(matmul(a, b), c), rhs = matmul(a, matmul(b, c));
    const double scale = std::max(1.0, lhs.cwiseAbs().maxCoeff());
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff() / scale, 1e-9);
  }
}

TEST(Softmax, ZeroRowIsUniform) {
  const Matrix s = softmax_rows(Matrix::Zero(1, 2));
  EXPECT_EQ(s(0, 0), 0.5);
  EXPECT_EQ(s(0, 1), 0.5);
}

TEST(Softmax, LargeEntriesDoNotOverflow) {
  Matrix m(1, 2);
  m << 1000, 0;
  const Matrix s = softmax_rows(m);
  EXPECT_TRUE(all_finite(s));
  EXPECT_DOUBLE_EQ(s(0, 0), 1.0);
  EXPECT_LT(s(0, 1), 1e-300);
}

TEST(Softmax, MatchesLongDoubleOracle) {
  Matrix m(1, 3);
  m << 1, 2, 3;
  const Matrix s = softmax_rows(m);
  long double z = 0;
  for (int i = 1; i <= 3; ++i) z += std::exp(static_cast<long double>(i));
  for (int i = 1; i <= 3; ++i)
    EXPECT_NEAR(s(0, i - 1), static_cast<double>(std::exp(static_cast<long double>(i)) / z), 1e-12);
}

TEST(Softmax, RowsSumToOneIncludingHugeMagnitudes) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const Matrix m = rng.normal_matrix(6, 9, seed % 2 ? 1e3 : 1.0);
    const Matrix s = softmax_rows(m);
    EXPECT_GE(s.minCoeff(), 0.0);
    for (Eigen::Index r = 0; r < s.rows(); ++r) EXPECT_NEAR(s.row(r).sum(), 1.0, 1e-9);
  }
}

TEST(Cosine, SelfSimilarityIsOne) {
  Vector u(3);
  u << 1, -2, 0.5;
  EXPECT_NEAR(cosine_sim(u, u), 1.0, 1e-15);
}

TEST(Cosine, HandValues) {
  Vector a(2), b(2), c(2), d(2);
  a << 1, 0;
  b << 0, 1;
  c << 1, 2;
  d << 2, 1;
  EXPECT_EQ(cosine_sim(a, b), 0.0);
  EXPECT_NEAR(cosine_sim(c, d), 0.8, 1e-15);
}

TEST(Cosine, ZeroVectorConvention) {
  Vector z = Vector::Zero(3), u = Vector::Ones(3);
  EXPECT_EQ(cosine_sim(z, z), 0.0);
  EXPECT_EQ(cosine_sim(z, u), 0.0);
}

TEST(Cosine, StaysInUnitInterval) {
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const Matrix u = rng.normal_matrix(1, 5, 1.0);
    const Matrix v = (i % 3 == 0) ? Matrix(-7.0 * u) : rng.normal_matrix(1, 5, 1.0);
    const double c = cosine_sim(u, v);
    EXPECT_GE(c, -1.0);
    EXPECT_LE(c, 1.0);
  }
}

TEST(ReshapeRowMajor, FollowsRowOrder) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const Matrix r = reshape_row_major(m, 3, 2);
  Matrix expect(3, 2);
  expect << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(r, expect);
  EXPECT_THROW(reshape_row_major(m, 4, 2), ShapeError);
}

TEST(Rng, EqualSeedsGiveEqualStreams) {
  Rng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal(), y = b.normal();
    EXPECT_EQ(x, y);
    differs |= (x != c.normal());
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(Rng(5).normal_matrix(4, 4, 0.3), Rng(5).normal_matrix(4, 4, 0.3));
}

TEST(Rng, SplitStreamsAreDistinctAndStable) {
  const Rng root(7);
  Rng s1 = root.split(1), s1b = root.split(1), s2 = root.split(2);
  EXPECT_EQ(s1.next_u64(), s1b.next_u64());
  EXPECT_NE(root.split(1).next_u64(), s2.next_u64());
}

TEST(Rng, DrawMoments) {
  Rng rng(1);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, se = 0;
  for (int i = 0; i < n; ++i) {
    su += rng.uniform();
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    se += rng.exponential(2.0);
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
  EXPECT_NEAR(se / n, 0.5, 0.005);
}

TEST(Rng, BelowIsInRangeAndCoversAll) {
  Rng rng(2);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = rng.below(7);
    ASSERT_LT(v, 7u);
    ++hits[v];
  }
  for (int h : hits) EXPECT_GT(h, 800);
}

TEST(ParamStore, FlatViewRoundTrips) {
  ParamStore ps;
  Rng rng(0);
  ps.add("a", rng.normal_matrix(2, 3, 1.0));
  ps.add("b", rng.normal_matrix(4, 1, 1.0));
  EXPECT_EQ(ps.numel(), 10);
  const Vector flat = ps.flat();
  ParamStore copy;
  copy.add("a", Matrix::Zero(2, 3));
  copy.add("b", Matrix::Zero(4, 1));
  copy.set_flat(flat);
  EXPECT_EQ(copy.value("a"), ps.value("a"));
  EXPECT_EQ(copy.value("b"), ps.value("b"));
  EXPECT_EQ(copy.flat(), flat);
  // row-major within each parameter
  EXPECT_EQ(flat(1), ps.value("a")(0, 1));
}

TEST(ParamStore, GradShapesMatchAndDuplicatesRejected) {
  ParamStore ps;
  ps.add("w", Matrix::Ones(3, 2));
  EXPECT_EQ(ps.grad("w").rows(), 3);
  EXPECT_EQ(ps.grad("w").cols(), 2);
  EXPECT_THROW(ps.add("w", Matrix::Ones(1, 1)), ConfigError);
}

TEST(GradCheck, QuadraticExample) {
  ParamStore ps;
  Matrix theta(2, 1);
  theta << 1, 2;
  ps.add("theta", theta);
  LossFn f = [](ParamStore& p) {
    Tape tape;
    const Var t = tape.param(p, "theta");
    const Var loss = sum(hadamard(t, t));
    tape.backward(loss);
    return loss.scalar();
  };
  const auto report = grad_check(f, ps, 1e-5, 1e-6);
  EXPECT_TRUE(report.passed) << report.message;
  EXPECT_LT(report.max_rel_err, 1e-6);
  ps.zero_grad();
  f(ps);
  EXPECT_NEAR(ps.grad("theta")(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(ps.grad("theta")(1, 0), 4.0, 1e-12);
  EXPECT_EQ(ps.value("theta"), theta);  // restored
}

TEST(GradCheck, DetectsWrongGradient) {
  ParamStore ps;
  ps.add("x", Matrix::Constant(1, 1, 1.5));
  LossFn f = [](ParamStore& p) {
    const double x = p.value("x")(0, 0);
    p.grad("x")(0, 0) = 3.0 * x;  // true derivative is 2x
    return x * x;
  };
  EXPECT_FALSE(grad_check(f, ps, 1e-5, 1e-3).passed);
}

TEST(GradCheck, NonFiniteLossIsReported) {
  ParamStore ps;
  ps.add("x", Matrix::Constant(1, 1, 0.0));
  LossFn f = [](ParamStore& p) { return std::log(p.value("x")(0, 0)); };
  const auto report = grad_check(f, ps, 1e-5, 1e-3);
  EXPECT_FALSE(report.passed);
  EXPECT_FALSE(report.finite);
}

// Every tape op against central differences, 3 seeds each.
class OpGrad : public ::testing::TestWithParam<int> {};

TEST_P(OpGrad, AllOpsComposed) {
  const std::uint64_t seed = static_cast<std::uint64_t>(GetParam());
  Rng rng(seed);
  ParamStore ps;
  ps.add("a", rng.normal_matrix(3, 4, 1.0));
  ps.add("b", rng.normal_matrix(4, 2, 1.0));
  ps.add("r", rng.normal_matrix(1, 2, 1.0));
  ps.add("s", Matrix::Constant(1, 1, 0.7));
  ps.add("p", (rng.normal_matrix(3, 2, 0.3).array() + 2.0).matrix());
  LossFn f = [](ParamStore& p) {
    Tape t;
    const Var a = t.param(p, "a"), b = t.param(p, "b"), r = t.param(p, "r"), s = t.param(p, "s"),
              pos = t.param(p, "p");
    Var x = add_row(matmul(a, b), r);
    x = activate(x, Activation::ELU);
    x = hadamard(x, sigmoid(x)) + scale(x, s);
    x = cwise_div(x, pos) - 0.5 * log(pos);
    x = softmax_rows(concat_cols({x, transpose(reshape(x, 2, 3))}));
    const Var y = concat_rows({row_mean(x), row_mean(clamp(x, 0.1, 0.3))});
    const Var loss = sum(hadamard(y, y)) + scale(element(x, 1, 2), 3.0);
    t.backward(loss);
    return loss.scalar();
  };
  const auto report = grad_check(f, ps, 1e-5, 1e-4);
  EXPECT_TRUE(report.passed) << report.message;
}

INSTANTIATE_TEST_SUITE_P(Seeds, OpGrad, ::testing::Values(0, 1, 2));

TEST(Tape, ShapeErrorsFromOps) {
  Tape t;
  const Var a = t.variable(Matrix::Zero(2, 3)), b = t.variable(Matrix::Zero(2, 2));
  EXPECT_THROW(add(a, b), ShapeError);
  EXPECT_THROW(matmul(a, a), ShapeError);
  EXPECT_THROW(t.backward(a), ShapeError);
}

TEST(Tape, ConstantsReceiveNoGradient) {
  Tape t;
  const Var c = t.constant(Matrix::Ones(1, 1));
  const Var v = t.variable(Matrix::Constant(1, 1, 2.0));
  const Var y = sum(hadamard(c, v));
  t.backward(y);
  EXPECT_FALSE(t.requires_grad(c));
  EXPECT_EQ(t.grad(v)(0, 0), 1.0);
}

TEST(Activation, DerivativesMatchDifferences) {
  Matrix x(1, 5);
  x << -2.0, -0.3, 0.2, 1.0, 3.0;
  for (auto act : {Activation::Identity, Activation::ReLU, Activation::ELU}) {
    const Matrix d = activation_derivative(x, act);
    const double h = 1e-6;
    const Matrix fd = (apply_activation((x.array() + h).matrix(), act) - apply_activation((x.array() - h).matrix(), act)) / (2 * h);
    EXPECT_LT((d - fd).cwiseAbs().maxCoeff(), 1e-6) << to_string(act);
  }
  EXPECT_EQ(parse_activation("elu"), Activation::ELU);
  EXPECT_THROW(parse_activation("tanh"), ConfigError);
}
