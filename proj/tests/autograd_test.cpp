#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "kgfuse/autograd.hpp"
#include "kgfuse/error.hpp"

namespace kgfuse {
namespace {

using ag::Matrix;
using ag::Parameter;
using ag::Tape;
using ag::Var;

Parameter random_param(const char* name, Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return Parameter(name, m);
}

// Reduces any node to sum(x .* w) for a fixed random w, so every entry
// contributes with its own weight.
Var project(Tape& t, Var x, std::uint64_t seed = 99) {
  Rng rng(seed);
  std::vector<Var> terms;
  for (Eigen::Index r = 0; r < x->rows(); ++r) {
    Matrix w(1, x->cols());
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = rng.normal();
    const std::vector<int> row = {static_cast<int>(r)};
    terms.push_back(ag::matmul_nt(ag::gather_rows(x, row), t.constant(w)));
  }
  return ag::sum(terms);
}

void expect_grads_ok(std::vector<Parameter*> params, const std::function<Var(Tape&)>& f) {
  const auto r = testing::grad_check(std::move(params), f);
  EXPECT_GT(r.coordinates, 0u);
  EXPECT_LT(r.max_rel_error, 1e-5);
}

TEST(Autograd, Matmul) {
  auto a = random_param("a", 3, 4, 1);
  auto b = random_param("b", 4, 2, 2);
  expect_grads_ok({&a, &b}, [&](Tape& t) { return project(t, ag::matmul(t.param(a), t.param(b))); });
  expect_grads_ok({&a}, [&](Tape& t) { return project(t, ag::matmul_nt(t.param(a), t.param(a))); });
}

TEST(Autograd, AddScaleRow) {
  auto a = random_param("a", 3, 4, 3);
  auto b = random_param("b", 3, 4, 4);
  auto r = random_param("r", 1, 4, 5);
  expect_grads_ok({&a, &b, &r}, [&](Tape& t) {
    return project(t, ag::scale(ag::add_row(ag::add(t.param(a), t.param(b)), t.param(r)), -1.5));
  });
}

TEST(Autograd, Nonlinearities) {
  auto a = random_param("a", 2, 5, 6);
  expect_grads_ok({&a}, [&](Tape& t) { return project(t, ag::gelu(t.param(a))); });
  expect_grads_ok({&a}, [&](Tape& t) { return project(t, ag::tanh(t.param(a))); });
  expect_grads_ok({&a}, [&](Tape& t) { return project(t, ag::softmax_rows(t.param(a))); });
}

TEST(Autograd, LayerNorm) {
  auto x = random_param("x", 3, 6, 7);
  auto g = random_param("g", 1, 6, 8);
  auto b = random_param("b", 1, 6, 9);
  expect_grads_ok({&x, &g, &b}, [&](Tape& t) {
    return project(t, ag::layer_norm(t.param(x), t.param(g), t.param(b)));
  });
}

TEST(Autograd, LayerNormRowsAreNormalized) {
  Tape t;
  Matrix x(2, 4);
  x << 1, 2, 3, 4, -5, 0, 5, 10;
  const auto y = ag::layer_norm(t.constant(x), t.constant(Matrix::Ones(1, 4)), t.constant(Matrix::Zero(1, 4)))->value();
  for (int r = 0; r < 2; ++r) {
    EXPECT_NEAR(y.row(r).mean(), 0.0, 1e-12);
    EXPECT_NEAR(y.row(r).squaredNorm() / 4, 1.0, 1e-4);
  }
}

TEST(Autograd, Reshaping) {
  auto a = random_param("a", 3, 5, 10);
  auto b = random_param("b", 2, 5, 11);
  expect_grads_ok({&a}, [&](Tape& t) { return project(t, ag::cols(t.param(a), 1, 3)); });
  expect_grads_ok({&a, &b}, [&](Tape& t) {
    const std::vector<Var> parts = {t.param(a), t.param(b)};
    return project(t, ag::concat_rows(parts));
  });
  expect_grads_ok({&a}, [&](Tape& t) {
    const std::vector<Var> parts = {ag::cols(t.param(a), 0, 2), t.param(a)};
    return project(t, ag::concat_cols(parts));
  });
  expect_grads_ok({&a}, [&](Tape& t) {
    const std::vector<int> rows = {2, -1, 0, 2};
    return project(t, ag::gather_rows(t.param(a), rows));
  });
  expect_grads_ok({&a}, [&](Tape& t) {
    const std::vector<Var> parts = {t.param(a), ag::scale(t.param(a), 2.0)};
    return project(t, ag::sum(parts));
  });
}

TEST(Autograd, GatherZeroRowForNegativeIndex) {
  Tape t;
  const std::vector<int> rows = {-1, 1};
  const auto y = ag::gather_rows(t.constant(Matrix::Ones(2, 3)), rows)->value();
  EXPECT_TRUE(y.row(0).isZero());
  EXPECT_EQ(y.row(1), Eigen::RowVectorXd::Ones(3));
}

TEST(Autograd, Dyadic) {
  auto c = random_param("c", 2, 3, 12);
  auto g = random_param("g", 2, 30, 13);
  expect_grads_ok({&c, &g}, [&](Tape& t) { return project(t, ag::dyadic_rows(t.param(c), t.param(g))); });
  Tape t;
  EXPECT_EQ(ag::dyadic_rows(t.param(c), t.param(g))->cols(), 31 * 3);
}

TEST(Autograd, Losses) {
  auto logits = random_param("l", 4, 5, 14);
  const std::vector<int> targets = {0, 4, 2, 2};
  expect_grads_ok({&logits}, [&](Tape& t) { return ag::cross_entropy(t.param(logits), targets); });
  auto z = random_param("z", 4, 1, 15);
  const std::vector<int> labels = {1, 0, 0, 1};
  expect_grads_ok({&z}, [&](Tape& t) { return ag::binary_cross_entropy(t.param(z), labels); });
}

TEST(Autograd, LossValues) {
  Tape t;
  const std::vector<int> targets = {3};
  EXPECT_NEAR(ag::cross_entropy(t.constant(Matrix::Zero(1, 8)), targets)->value()(0, 0), std::log(8.0), 1e-12);
  const std::vector<int> labels = {1, 0};
  EXPECT_NEAR(ag::binary_cross_entropy(t.constant(Matrix::Zero(2, 1)), labels)->value()(0, 0), std::log(2.0),
              1e-12);
  // Large margins must not overflow.
  Matrix big(1, 1);
  big << 800;
  const std::vector<int> zero = {0};
  EXPECT_NEAR(ag::binary_cross_entropy(t.constant(big), zero)->value()(0, 0), 800.0, 1e-9);
}

TEST(Autograd, AddConstantPassesGradientThrough) {
  auto a = random_param("a", 2, 2, 16);
  Matrix mask(2, 2);
  mask << 0, -1e9, 0, 0;
  expect_grads_ok({&a}, [&](Tape& t) { return project(t, ag::softmax_rows(ag::add_constant(t.param(a), mask))); });
}

TEST(Autograd, ConstantsReceiveNoGradient) {
  auto a = random_param("a", 2, 2, 17);
  a.zero_grad();
  Tape t;
  Var x = ag::matmul(t.constant(Matrix::Ones(2, 2)), t.param(a));
  t.backward(project(t, x));
  EXPECT_FALSE(a.grad.isZero());
}

TEST(Autograd, GradientsAccumulateAcrossTapes) {
  auto a = random_param("a", 1, 1, 18);
  a.zero_grad();
  for (int i = 0; i < 2; ++i) {
    Tape t;
    t.backward(ag::scale(t.param(a), 3.0));
  }
  EXPECT_DOUBLE_EQ(a.grad(0, 0), 6.0);
}

}  // namespace
}  // namespace kgfuse
