#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "birdcast/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

using namespace birdcast;
using num::Activation;

namespace {

Matrix random_matrix(Index rows, Index cols, num::Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.uniform(-1.0, 1.0);
  return m;
}

}  // namespace

TEST_CASE("matmul rejects mismatched inner dimensions") {
  Matrix a = Matrix::Zero(2, 3), b = Matrix::Zero(2, 3);
  CHECK_THROWS_WITH_AS(num::matmul(a, b),
                       "matmul: incompatible shapes 2x3 and 2x3",
                       std::invalid_argument);
}

TEST_CASE("elementwise ops reject mismatched shapes") {
  Matrix a = Matrix::Zero(2, 3), b = Matrix::Zero(3, 2);
  CHECK_THROWS_AS(num::add(a, b), std::invalid_argument);
  CHECK_THROWS_AS(num::hadamard(a, b), std::invalid_argument);
}

TEST_CASE("matmul is associative to 1e-10 on random triples") {
  num::Rng rng(99);
  for (int rep = 0; rep < 5; ++rep) {
    Matrix a = random_matrix(4, 6, rng);
    Matrix b = random_matrix(6, 3, rng);
    Matrix c = random_matrix(3, 5, rng);
    Matrix lhs = num::matmul(num::matmul(a, b), c);
    Matrix rhs = num::matmul(a, num::matmul(b, c));
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("matmul against a hand-computed 2x2 product") {
  Matrix a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  Matrix p = num::matmul(a, b);
  CHECK(p(0, 0) == 19);
  CHECK(p(0, 1) == 22);
  CHECK(p(1, 0) == 43);
  CHECK(p(1, 1) == 50);
}

TEST_CASE("transpose and scale") {
  Matrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  Matrix t = num::transpose(a);
  CHECK(t.rows() == 3);
  CHECK(t(2, 1) == 6);
  CHECK(num::scale(a, 2.0)(1, 2) == 12.0);
}

TEST_CASE("sigmoid satisfies s(-x) = 1 - s(x) to 1e-12") {
  for (double x : {0.0, 0.1, 0.773, 2.5, 17.0, 35.0}) {
    CHECK(std::abs(num::sigmoid(-x) - (1.0 - num::sigmoid(x))) < 1e-12);
  }
  CHECK(num::sigmoid(0.0) == 0.5);
}

TEST_CASE("activations at reference points") {
  CHECK(num::apply_activation(Activation::Relu, -3.0) == 0.0);
  CHECK(num::apply_activation(Activation::Relu, 3.0) == 3.0);
  CHECK(num::apply_activation(Activation::Linear, -2.5) == -2.5);
  CHECK(num::apply_activation(Activation::Tanh, 1.0) ==
        doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
  CHECK(num::apply_activation(Activation::Sigmoid, 1.0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-15));
}

TEST_CASE("inplace activations match the scalar versions") {
  num::Rng rng(3);
  Matrix m = random_matrix(4, 5, rng);
  for (Activation a : {Activation::Tanh, Activation::Relu, Activation::Sigmoid,
                       Activation::Linear}) {
    Matrix applied = m;
    num::activation_inplace(a, applied);
    for (Index j = 0; j < m.cols(); ++j)
      for (Index i = 0; i < m.rows(); ++i)
        CHECK(applied(i, j) ==
              doctest::Approx(num::apply_activation(a, m(i, j)))
                  .epsilon(1e-15));
  }
}

TEST_CASE("value-based activation derivatives") {
  // v = act(z); the derivative is recovered from v alone.
  const double v = std::tanh(0.7);
  CHECK(num::activation_derivative_from_value(Activation::Tanh, v) ==
        doctest::Approx(1.0 - v * v).epsilon(1e-15));
  const double s = num::sigmoid(0.7);
  CHECK(num::activation_derivative_from_value(Activation::Sigmoid, s) ==
        doctest::Approx(s * (1.0 - s)).epsilon(1e-15));
  CHECK(num::activation_derivative_from_value(Activation::Relu, 2.0) == 1.0);
  CHECK(num::activation_derivative_from_value(Activation::Relu, 0.0) == 0.0);
  CHECK(num::activation_derivative_from_value(Activation::Linear, -9.0) == 1.0);
}

TEST_CASE("activation names round-trip") {
  for (Activation a : {Activation::Tanh, Activation::Relu, Activation::Sigmoid,
                       Activation::Linear})
    CHECK(num::activation_from_string(num::to_string(a)) == a);
  CHECK_THROWS_AS(num::activation_from_string("gelu"), std::invalid_argument);
}

TEST_CASE("same seed produces an identical stream") {
  num::Rng a(1234), b(1234);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  num::Rng c(1235);
  bool all_equal = true;
  num::Rng a2(1234);
  for (int i = 0; i < 10; ++i) all_equal &= (a2.next_u64() == c.next_u64());
  CHECK_FALSE(all_equal);
}

TEST_CASE("uniform01 stays in [0, 1) and fills the range") {
  num::Rng rng(7);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.01);
  CHECK(hi > 0.99);
}

TEST_CASE("uniform(lo, hi) respects its bounds") {
  num::Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-0.25, 0.25);
    CHECK(u >= -0.25);
    CHECK(u < 0.25);
  }
}

TEST_CASE("shuffle yields a permutation and is seed-deterministic") {
  std::vector<Index> v(100);
  std::iota(v.begin(), v.end(), Index{0});
  num::Rng rng(42);
  rng.shuffle(v);

  std::vector<Index> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (Index i = 0; i < 100; ++i) CHECK(sorted[static_cast<size_t>(i)] == i);

  std::vector<Index> w(100);
  std::iota(w.begin(), w.end(), Index{0});
  num::Rng rng2(42);
  rng2.shuffle(w);
  CHECK(v == w);

  std::vector<Index> untouched(100);
  std::iota(untouched.begin(), untouched.end(), Index{0});
  CHECK(v != untouched);
}

TEST_CASE("uniform_int rejects zero and covers [0, n)") {
  num::Rng rng(5);
  CHECK_THROWS_AS(rng.uniform_int(0), std::invalid_argument);
  std::vector<int> seen(6, 0);
  for (int i = 0; i < 6000; ++i) {
    const auto u = rng.uniform_int(6);
    REQUIRE(u < 6);
    seen[static_cast<size_t>(u)]++;
  }
  for (int count : seen) CHECK(count > 0);
}
