#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "supnc/algebra.hpp"

using namespace supnc;
using namespace supnc::algebra;
using Catch::Approx;

namespace {

// Counts partitions of {0..e-1} into exactly f nonempty blocks by exhaustive
// recursive assignment.  Independent of the recurrence under test.
long count_set_partitions(int e, int f) {
  std::vector<int> assignment(static_cast<size_t>(e), -1);
  long count = 0;
  auto rec = [&](auto&& self, int element, int blocks_used) -> void {
    if (element == e) {
      if (blocks_used == f) ++count;
      return;
    }
    for (int b = 0; b < blocks_used; ++b) {
      assignment[static_cast<size_t>(element)] = b;
      self(self, element + 1, blocks_used);
    }
    if (blocks_used < f) {
      assignment[static_cast<size_t>(element)] = blocks_used;
      self(self, element + 1, blocks_used + 1);
    }
  };
  if (e == 0) return f == 0 ? 1 : 0;
  rec(rec, 0, 0);
  return count;
}

using Matrix = std::vector<std::vector<std::complex<double>>>;

Matrix zero_matrix(int n) {
  return Matrix(static_cast<size_t>(n), std::vector<std::complex<double>>(static_cast<size_t>(n), 0.0));
}

Matrix identity_matrix(int n) {
  Matrix m = zero_matrix(n);
  for (int i = 0; i < n; ++i) m[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  int n = static_cast<int>(a.size());
  Matrix out = zero_matrix(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (a[static_cast<size_t>(i)][static_cast<size_t>(k)] == std::complex<double>(0.0)) continue;
      for (int j = 0; j < n; ++j)
        out[static_cast<size_t>(i)][static_cast<size_t>(j)] +=
            a[static_cast<size_t>(i)][static_cast<size_t>(k)] * b[static_cast<size_t>(k)][static_cast<size_t>(j)];
    }
  return out;
}

// Truncated lowering operator: a |n> = sqrt(n) |n-1>.
Matrix lowering_matrix(int dim) {
  Matrix m = zero_matrix(dim);
  for (int n = 1; n < dim; ++n)
    m[static_cast<size_t>(n) - 1][static_cast<size_t>(n)] = std::sqrt(static_cast<double>(n));
  return m;
}

// Truncated raising operator: c |n> = sqrt(n+1) |n+1>.
Matrix raising_matrix(int dim) {
  Matrix m = zero_matrix(dim);
  for (int n = 0; n + 1 < dim; ++n)
    m[static_cast<size_t>(n) + 1][static_cast<size_t>(n)] = std::sqrt(static_cast<double>(n) + 1.0);
  return m;
}

Matrix word_matrix(const std::vector<Ladder>& word, int dim) {
  Matrix acc = identity_matrix(dim);
  for (Ladder op : word) {
    acc = multiply(acc, op == Ladder::annihilation ? lowering_matrix(dim) : raising_matrix(dim));
  }
  return acc;
}

Matrix polynomial_matrix(const NormalOrderedPolynomial& poly, int dim) {
  Matrix out = zero_matrix(dim);
  const Matrix low = lowering_matrix(dim);
  const Matrix high = raising_matrix(dim);
  for (const auto& [p, c] : poly.terms()) {
    Matrix term = identity_matrix(dim);
    for (int i = 0; i < p.creation; ++i) term = multiply(term, high);
    for (int i = 0; i < p.annihilation; ++i) term = multiply(term, low);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        out[static_cast<size_t>(i)][static_cast<size_t>(j)] += c * term[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  return out;
}

// Truncated quadrature matrix (a + c)/sqrt(2); the power's (0,0) element is
// the matrix-oracle vacuum moment.
double vacuum_quadrature_moment_matrix_oracle(int k, int dim) {
  Matrix x = zero_matrix(dim);
  const Matrix low = lowering_matrix(dim);
  const Matrix high = raising_matrix(dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      x[static_cast<size_t>(i)][static_cast<size_t>(j)] =
          inv_sqrt2 * (low[static_cast<size_t>(i)][static_cast<size_t>(j)] + high[static_cast<size_t>(i)][static_cast<size_t>(j)]);
  Matrix acc = identity_matrix(dim);
  for (int i = 0; i < k; ++i) acc = multiply(acc, x);
  return acc[0][0].real();
}

// Central-to-raw Gaussian moment recursion: E[Y^k] for Y ~ N(mean, variance).
double gaussian_raw_moment(double mean, double variance, int k) {
  std::vector<double> m(static_cast<size_t>(k) + 1);
  m[0] = 1.0;
  if (k >= 1) m[1] = mean;
  for (int j = 2; j <= k; ++j)
    m[static_cast<size_t>(j)] =
        mean * m[static_cast<size_t>(j) - 1] + (j - 1) * variance * m[static_cast<size_t>(j) - 2];
  return m[static_cast<size_t>(k)];
}

}  // namespace

TEST_CASE("stirling numbers match exhaustive set partition counts", "[algebra]") {
  for (int e = 0; e <= 9; ++e)
    for (int f = 0; f <= e + 1; ++f) {
      CAPTURE(e, f);
      CHECK(to_string(stirling2(e, f)) == std::to_string(count_set_partitions(e, f)));
    }
  CHECK(stirling2(4, 2) == uint128{7});
  CHECK(stirling2(7, 3) == uint128{301});
}

TEST_CASE("stirling edge rows", "[algebra]") {
  CHECK(stirling2(0, 0) == uint128{1});
  CHECK(stirling2(5, 0) == uint128{0});
  CHECK(stirling2(0, 3) == uint128{0});
  CHECK(stirling2(3, 5) == uint128{0});
  CHECK_THROWS_AS(stirling2(-1, 0), invalid_argument);
}

TEST_CASE("stirling falling factorial identity", "[algebra]") {
  // sum_f S(e, f) x^(f falling) = x^e, exact in integers.
  for (int e = 0; e <= 8; ++e)
    for (long x = 0; x <= 6; ++x) {
      long lhs = 0;
      for (int f = 0; f <= e; ++f) {
        long falling = 1;
        for (int j = 0; j < f; ++j) falling *= x - j;
        lhs += static_cast<long>(stirling2(e, f)) * falling;
      }
      long rhs = 1;
      for (int j = 0; j < e; ++j) rhs *= x;
      CAPTURE(e, x);
      CHECK(lhs == rhs);
    }
}

TEST_CASE("stirling overflow is detected", "[algebra]") {
  CHECK_THROWS_AS(stirling2(200, 100), arithmetic_overflow);
}

TEST_CASE("double factorial values and product identity", "[algebra]") {
  CHECK(double_factorial(-1) == uint128{1});
  CHECK(double_factorial(0) == uint128{1});
  CHECK(double_factorial(5) == uint128{15});
  CHECK(double_factorial(8) == uint128{384});
  CHECK_THROWS_AS(double_factorial(-2), invalid_argument);
  CHECK_THROWS_AS(double_factorial(301), arithmetic_overflow);

  for (int j = 1; j <= 8; ++j) {
    uint128 fact = 1;
    for (int i = 2; i <= 2 * j; ++i) fact = fact * static_cast<uint128>(i);
    CAPTURE(j);
    CHECK(double_factorial(2 * j) * double_factorial(2 * j - 1) == fact);
  }
}

TEST_CASE("binomial coefficients", "[algebra]") {
  CHECK(binomial(0, 0) == uint128{1});
  CHECK(binomial(10, 3) == uint128{120});
  CHECK(binomial(3, 5) == uint128{0});
  for (int n = 1; n <= 20; ++n)
    for (int k = 1; k < n; ++k) {
      CAPTURE(n, k);
      CHECK(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
    }
}

TEST_CASE("half-integer pochhammer fractions", "[algebra]") {
  auto p0 = pochhammer_half(0);
  CHECK(p0.numerator == uint128{1});
  CHECK(p0.denominator == uint128{1});
  auto p2 = pochhammer_half(2);
  CHECK(p2.numerator == uint128{1});
  CHECK(p2.denominator == uint128{2});
  auto p4 = pochhammer_half(4);
  CHECK(p4.numerator == uint128{3});
  CHECK(p4.denominator == uint128{4});
  CHECK(p4.value() == 0.75);
  auto p6 = pochhammer_half(6);
  CHECK(p6.numerator == uint128{15});
  CHECK(p6.denominator == uint128{8});
  CHECK_THROWS_AS(pochhammer_half(3), invalid_argument);
  CHECK_THROWS_AS(pochhammer_half(-2), invalid_argument);
}

TEST_CASE("normal ordering of short words", "[algebra]") {
  const auto a = Ladder::annihilation;
  const auto c = Ladder::creation;

  auto empty = normal_order({});
  REQUIRE(empty.terms().size() == 1);
  CHECK(empty.terms().at({0, 0}) == std::complex<double>(1.0));

  auto ac = normal_order({a, c});
  REQUIRE(ac.terms().size() == 2);
  CHECK(ac.terms().at({0, 0}) == std::complex<double>(1.0));
  CHECK(ac.terms().at({1, 1}) == std::complex<double>(1.0));

  auto word = normal_order({a, c, c, a, c});
  REQUIRE(word.terms().size() == 3);
  CHECK(word.terms().at({1, 0}) == std::complex<double>(2.0));
  CHECK(word.terms().at({2, 1}) == std::complex<double>(4.0));
  CHECK(word.terms().at({3, 2}) == std::complex<double>(1.0));
}

TEST_CASE("normal ordering equals the word as a truncated matrix", "[algebra]") {
  std::mt19937 rng(20240817);
  std::uniform_int_distribution<int> len_dist(1, 6);
  std::uniform_int_distribution<int> op_dist(0, 1);
  const int dim = 13;  // states 0..12

  for (int trial = 0; trial < 60; ++trial) {
    int len = len_dist(rng);
    std::vector<Ladder> word;
    for (int i = 0; i < len; ++i)
      word.push_back(op_dist(rng) == 0 ? Ladder::annihilation : Ladder::creation);

    Matrix direct = word_matrix(word, dim);
    Matrix ordered = polynomial_matrix(normal_order(word), dim);

    int safe = dim - 1 - len;  // rows/columns unaffected by truncation
    for (int i = 0; i <= safe; ++i)
      for (int j = 0; j <= safe; ++j) {
        double scale = std::max(1.0, std::abs(direct[static_cast<size_t>(i)][static_cast<size_t>(j)]));
        CAPTURE(trial, len, i, j);
        CHECK(std::abs(direct[static_cast<size_t>(i)][static_cast<size_t>(j)] -
                       ordered[static_cast<size_t>(i)][static_cast<size_t>(j)]) <= 1e-12 * scale);
      }
  }
}

TEST_CASE("normal ordering rejects oversized words", "[algebra]") {
  std::vector<Ladder> word(33, Ladder::creation);
  CHECK_THROWS_AS(normal_order(word), size_limit_exceeded);
  CHECK_NOTHROW(normal_order(std::vector<Ladder>(32, Ladder::creation)));
}

TEST_CASE("polynomial stores no cancelled terms", "[algebra]") {
  NormalOrderedPolynomial p;
  p.add({1, 1}, 2.5);
  p.add({1, 1}, -2.5);
  CHECK(p.terms().empty());
}

TEST_CASE("quadrature power expansions for small powers", "[algebra]") {
  auto x0 = quadrature_power_expansion(0);
  REQUIRE(x0.terms().size() == 1);
  CHECK(x0.terms().at({0, 0}) == std::complex<double>(1.0));

  auto x1 = quadrature_power_expansion(1);
  REQUIRE(x1.terms().size() == 2);
  CHECK(x1.terms().at({1, 0}).real() == Approx(1.0 / std::sqrt(2.0)));
  CHECK(x1.terms().at({0, 1}).real() == Approx(1.0 / std::sqrt(2.0)));

  auto x2 = quadrature_power_expansion(2);
  REQUIRE(x2.terms().size() == 4);
  CHECK(x2.terms().at({2, 0}).real() == Approx(0.5));
  CHECK(x2.terms().at({0, 2}).real() == Approx(0.5));
  CHECK(x2.terms().at({1, 1}).real() == Approx(1.0));
  CHECK(x2.terms().at({0, 0}).real() == Approx(0.5));

  CHECK_THROWS_AS(quadrature_power_expansion(17), size_limit_exceeded);
  CHECK_THROWS_AS(quadrature_power_expansion(-1), invalid_argument);
}

TEST_CASE("quadrature expansion reproduces vacuum moments", "[algebra]") {
  // Matrix oracle first: the frozen fourth vacuum moment is 3/4.
  CHECK(vacuum_quadrature_moment_matrix_oracle(4, 16) == Approx(0.75).margin(1e-13));

  auto vacuum_moment = [](int m, int n) -> std::complex<double> {
    return (m == 0 && n == 0) ? 1.0 : 0.0;
  };
  for (int k = 0; k <= 8; ++k) {
    double via_expansion = quadrature_power_expansion(k).contract(vacuum_moment).real();
    double via_matrix = vacuum_quadrature_moment_matrix_oracle(k, 24);
    double closed = (k % 2 == 0) ? pochhammer_half(k).value() : 0.0;
    CAPTURE(k);
    CHECK(via_expansion == Approx(closed).margin(1e-12));
    CHECK(via_matrix == Approx(closed).margin(1e-12));
  }
}

TEST_CASE("quadrature expansion reproduces coherent-state moments", "[algebra]") {
  // For a coherent state the quadrature distribution is Gaussian with mean
  // sqrt(2) Re(alpha) and variance 1/2.
  for (std::complex<double> alpha : {std::complex<double>(0.0, 0.0), std::complex<double>(1.0, 0.0),
                                     std::complex<double>(0.6, -0.3)}) {
    auto coherent_moment = [alpha](int m, int n) -> std::complex<double> {
      return std::pow(std::conj(alpha), m) * std::pow(alpha, n);
    };
    for (int k = 0; k <= 8; ++k) {
      double expected = gaussian_raw_moment(std::sqrt(2.0) * alpha.real(), 0.5, k);
      std::complex<double> got = quadrature_power_expansion(k).contract(coherent_moment);
      CAPTURE(alpha, k);
      CHECK(got.real() == Approx(expected).margin(1e-10));
      CHECK(got.imag() == Approx(0.0).margin(1e-10));
    }
  }
}
