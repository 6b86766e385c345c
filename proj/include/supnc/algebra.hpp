#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "supnc/errors.hpp"

namespace supnc::algebra {

using uint128 = unsigned __int128;

inline std::string to_string(uint128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v != 0) {
    s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  return s;
}

namespace detail {

inline uint128 checked_add(uint128 a, uint128 b) {
  uint128 r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw arithmetic_overflow("128-bit addition overflow");
  }
  return r;
}

inline uint128 checked_mul(uint128 a, uint128 b) {
  uint128 r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw arithmetic_overflow("128-bit multiplication overflow");
  }
  return r;
}

}  // namespace detail

// Stirling number of the second kind S(e, f): the number of partitions of an
// e-element set into f nonempty blocks.  Triangular recurrence
// S(e, f) = f S(e-1, f) + S(e-1, f-1), exact 128-bit arithmetic throughout.
inline uint128 stirling2(int e, int f) {
  if (e < 0 || f < 0) throw invalid_argument("stirling2: negative argument");
  if (f > e) return 0;
  if (e == 0) return 1;  // only S(0, 0) reaches here
  if (f == 0) return 0;
  std::vector<uint128> row(static_cast<size_t>(f) + 1, 0);
  row[0] = 1;  // row e' = 0
  for (int ep = 1; ep <= e; ++ep) {
    int top = std::min(ep, f);
    for (int fp = top; fp >= 1; --fp) {
      row[static_cast<size_t>(fp)] =
          detail::checked_add(detail::checked_mul(static_cast<uint128>(fp), row[static_cast<size_t>(fp)]),
                              row[static_cast<size_t>(fp) - 1]);
    }
    row[0] = 0;
  }
  return row[static_cast<size_t>(f)];
}

// n!! with the empty-product convention (-1)!! = 0!! = 1.
inline uint128 double_factorial(int n) {
  if (n < -1) throw invalid_argument("double_factorial: argument below -1");
  uint128 r = 1;
  for (int k = n; k >= 2; k -= 2) {
    r = detail::checked_mul(r, static_cast<uint128>(k));
  }
  return r;
}

// Binomial coefficient C(n, k), exact.
inline uint128 binomial(int n, int k) {
  if (n < 0 || k < 0) throw invalid_argument("binomial: negative argument");
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  uint128 r = 1;
  for (int j = 1; j <= k; ++j) {
    // r always divisible by j after multiplying the next numerator factor
    r = detail::checked_mul(r, static_cast<uint128>(n - k + j));
    r /= static_cast<uint128>(j);
  }
  return r;
}

// Exact dyadic fraction, e.g. the half-integer Pochhammer values.
struct DyadicFraction {
  uint128 numerator;
  uint128 denominator;

  double value() const {
    return static_cast<double>(static_cast<long double>(numerator) /
                               static_cast<long double>(denominator));
  }
};

// (1/2)_{l/2} = (l-1)!!/2^{l/2} for even l >= 0.
inline DyadicFraction pochhammer_half(int l) {
  if (l < 0 || l % 2 != 0) throw invalid_argument("pochhammer_half: argument must be even and non-negative");
  if (l / 2 >= 127) throw arithmetic_overflow("pochhammer_half: denominator overflow");
  return DyadicFraction{double_factorial(l - 1), static_cast<uint128>(1) << (l / 2)};
}

// One letter of an operator word.
enum class Ladder { annihilation, creation };

// Exponent pair of a normal-ordered monomial: creation^m annihilation^n.
struct OperatorPower {
  int creation;
  int annihilation;
  friend auto operator<=>(const OperatorPower&, const OperatorPower&) = default;
};

// Finite complex combination of normal-ordered monomials.  Canonical form:
// no term with a coefficient of exactly zero is stored.
class NormalOrderedPolynomial {
 public:
  using Terms = std::map<OperatorPower, std::complex<double>>;

  NormalOrderedPolynomial() = default;

  static NormalOrderedPolynomial identity() {
    NormalOrderedPolynomial p;
    p.add({0, 0}, 1.0);
    return p;
  }

  void add(OperatorPower power, std::complex<double> coefficient) {
    if (coefficient == std::complex<double>(0.0, 0.0)) return;
    auto [it, inserted] = terms_.try_emplace(power, coefficient);
    if (!inserted) {
      it->second += coefficient;
      if (it->second == std::complex<double>(0.0, 0.0)) terms_.erase(it);
    }
  }

  const Terms& terms() const { return terms_; }

  bool operator==(const NormalOrderedPolynomial&) const = default;

  // Right-multiplication by one ladder operator, renormal-ordered.
  // (c^m a^n) a = c^m a^(n+1);  (c^m a^n) c = c^(m+1) a^n + n c^m a^(n-1).
  NormalOrderedPolynomial times(Ladder op) const {
    NormalOrderedPolynomial out;
    for (const auto& [p, c] : terms_) {
      if (op == Ladder::annihilation) {
        out.add({p.creation, p.annihilation + 1}, c);
      } else {
        out.add({p.creation + 1, p.annihilation}, c);
        if (p.annihilation > 0) {
          out.add({p.creation, p.annihilation - 1}, static_cast<double>(p.annihilation) * c);
        }
      }
    }
    return out;
  }

  NormalOrderedPolynomial scaled(double factor) const {
    NormalOrderedPolynomial out;
    for (const auto& [p, c] : terms_) out.add(p, factor * c);
    return out;
  }

  NormalOrderedPolynomial plus(const NormalOrderedPolynomial& other) const {
    NormalOrderedPolynomial out = *this;
    for (const auto& [p, c] : other.terms_) out.add(p, c);
    return out;
  }

  // Sum of coefficient * moment(m, n); the map order makes the accumulation
  // deterministic.
  std::complex<double> contract(
      const std::function<std::complex<double>(int, int)>& moment) const {
    std::complex<long double> acc(0.0L, 0.0L);
    for (const auto& [p, c] : terms_) {
      std::complex<double> m = moment(p.creation, p.annihilation);
      acc += std::complex<long double>(c) * std::complex<long double>(m);
    }
    return {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }

 private:
  Terms terms_;
};

// Normal-orders a product of ladder operators.  The word lists factors in
// product order: word[0] is the leftmost factor.
inline NormalOrderedPolynomial normal_order(const std::vector<Ladder>& word, int max_length = 32) {
  if (max_length < 0) throw invalid_argument("normal_order: negative length bound");
  if (static_cast<int>(word.size()) > max_length) {
    throw size_limit_exceeded("normal_order: word longer than the supported bound");
  }
  NormalOrderedPolynomial p = NormalOrderedPolynomial::identity();
  for (Ladder op : word) p = p.times(op);
  return p;
}

// Normal-ordered expansion of the k-th power of the quadrature
// (a + a-dagger)/sqrt(2).
inline NormalOrderedPolynomial quadrature_power_expansion(int k, int max_power = 16) {
  if (k < 0) throw invalid_argument("quadrature_power_expansion: negative power");
  if (k > max_power) throw size_limit_exceeded("quadrature_power_expansion: power above the supported bound");
  NormalOrderedPolynomial p = NormalOrderedPolynomial::identity();
  for (int j = 0; j < k; ++j) {
    p = p.times(Ladder::annihilation).plus(p.times(Ladder::creation));
  }
  return p.scaled(std::pow(0.5, 0.5 * k));
}

}  // namespace supnc::algebra
