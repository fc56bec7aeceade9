#pragma once

// Exact number theory used by every other module: Kronecker symbols,
// Bernoulli machinery, Dirichlet L-values at non-positive integers and
// Cohen's numbers H(r, N).

#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace cyclotrace::arith {

using Integer = mpz_class;
using Rational = mpq_class;

/// Exact "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& x);

/// Parses "p/q" or "p"; the result is canonicalized.
Rational parse_rational(const std::string& text);

/// num / den in lowest terms (mpq_class(num, den) is not canonicalized).
Rational ratio(std::int64_t num, std::int64_t den);

Rational pow(const Rational& base, unsigned exponent);

// Elementary integer helpers.
bool is_square(std::int64_t n);
std::int64_t isqrt(std::int64_t n);
std::int64_t gcd(std::int64_t a, std::int64_t b);
int moebius(std::int64_t n);
std::vector<std::int64_t> divisors(std::int64_t n);
/// sigma_k(n) = sum of d^k over positive divisors d of n.
Integer sigma(unsigned k, std::int64_t n);

/// Full Kronecker symbol (a/n), including n <= 0 and even n.
int kronecker(std::int64_t a, std::int64_t n);

/// A discriminant D != 0 with D = 0 or 1 (mod 4), together with its
/// factorization D = D0 * f^2, D0 fundamental.
class Discriminant {
 public:
  explicit Discriminant(std::int64_t value);

  std::int64_t value() const noexcept { return value_; }
  std::int64_t fundamental() const noexcept { return fundamental_; }
  std::int64_t conductor() const noexcept { return conductor_; }
  bool is_fundamental() const noexcept { return conductor_ == 1; }
  bool is_square() const noexcept;

 private:
  std::int64_t value_;
  std::int64_t fundamental_;
  std::int64_t conductor_;
};

bool is_discriminant(std::int64_t value) noexcept;
bool is_fundamental_discriminant(std::int64_t value) noexcept;

/// n-th Bernoulli number with B_1 = -1/2.
Rational bernoulli_number(unsigned n);

/// Bernoulli polynomial B_r(x) via the binomial sum.
Rational bernoulli_polynomial(unsigned r, const Rational& x);

/// Generalized Bernoulli number B_{r, chi_D} for fundamental D.
/// Throws errc::non_fundamental otherwise.
Rational gen_bernoulli(unsigned r, std::int64_t D);

/// L_D(1 - r) for r >= 1, exact. Fundamental D uses -B_{r,chi_D}/r; other
/// discriminants go through the conductor convolution of cohen_H.
Rational dirichlet_L_value(std::int64_t D, int one_minus_r);

/// Cohen's H(r, N): coefficient of the weight r+1/2 Cohen-Eisenstein series.
Rational cohen_H(unsigned r, std::int64_t N);

}  // namespace cyclotrace::arith
