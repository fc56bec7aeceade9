#include "cyclotrace/arith.hpp"

#include <cmath>
#include <cstdlib>
#include <mutex>
#include <stdexcept>

#include "cyclotrace/error.hpp"

namespace cyclotrace::arith {

std::string to_string(const Rational& x) { return x.get_str(); }

Rational parse_rational(const std::string& text) {
  Rational r;
  if (r.set_str(text, 10) != 0) {
    throw error(errc::invalid_input, "not a rational number: '" + text + "'");
  }
  if (r.get_den() == 0) throw error(errc::invalid_input, "zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

Rational ratio(std::int64_t num, std::int64_t den) {
  Rational r{Integer(static_cast<long>(num)), Integer(static_cast<long>(den))};
  r.canonicalize();
  return r;
}

Rational pow(const Rational& base, unsigned exponent) {
  Rational out(1);
  Rational b = base;
  while (exponent != 0) {
    if (exponent & 1U) out *= b;
    b *= b;
    exponent >>= 1U;
  }
  return out;
}

std::int64_t isqrt(std::int64_t n) {
  if (n < 0) throw error(errc::invalid_input, "isqrt of a negative number");
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  using u128 = unsigned __int128;
  while (r > 0 && u128(r) * u128(r) > u128(n)) --r;
  while (u128(r + 1) * u128(r + 1) <= u128(n)) ++r;
  return r;
}

bool is_square(std::int64_t n) {
  if (n < 0) return false;
  const std::int64_t r = isqrt(n);
  return r * r == n;
}

std::int64_t gcd(std::int64_t a, std::int64_t b) {
  a = std::llabs(a);
  b = std::llabs(b);
  while (b != 0) {
    const std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

int moebius(std::int64_t n) {
  if (n <= 0) throw error(errc::invalid_input, "moebius of a non-positive number");
  int mu = 1;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    n /= p;
    if (n % p == 0) return 0;
    mu = -mu;
  }
  if (n > 1) mu = -mu;
  return mu;
}

std::vector<std::int64_t> divisors(std::int64_t n) {
  if (n <= 0) throw error(errc::invalid_input, "divisors of a non-positive number");
  std::vector<std::int64_t> small, large;
  for (std::int64_t d = 1; d * d <= n; ++d) {
    if (n % d != 0) continue;
    small.push_back(d);
    if (d != n / d) large.push_back(n / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

Integer sigma(unsigned k, std::int64_t n) {
  Integer total = 0;
  for (std::int64_t d : divisors(n)) {
    Integer term;
    mpz_ui_pow_ui(term.get_mpz_t(), static_cast<unsigned long>(d), k);
    total += term;
  }
  return total;
}

int kronecker(std::int64_t a, std::int64_t n) {
  static constexpr int kTwo[8] = {0, 1, 0, -1, 0, -1, 0, 1};
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  if ((a % 2 == 0) && (n % 2 == 0)) return 0;

  int k = 1;
  int v = 0;
  while (n % 2 == 0) {
    n /= 2;
    ++v;
  }
  if (v % 2 == 1) k = kTwo[((a % 8) + 8) % 8];
  if (n < 0) {
    n = -n;
    if (a < 0) k = -k;
  }
  // Jacobi symbol (a/n) for odd n > 0; depends only on a mod n.
  std::int64_t x = ((a % n) + n) % n;
  std::int64_t m = n;
  while (x != 0) {
    int w = 0;
    while (x % 2 == 0) {
      x /= 2;
      ++w;
    }
    if (w % 2 == 1) k *= kTwo[m % 8];
    if ((x % 4 == 3) && (m % 4 == 3)) k = -k;
    const std::int64_t r = x;
    x = m % r;
    m = r;
  }
  return m == 1 ? k : 0;
}

bool is_discriminant(std::int64_t value) noexcept {
  const std::int64_t r = ((value % 4) + 4) % 4;
  return value != 0 && (r == 0 || r == 1);
}

namespace {

bool squarefree(std::int64_t n) {
  n = std::llabs(n);
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % (p * p) == 0) return false;
    if (n % p == 0) n /= p;
  }
  return true;
}

}  // namespace

bool is_fundamental_discriminant(std::int64_t value) noexcept {
  if (!is_discriminant(value)) return false;
  const std::int64_t r = ((value % 4) + 4) % 4;
  if (r == 1) return squarefree(value);
  const std::int64_t m = value / 4;
  const std::int64_t rm = ((m % 4) + 4) % 4;
  return (rm == 2 || rm == 3) && squarefree(m);
}

Discriminant::Discriminant(std::int64_t value) : value_(value), fundamental_(0), conductor_(1) {
  if (!is_discriminant(value)) {
    throw error(errc::invalid_discriminant, std::to_string(value) + " is not 0 or 1 mod 4 (or is 0)");
  }
  // Strip the largest square, then repair the 2-part.
  std::int64_t rest = std::llabs(value);
  std::int64_t f = 1;
  std::int64_t core = 1;
  for (std::int64_t p = 2; p * p <= rest; ++p) {
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) f *= p;
    if (e % 2 == 1) core *= p;
  }
  core *= rest;
  if (value < 0) core = -core;
  const std::int64_t r = ((core % 4) + 4) % 4;
  if (r != 1) {
    core *= 4;
    f /= 2;
  }
  fundamental_ = core;
  conductor_ = f;
}

bool Discriminant::is_square() const noexcept { return value_ > 0 && arith::is_square(value_); }

Rational bernoulli_number(unsigned n) {
  static std::mutex mutex;
  static std::vector<Rational> cache{Rational(1)};
  std::lock_guard<std::mutex> lock(mutex);
  while (cache.size() <= n) {
    const unsigned m = static_cast<unsigned>(cache.size());
    // sum_{j=0}^{m} C(m+1, j) B_j = 0
    Rational acc = 0;
    Integer binom = 1;
    for (unsigned j = 0; j < m; ++j) {
      acc += binom * cache[j];
      binom = binom * (m + 1 - j) / (j + 1);
    }
    Rational b = -acc / Rational(m + 1);
    b.canonicalize();
    cache.push_back(b);
  }
  return cache[n];
}

Rational bernoulli_polynomial(unsigned r, const Rational& x) {
  Rational total = 0;
  Integer binom = 1;
  for (unsigned j = 0; j <= r; ++j) {
    total += binom * bernoulli_number(j) * pow(x, r - j);
    binom = binom * (r - j) / (j + 1);
  }
  return total;
}

Rational gen_bernoulli(unsigned r, std::int64_t D) {
  if (r == 0) throw error(errc::invalid_input, "gen_bernoulli needs r >= 1");
  if (!is_fundamental_discriminant(D)) {
    throw error(errc::non_fundamental, std::to_string(D) + " is not a fundamental discriminant");
  }
  const std::int64_t f = std::llabs(D);
  Rational total = 0;
  for (std::int64_t a = 1; a <= f; ++a) {
    const int chi = kronecker(D, a);
    if (chi == 0) continue;
    const Rational term = bernoulli_polynomial(r, Rational(static_cast<long>(a), static_cast<long>(f)));
    if (chi > 0) total += term;
    else total -= term;
  }
  return total * pow(Rational(static_cast<long>(f)), r - 1);
}

namespace {

// L_D(1-r) := L_{D0}(1-r) * sum_{d | f} mu(d) chi_{D0}(d) d^{r-1} sigma_{2r-1}(f/d)
Rational convolved_l_value(unsigned r, const Discriminant& disc) {
  const std::int64_t d0 = disc.fundamental();
  const Rational base = -gen_bernoulli(r, d0) / Rational(r);
  const std::int64_t f = disc.conductor();
  if (f == 1) return base;
  Integer conv = 0;
  for (std::int64_t d : divisors(f)) {
    const int mu = moebius(d);
    if (mu == 0) continue;
    const int chi = kronecker(d0, d);
    if (chi == 0) continue;
    Integer dpow;
    mpz_ui_pow_ui(dpow.get_mpz_t(), static_cast<unsigned long>(d), r - 1);
    conv += mu * chi * dpow * sigma(2 * r - 1, f / d);
  }
  return base * conv;
}

}  // namespace

Rational cohen_H(unsigned r, std::int64_t N) {
  if (r == 0) throw error(errc::invalid_input, "cohen_H needs r >= 1");
  if (N < 0) throw error(errc::invalid_input, "cohen_H needs N >= 0");
  if (N == 0) return -bernoulli_number(2 * r) / Rational(2 * r);
  const std::int64_t signed_n = (r % 2 == 0) ? N : -N;
  if (!is_discriminant(signed_n)) return 0;
  return convolved_l_value(r, Discriminant(signed_n));
}

Rational dirichlet_L_value(std::int64_t D, int one_minus_r) {
  if (one_minus_r > 0) throw error(errc::invalid_input, "only non-positive arguments are supported");
  const unsigned r = static_cast<unsigned>(1 - one_minus_r);
  const Discriminant disc(D);
  if (disc.is_fundamental()) return -gen_bernoulli(r, D) / Rational(r);
  const bool cohen_sign = (r % 2 == 0) ? D > 0 : D < 0;
  if (cohen_sign) return cohen_H(r, D > 0 ? D : -D);
  return convolved_l_value(r, disc);
}

}  // namespace cyclotrace::arith
