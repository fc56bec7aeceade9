#pragma once

// Independent reference computations. Nothing here calls the code under
// test except the elementary arithmetic helpers (kronecker, moebius), which
// have their own brute-force tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include "cyclotrace/arith.hpp"

namespace oracle {

using cyclotrace::arith::Rational;

inline std::int64_t isqrt_floor(std::int64_t n) {
  std::int64_t r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline std::int64_t sum_divisors(std::int64_t n) {
  std::int64_t s = 0;
  for (std::int64_t d = 1; d <= n; ++d)
    if (n % d == 0) s += d;
  return s;
}

// sum over d | n of min(d, n/d) or max(d, n/d)
inline std::int64_t lambda(std::int64_t n, bool use_max) {
  std::int64_t s = 0;
  for (std::int64_t d = 1; d <= n; ++d)
    if (n % d == 0) s += use_max ? std::max(d, n / d) : std::min(d, n / d);
  return s;
}

// H(n) from the class number relations
//   sum_s H(4n - s^2) = sum_{d|n} max(d, n/d)
//   sum_s H(n - s^2)  = sigma(n)/3 - lambda(n)/2   (n odd)
// solved upward, with H(0) = -1/12 and H(n) = 0 for n = 1, 2 mod 4.
inline std::vector<Rational> hurwitz_recursion(std::int64_t max) {
  std::vector<Rational> H(static_cast<std::size_t>(max) + 1, Rational(0));
  H[0] = Rational(-1, 12);
  for (std::int64_t n = 3; n <= max; ++n) {
    if (n % 4 == 1 || n % 4 == 2) continue;
    Rational rest = 0;
    Rational rhs;
    if (n % 4 == 0) {
      const std::int64_t m = n / 4;
      rhs = lambda(m, true);
    } else {
      rhs = Rational(sum_divisors(n)) / 3 - Rational(lambda(n, false)) / 2;
    }
    for (std::int64_t s = 1; s * s <= n; ++s) rest += 2 * H[static_cast<std::size_t>(n - s * s)];
    H[static_cast<std::size_t>(n)] = rhs - rest;
  }
  return H;
}

// L_D(-1) for a non-square discriminant D > 0, D = D0 f^2:
//   L_D(s) = L_{D0}(s) sum_{d|f} mu(d) chi_{D0}(d) d^{-s} sigma_{1-2s}(f/d),
//   L_{D0}(-1) = -B_{2,chi}/2,  B_{2,chi} = D0 sum_{a=1}^{D0} chi(a) B_2(a/D0).
inline Rational zagier_L_minus1(std::int64_t D) {
  std::int64_t f = 1;
  std::int64_t D0 = D;
  for (std::int64_t g = 2; g * g <= D; ++g) {
    while (D0 % (g * g) == 0) {
      const std::int64_t c = D0 / (g * g);
      if (c % 4 != 0 && c % 4 != 1) break;
      D0 = c;
      f *= g;
    }
  }
  Rational B2 = 0;
  for (std::int64_t a = 1; a <= D0; ++a) {
    Rational x(a);
    x /= D0;
    B2 += cyclotrace::arith::kronecker(D0, a) * (x * x - x + Rational(1, 6));
  }
  B2 *= D0;
  Rational conv = 0;
  for (std::int64_t d = 1; d <= f; ++d) {
    if (f % d != 0) continue;
    std::int64_t s3 = 0;
    for (std::int64_t e = 1; e <= f / d; ++e)
      if ((f / d) % e == 0) s3 += e * e * e;
    conv += cyclotrace::arith::moebius(d) * cyclotrace::arith::kronecker(D0, d) * d * s3;
  }
  return -B2 / 2 * conv;
}

// A geodesic of discriminant D passes through i (up to SL2(Z)) exactly when
// some [a, b, -a] has discriminant D, i.e. D = b^2 + 4a^2 with a != 0.
inline bool hypothesis_d4_brute(std::int64_t D) {
  for (std::int64_t a = 1; 4 * a * a <= D; ++a) {
    const std::int64_t r = D - 4 * a * a;
    const std::int64_t b = isqrt_floor(r);
    if (b * b == r) return false;
  }
  return true;
}

// Eisenstein series and Delta from their q-expansions (|q| small enough).
inline std::complex<double> eisenstein(int k, std::complex<double> tau, int terms = 200) {
  const std::complex<double> q = std::exp(2.0 * std::numbers::pi * std::complex<double>(0, 1) * tau);
  const double c = k == 4 ? 240.0 : -504.0;
  std::complex<double> s = 1.0, qn = 1.0;
  for (int n = 1; n <= terms; ++n) {
    qn *= q;
    double sig = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) sig += std::pow(d, k - 1);
    s += c * sig * qn;
  }
  return s;
}

// d/dtau E6
inline std::complex<double> eisenstein6_derivative(std::complex<double> tau, int terms = 200) {
  const std::complex<double> I(0, 1);
  const std::complex<double> q = std::exp(2.0 * std::numbers::pi * I * tau);
  std::complex<double> s = 0.0, qn = 1.0;
  for (int n = 1; n <= terms; ++n) {
    qn *= q;
    double sig = 0;
    for (int d = 1; d <= n; ++d)
      if (n % d == 0) sig += std::pow(d, 5);
    s += -504.0 * n * sig * qn;
  }
  return 2.0 * std::numbers::pi * I * s;
}

inline std::complex<double> delta(std::complex<double> tau) {
  const auto e4 = eisenstein(4, tau), e6 = eisenstein(6, tau);
  return (e4 * e4 * e4 - e6 * e6) / 1728.0;
}

// f_{2,[1,0,1]} = C E4 Delta / E6^2. Only [1,0,1] vanishes at i, so
// f ~ (8/pi) (z - i)^-2 (2i)^-2 = -(2/pi) (z - i)^-2 there; with
// E6 ~ E6'(i) (z - i) this fixes C = -(2/pi) E6'(i)^2 / (E4(i) Delta(i)).
inline double poincare_constant() {
  const std::complex<double> i(0, 1);
  const auto d6 = eisenstein6_derivative(i);
  return (-(2.0 / std::numbers::pi) * d6 * d6 / (eisenstein(4, i) * delta(i))).real();
}

// Direct truncated class sum (|d|^{(k+1)/2}/pi) sum Q(z,1)^{-k} over all
// positive definite forms of discriminant d with a <= a_max and |b| <= b_max
// (class number one only).
inline std::complex<double> class_sum_brute(std::complex<double> z, int k, std::int64_t d, std::int64_t a_max,
                                            std::int64_t b_max) {
  std::complex<double> s = 0;
  for (std::int64_t a = 1; a <= a_max; ++a)
    for (std::int64_t b = -b_max; b <= b_max; ++b) {
      const std::int64_t num = b * b - d;
      if (num % (4 * a) != 0) continue;
      const double c = static_cast<double>(num / (4 * a));
      s += std::pow((static_cast<double>(a) * z + static_cast<double>(b)) * z + c, -k);
    }
  return std::pow(static_cast<double>(-d), (k + 1) / 2.0) / std::numbers::pi * s;
}

}  // namespace oracle
