#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>

#include "cyclotrace/bqf.hpp"
#include "cyclotrace/error.hpp"
#include "cyclotrace/special_forms.hpp"
#include "oracles.hpp"

using namespace cyclotrace;
using arith::Rational;
using special::PrincipalPartConvention;

namespace {

std::vector<std::int64_t> admissible(std::int64_t max) {
  std::vector<std::int64_t> out;
  for (std::int64_t D = 5; D <= max; ++D)
    if (arith::is_discriminant(D) && !arith::is_square(D) && bqf::hypothesis_check(D, -4)) out.push_back(D);
  return out;
}

}  // namespace

TEST_CASE("hurwitz: form count matches the class number relations") {
  const auto ref = oracle::hurwitz_recursion(400);
  for (std::int64_t n = 0; n <= 400; ++n) REQUIRE(special::hurwitz(n) == ref[n]);
  CHECK(special::hurwitz(0) == Rational(-1, 12));
  CHECK(special::hurwitz(3) == Rational(1, 3));
  CHECK(special::hurwitz(4) == Rational(1, 2));
  CHECK(special::hurwitz(23) == 3);
  CHECK(special::hurwitz(27) == Rational(4, 3));  // [1,1,7] plus [3,3,3] at weight 1/3
  for (std::int64_t n = 1; n <= 400; ++n)
    if (n % 4 == 1 || n % 4 == 2) CHECK(special::hurwitz(n) == 0);
  for (std::int64_t n = 0; n <= 100; ++n) CHECK(arith::cohen_H(1, n) == special::hurwitz(n));
  CHECK_THROWS_AS(special::hurwitz(-1), error);
}

TEST_CASE("hurwitz table is independent of the thread count") {
  special::HurwitzTable one(300, 1), four(300, 4);
  CHECK(one.values() == four.values());
  CHECK(one.max() == 300);
  CHECK(one[12] == Rational(4, 3));
}

TEST_CASE("hurwitz_gen and theta_N_minus obey the exponent rule") {
  const auto& L = special::lattices();
  const auto G = special::hurwitz_gen(10);
  CHECK(G.satisfies_exponent_rule(L.P_module));
  CHECK(G.sigma() == -1);
  CHECK(G.weight() == Rational(3, 2));
  CHECK(G.pi_power() == 1);
  CHECK(G.coeff(0, 0) == Rational(4, 3));
  CHECK(G.coeff(0, 3) == -16 * special::hurwitz(12));
  CHECK(G.coeff(1, Rational(3, 4)) == Rational(-16, 3));

  const auto T = special::theta_N_minus(6);
  CHECK(T.satisfies_exponent_rule(L.N_minus_module));
  // r_2(5) = 8 on the trivial class
  CHECK(T.coeff(0, 5) == 8);
  std::int64_t total = 0;
  for (const auto& [key, v] : T.terms())
    if (T.exponent(key.second) == Rational(5, 4)) total += v.get_num().get_si();
  CHECK(total == 8);  // (x, y) in (Z/2)^2 with x^2 + y^2 = 5/4: (1/2, 1), (1, 1/2) up to sign
}

TEST_CASE("lattice data") {
  const auto& L = special::lattices();
  CHECK(L.embedding.index() == 2);
  CHECK(L.embedding.target_module().size() == 2);
  CHECK(L.embedding.source_module().size() == 8);
  CHECK(L.embedding.target_module().signature_mod8() == 7);
  std::size_t image = 0;
  for (const auto& m : L.embedding.component_map()) image += m.has_value();
  CHECK(image == 4);
}

TEST_CASE("constant term of f_D against L_D(-1)") {
  for (std::int64_t D = 5; D <= 200; ++D) {
    if (!arith::is_discriminant(D) || arith::is_square(D)) continue;
    CAPTURE(D);
    CHECK(special::fD_const_term(2, D) == -120 * oracle::zagier_L_minus1(D));
  }
  CHECK(special::fD_const_term(2, 5) == 48);
  CHECK(special::fD_const_term(2, 12) == 240);
}

TEST_CASE("build_fD principal part") {
  const auto f12 = special::build_fD(2, 12);
  CHECK(f12.weight == Rational(-1, 2));
  CHECK(f12.series.terms().size() == 2);
  CHECK(f12.series.coeff(0, -3) == 1);
  CHECK(f12.series.coeff(0, 0) == 240);

  const auto f5 = special::build_fD(2, 5);
  CHECK(f5.series.coeff(1, Rational(-5, 4)) == 1);
  CHECK(f5.series.coeff(0, 0) == 48);
  CHECK(f5.series.satisfies_exponent_rule(special::lattices().embedding.target_module()));

  const auto f4 = special::build_fD(4, 12);
  CHECK(f4.weight == Rational(-5, 2));

  CHECK_THROWS_AS(special::build_fD(2, 9), error);
  CHECK_THROWS_AS(special::build_fD(2, 7), error);
  CHECK_THROWS_AS(special::build_fD(3, 12), error);
}

TEST_CASE("exact trace equals the closed formulas") {
  CHECK(special::rhs_trace(2, 12) == 24);
  CHECK(special::rhs_trace(4, 12) == 72);
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t n = 0;
  for (int k : {2, 4})
    for (auto D : admissible(100)) {
      CAPTURE(k);
      CAPTURE(D);
      CHECK(special::rhs_trace(k, D) == special::closed_formula(k, D));
      ++n;
    }
  CHECK(n == 36);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() < 30.0);
}

TEST_CASE("other 2-torsion conventions disagree") {
  for (auto D : {12, 21, 24}) {
    for (int k : {2, 4}) {
      CHECK(special::rhs_trace(k, D, PrincipalPartConvention::kUnit) == 2 * special::closed_formula(k, D));
      CHECK(special::rhs_trace(k, D, PrincipalPartConvention::kDoubled) == 4 * special::closed_formula(k, D));
    }
  }
}

TEST_CASE("rhs_trace rejects bad input") {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const error& e) {
      return e.code();
    }
    return errc::invalid_input;
  };
  CHECK(code([] { special::rhs_trace(2, 8); }) == errc::hypothesis_violated);   // 8 = 2^2 + 4
  CHECK(code([] { special::rhs_trace(2, 13); }) == errc::hypothesis_violated);  // 13 = 3^2 + 4
  CHECK(code([] { special::rhs_trace(3, 12); }) == errc::unsupported_k);
  CHECK(code([] { special::rhs_trace(2, 16); }) == errc::square_discriminant);
  CHECK(code([] { special::rhs_trace(2, 14); }) == errc::invalid_discriminant);
  CHECK(code([] { special::closed_formula(6, 12); }) == errc::unsupported_k);
}
