#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cyclotrace/error.hpp"
#include "cyclotrace/fqm.hpp"

using namespace cyclotrace;
using namespace cyclotrace::fqm;

namespace {

Rational r(long p, long q = 1) {
  Rational x(p, q);
  x.canonicalize();
  return x;
}

const IntLattice kP(IntMatrix{{2}});
const IntLattice kNminus({{2, 0}, {0, 2}});
const IntLattice kN({{-2, 0}, {0, -2}});
const IntLattice kForms({{0, 0, 1}, {0, -2, 0}, {1, 0, 0}});  // (a, beta, c), q = ac - beta^2

VVSeries random_series(std::mt19937& rng, const FQModule& m, int sigma) {
  VVSeries f(m.size(), m.level(), r(1, 2), 0, sigma);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(m.size()) - 1);
  std::uniform_int_distribution<int> shift(-3, 3);
  std::uniform_int_distribution<int> value(-9, 9);
  for (int t = 0; t < 6; ++t) {
    const auto mu = static_cast<std::size_t>(pick(rng));
    const Rational ex = Rational(sigma) * m.q(mu) + Rational(shift(rng));
    f.add(mu, ex, r(value(rng), 1 + std::abs(value(rng))));
  }
  return f;
}

double max_diff(const CVector& a, const CVector& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

CVector apply(const CMatrix& m, const CVector& v) {
  CVector out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

}  // namespace

TEST_CASE("discriminant groups") {
  const FQModule p = disc_group(kP);
  CHECK(p.size() == 2);
  CHECK(p.q(1) == r(1, 4));
  CHECK(p.representative(1) == RatVector{r(1, 2)});

  const FQModule nm = disc_group(kNminus);
  CHECK(nm.size() == 4);
  CHECK(nm.q(nm.index_of({r(1, 2), 0})) == r(1, 4));
  CHECK(nm.q(nm.index_of({r(1, 2), r(1, 2)})) == r(1, 2));

  const FQModule hyp = disc_group(IntLattice({{0, 1}, {1, 0}}));
  CHECK(hyp.size() == 1);

  const FQModule forms = disc_group(kForms);
  CHECK(forms.size() == 2);
  CHECK(forms.signature_mod8() == 7);
  CHECK(forms.q(forms.index_of({0, r(1, 2), 0})) == r(3, 4));
  CHECK(forms.level() == 4);

  CHECK_THROWS_AS(disc_group(IntLattice({{2, 2}, {2, 2}})), error);
  CHECK_THROWS_AS(IntLattice(IntMatrix{{1}}), error);
}

TEST_CASE("Milgram invariant and group order") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> off(-4, 4);
  std::uniform_int_distribution<int> diag(-5, 5);
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 1 + trial % 3;
    IntMatrix g(n, std::vector<std::int64_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      g[i][i] = 2 * diag(rng);
      for (std::size_t j = 0; j < i; ++j) g[i][j] = g[j][i] = off(rng);
    }
    const IntLattice lat(g);
    if (lat.det() == 0) continue;
    const FQModule m = disc_group(lat);
    REQUIRE(Integer(static_cast<unsigned long>(m.size())) == abs(lat.det()));
    REQUIRE(m.milgram_defect() < 1e-10);
    for (std::size_t i = 0; i < m.size(); ++i) {
      REQUIRE(m.index_of(m.representative(i)) == i);
      REQUIRE(m.add(i, m.negate(i)) == 0);
    }
    ++checked;
  }
  CHECK(checked > 200);
  for (const IntLattice& lat : {kP, kN, kNminus, kForms}) CHECK(disc_group(lat).milgram_defect() < 1e-10);
}

TEST_CASE("theta series coefficients") {
  const FQModule z2 = disc_group(IntLattice({{2, 0}, {0, 2}}));
  const VVSeries th = theta_series(IntLattice({{2, 0}, {0, 2}}), z2, 3);
  CHECK(th.weight() == 1);
  CHECK(th.coeff(0, 0) == 1);
  CHECK(th.coeff(0, 1) == 4);
  CHECK(th.coeff(0, 2) == 4);
  CHECK(th.coeff(z2.index_of({r(1, 2), r(1, 2)}), r(1, 2)) == 4);
  CHECK(th.satisfies_exponent_rule(z2));

  const FQModule p = disc_group(kP);
  const VVSeries tp = theta_series(kP, p, 5);
  CHECK(tp.coeff(1, r(1, 4)) == 2);
  CHECK(tp.coeff(0, 0) == 1);
  CHECK(tp.coeff(0, 1) == 2);

  CHECK_THROWS_AS(theta_series(kN, disc_group(kN), 2), error);

  // brute-force count on A2 over a wide box
  const IntLattice a2({{2, 1}, {1, 2}});
  const FQModule m = disc_group(a2);
  const VVSeries ta = theta_series(a2, m, 10);
  std::map<std::pair<std::size_t, Rational>, int> count;
  for (std::size_t mu = 0; mu < m.size(); ++mu) {
    for (long i = -12; i <= 12; ++i)
      for (long j = -12; j <= 12; ++j) {
        const RatVector x{m.representative(mu)[0] + i, m.representative(mu)[1] + j};
        const Rational qx = a2.q(x);
        if (qx <= 10) ++count[{mu, qx}];
      }
  }
  for (const auto& [key, c] : count) REQUIRE(ta.coeff(key.first, key.second) == c);
  std::size_t total = 0;
  for (const auto& [key, v] : ta.terms()) total += v.get_num().get_ui();
  std::size_t expected = 0;
  for (const auto& [key, c] : count) expected += c;
  CHECK(total == expected);
}

TEST_CASE("tensor products") {
  VVSeries f(2, 4, r(1, 2), 0, 1);
  f.add(1, r(1, 4), 3);
  VVSeries g(3, 2, 1, 1, 1);
  g.add(2, r(3, 2), 5);
  const VVSeries t = tensor(f, g);
  CHECK(t.components() == 6);
  CHECK(t.coeff(1 * 3 + 2, r(7, 4)) == 15);
  CHECK(t.weight() == r(3, 2));
  CHECK(t.pi_power() == 1);
  VVSeries one(1, 1, 0, 0, 1);
  one.add(0, 0, 1);
  CHECK(tensor(f, one) == f);

  const FQModule p = disc_group(kP);
  const FQModule nm = disc_group(kNminus);
  const VVSeries tp = theta_series(kP, p, 4);
  const VVSeries tn = theta_series(kNminus, nm, 4);
  const VVSeries prod = tensor(tp, tn);
  // coefficient at (0, 0), exponent 2: sum over splittings 2 = a + b
  Rational conv = 0;
  for (long a = 0; a <= 2; ++a) conv += tp.coeff(0, a) * tn.coeff(0, 2 - a);
  CHECK(prod.coeff(0, 2) == conv);
  CHECK(conv == 12);  // 1 * 4 + 2 * 4 + 0 * 1
}

TEST_CASE("Rankin-Cohen brackets") {
  const Rational kappa = r(3, 2), ell = 1;
  VVSeries f(2, 4, kappa, 1, -1);
  f.add(1, r(3, 4), 2);
  VVSeries g(4, 4, ell, 0, -1);
  g.add(3, r(1, 2), 5);
  const VVSeries b1 = rankin_cohen(f, g, 1);
  CHECK(b1.coeff(1 * 4 + 3, r(5, 4)) == (kappa * r(1, 2) - ell * r(3, 4)) * 10);
  CHECK(b1.weight() == kappa + ell + 2);
  CHECK(b1.pi_power() == 1);
  CHECK(rankin_cohen(f, g, 0) == tensor(f, g));

  // no constant term for n >= 1 from holomorphic inputs
  VVSeries h(2, 4, kappa, 0, 1);
  h.add(0, 0, 7);
  h.add(0, 1, 2);
  VVSeries k(1, 4, ell, 0, 1);
  k.add(0, 0, 3);
  k.add(0, 2, 1);
  for (unsigned n = 1; n <= 3; ++n) CHECK(rankin_cohen(h, k, n).coeff(0, 0) == 0);

  // bilinearity
  std::mt19937 rng(5);
  const FQModule p = disc_group(kP);
  const FQModule nm = disc_group(kNminus);
  for (int t = 0; t < 20; ++t) {
    const VVSeries f1 = random_series(rng, p, 1), f2 = random_series(rng, p, 1);
    VVSeries fs = f1;
    for (const auto& [key, v] : f2.terms()) fs.add_scaled(key.first, key.second, 3 * v);
    const VVSeries gg = random_series(rng, nm, 1);
    for (unsigned n = 0; n <= 2; ++n) {
      VVSeries expect = rankin_cohen(f1, gg, n);
      const VVSeries other = rankin_cohen(f2, gg, n);
      for (const auto& [key, v] : other.terms()) expect.add_scaled(key.first, key.second, 3 * v);
      REQUIRE(rankin_cohen(fs, gg, n) == expect);
    }
  }
  VVSeries bad(1, 1, -2, 0, 1);
  bad.add(0, 1, 1);
  CHECK_THROWS_AS(rankin_cohen(bad, k, 1), error);
  CHECK_THROWS_AS(rankin_cohen(f, k, 1), error);  // sigma mismatch
}

TEST_CASE("constant term pairing") {
  VVSeries f(2, 1, 0, 0, 1);
  f.add(0, -1, 1);
  VVSeries g(2, 1, 0, 0, -1);
  g.add(0, 1, 1);
  CHECK(ct_pairing(f, g).value == 1);
  VVSeries h(2, 1, 0, 0, -1);
  h.add(1, 1, 1);
  CHECK(ct_pairing(f, h).value == 0);

  std::mt19937 rng(9);
  const FQModule nm = disc_group(kNminus);
  for (int t = 0; t < 50; ++t) {
    const VVSeries a = random_series(rng, nm, 1);
    const VVSeries b = random_series(rng, nm, -1);
    REQUIRE(ct_pairing(a, b) == ct_pairing(b, a));
  }

  VVSeries truncated(2, 1, 0, 0, -1, 2);
  truncated.add(0, 1, 1);
  VVSeries deep(2, 1, 0, 0, 1);
  deep.add(0, -3, 1);
  try {
    (void)ct_pairing(deep, truncated);
    FAIL("expected InsufficientPrecision");
  } catch (const error& ex) {
    CHECK(ex.code() == errc::insufficient_precision);
  }
}

TEST_CASE("restriction and trace along P + N in the lattice of forms") {
  const IntLattice K = direct_sum(kP, kN);
  const LatticeEmbedding emb(K, kForms, {{1, 1, 0}, {0, 0, 1}, {1, -1, 0}});
  CHECK(emb.index() == 2);
  CHECK(emb.source_module().size() == 8);
  CHECK(emb.target_module().size() == 2);
  std::size_t in_image = 0;
  for (const auto& m : emb.component_map()) in_image += m ? 1 : 0;
  CHECK(in_image == 4);

  VVSeries f(2, 4, r(-1, 2), 0, 1);
  f.add(0, -3, 1);
  f.add(0, 0, 240);
  const VVSeries fk = restrict(f, emb);
  std::set<std::size_t> nonzero;
  for (const auto& [key, v] : fk.terms()) nonzero.insert(key.first);
  CHECK(nonzero.size() <= 4);
  CHECK(fk.satisfies_exponent_rule(emb.source_module()));

  // identity embedding
  const LatticeEmbedding id(kForms, kForms, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
  CHECK(restrict(f, id) == f);
  CHECK(trace_up(f, id) == f);

  CHECK_THROWS_AS(LatticeEmbedding(K, kForms, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}), error);

  // adjointness: <f, g^L> = <f_K, g>
  std::mt19937 rng(21);
  const FQModule& km = emb.source_module();
  const FQModule& lm = emb.target_module();
  for (int t = 0; t < 100; ++t) {
    const VVSeries fl = random_series(rng, lm, 1);
    const VVSeries gk = random_series(rng, km, -1);
    REQUIRE(ct_pairing(fl, trace_up(gk, emb)) == ct_pairing(restrict(fl, emb), gk));
  }
}

TEST_CASE("theta of a lattice is the trace of the theta of a sublattice") {
  const IntLattice a2({{2, 1}, {1, 2}});
  const IntLattice k({{8, 2}, {2, 2}});  // basis (2, 0), (0, 1)
  const LatticeEmbedding emb(k, a2, {{2, 0}, {0, 1}});
  CHECK(emb.index() == 2);
  const VVSeries tl = theta_series(a2, emb.target_module(), 20);
  const VVSeries tk = theta_series(k, emb.source_module(), 20);
  CHECK(trace_up(tk, emb).rescaled(12) == tl.rescaled(12));
}

TEST_CASE("Weil representation") {
  const FQModule p = disc_group(kP);
  const auto [t, s] = weil_matrices(p);
  CHECK(std::abs(t[0][0] - 1.0) < 1e-15);
  CHECK(std::abs(t[1][1] - std::complex<double>(0, 1)) < 1e-15);
  const auto [t1, s1] = weil_matrices(disc_group(IntLattice({{0, 1}, {1, 0}})));
  CHECK(std::abs(s1[0][0] - 1.0) < 1e-15);
  for (const IntLattice& lat : {kP, kN, kNminus, kForms, direct_sum(kP, kN), IntLattice({{2, 1}, {1, 4}})}) {
    const FQModule m = disc_group(lat);
    const auto [tt, ss] = weil_matrices(m);
    const std::size_t n = m.size();
    // unitarity
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> acc = 0;
        for (std::size_t l = 0; l < n; ++l) acc += ss[i][l] * std::conj(ss[j][l]);
        REQUIRE(std::abs(acc - (i == j ? 1.0 : 0.0)) < 1e-12);
      }
    // S^2 is a phase times mu -> -mu
    std::complex<double> phase = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::complex<double> acc = 0;
        for (std::size_t l = 0; l < n; ++l) acc += ss[i][l] * ss[l][j];
        if (i == m.negate(j)) {
          if (phase == 0.0) phase = acc;
          REQUIRE(std::abs(acc - phase) < 1e-12);
        } else {
          REQUIRE(std::abs(acc) < 1e-12);
        }
      }
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-12);
  }
}

TEST_CASE("theta transformation under T and S") {
  const std::complex<double> tau(0.3, 1.0);
  for (const IntLattice& lat : {kP, kNminus, IntLattice({{2, 1}, {1, 2}}), IntLattice({{2, 1}, {1, 4}})}) {
    const FQModule m = disc_group(lat);
    const auto [t, s] = weil_matrices(m);
    const CVector th = theta_value(lat, m, tau);
    CHECK(max_diff(theta_value(lat, m, tau + 1.0), apply(t, th)) < 1e-6);
    const double w = static_cast<double>(lat.rank()) / 2.0;
    CVector rhs = apply(s, th);
    for (auto& x : rhs) x *= std::pow(tau, w);
    CHECK(max_diff(theta_value(lat, m, -1.0 / tau), rhs) < 1e-6);
  }
}

TEST_CASE("Siegel theta splits at the CM point i") {
  const FQModule lm = disc_group(kForms);
  const std::complex<double> tau(0, 2), z(0, 1);
  const CVector siegel = siegel_theta_eval(lm, tau, z, 8);
  const CVector wider = siegel_theta_eval(lm, tau, z, 12);
  CHECK(max_diff(siegel, wider) < 1e-10);

  const IntLattice K = direct_sum(kP, kN);
  const LatticeEmbedding emb(K, kForms, {{1, 1, 0}, {0, 0, 1}, {1, -1, 0}});
  const FQModule pm = disc_group(kP);
  const FQModule nm = disc_group(kNminus);
  const FQModule n = disc_group(kN);
  const CVector tp = theta_value(kP, pm, tau);
  const CVector tn = theta_value(kNminus, nm, tau);
  const auto to_n = identify(nm, n);
  const auto into_k = sum_identification(pm, n, emb.source_module());
  CVector split(emb.source_module().size(), 0.0);
  for (std::size_t i = 0; i < pm.size(); ++i)
    for (std::size_t j = 0; j < nm.size(); ++j)
      split[into_k[i * n.size() + *to_n[j]]] += tau.imag() * tp[i] * std::conj(tn[j]);
  const CVector traced = trace_up(split, emb);
  CHECK(max_diff(traced, siegel) < 1e-8);

  // tau -> tau + 1 acts through rho(T)
  const auto [t, s] = weil_matrices(lm);
  const CVector shifted = siegel_theta_eval(lm, tau + 1.0, std::complex<double>(0.2, 1.3), 8);
  const CVector base = siegel_theta_eval(lm, tau, std::complex<double>(0.2, 1.3), 8);
  CHECK(max_diff(shifted, apply(t, base)) < 1e-8);
}

TEST_CASE("series text format round trip") {
  VVSeries f(3, 4, r(3, 2), 1, -1, 12);
  f.add(0, 0, r(4, 3));
  f.add(2, r(3, 4), r(-16, 3));
  const std::string text = f.serialize();
  CHECK(text.rfind("3/2\t1\t-1\t4\t12\t3\n", 0) == 0);
  CHECK(VVSeries::parse(text) == f);
  VVSeries g(1, 1, 0, 0, 1);
  g.add(0, 2, 7);
  CHECK(VVSeries::parse(g.serialize()) == g);
  CHECK_THROWS_AS(VVSeries::parse("garbage"), error);
}
