#include "cyclotrace/special_forms.hpp"

#include <algorithm>
#include <thread>

#include "cyclotrace/bqf.hpp"
#include "cyclotrace/error.hpp"

namespace cyclotrace::special {

namespace {

using fqm::IntLattice;
using fqm::IntMatrix;
using fqm::VVSeries;

Rational hurwitz_positive(std::int64_t n) {
  Rational h = 0;
  for (std::int64_t a = 1; 3 * a * a <= n; ++a) {
    for (std::int64_t b = -a + 1; b <= a; ++b) {
      const std::int64_t num = b * b + n;
      if (num % (4 * a) != 0) continue;
      const std::int64_t c = num / (4 * a);
      if (c < a || (c == a && b < 0)) continue;
      if (b == 0 && a == c) h += Rational(1, 2);
      else if (b == a && a == c) h += Rational(1, 3);
      else h += 1;
    }
  }
  return h;
}

void check_D(std::int64_t D) {
  if (D <= 0 || !arith::is_discriminant(D)) {
    throw error(errc::invalid_discriminant, "D = " + std::to_string(D) + " is not a positive discriminant");
  }
  if (arith::is_square(D)) {
    throw error(errc::square_discriminant, "D = " + std::to_string(D) + " is a square");
  }
}

void check_even_k(int k) {
  if (k < 2 || k % 2 != 0) {
    throw error(errc::unsupported_k, "k = " + std::to_string(k) + " must be even and >= 2");
  }
}

}  // namespace

Rational hurwitz(std::int64_t n) {
  if (n < 0) throw error(errc::invalid_input, "H(n) needs n >= 0");
  if (n == 0) return Rational(-1, 12);
  if (n % 4 == 1 || n % 4 == 2) return 0;
  return hurwitz_positive(n);
}

HurwitzTable::HurwitzTable(std::int64_t max, unsigned threads) {
  if (max < 0) throw error(errc::invalid_input, "HurwitzTable needs max >= 0");
  values_.resize(static_cast<std::size_t>(max) + 1);
  threads = std::max(1u, threads);
  auto work = [this, max, threads](unsigned t) {
    for (std::int64_t n = t; n <= max; n += threads) values_[static_cast<std::size_t>(n)] = hurwitz(n);
  };
  if (threads == 1) {
    work(0);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
}

const Lattices& lattices() {
  static const Lattices L = [] {
    IntLattice forms(IntMatrix{{0, 0, 1}, {0, -2, 0}, {1, 0, 0}});
    IntLattice P(IntMatrix{{2}});
    IntLattice N(IntMatrix{{-2, 0}, {0, -2}});
    IntLattice K = fqm::direct_sum(P, N);
    fqm::LatticeEmbedding emb(K, forms, IntMatrix{{1, 1, 0}, {0, 0, 1}, {1, -1, 0}});
    return Lattices{forms,
                    P,
                    N,
                    N.negated(),
                    K,
                    emb,
                    fqm::disc_group(P),
                    fqm::disc_group(N),
                    fqm::disc_group(N.negated())};
  }();
  return L;
}

VVSeries hurwitz_gen(const Rational& prec) {
  const auto& mod = lattices().P_module;
  VVSeries g(mod.size(), 4, Rational(3, 2), 1, -1);
  const std::int64_t top = g.scale(prec) >= 0 ? g.scale(prec) : -1;  // scaled by 4: 4n = H argument
  for (std::int64_t m = 0; m <= top; ++m) {
    // exponent m/4; component fixed by m = -4 q(mu) mod 4
    const Rational ex = arith::ratio(m, 4);
    const Rational h = hurwitz(m);
    if (h == 0) continue;
    for (std::size_t mu = 0; mu < mod.size(); ++mu) {
      const Rational r = ex + mod.q(mu);
      if (r.get_den() == 1) g.add(mu, ex, -16 * h);
    }
  }
  g.set_precision(top);
  return g;
}

VVSeries theta_N_minus(const Rational& prec) {
  const auto& L = lattices();
  return fqm::theta_series(L.N_minus, L.N_minus_module, prec);
}

Rational fD_const_term(int k, std::int64_t D) {
  return -arith::cohen_H(k, D) / arith::cohen_H(k, 0);
}

PlusForm build_fD(int k, std::int64_t D) {
  check_even_k(k);
  check_D(D);
  const auto& module = lattices().embedding.target_module();
  VVSeries s(module.size(), 4, Rational(3, 2) - k, 0, 1, 0);
  const std::size_t mu = module.index_of({0, arith::ratio(D % 2, 2), 0});
  const Rational c0 = fD_const_term(k, D);
  s.add(mu, arith::ratio(-D, 4), 1);
  s.add(0, 0, c0);
  return PlusForm{s.weight(), D, c0, s};
}

Rational rhs_trace(int k, std::int64_t D, PrincipalPartConvention convention) {
  check_even_k(k);
  check_D(D);
  if (!bqf::hypothesis_check(D, -4)) {
    throw error(errc::hypothesis_violated, "a CM point of discriminant -4 lies on a geodesic of discriminant " +
                                               std::to_string(D));
  }
  const auto& L = lattices();
  const PlusForm f = build_fD(k, D);
  const auto& target = L.embedding.target_module();

  // Terms of f_D on self-dual components (mu = -mu, here all of L'/L) get the
  // convention weight before restriction.
  Rational w = 1;
  if (convention == PrincipalPartConvention::kHalved) w = Rational(1, 2);
  if (convention == PrincipalPartConvention::kDoubled) w = 2;
  const auto& src = f.series;
  VVSeries fw(src.components(), src.denominator(), src.weight(), src.pi_power(), src.sigma(), src.precision());
  for (const auto& [key, v] : f.series.terms()) {
    fw.add_scaled(key.first, key.second, target.negate(key.first) == key.first ? w * v : v);
  }
  const VVSeries fK = fqm::restrict(fw, L.embedding);

  const Rational prec = arith::ratio(D, 4) + 1;
  VVSeries G = hurwitz_gen(prec);
  VVSeries theta = theta_N_minus(prec).relabelled(fqm::identify(L.N_minus_module, L.N_module), L.N_module.size());
  theta.set_sigma(-1);

  VVSeries bracket = fqm::rankin_cohen(G, theta, static_cast<unsigned>(k / 2 - 1));
  const auto ids = fqm::sum_identification(L.P_module, L.N_module, L.embedding.source_module());
  std::vector<std::optional<std::size_t>> map(ids.begin(), ids.end());
  VVSeries onK = bracket.relabelled(map, L.embedding.source_module().size());

  const fqm::PiRational ct = fqm::ct_pairing(fK, onK);
  if (ct.pi_power != 1) throw error(errc::invalid_input, "unexpected power of pi in the pairing");
  // 2^{k-3} |d|^{1/2} / (pi |Gamma_z|) with |d| = 4, |Gamma_z| = 2
  const Rational scale = k >= 3 ? arith::pow(Rational(2), k - 3) : Rational(1, 2);
  return scale * ct.value;
}

Rational closed_formula(int k, std::int64_t D) {
  if (k != 2 && k != 4) throw error(errc::unsupported_k, "closed formula only for k = 2, 4");
  check_D(D);
  Rational sum = 0;
  const std::int64_t r = arith::isqrt(D);
  for (std::int64_t n = -r; n <= r; ++n) {
    if ((n - D) % 2 != 0) continue;
    for (std::int64_t m = -r; m <= r; ++m) {
      const std::int64_t rest = D - n * n - m * m;
      if (rest < 0) continue;
      const Rational h = hurwitz(rest);
      if (k == 2) sum += h;
      else sum += (4 * D - 10 * n * n - 10 * m * m) * h;
    }
  }
  if (k == 2) return -40 * arith::dirichlet_L_value(D, -1) - 4 * sum;
  return sum;
}

}  // namespace cyclotrace::special
