#pragma once

// Concrete modular objects for the CM point i (d = -4): Hurwitz class
// numbers, the vector-valued Hurwitz generating series, the theta series of
// N^- = (Z^2, x^2 + y^2), the principal part of f_D, and the exact trace.

#include <cstdint>
#include <vector>

#include "cyclotrace/arith.hpp"
#include "cyclotrace/fqm.hpp"

namespace cyclotrace::special {

using arith::Rational;

/// H(0..max) by counting reduced forms.
class HurwitzTable {
 public:
  explicit HurwitzTable(std::int64_t max, unsigned threads = 1);

  std::int64_t max() const noexcept { return static_cast<std::int64_t>(values_.size()) - 1; }
  const Rational& operator[](std::int64_t n) const { return values_.at(static_cast<std::size_t>(n)); }
  const std::vector<Rational>& values() const noexcept { return values_; }

 private:
  std::vector<Rational> values_;
};

/// Hurwitz class number: reduced forms of discriminant -n, with multiples of
/// [1,0,1] weighted 1/2 and multiples of [1,1,1] weighted 1/3; H(0) = -1/12.
Rational hurwitz(std::int64_t n);

/// The lattices and embedding behind the exact side.
struct Lattices {
  fqm::IntLattice forms;  // (a, beta, c), q = ac - beta^2
  fqm::IntLattice P;      // Z (1,0,1), q = x^2
  fqm::IntLattice N;      // span of (1,0,-1), (0,1,0), q = -x^2 - y^2
  fqm::IntLattice N_minus;
  fqm::IntLattice K;      // P + N, index 2 in `forms`
  fqm::LatticeEmbedding embedding;
  fqm::FQModule P_module;
  fqm::FQModule N_module;
  fqm::FQModule N_minus_module;
};

const Lattices& lattices();

/// -16 H(4n) e(n tau) on component mu (n = -q(mu) mod 1), pi_power 1,
/// weight 3/2, sigma = -1. Complete up to exponent prec.
fqm::VVSeries hurwitz_gen(const Rational& prec);

/// Theta series of N^- over its own discriminant module.
fqm::VVSeries theta_N_minus(const Rational& prec);

/// Constant term of f_D: -cohen_H(k, D) / cohen_H(k, 0).
Rational fD_const_term(int k, std::int64_t D);

struct PlusForm {
  Rational weight;
  std::int64_t D = 0;
  Rational constant_term;
  fqm::VVSeries series;  // over the discriminant module of the lattice of forms
};

/// Principal part and constant term of f_D (weight 3/2 - k), complete for
/// exponents <= 0.
PlusForm build_fD(int k, std::int64_t D);

/// Weight given to the terms of f_D on components with mu = -mu, where
/// e_mu + e_{-mu} collapses to 2 e_mu. For the lattice of forms this is every
/// component, constant term included.
enum class PrincipalPartConvention { kHalved, kUnit, kDoubled };

/// Exact trace from the bracket pipeline: restrict f_D to P + N, pair with
/// [G_P, Theta_{N^-}]_{k/2-1} and scale by 2^{k-3} |d|^{1/2} / (pi |Gamma_z|).
/// Throws errc::hypothesis_violated, errc::unsupported_k (odd k).
Rational rhs_trace(int k, std::int64_t D,
                   PrincipalPartConvention convention = PrincipalPartConvention::kHalved);

/// Closed formulas for k = 2 and k = 4 in terms of L_D(-1) and H(n).
/// Throws errc::unsupported_k otherwise.
Rational closed_formula(int k, std::int64_t D);

}  // namespace cyclotrace::special
