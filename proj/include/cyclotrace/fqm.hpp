#pragma once

// Even lattices, their discriminant forms, and sparse vector-valued q-series
// with the operations needed for the exact trace: tensor products,
// restriction and trace maps, Rankin-Cohen brackets and constant-term
// pairings. Numeric helpers cover theta values and the Weil representation.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cyclotrace/arith.hpp"

namespace cyclotrace::fqm {

using arith::Integer;
using arith::Rational;

using IntMatrix = std::vector<std::vector<std::int64_t>>;
using RatVector = std::vector<Rational>;
using CVector = std::vector<std::complex<double>>;
using CMatrix = std::vector<CVector>;

/// Even lattice Z^n with q(x) = x^T G x / 2.
class IntLattice {
 public:
  explicit IntLattice(IntMatrix gram);

  std::size_t rank() const noexcept { return gram_.size(); }
  const IntMatrix& gram() const noexcept { return gram_; }
  Rational q(const RatVector& x) const;
  Rational bilinear(const RatVector& x, const RatVector& y) const;
  Integer det() const;
  /// (positive, negative) eigenvalue counts.
  std::pair<int, int> signature() const;
  bool positive_definite() const;
  IntLattice negated() const;

 private:
  IntMatrix gram_;
};

IntLattice direct_sum(const IntLattice& a, const IntLattice& b);

/// Finite quadratic module L'/L. Elements are indexed in mixed radix over
/// the generator orders, first generator most significant.
class FQModule {
 public:
  FQModule() = default;

  std::size_t size() const noexcept { return size_; }
  const std::vector<std::int64_t>& orders() const noexcept { return orders_; }
  int signature_mod8() const noexcept { return signature_; }
  /// Smallest N with N q(mu) integral for all mu.
  std::int64_t level() const noexcept { return level_; }

  /// Representative of element i in L' (lattice coordinates).
  const RatVector& representative(std::size_t i) const { return reps_.at(i); }
  /// q(mu) reduced to [0, 1).
  const Rational& q(std::size_t i) const { return qvals_.at(i); }
  /// (mu, nu) reduced to [0, 1).
  Rational bilinear(std::size_t i, std::size_t j) const;
  std::size_t negate(std::size_t i) const;
  std::size_t add(std::size_t i, std::size_t j) const;
  /// Index of the class of x in L'/L; x must lie in L'.
  std::size_t index_of(const RatVector& x) const;
  bool in_dual(const RatVector& x) const;

  /// |sum e(q(mu)) / sqrt|G| - e(sig/8)|.
  double milgram_defect() const;

  const IntLattice& lattice() const { return *lattice_; }

 private:
  friend FQModule disc_group(const IntLattice& lattice);

  std::optional<IntLattice> lattice_;
  std::vector<std::int64_t> orders_;
  std::size_t size_ = 1;
  int signature_ = 0;
  std::int64_t level_ = 1;
  std::vector<RatVector> reps_;
  std::vector<Rational> qvals_;
  std::vector<std::vector<Integer>> to_smith_;  // y = G x  ->  class coordinates (U y)_i mod d_i
  std::vector<std::int64_t> smith_diag_;        // full diagonal, including ones
};

/// Discriminant form of an even lattice via the Smith normal form of its Gram
/// matrix. Throws errc::singular_gram.
FQModule disc_group(const IntLattice& lattice);

/// Sparse vector-valued q-series sum_mu sum_n c(mu, n) q^n e_mu, times
/// pi^pi_power. Exponents are stored scaled by `denominator`.
class VVSeries {
 public:
  using Key = std::pair<std::size_t, std::int64_t>;  // (component, scaled exponent)
  static constexpr std::int64_t kComplete = std::numeric_limits<std::int64_t>::max();

  VVSeries() = default;
  VVSeries(std::size_t components, std::int64_t denominator, Rational weight, int pi_power, int sigma,
           std::int64_t precision = kComplete);

  std::size_t components() const noexcept { return components_; }
  std::int64_t denominator() const noexcept { return denominator_; }
  const Rational& weight() const noexcept { return weight_; }
  int pi_power() const noexcept { return pi_power_; }
  int sigma() const noexcept { return sigma_; }
  /// Terms are complete for scaled exponents <= precision.
  std::int64_t precision() const noexcept { return precision_; }
  Rational precision_exponent() const;
  bool complete_at(const Rational& exponent) const;
  const std::map<Key, Rational>& terms() const noexcept { return terms_; }

  /// Adds to the coefficient at (mu, exponent); zero results are dropped.
  void add(std::size_t mu, const Rational& exponent, const Rational& value);
  void add_scaled(std::size_t mu, std::int64_t scaled, const Rational& value);
  Rational coeff(std::size_t mu, const Rational& exponent) const;
  Rational exponent(std::int64_t scaled) const;
  std::int64_t scale(const Rational& exponent) const;  // throws if not representable

  void set_weight(Rational w) { weight_ = std::move(w); }
  void set_pi_power(int p) { pi_power_ = p; }
  void set_sigma(int s) { sigma_ = s; }
  void set_precision(std::int64_t p) { precision_ = p; }

  /// Same series with exponents over a multiple of the current denominator.
  VVSeries rescaled(std::int64_t new_denominator) const;
  VVSeries scaled_by(const Rational& factor) const;
  /// Component relabelling: out[map[mu]] += in[mu]; entries with no image are dropped.
  VVSeries relabelled(const std::vector<std::optional<std::size_t>>& map, std::size_t components) const;

  /// Checks n = sigma q(mu) (mod 1) for every stored term.
  bool satisfies_exponent_rule(const FQModule& module) const;

  /// Numeric value at tau (pi power included), summed over stored terms.
  CVector evaluate(std::complex<double> tau) const;

  std::string serialize() const;
  static VVSeries parse(const std::string& text);

  friend bool operator==(const VVSeries&, const VVSeries&) = default;

 private:
  std::size_t components_ = 1;
  std::int64_t denominator_ = 1;
  Rational weight_ = 0;
  int pi_power_ = 0;
  int sigma_ = 1;
  std::int64_t precision_ = kComplete;
  std::map<Key, Rational> terms_;
};

std::ostream& operator<<(std::ostream& os, const VVSeries& f);

/// Theta series of a positive definite lattice up to exponent prec.
/// Throws errc::not_positive_definite.
VVSeries theta_series(const IntLattice& lattice, const FQModule& module, const Rational& prec);

/// f (x) g over the direct sum; component index is i_f * |B| + i_g.
VVSeries tensor(const VVSeries& f, const VVSeries& g);

/// Embedding K -> L given by the columns of `basis` (K basis vectors in L
/// coordinates).
class LatticeEmbedding {
 public:
  LatticeEmbedding(const IntLattice& source, const IntLattice& target, IntMatrix basis);

  const FQModule& source_module() const noexcept { return source_module_; }
  const FQModule& target_module() const noexcept { return target_module_; }
  std::int64_t index() const noexcept { return index_; }
  /// Image in L'/L of each mu in K'/K that lies in L'/K.
  const std::vector<std::optional<std::size_t>>& component_map() const noexcept { return map_; }

 private:
  FQModule source_module_;
  FQModule target_module_;
  IntMatrix basis_;
  std::int64_t index_ = 1;
  std::vector<std::optional<std::size_t>> map_;
};

VVSeries restrict(const VVSeries& f, const LatticeEmbedding& embedding);
VVSeries trace_up(const VVSeries& g, const LatticeEmbedding& embedding);
CVector trace_up(const CVector& g, const LatticeEmbedding& embedding);

/// [f, g]_n with theta_q = q d/dq standing in for (2 pi i)^-1 d/dtau.
VVSeries rankin_cohen(const VVSeries& f, const VVSeries& g, unsigned n);

struct PiRational {
  Rational value;
  int pi_power = 0;
  friend bool operator==(const PiRational&, const PiRational&) = default;
};

/// sum_mu sum_n f(mu, n) g(mu, -n). Throws errc::insufficient_precision when
/// a needed coefficient lies beyond a series' precision.
PiRational ct_pairing(const VVSeries& f, const VVSeries& g);

/// rho(T) and rho(S) of the Weil representation.
std::pair<CMatrix, CMatrix> weil_matrices(const FQModule& module);

/// Relabelling taking each element of `from` to the element of `to` with the
/// same representative class. Both modules must come from lattices on the
/// same Z^n (e.g. N and N^-).
std::vector<std::optional<std::size_t>> identify(const FQModule& from, const FQModule& to);

/// For modules A, B and the module of the orthogonal sum A + B: the index
/// in `sum` of (i, j), stored at i * |B| + j.
std::vector<std::size_t> sum_identification(const FQModule& a, const FQModule& b, const FQModule& sum);

/// Truncated theta value sum_mu sum_{x in K + mu} e(q(x) tau) e_mu.
CVector theta_value(const IntLattice& lattice, const FQModule& module, std::complex<double> tau,
                    double tol = 1e-14);

/// Siegel theta of the lattice of forms (a, beta, c) <-> [a, 2 beta, c],
/// q = ac - beta^2, at (tau, z); includes the factor v = Im tau.
CVector siegel_theta_eval(const FQModule& module, std::complex<double> tau, std::complex<double> z,
                          int cutoff);

}  // namespace cyclotrace::fqm
