#pragma once

// Floating-point side: 2F1, Gauss-Legendre rules, the class sum f_{k,A},
// geodesic cycle integrals and the hypergeometric lattice sum.

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cyclotrace/arith.hpp"
#include "cyclotrace/bqf.hpp"

namespace cyclotrace::analytic {

using cplx = std::complex<double>;

enum class Method { exact, geodesic, latticesum };

std::string_view to_string(Method m) noexcept;
/// Throws errc::invalid_input.
Method parse_method(std::string_view name);

struct TraceReport {
  int k = 0;
  std::int64_t D = 0;
  std::int64_t d = -4;
  Method method = Method::exact;
  double value = 0;
  std::optional<arith::Rational> exact;  // set for Method::exact
  double error_estimate = 0;
  bool hypothesis_ok = true;
  double seconds = 0;
  std::int64_t cutoff = 0;  // quadrature nodes, s-cutoff, or 0
  std::int64_t a_max = 0;   // class-sum truncation (geodesic only)

  /// "p/q" for exact reports, %.12e otherwise.
  std::string value_text() const;
};

/// 2F1(a, b; c; w) for 0 <= w < 1. Series for w <= 0.9, the 1 - w connection
/// formula above. Throws errc::divergent_parameters.
double hyp2f1(double a, double b, double c, double w);

struct GaussLegendre {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

/// Cached n-point rule.
const GaussLegendre& gauss_legendre(int n);

/// f_{k,A}(z) = (|d|^{(k+1)/2} / pi) sum_{Q in A} Q(z,1)^{-k}, truncated at
/// a <= a_max. Forms with small a are summed over translates exactly (cot
/// partial fractions); the rest enter through Fourier coefficients, valid in
/// the standard fundamental domain, which every z is reduced into first.
class FkA {
 public:
  static constexpr int kFourierTerms = 16;

  FkA(int k, const bqf::Form& rep, std::int64_t a_max);

  int k() const noexcept { return k_; }
  const bqf::Form& rep() const noexcept { return rep_; }
  std::int64_t a_max() const noexcept { return a_max_; }
  /// Bound on the change in f over the fundamental domain from the forms with
  /// a_max/2 < a <= a_max.
  double last_doubling_change() const noexcept { return last_change_; }

  /// Throws errc::invalid_input (Im z <= 0), errc::pole_at_z. With `bound`,
  /// also reports last_doubling_change() carried back to z.
  cplx operator()(cplx z, double* bound = nullptr) const;

 private:
  struct Near {
    cplx alpha;
    double weight;
  };
  cplx reduced_value(cplx w) const;

  int k_;
  bqf::Form rep_;
  std::int64_t a_max_;
  std::int64_t a_near_;
  double prefactor_;
  double last_change_ = 0;
  std::vector<Near> near_;
  std::vector<cplx> partial_fraction_;  // A_m * delta^(2k-m) for m = 1..k
  std::array<cplx, kFourierTerms + 1> fourier_{};
};

/// Smallest doubling of a_max (from 1024) whose last doubling moves f by less
/// than tol anywhere on the fundamental domain. Cached by (k, rep, tol).
/// Throws errc::no_convergence.
std::shared_ptr<const FkA> converged_fkA(int k, const bqf::Form& rep, double tol);

/// Convenience: converged_fkA(k, rep, tol)(z). rep defaults to the principal
/// form of discriminant d.
cplx eval_fkA(cplx z, int k, std::int64_t d, const bqf::Form& rep, double tol = 1e-10);

bqf::Form principal_form(std::int64_t d);

struct CycleIntegral {
  cplx value;
  double error_estimate = 0;   // quadrature change plus truncation bound
  double truncation = 0;       // part of the estimate due to a_max
  int nodes = 0;
};

/// int over c_Q of f(z) Q(z,1)^{k-1} dz, one period of gamma_Q, by
/// Gauss-Legendre in hyperbolic arc length with node doubling. The period
/// starts `shift` arc-length units past the symmetric window around the top
/// of the semicircle. Throws errc::pole_on_geodesic, errc::no_convergence.
CycleIntegral cycle_integral(const bqf::Form& Q, const FkA& f, double tol, double shift = 0);
CycleIntegral cycle_integral(const bqf::Form& Q, int k, std::int64_t d, double tol);

inline constexpr double kGeodesicTol = 1e-8;
inline constexpr double kLatticeSumTol = 1e-5;

struct Options {
  std::optional<double> tol;  // kGeodesicTol / kLatticeSumTol when unset
  unsigned threads = 1;
  std::optional<bqf::Form> rep;  // class A; principal form of d by default
};

/// Sum of cycle integrals over the classes of discriminant D.
/// Throws errc::hypothesis_violated plus input errors.
TraceReport lhs_geodesic(int k, std::int64_t D, std::int64_t d, const Options& opt = {});

/// Hypergeometric lattice sum over all forms of discriminant D, ordered by the
/// pairing s with the CM form, with s-cutoff doubling and a mean-density tail
/// correction. Throws errc::hypothesis_violated, errc::no_convergence.
TraceReport lhs_latticesum(int k, std::int64_t D, std::int64_t d, const Options& opt = {});

/// Number of forms Q of discriminant D with 2 * pairing(Q, rep) = s.
std::int64_t lattice_count(std::int64_t D, const bqf::Form& rep, std::int64_t s);

struct Eisenstein {
  cplx E4, E6, Delta;
};

/// q-expansions (Delta by its product), Im z >= 1/2.
Eisenstein eisenstein_oracle(cplx z, double tol = 1e-15);

}  // namespace cyclotrace::analytic
