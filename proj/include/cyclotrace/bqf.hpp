#pragma once

// Integral binary quadratic forms [a, b, c] = a x^2 + b xy + c y^2:
// reduction, class representatives, automorphs, CM points, geodesics and
// the signature (1,2) pairing.

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cyclotrace/arith.hpp"

namespace cyclotrace::bqf {

using arith::Rational;

struct Form {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;

  std::int64_t disc() const noexcept { return b * b - 4 * a * c; }
  std::int64_t content() const noexcept;
  bool positive_definite() const noexcept { return disc() < 0 && a > 0; }

  /// Q(z, 1).
  std::complex<double> operator()(std::complex<double> z) const noexcept {
    return (static_cast<double>(a) * z + static_cast<double>(b)) * z + static_cast<double>(c);
  }

  Form operator-() const noexcept { return {-a, -b, -c}; }
  friend bool operator==(const Form&, const Form&) = default;
  friend auto operator<=>(const Form&, const Form&) = default;
};

std::ostream& operator<<(std::ostream& os, const Form& q);

/// Element of SL2(Z), [[a, b], [c, d]].
struct Sl2z {
  std::int64_t a = 1;
  std::int64_t b = 0;
  std::int64_t c = 0;
  std::int64_t d = 1;

  static Sl2z identity() noexcept { return {}; }
  static Sl2z T(std::int64_t n = 1) noexcept { return {1, n, 0, 1}; }
  static Sl2z S() noexcept { return {0, -1, 1, 0}; }

  std::int64_t det() const noexcept { return a * d - b * c; }
  Sl2z inverse() const noexcept { return {d, -b, -c, a}; }
  bool is_plus_minus_identity() const noexcept {
    return b == 0 && c == 0 && ((a == 1 && d == 1) || (a == -1 && d == -1));
  }

  /// Mobius action on the upper half-plane.
  std::complex<double> operator()(std::complex<double> z) const noexcept {
    return (static_cast<double>(a) * z + static_cast<double>(b)) /
           (static_cast<double>(c) * z + static_cast<double>(d));
  }

  friend Sl2z operator*(const Sl2z& x, const Sl2z& y) noexcept {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
            x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const Sl2z&, const Sl2z&) = default;
};

std::ostream& operator<<(std::ostream& os, const Sl2z& g);

/// Q o g, i.e. (x, y) -> Q(a x + b y, c x + d y).
Form compose(const Form& q, const Sl2z& g) noexcept;

/// Left action compatible with Mobius maps: the roots of act(g, Q) are g
/// applied to the roots of Q.
Form act(const Sl2z& g, const Form& q) noexcept;

std::int64_t disc(const Form& q) noexcept;

/// Gauss reduction of a positive definite form. Returns (R, M) with
/// R = compose(Q, M), |b| <= a <= c, and b >= 0 when |b| = a or a = c.
std::pair<Form, Sl2z> reduce_definite(const Form& q);

bool is_reduced_definite(const Form& q) noexcept;

/// One reduced form per SL2(Z)-class (primitive and imprimitive), d < 0.
std::vector<Form> definite_class_reps(std::int64_t d);

/// Gauss-reduced indefinite forms: 0 < b < sqrt(D), sqrt(D) - b < 2|a| < sqrt(D) + b.
bool is_reduced_indefinite(const Form& q) noexcept;
std::vector<Form> reduced_indefinite_forms(std::int64_t D);

/// The rho (neighbor) step on reduced indefinite forms. `step` receives the
/// transformation, so that rho(Q) = compose(Q, step).
Form rho(const Form& q, Sl2z* step = nullptr);

/// Reduction of any indefinite form (D non-square) by repeated rho steps;
/// compose(Q, *transform) is the returned reduced form.
Form reduce_indefinite(const Form& q, Sl2z* transform = nullptr);

/// The rho-cycle containing a reduced form, starting with that form.
std::vector<Form> reduced_cycle(const Form& q);

/// One representative per class of forms of discriminant D > 0 (non-square),
/// taken as the smallest form of each reduced cycle.
std::vector<Form> indefinite_class_reps(std::int64_t D);

struct GeodesicArc {
  Form form;
  Sl2z automorph;
  Rational center;          // -b / (2a)
  Rational radius_squared;  // D / (4 a^2)
  std::int64_t t = 0;       // t^2 - D' u^2 = 4 with D' = disc / content^2
  std::int64_t u = 0;

  /// ((t + u sqrt(D'))/2); the hyperbolic translation length is 2 log(epsilon).
  double epsilon() const noexcept;
  double translation_length() const noexcept;
};

/// Fundamental automorph of an indefinite form and the geodesic it acts on.
GeodesicArc pell_automorph(const Form& q);

/// Smallest t, u > 0 with t^2 - D u^2 = 4 (D > 0 non-square).
std::pair<std::int64_t, std::int64_t> pell_fundamental(std::int64_t D);

/// CM point (-b + i sqrt|d|) / (2a) kept exactly.
struct CmPoint {
  std::int64_t neg_b = 0;
  std::int64_t abs_d = 0;
  std::int64_t two_a = 1;

  std::complex<double> value() const noexcept;
  friend bool operator==(const CmPoint&, const CmPoint&) = default;
};

CmPoint cm_point(const Form& q);

/// (X, Y) = -tr(XY) on the lattice of forms: ac' + a'c - bb'/2.
Rational pairing(const Form& q, const Form& r);

/// Twice the pairing, an integer.
std::int64_t pairing2(const Form& q, const Form& r) noexcept;

/// |PSL2(Z)_z| for a CM point of discriminant d: 2 for -4, 3 for -3, else 1.
int stabilizer_order(std::int64_t d);

/// True when no CM point of discriminant d lies on a geodesic C_Q, Q of
/// discriminant D.
bool hypothesis_check(std::int64_t D, std::int64_t d);

/// Same question restricted to one class of forms of discriminant D and the
/// CM points of one class of discriminant d (given by its reduced rep).
bool geodesic_avoids_class(const Form& indefinite, const Form& definite_rep);

/// All positive definite forms of discriminant d with 1 <= a <= a_max and
/// b in (-a, a]. Sorted by (a, b).
std::vector<Form> enumerate_definite(std::int64_t d, std::int64_t a_max);

/// Primitive vectors (p, r) with rep(p, r) <= bound, paired with the form
/// compose(rep, [[p, q], [r, s]]). Each form of the class appears
/// |Aut(rep)| times (signs included).
struct OrbitForm {
  Form form;
  std::int64_t p = 0;
  std::int64_t r = 0;
};
std::vector<OrbitForm> class_orbit(const Form& rep, std::int64_t a_max);
/// Same enumeration without sorting or storing.
void for_each_orbit_form(const Form& rep, std::int64_t a_max, const std::function<void(const OrbitForm&)>& visit);

/// Number of g in SL2(Z) with compose(Q, g) = Q for definite Q (4, 6 or 2).
int automorphism_count(const Form& definite);

}  // namespace cyclotrace::bqf
