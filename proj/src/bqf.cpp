#include "cyclotrace/bqf.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <set>

#include "cyclotrace/error.hpp"

namespace cyclotrace::bqf {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw error(errc::overflow, "integer overflow in form arithmetic");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t mod(std::int64_t a, std::int64_t m) { return ((a % m) + m) % m; }

void require_nonsquare_positive(std::int64_t D) {
  if (D <= 0 || !arith::is_discriminant(D)) {
    throw error(errc::invalid_discriminant, std::to_string(D) + " is not a positive discriminant");
  }
  if (arith::is_square(D)) throw error(errc::square_discriminant, std::to_string(D) + " is a square");
}

}  // namespace

std::int64_t Form::content() const noexcept { return arith::gcd(arith::gcd(a, b), c); }

std::ostream& operator<<(std::ostream& os, const Form& q) {
  return os << '[' << q.a << ',' << q.b << ',' << q.c << ']';
}

std::ostream& operator<<(std::ostream& os, const Sl2z& g) {
  return os << "[[" << g.a << ',' << g.b << "],[" << g.c << ',' << g.d << "]]";
}

Form compose(const Form& q, const Sl2z& g) noexcept {
  const i128 A = i128(q.a) * g.a * g.a + i128(q.b) * g.a * g.c + i128(q.c) * g.c * g.c;
  const i128 B = 2 * i128(q.a) * g.a * g.b + i128(q.b) * (i128(g.a) * g.d + i128(g.b) * g.c) +
                 2 * i128(q.c) * g.c * g.d;
  const i128 C = i128(q.a) * g.b * g.b + i128(q.b) * g.b * g.d + i128(q.c) * g.d * g.d;
  return {static_cast<std::int64_t>(A), static_cast<std::int64_t>(B), static_cast<std::int64_t>(C)};
}

Form act(const Sl2z& g, const Form& q) noexcept { return compose(q, g.inverse()); }

std::int64_t disc(const Form& q) noexcept { return q.disc(); }

bool is_reduced_definite(const Form& q) noexcept {
  if (!q.positive_definite()) return false;
  if (std::llabs(q.b) > q.a || q.a > q.c) return false;
  if ((std::llabs(q.b) == q.a || q.a == q.c) && q.b < 0) return false;
  return true;
}

std::pair<Form, Sl2z> reduce_definite(const Form& q) {
  if (!q.positive_definite()) {
    throw error(errc::not_definite, "reduce_definite needs a positive definite form");
  }
  Form f = q;
  Sl2z m = Sl2z::identity();
  for (;;) {
    // b into (-a, a]
    const std::int64_t n = floor_div(f.a - f.b, 2 * f.a);
    if (n != 0) {
      f = compose(f, Sl2z::T(n));
      m = m * Sl2z::T(n);
    }
    if (f.a > f.c || (f.a == f.c && f.b < 0)) {
      f = compose(f, Sl2z::S());
      m = m * Sl2z::S();
      continue;
    }
    break;
  }
  return {f, m};
}

std::vector<Form> definite_class_reps(std::int64_t d) {
  if (d >= 0 || !arith::is_discriminant(d)) {
    throw error(errc::invalid_discriminant, std::to_string(d) + " is not a negative discriminant");
  }
  std::vector<Form> out;
  for (std::int64_t a = 1; 3 * a * a <= -d; ++a) {
    for (std::int64_t b = -a + 1; b <= a; ++b) {
      const std::int64_t num = b * b - d;
      if (num % (4 * a) != 0) continue;
      const Form f{a, b, num / (4 * a)};
      if (is_reduced_definite(f)) out.push_back(f);
    }
  }
  return out;
}

bool is_reduced_indefinite(const Form& q) noexcept {
  const std::int64_t D = q.disc();
  if (D <= 0 || q.b <= 0 || q.b * q.b >= D) return false;
  const std::int64_t two_a = 2 * std::llabs(q.a);
  const std::int64_t lo = two_a + q.b;
  const std::int64_t hi = two_a - q.b;
  return D < lo * lo && (hi <= 0 || hi * hi < D);
}

std::vector<Form> reduced_indefinite_forms(std::int64_t D) {
  require_nonsquare_positive(D);
  std::vector<Form> out;
  for (std::int64_t b = 1; b * b < D; ++b) {
    if (mod(b - D, 2) != 0) continue;
    const std::int64_t ac = (b * b - D) / 4;  // negative
    for (std::int64_t a = 1; a <= -ac; ++a) {
      if ((-ac) % a != 0) continue;
      for (std::int64_t sign : {1, -1}) {
        const Form f{sign * a, b, ac / (sign * a)};
        if (is_reduced_indefinite(f)) out.push_back(f);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Form rho(const Form& q, Sl2z* step) {
  const std::int64_t D = q.disc();
  require_nonsquare_positive(D);
  const std::int64_t s = arith::isqrt(D);
  const std::int64_t m = 2 * std::llabs(q.c);
  // b' = -b (mod 2|c|) with sqrt(D) - 2|c| < b' < sqrt(D)
  const std::int64_t b_new = s - mod(s + q.b, m);
  const std::int64_t t = (b_new + q.b) / (2 * q.c);
  const Sl2z g{0, -1, 1, t};
  if (step != nullptr) *step = g;
  return compose(q, g);
}

Form reduce_indefinite(const Form& q, Sl2z* transform) {
  const std::int64_t D = q.disc();
  require_nonsquare_positive(D);
  const std::int64_t s = arith::isqrt(D);
  Form f = q;
  Sl2z m = Sl2z::identity();
  for (int iter = 0; !is_reduced_indefinite(f); ++iter) {
    if (iter > 100000) throw error(errc::no_convergence, "indefinite reduction did not terminate");
    if (f.c == 0) {
      // [a, b, 0]: D = b^2 is excluded, so this cannot happen for D non-square.
      throw error(errc::square_discriminant, "form with c = 0");
    }
    const std::int64_t ac = std::llabs(f.c);
    // b' = -b (mod 2|c|), in (-|c|, |c|] while |c| > sqrt(D), else in (sqrt(D) - 2|c|, sqrt(D))
    const std::int64_t b_new = ac > s ? ac - mod(ac + f.b, 2 * ac) : s - mod(s + f.b, 2 * ac);
    const std::int64_t t = (b_new + f.b) / (2 * f.c);
    const Sl2z g{0, -1, 1, t};
    f = compose(f, g);
    m = m * g;
  }
  if (transform != nullptr) *transform = m;
  return f;
}

std::vector<Form> reduced_cycle(const Form& q) {
  if (!is_reduced_indefinite(q)) throw error(errc::invalid_input, "reduced_cycle needs a reduced form");
  std::vector<Form> out{q};
  Form f = rho(q);
  while (f != q) {
    out.push_back(f);
    if (out.size() > 1000000) throw error(errc::no_convergence, "rho cycle did not close");
    f = rho(f);
  }
  return out;
}

std::vector<Form> indefinite_class_reps(std::int64_t D) {
  std::set<Form> seen;
  std::vector<Form> out;
  for (const Form& f : reduced_indefinite_forms(D)) {
    if (seen.count(f) != 0) continue;
    const auto cycle = reduced_cycle(f);
    seen.insert(cycle.begin(), cycle.end());
    out.push_back(f);
  }
  return out;
}

std::pair<std::int64_t, std::int64_t> pell_fundamental(std::int64_t D) {
  require_nonsquare_positive(D);
  const std::int64_t s = arith::isqrt(D);
  const std::int64_t b = (mod(s - D, 2) == 0) ? s : s - 1;
  const Form principal{1, b, (b * b - D) / 4};
  // The product of the rho steps around a full cycle is the fundamental automorph.
  i128 m[4] = {1, 0, 0, 1};
  Form f = principal;
  do {
    Sl2z g;
    f = rho(f, &g);
    const i128 n[4] = {m[0] * g.a + m[1] * g.c, m[0] * g.b + m[1] * g.d, m[2] * g.a + m[3] * g.c,
                       m[2] * g.b + m[3] * g.d};
    for (int i = 0; i < 4; ++i) m[i] = i128(narrow(n[i]));
  } while (f != principal);
  i128 t = m[0] + m[3];
  i128 u = m[2] / principal.a;
  if (t < 0) t = -t;
  if (u < 0) u = -u;
  return {narrow(t), narrow(u)};
}

double GeodesicArc::epsilon() const noexcept {
  const std::int64_t g = form.content();
  const double Dp = static_cast<double>(form.disc() / (g * g));
  return 0.5 * (static_cast<double>(t) + static_cast<double>(u) * std::sqrt(Dp));
}

double GeodesicArc::translation_length() const noexcept {
  // 2 log(eps) computed without cancellation for large t.
  const double tt = static_cast<double>(t);
  return 2.0 * std::log(0.5 * (tt + std::sqrt(tt * tt - 4.0)));
}

GeodesicArc pell_automorph(const Form& q) {
  const std::int64_t D = q.disc();
  require_nonsquare_positive(D);
  if (q.a == 0) throw error(errc::invalid_input, "form with a = 0 has a vertical geodesic");
  const std::int64_t g = q.content();
  const Form p{q.a / g, q.b / g, q.c / g};
  const auto [t, u] = pell_fundamental(p.disc());
  GeodesicArc arc;
  arc.form = q;
  arc.t = t;
  arc.u = u;
  arc.automorph = Sl2z{narrow((i128(t) + i128(p.b) * u) / 2), narrow(i128(p.c) * u), narrow(-i128(p.a) * u),
                       narrow((i128(t) - i128(p.b) * u) / 2)};
  arc.center = Rational(-q.b, 2 * q.a);
  arc.center.canonicalize();
  arc.radius_squared = Rational(D, 4 * q.a * q.a);
  arc.radius_squared.canonicalize();
  return arc;
}

std::complex<double> CmPoint::value() const noexcept {
  return {static_cast<double>(neg_b) / static_cast<double>(two_a),
          std::sqrt(static_cast<double>(abs_d)) / static_cast<double>(two_a)};
}

CmPoint cm_point(const Form& q) {
  if (!q.positive_definite()) throw error(errc::not_definite, "cm_point needs a positive definite form");
  return {-q.b, -q.disc(), 2 * q.a};
}

std::int64_t pairing2(const Form& q, const Form& r) noexcept {
  return 2 * q.a * r.c + 2 * r.a * q.c - q.b * r.b;
}

Rational pairing(const Form& q, const Form& r) {
  Rational out(pairing2(q, r), 2);
  out.canonicalize();
  return out;
}

int stabilizer_order(std::int64_t d) {
  if (d == -4) return 2;
  if (d == -3) return 3;
  return 1;
}

int automorphism_count(const Form& definite) {
  const std::int64_t g = definite.content();
  return 2 * stabilizer_order(definite.disc() / (g * g));
}

namespace {

// A CM point of discriminant d lies on some c_Q with disc(Q) = D iff a
// Gamma-translate of C_Q passes through the reduced CM point in the closure
// of the fundamental domain. Such translates have top height >= sqrt(3)/2
// and center within 1/2 + radius of the imaginary axis, which bounds them.
// Calls visit(Q'') for each translate through the CM point of `definite`;
// stops early when visit returns true.
template <class Visit>
bool scan_geodesics_through(const Form& definite, std::int64_t D, Visit visit) {
  const Form z = reduce_definite(definite).first;
  const double sd = std::sqrt(static_cast<double>(D));
  const auto a_max = static_cast<std::int64_t>(std::floor(sd / std::sqrt(3.0))) + 1;
  for (std::int64_t A = -a_max; A <= a_max; ++A) {
    if (A == 0) continue;
    const auto b_max = std::llabs(A) + static_cast<std::int64_t>(std::ceil(sd)) + 1;
    for (std::int64_t B = -b_max; B <= b_max; ++B) {
      const std::int64_t num = B * B - D;
      if (num % (4 * A) != 0) continue;
      const Form f{A, B, num / (4 * A)};
      if (pairing2(f, z) == 0 && visit(f)) return true;
    }
  }
  return false;
}

bool same_indefinite_class(const Form& x, const Form& y) {
  const auto cycle = reduced_cycle(reduce_indefinite(x));
  return std::find(cycle.begin(), cycle.end(), reduce_indefinite(y)) != cycle.end();
}

}  // namespace

bool geodesic_avoids_class(const Form& indefinite, const Form& definite_rep) {
  return !scan_geodesics_through(definite_rep, indefinite.disc(),
                                 [&](const Form& f) { return same_indefinite_class(f, indefinite); });
}

bool hypothesis_check(std::int64_t D, std::int64_t d) {
  require_nonsquare_positive(D);
  if (d >= 0 || !arith::is_discriminant(d)) {
    throw error(errc::invalid_discriminant, std::to_string(d) + " is not a negative discriminant");
  }
  if (d == -4) {
    // i lies on C_Q iff a + c = 0, i.e. D = b^2 + 4a^2.
    for (std::int64_t a = 1; 4 * a * a < D; ++a) {
      if (arith::is_square(D - 4 * a * a)) return false;
    }
    return true;
  }
  for (const Form& z : definite_class_reps(d)) {
    if (scan_geodesics_through(z, D, [](const Form&) { return true; })) return false;
  }
  return true;
}

std::vector<Form> enumerate_definite(std::int64_t d, std::int64_t a_max) {
  if (d >= 0 || !arith::is_discriminant(d)) {
    throw error(errc::invalid_discriminant, std::to_string(d) + " is not a negative discriminant");
  }
  if (a_max < 1) throw error(errc::invalid_input, "a_max must be at least 1");
  std::vector<Form> out;
  for (std::int64_t a = 1; a <= a_max; ++a) {
    for (std::int64_t b = -a + 1; b <= a; ++b) {
      const std::int64_t num = b * b - d;
      if (num % (4 * a) == 0) out.push_back({a, b, num / (4 * a)});
    }
  }
  return out;
}

namespace {

// x, y with p x + r y = 1 (gcd(p, r) = 1)
std::pair<std::int64_t, std::int64_t> bezout(std::int64_t p, std::int64_t r) {
  std::int64_t old_r = p, cur_r = r, old_s = 1, cur_s = 0, old_t = 0, cur_t = 1;
  while (cur_r != 0) {
    const std::int64_t qq = old_r / cur_r;
    std::tie(old_r, cur_r) = std::make_pair(cur_r, old_r - qq * cur_r);
    std::tie(old_s, cur_s) = std::make_pair(cur_s, old_s - qq * cur_s);
    std::tie(old_t, cur_t) = std::make_pair(cur_t, old_t - qq * cur_t);
  }
  if (old_r < 0) {
    old_s = -old_s;
    old_t = -old_t;
  }
  return {old_s, old_t};
}

}  // namespace

void for_each_orbit_form(const Form& rep, std::int64_t a_max, const std::function<void(const OrbitForm&)>& visit) {
  if (!rep.positive_definite()) throw error(errc::not_definite, "class_orbit needs a positive definite form");
  const double A = static_cast<double>(rep.a);
  const double B = static_cast<double>(rep.b);
  const double ad = static_cast<double>(-rep.disc());
  const double bound = static_cast<double>(a_max);
  const auto r_max = static_cast<std::int64_t>(std::floor(std::sqrt(4.0 * A * bound / ad))) + 1;
  for (std::int64_t r = -r_max; r <= r_max; ++r) {
    const double rem = (bound - ad * double(r) * double(r) / (4.0 * A)) / A;
    if (rem < 0 && r != 0) continue;
    const double mid = -B * double(r) / (2.0 * A);
    const double w = std::sqrt(std::max(rem, 0.0));
    const auto p_lo = static_cast<std::int64_t>(std::floor(mid - w)) - 1;
    const auto p_hi = static_cast<std::int64_t>(std::ceil(mid + w)) + 1;
    for (std::int64_t p = p_lo; p <= p_hi; ++p) {
      if (arith::gcd(p, r) != 1) continue;
      const i128 val = i128(rep.a) * p * p + i128(rep.b) * p * r + i128(rep.c) * r * r;
      if (val > a_max) continue;
      // p s - q r = 1
      const auto [x, y] = bezout(p, r);
      Sl2z g{p, -y, r, x};
      Form f = compose(rep, g);
      const std::int64_t n = floor_div(f.a - f.b, 2 * f.a);
      if (n != 0) f = compose(f, Sl2z::T(n));
      visit({f, p, r});
    }
  }
}

std::vector<OrbitForm> class_orbit(const Form& rep, std::int64_t a_max) {
  std::vector<OrbitForm> out;
  for_each_orbit_form(rep, a_max, [&](const OrbitForm& o) { out.push_back(o); });
  std::sort(out.begin(), out.end(), [](const OrbitForm& x, const OrbitForm& y) { return x.form < y.form; });
  return out;
}

}  // namespace cyclotrace::bqf
