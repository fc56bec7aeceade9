#include "cyclotrace/analytic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "cyclotrace/error.hpp"
#include "cyclotrace/parallel.hpp"

namespace cyclotrace::analytic {

namespace {

using std::numbers::pi;
constexpr cplx I{0.0, 1.0};
const double kSqrt3Half = std::sqrt(3.0) / 2.0;

double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double factorial(int n) {
  double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

bool nonpositive_integer(double x) { return x <= 0 && x == std::floor(x); }

double rgamma(double x) { return nonpositive_integer(x) ? 0.0 : 1.0 / std::tgamma(x); }

double hyp_series(double a, double b, double c, double w) {
  double term = 1, sum = 1;
  for (int n = 0; n < 1000000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * w;
    sum += term;
    if (std::abs(term) <= 1e-17 * std::abs(sum) && n > 2) return sum;
    if (term == 0) return sum;
  }
  throw error(errc::no_convergence, "2F1 series did not converge");
}

// cot(pi u), stable for large |Im u|
cplx cot_pi(cplx u) {
  if (u.imag() >= 0) {
    const cplx q = std::exp(2.0 * pi * I * u);
    return -I * (1.0 + q) / (1.0 - q);
  }
  const cplx q = std::exp(-2.0 * pi * I * u);
  return I * (1.0 + q) / (1.0 - q);
}

// P_m with sum_n (u + n)^-m = pi^m P_m(cot pi u): P_1 = x, P_{m+1} = (1 + x^2) P_m' / m
std::vector<std::vector<double>> cot_polynomials(int k) {
  std::vector<std::vector<double>> P(k + 1);
  P[1] = {0, 1};
  for (int m = 1; m < k; ++m) {
    const auto& p = P[m];
    std::vector<double> d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    std::vector<double> out(d.size() + 2, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      out[i] += d[i] / m;
      out[i + 2] += d[i] / m;
    }
    P[m + 1] = out;
  }
  return P;
}

cplx horner(const std::vector<double>& p, cplx x) {
  cplx r = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) r = r * x + *it;
  return r;
}

// phi_k(x) = sum_j binom(k+j-1, j) x^{2j} / (2k+2j-1)!
double fourier_phi(int k, double x) {
  double t = 1.0 / factorial(2 * k - 1), sum = t;
  const double x2 = x * x;
  for (int j = 0; j < 400; ++j) {
    t *= static_cast<double>(k + j) / (j + 1) * x2 / ((2.0 * k + 2 * j) * (2.0 * k + 2 * j + 1));
    sum += t;
    if (t < 1e-18 * sum) break;
  }
  return sum;
}

void check_inputs(int k, std::int64_t D, std::int64_t d) {
  if (k < 2) throw error(errc::unsupported_k, "k must be >= 2");
  if (d >= 0 || !arith::is_discriminant(d)) {
    throw error(errc::invalid_discriminant, "d = " + std::to_string(d) + " is not a negative discriminant");
  }
  if (D <= 0 || !arith::is_discriminant(D)) {
    throw error(errc::invalid_discriminant, "D = " + std::to_string(D) + " is not a positive discriminant");
  }
  if (arith::is_square(D)) throw error(errc::square_discriminant, "D = " + std::to_string(D) + " is a square");
}

bqf::Form class_rep(std::int64_t d, const Options& opt) {
  if (!opt.rep) return principal_form(d);
  if (opt.rep->disc() != d || !opt.rep->positive_definite()) {
    throw error(errc::invalid_input, "class representative does not have discriminant d");
  }
  return bqf::reduce_definite(*opt.rep).first;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::exact: return "exact";
    case Method::geodesic: return "geodesic";
    case Method::latticesum: return "latticesum";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "exact") return Method::exact;
  if (name == "geodesic") return Method::geodesic;
  if (name == "latticesum") return Method::latticesum;
  throw error(errc::invalid_input, "unknown method '" + std::string(name) + "'");
}

std::string TraceReport::value_text() const {
  if (exact) return arith::to_string(*exact);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", value == 0 ? 0.0 : value);
  return buf;
}

double hyp2f1(double a, double b, double c, double w) {
  if (!(w >= 0 && w < 1)) throw error(errc::divergent_parameters, "2F1 needs 0 <= w < 1");
  if (nonpositive_integer(c)) throw error(errc::divergent_parameters, "2F1 with c a non-positive integer");
  if (w <= 0.9) return hyp_series(a, b, c, w);
  const double s = c - a - b;
  if (s == std::floor(s)) return hyp_series(a, b, c, w);
  const double v = 1 - w;
  const double t1 = std::tgamma(c) * std::tgamma(s) * rgamma(c - a) * rgamma(c - b);
  const double t2 = std::tgamma(c) * std::tgamma(-s) * rgamma(a) * rgamma(b);
  double out = 0;
  if (t1 != 0) out += t1 * hyp_series(a, b, 1 - s, v);
  if (t2 != 0) out += t2 * std::pow(v, s) * hyp_series(c - a, c - b, 1 + s, v);
  return out;
}

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex m;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard lock(m);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  GaussLegendre g;
  g.nodes.resize(n);
  g.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1);
    const double w = 2.0 / ((1 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = g.weights[n - 1 - i] = w;
  }
  return cache.emplace(n, std::move(g)).first->second;
}

bqf::Form principal_form(std::int64_t d) {
  if (d >= 0 || !arith::is_discriminant(d)) {
    throw error(errc::invalid_discriminant, "d = " + std::to_string(d) + " is not a negative discriminant");
  }
  const std::int64_t b = (-d) % 2;
  return {1, b, (b * b - d) / 4};
}

FkA::FkA(int k, const bqf::Form& rep, std::int64_t a_max) : k_(k), rep_(rep), a_max_(a_max) {
  if (k < 2) throw error(errc::unsupported_k, "f_{k,A} needs k >= 2");
  if (!rep.positive_definite()) throw error(errc::not_definite, "class representative must be positive definite");
  const double abs_d = static_cast<double>(-rep.disc());
  prefactor_ = std::pow(abs_d, (k + 1) / 2.0) / pi;
  // Fourier part needs Im z > h = sqrt|d| / 2a on the fundamental domain.
  a_near_ = std::max<std::int64_t>(8, static_cast<std::int64_t>(std::ceil(2.5 * std::sqrt(abs_d))));
  const std::int64_t half = a_max / 2;
  const double aut = bqf::automorphism_count(rep);

  std::array<cplx, kFourierTerms + 1> lower{};
  const double sign = k % 2 == 0 ? 1.0 : -1.0;
  const double two_pi_2k = std::pow(2 * pi, 2 * k);
  bqf::for_each_orbit_form(rep, a_max, [&](const bqf::OrbitForm& o) {
    const auto& f = o.form;
    const double a = static_cast<double>(f.a);
    const double weight = std::pow(a, -k) / aut;
    const double h = std::sqrt(abs_d) / (2 * a);
    if (f.a <= a_near_) {
      near_.push_back({cplx(-static_cast<double>(f.b) / (2 * a), h), weight});
      return;
    }
    // e(r b / 2a)
    const cplx step = std::polar(1.0, pi * static_cast<double>(f.b) / a);
    cplx phase = 1;
    for (int r = 1; r <= kFourierTerms; ++r) {
      phase *= step;
      const cplx c =
          weight * sign * two_pi_2k * std::pow(static_cast<double>(r), 2 * k - 1) * fourier_phi(k, 2 * pi * r * h) *
          phase;
      fourier_[r] += c;
      if (f.a <= half) lower[r] += c;
    }
  });
  double change = 0;
  for (int r = 1; r <= kFourierTerms; ++r) change += std::abs(fourier_[r] - lower[r]) * std::exp(-2 * pi * r * kSqrt3Half);
  last_change_ = prefactor_ * change;

  // Partial fractions of (w - alpha)^-k (w - conj alpha)^-k, up to powers of delta = 2ih.
  partial_fraction_.resize(k + 1);
  for (int m = 1; m <= k; ++m) {
    partial_fraction_[m] = ((k - m) % 2 == 0 ? 1.0 : -1.0) * binomial(2 * k - m - 1, k - m);
  }
}

cplx FkA::reduced_value(cplx w) const {
  static thread_local std::map<int, std::vector<std::vector<double>>> polys;
  auto& P = polys[k_];
  if (P.empty()) P = cot_polynomials(k_);

  cplx near = 0;
  for (const auto& n : near_) {
    const cplx u1 = w - n.alpha;
    const cplx u2 = w - std::conj(n.alpha);
    if (std::abs(std::sin(pi * u1)) < 1e-12) throw error(errc::pole_at_z, "z is a CM point of the class");
    const cplx c1 = cot_pi(u1), c2 = cot_pi(u2);
    const cplx delta = 2.0 * I * n.alpha.imag();
    cplx s = 0;
    for (int m = 1; m <= k_; ++m) {
      const cplx z1 = std::pow(pi, m) * horner(P[m], c1);
      const cplx z2 = std::pow(pi, m) * horner(P[m], c2);
      s += partial_fraction_[m] * (z1 * std::pow(delta, -(2 * k_ - m)) + z2 * std::pow(-delta, -(2 * k_ - m)));
    }
    near += n.weight * s;
  }
  cplx far = 0;
  const cplx q = std::exp(2.0 * pi * I * w);
  cplx qr = 1;
  for (int r = 1; r <= kFourierTerms; ++r) {
    qr *= q;
    far += fourier_[r] * qr;
  }
  return prefactor_ * (near + far);
}

cplx FkA::operator()(cplx z, double* bound) const {
  if (!(z.imag() > 0)) throw error(errc::invalid_input, "f_{k,A} needs Im z > 0");
  // w = g z in the standard fundamental domain; f(z) = f(w) (c z + d)^{-2k}
  bqf::Sl2z g;
  cplx w = z;
  for (int it = 0; it < 10000; ++it) {
    const double n = std::round(w.real());
    if (n != 0) {
      w -= n;
      g = bqf::Sl2z::T(-static_cast<std::int64_t>(n)) * g;
    }
    if (std::norm(w) < 1.0 - 1e-14) {
      w = -1.0 / w;
      g = bqf::Sl2z::S() * g;
    } else {
      break;
    }
  }
  const cplx j = static_cast<double>(g.c) * z + static_cast<double>(g.d);
  const cplx factor = std::pow(j, -2 * k_);
  if (bound) *bound = last_change_ * std::abs(factor);
  return reduced_value(w) * factor;
}

std::shared_ptr<const FkA> converged_fkA(int k, const bqf::Form& rep, double tol) {
  using Key = std::tuple<int, std::int64_t, std::int64_t, std::int64_t, double>;
  static std::mutex m;
  static std::map<Key, std::shared_ptr<const FkA>> cache;
  const Key key{k, rep.a, rep.b, rep.c, tol};
  {
    std::lock_guard lock(m);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  constexpr std::int64_t kCeiling = std::int64_t{1} << 22;
  for (std::int64_t a_max = 1024; a_max <= kCeiling; a_max *= 2) {
    auto f = std::make_shared<const FkA>(k, rep, a_max);
    if (f->last_doubling_change() < tol) {
      std::lock_guard lock(m);
      if (cache.size() > 64) cache.clear();
      cache.emplace(key, f);
      return f;
    }
  }
  throw error(errc::no_convergence, "class sum did not converge below a_max = 2^22");
}

cplx eval_fkA(cplx z, int k, std::int64_t d, const bqf::Form& rep, double tol) {
  if (rep.disc() != d) throw error(errc::invalid_input, "class representative does not have discriminant d");
  return (*converged_fkA(k, bqf::reduce_definite(rep).first, tol))(z);
}

CycleIntegral cycle_integral(const bqf::Form& Q, const FkA& f, double tol, double shift) {
  if (!bqf::geodesic_avoids_class(Q, f.rep())) {
    throw error(errc::pole_on_geodesic, "a CM point of the class lies on the geodesic");
  }
  const auto arc = bqf::pell_automorph(Q);
  const int k = f.k();
  const double D = static_cast<double>(Q.disc());
  const double a = static_cast<double>(Q.a), b = static_cast<double>(Q.b);
  const double center = -b / (2 * a);
  const double radius = std::sqrt(D) / (2 * std::abs(a));
  const double e = Q.a > 0 ? -1.0 : 1.0;  // s -> +inf runs toward (-b - sqrt D) / 2a
  const double half = arc.translation_length() / 2;

  // Truncated f is only approximately modular, so the integrand carries
  // jumps of the size of the truncation bound; refining below it is useless.
  double trunc = 0;
  auto rule = [&](int n) {
    const auto& g = gauss_legendre(n);
    cplx sum = 0;
    double tsum = 0;
    for (int i = 0; i < n; ++i) {
      const double s = shift + half * g.nodes[i];
      const double th = std::tanh(s), sech = 1.0 / std::cosh(s);
      const cplx z = center + radius * cplx(e * th, sech);
      const cplx dz = radius * cplx(e * sech * sech, -sech * th);
      double b = 0;
      const cplx w = std::pow(Q(z), k - 1) * dz;
      sum += g.weights[i] * f(z, &b) * w;
      tsum += g.weights[i] * b * std::abs(w);
    }
    trunc = half * tsum;
    return half * sum;
  };
  cplx prev = rule(16);
  for (int n = 32; n <= (1 << 14); n *= 2) {
    const cplx cur = rule(n);
    const double change = std::abs(cur - prev);
    if (change < tol * (1 + std::abs(cur)) + trunc) return {cur, change + trunc, trunc, n};
    prev = cur;
  }
  throw error(errc::no_convergence, "cycle integral did not converge with 2^14 nodes");
}

CycleIntegral cycle_integral(const bqf::Form& Q, int k, std::int64_t d, double tol) {
  return cycle_integral(Q, *converged_fkA(k, principal_form(d), tol / 10), tol);
}

TraceReport lhs_geodesic(int k, std::int64_t D, std::int64_t d, const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  check_inputs(k, D, d);
  const bqf::Form rep = class_rep(d, opt);
  TraceReport rep_out;
  rep_out.k = k;
  rep_out.D = D;
  rep_out.d = d;
  rep_out.method = Method::geodesic;
  if (!bqf::hypothesis_check(D, d)) {
    throw error(errc::hypothesis_violated, "a CM point of discriminant " + std::to_string(d) +
                                               " lies on a geodesic of discriminant " + std::to_string(D));
  }
  const double tol = opt.tol.value_or(kGeodesicTol);
  const auto f = converged_fkA(k, rep, tol / 10);
  const auto classes = bqf::indefinite_class_reps(D);
  std::vector<CycleIntegral> parts(classes.size());
  parallel_for(classes.size(), opt.threads, [&](std::size_t i) { parts[i] = cycle_integral(classes[i], *f, tol); });
  cplx total = 0;
  double err = 0;
  int nodes = 0;
  for (const auto& p : parts) {
    total += p.value;
    err += p.error_estimate;
    nodes = std::max(nodes, p.nodes);
  }
  rep_out.value = total.real();
  rep_out.error_estimate = std::max(err, std::abs(total.imag()));
  rep_out.cutoff = nodes;
  rep_out.a_max = f->a_max();
  rep_out.seconds = seconds_since(t0);
  return rep_out;
}

namespace {

template <class Int>
std::int64_t count_forms(std::int64_t D, const bqf::Form& rep, std::int64_t s, std::int64_t lo, std::int64_t hi) {
  const Int a = rep.a, b = rep.b, c = rep.c;
  std::int64_t count = 0;
  for (std::int64_t B = lo; B <= hi; B += 2) {
    const Int t = s + b * B;
    const Int delta = t * t - 4 * a * c * (Int(B) * B - D);
    if (delta < 0) continue;
    if (delta > Int(std::numeric_limits<std::int64_t>::max())) throw error(errc::overflow, "lattice_count overflow");
    const std::int64_t r = arith::isqrt(static_cast<std::int64_t>(delta));
    if (Int(r) * r != delta) continue;
    for (int sg : {1, -1}) {
      if (r == 0 && sg < 0) break;
      const Int num = t + sg * r;
      if (num % (4 * c) != 0) continue;
      const Int A = num / (4 * c);
      const Int cnum = t - 2 * c * A;
      if (cnum % (2 * a) != 0) continue;
      const Int C = cnum / (2 * a);
      if (Int(B) * B - 4 * A * C == D) ++count;
    }
  }
  return count;
}

}  // namespace

std::int64_t lattice_count(std::int64_t D, const bqf::Form& rep, std::int64_t s) {
  if (!rep.positive_definite()) throw error(errc::not_definite, "lattice_count needs a positive definite form");
  const double a = static_cast<double>(rep.a), b = static_cast<double>(rep.b), c = static_cast<double>(rep.c);
  const double abs_d = 4 * a * c - b * b;
  const double sd = static_cast<double>(s), Dd = static_cast<double>(D);
  // Delta(B) = (s + bB)^2 - 4ac(B^2 - D) >= 0 bounds B.
  const double root = std::sqrt(sd * sd * b * b + abs_d * (sd * sd + Dd * (b * b + abs_d)));
  std::int64_t lo = static_cast<std::int64_t>(std::floor((sd * b - root) / abs_d)) - 1;
  const std::int64_t hi = static_cast<std::int64_t>(std::ceil((sd * b + root) / abs_d)) + 1;
  if (((lo - D) % 2 + 2) % 2 != 0) ++lo;
  const double Bmax = std::max(std::abs(static_cast<double>(lo)), std::abs(static_cast<double>(hi)));
  const double t = std::abs(sd) + std::abs(b) * Bmax;
  const double biggest = t * t + 4 * a * c * (Bmax * Bmax + Dd) + 8 * c * t + 4 * a * c * 4;
  if (biggest < 1e18) return count_forms<std::int64_t>(D, rep, s, lo, hi);
  return count_forms<__int128>(D, rep, s, lo, hi);
}

TraceReport lhs_latticesum(int k, std::int64_t D, std::int64_t d, const Options& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  check_inputs(k, D, d);
  const bqf::Form rep = class_rep(d, opt);
  if (!bqf::hypothesis_check(D, d)) {
    throw error(errc::hypothesis_violated, "a CM point of discriminant " + std::to_string(d) +
                                               " lies on a geodesic of discriminant " + std::to_string(D));
  }
  const double abs_d = static_cast<double>(-d);
  const double Dd = static_cast<double>(D);
  const double stab = bqf::automorphism_count(rep) / 2.0;
  const double P = std::pow(2.0, k) * std::sqrt(abs_d) * std::pow(Dd, k - 0.5) * (k % 2 == 0 ? 1.0 : -1.0) /
                   (stab * binomial(2 * k - 2, k - 1) * pi * (2 * k - 1));
  auto g = [&](double s) {
    const double s2 = s * s;
    return std::pow(Dd + s2 / abs_d, -k / 2.0) * hyp2f1(k / 2.0, k / 2.0, k + 0.5, Dd * abs_d / (Dd * abs_d + s2));
  };
  // s = 2 (Q, A) has fixed parity b D mod 2; step 2 within the class.
  const std::int64_t parity = ((rep.b % 2) * (D % 2) + 2) % 2;
  const double sgn_neg = k % 2 == 0 ? 1.0 : -1.0;

  std::vector<double> terms;  // terms[j]: s = first + 2j, both signs
  std::vector<std::int64_t> counts_pos, counts_neg;
  const std::int64_t first = parity == 0 ? 2 : 1;
  auto extend_to = [&](std::int64_t S) {
    const std::size_t old = terms.size();
    const std::size_t n = S >= first ? static_cast<std::size_t>((S - first) / 2 + 1) : 0;
    if (n <= old) return;
    terms.resize(n);
    counts_pos.resize(n);
    counts_neg.resize(n);
    parallel_for(n - old, opt.threads, [&](std::size_t i) {
      const std::size_t j = old + i;
      const std::int64_t s = first + 2 * static_cast<std::int64_t>(j);
      counts_pos[j] = lattice_count(D, rep, s);
      counts_neg[j] = lattice_count(D, rep, -s);
      terms[j] = (static_cast<double>(counts_pos[j]) + sgn_neg * static_cast<double>(counts_neg[j])) *
                 g(static_cast<double>(s));
    });
  };
  auto value_at = [&](std::int64_t S) {
    extend_to(S);
    const std::size_t n = S >= first ? static_cast<std::size_t>((S - first) / 2 + 1) : 0;
    double sum = 0;
    for (std::size_t j = 0; j < n; ++j) sum += terms[j];
    // mean density over the upper half of the range, times the tail integral
    double rho = 0;
    std::size_t cnt = 0;
    for (std::size_t j = n / 2; j < n; ++j, ++cnt) {
      rho += static_cast<double>(counts_pos[j]) + sgn_neg * static_cast<double>(counts_neg[j]);
    }
    rho = cnt ? rho / static_cast<double>(cnt) : 0.0;
    const double start = static_cast<double>(first + 2 * static_cast<std::int64_t>(n) - 2) + 1.0;
    const auto& gl = gauss_legendre(48);
    double integral = 0;
    const double umax = 1.0 / start;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
      const double u = umax * (gl.nodes[i] + 1) / 2;
      integral += gl.weights[i] * g(1.0 / u) / (u * u);
    }
    integral *= umax / 2;
    return P * (sum + rho / 2.0 * integral);
  };

  const double tol = opt.tol.value_or(kLatticeSumTol);
  constexpr std::int64_t kCeiling = std::int64_t{1} << 15;
  double prev = value_at(64);
  for (std::int64_t S = 128; S <= kCeiling; S *= 2) {
    const double cur = value_at(S);
    const double change = std::abs(cur - prev);
    if (change < tol * (1 + std::abs(cur))) {
      TraceReport out;
      out.k = k;
      out.D = D;
      out.d = d;
      out.method = Method::latticesum;
      out.value = cur;
      out.error_estimate = change;
      out.cutoff = S;
      out.seconds = seconds_since(t0);
      return out;
    }
    prev = cur;
  }
  throw error(errc::no_convergence, "lattice sum did not converge below s = 2^15");
}

Eisenstein eisenstein_oracle(cplx z, double tol) {
  if (z.imag() < 0.5) throw error(errc::invalid_input, "eisenstein_oracle needs Im z >= 1/2");
  const cplx q = std::exp(2.0 * pi * I * z);
  cplx e4 = 1, e6 = 1, prod = 1, qn = 1;
  for (int n = 1; n < 100000; ++n) {
    qn *= q;
    double s3 = 0, s5 = 0;
    for (int dd = 1; dd * dd <= n; ++dd) {
      if (n % dd) continue;
      const int e = n / dd;
      s3 += std::pow(dd, 3);
      s5 += std::pow(dd, 5);
      if (e != dd) {
        s3 += std::pow(e, 3);
        s5 += std::pow(e, 5);
      }
    }
    e4 += 240.0 * s3 * qn;
    e6 -= 504.0 * s5 * qn;
    prod *= std::pow(1.0 - qn, 24);
    if (std::abs(qn) * std::pow(n, 6) * 504 < tol) break;
  }
  return {e4, e6, q * prod};
}

}  // namespace cyclotrace::analytic
