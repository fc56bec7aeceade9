#include "cyclotrace/fqm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cyclotrace/error.hpp"

namespace cyclotrace::fqm {

namespace {

using RatMatrix = std::vector<RatVector>;
using IntegerMatrix = std::vector<std::vector<Integer>>;

Rational frac(const Rational& x) {
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  Rational out = x - Rational(fl);
  out.canonicalize();
  return out;
}

std::complex<double> e(double x) { return std::polar(1.0, 2.0 * std::numbers::pi * x); }

RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix out(m.size(), RatVector(m.empty() ? 0 : m[0].size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) out[i][j] = Rational(static_cast<long>(m[i][j]));
  return out;
}

// Inverse by Gauss-Jordan; throws on singular input.
RatMatrix inverse(RatMatrix a) {
  const std::size_t n = a.size();
  RatMatrix inv(n, RatVector(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw error(errc::singular_gram, "singular Gram matrix");
    std::swap(a[pivot], a[col]);
    std::swap(inv[pivot], inv[col]);
    const Rational p = a[col][col];
    for (std::size_t j = 0; j < n; ++j) {
      a[col][j] /= p;
      inv[col][j] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t j = 0; j < n; ++j) {
        a[r][j] -= f * a[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

RatVector mul(const RatMatrix& m, const RatVector& v) {
  RatVector out(m.size(), Rational(0));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

bool integral(const Rational& x) { return x.get_den() == 1; }

// Smith normal form: returns diag and U with U G V = diag(d), d_i | d_{i+1}.
struct Smith {
  std::vector<Integer> diag;
  IntegerMatrix U;
};

Smith smith_normal_form(const IntMatrix& gram) {
  const std::size_t n = gram.size();
  IntegerMatrix a(n, std::vector<Integer>(n));
  IntegerMatrix U(n, std::vector<Integer>(n, Integer(0)));
  for (std::size_t i = 0; i < n; ++i) {
    U[i][i] = 1;
    for (std::size_t j = 0; j < n; ++j) a[i][j] = Integer(static_cast<long>(gram[i][j]));
  }
  auto row_op = [&](std::size_t dst, std::size_t src, const Integer& f) {  // row dst -= f row src
    for (std::size_t j = 0; j < n; ++j) {
      a[dst][j] -= f * a[src][j];
      U[dst][j] -= f * U[src][j];
    }
  };
  auto col_op = [&](std::size_t dst, std::size_t src, const Integer& f) {
    for (std::size_t i = 0; i < n; ++i) a[i][dst] -= f * a[i][src];
  };
  for (std::size_t t = 0; t < n; ++t) {
    for (;;) {
      // smallest nonzero entry of the trailing block into (t, t)
      std::size_t pi = n, pj = n;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a[i][j] != 0 && (pi == n || abs(a[i][j]) < abs(a[pi][pj]))) {
            pi = i;
            pj = j;
          }
      if (pi == n) throw error(errc::singular_gram, "singular Gram matrix");
      std::swap(a[pi], a[t]);
      std::swap(U[pi], U[t]);
      for (std::size_t i = 0; i < n; ++i) std::swap(a[i][pj], a[i][t]);
      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        if (a[i][t] == 0) continue;
        Integer qq;
        mpz_fdiv_q(qq.get_mpz_t(), a[i][t].get_mpz_t(), a[t][t].get_mpz_t());
        row_op(i, t, qq);
        if (a[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a[t][j] == 0) continue;
        Integer qq;
        mpz_fdiv_q(qq.get_mpz_t(), a[t][j].get_mpz_t(), a[t][t].get_mpz_t());
        col_op(j, t, qq);
        if (a[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility of the remaining block
      bool divides = true;
      for (std::size_t i = t + 1; i < n && divides; ++i)
        for (std::size_t j = t + 1; j < n && divides; ++j)
          if (a[i][j] % a[t][t] != 0) {
            for (std::size_t k = 0; k < n; ++k) {
              a[t][k] += a[i][k];
              U[t][k] += U[i][k];
            }
            divides = false;
          }
      if (divides) break;
    }
    if (a[t][t] < 0) {
      for (std::size_t j = 0; j < n; ++j) {
        a[t][j] = -a[t][j];
        U[t][j] = -U[t][j];
      }
    }
  }
  Smith out;
  for (std::size_t i = 0; i < n; ++i) out.diag.push_back(a[i][i]);
  out.U = std::move(U);
  return out;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

}  // namespace

// ---------------------------------------------------------------- IntLattice

IntLattice::IntLattice(IntMatrix gram) : gram_(std::move(gram)) {
  for (std::size_t i = 0; i < gram_.size(); ++i) {
    if (gram_[i].size() != gram_.size()) throw error(errc::invalid_input, "Gram matrix is not square");
    if (gram_[i][i] % 2 != 0) throw error(errc::invalid_input, "Gram matrix has an odd diagonal entry");
    for (std::size_t j = 0; j < i; ++j)
      if (gram_[i][j] != gram_[j][i]) throw error(errc::invalid_input, "Gram matrix is not symmetric");
  }
}

Rational IntLattice::bilinear(const RatVector& x, const RatVector& y) const {
  Rational s = 0;
  for (std::size_t i = 0; i < rank(); ++i)
    for (std::size_t j = 0; j < rank(); ++j)
      if (gram_[i][j] != 0) s += x[i] * Rational(static_cast<long>(gram_[i][j])) * y[j];
  return s;
}

Rational IntLattice::q(const RatVector& x) const { return bilinear(x, x) / 2; }

Integer IntLattice::det() const {
  RatMatrix a = to_rational(gram_);
  const std::size_t n = a.size();
  Rational d = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      std::swap(a[pivot], a[col]);
      d = -d;
    }
    d *= a[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      const Rational f = a[r][col] / a[col][col];
      for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  return d.get_num();
}

std::pair<int, int> IntLattice::signature() const {
  // Congruence diagonalization over Q.
  RatMatrix a = to_rational(gram_);
  const std::size_t n = a.size();
  int pos = 0, neg = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t j = k + 1;
      while (j < n && a[k][j] == 0) ++j;
      if (j == n) throw error(errc::singular_gram, "singular Gram matrix");
      // e_k += e_j (or -= when that cancels): diagonal becomes a_kk + 2 a_kj + a_jj
      const Rational sgn = (a[j][j] + 2 * a[k][j] == 0) ? Rational(-1) : Rational(1);
      for (std::size_t i = 0; i < n; ++i) a[k][i] += sgn * a[j][i];
      for (std::size_t i = 0; i < n; ++i) a[i][k] += sgn * a[i][j];
    }
    if (a[k][k] > 0) ++pos;
    else ++neg;
    for (std::size_t r = k + 1; r < n; ++r) {
      const Rational f = a[r][k] / a[k][k];
      for (std::size_t j = 0; j < n; ++j) a[r][j] -= f * a[k][j];
      for (std::size_t i = 0; i < n; ++i) a[i][r] -= f * a[i][k];
    }
  }
  return {pos, neg};
}

bool IntLattice::positive_definite() const {
  const auto [p, m] = signature();
  return m == 0 && p == static_cast<int>(rank());
}

IntLattice IntLattice::negated() const {
  IntMatrix g = gram_;
  for (auto& row : g)
    for (auto& v : row) v = -v;
  return IntLattice(std::move(g));
}

IntLattice direct_sum(const IntLattice& a, const IntLattice& b) {
  const std::size_t n = a.rank() + b.rank();
  IntMatrix g(n, std::vector<std::int64_t>(n, 0));
  for (std::size_t i = 0; i < a.rank(); ++i)
    for (std::size_t j = 0; j < a.rank(); ++j) g[i][j] = a.gram()[i][j];
  for (std::size_t i = 0; i < b.rank(); ++i)
    for (std::size_t j = 0; j < b.rank(); ++j) g[a.rank() + i][a.rank() + j] = b.gram()[i][j];
  return IntLattice(std::move(g));
}

// ------------------------------------------------------------------ FQModule

FQModule disc_group(const IntLattice& lattice) {
  const std::size_t n = lattice.rank();
  if (lattice.det() == 0) throw error(errc::singular_gram, "singular Gram matrix");
  const Smith snf = smith_normal_form(lattice.gram());
  FQModule m;
  m.lattice_ = lattice;
  m.to_smith_ = snf.U;
  for (const Integer& d : snf.diag) m.smith_diag_.push_back(d.get_si());
  const auto [pos, neg] = lattice.signature();
  m.signature_ = (((pos - neg) % 8) + 8) % 8;

  // generators x_i = G^{-1} U^{-1} e_i for d_i > 1
  const RatMatrix ginv = inverse(to_rational(lattice.gram()));
  RatMatrix U(n, RatVector(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) U[i][j] = Rational(snf.U[i][j]);
  const RatMatrix uinv = inverse(U);
  std::vector<RatVector> gens;
  for (std::size_t i = 0; i < n; ++i) {
    if (m.smith_diag_[i] == 1) continue;
    RatVector col(n);
    for (std::size_t r = 0; r < n; ++r) col[r] = uinv[r][i];
    gens.push_back(mul(ginv, col));
    m.orders_.push_back(m.smith_diag_[i]);
  }
  m.size_ = 1;
  for (auto o : m.orders_) m.size_ *= static_cast<std::size_t>(o);

  m.reps_.resize(m.size_);
  m.qvals_.resize(m.size_);
  for (std::size_t idx = 0; idx < m.size_; ++idx) {
    RatVector x(n, Rational(0));
    std::size_t rest = idx;
    for (std::size_t g = gens.size(); g-- > 0;) {
      const auto c = static_cast<long>(rest % static_cast<std::size_t>(m.orders_[g]));
      rest /= static_cast<std::size_t>(m.orders_[g]);
      for (std::size_t r = 0; r < n; ++r) x[r] += Rational(c) * gens[g][r];
    }
    // shift each coordinate into [0, 1)
    for (auto& v : x) v = frac(v);
    m.reps_[idx] = x;
    m.qvals_[idx] = frac(lattice.q(x));
    const auto den = m.qvals_[idx].get_den().get_si();
    m.level_ = lcm64(m.level_, den);
  }
  return m;
}

bool FQModule::in_dual(const RatVector& x) const {
  const auto& g = lattice_->gram();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < g.size(); ++j) s += Rational(static_cast<long>(g[i][j])) * x[j];
    if (!integral(s)) return false;
  }
  return true;
}

std::size_t FQModule::index_of(const RatVector& x) const {
  const auto& g = lattice_->gram();
  const std::size_t n = g.size();
  std::vector<Integer> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational s = 0;
    for (std::size_t j = 0; j < n; ++j) s += Rational(static_cast<long>(g[i][j])) * x[j];
    if (!integral(s)) throw error(errc::invalid_input, "vector is not in the dual lattice");
    y[i] = s.get_num();
  }
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (smith_diag_[i] == 1) continue;
    Integer c = 0;
    for (std::size_t j = 0; j < n; ++j) c += to_smith_[i][j] * y[j];
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), Integer(static_cast<long>(smith_diag_[i])).get_mpz_t());
    idx = idx * static_cast<std::size_t>(smith_diag_[i]) + r.get_ui();
  }
  return idx;
}

Rational FQModule::bilinear(std::size_t i, std::size_t j) const {
  return frac(lattice_->bilinear(reps_.at(i), reps_.at(j)));
}

std::size_t FQModule::negate(std::size_t i) const {
  RatVector x = reps_.at(i);
  for (auto& v : x) v = -v;
  return index_of(x);
}

std::size_t FQModule::add(std::size_t i, std::size_t j) const {
  RatVector x = reps_.at(i);
  for (std::size_t r = 0; r < x.size(); ++r) x[r] += reps_.at(j)[r];
  return index_of(x);
}

double FQModule::milgram_defect() const {
  std::complex<double> s = 0;
  for (const auto& qv : qvals_) s += e(qv.get_d());
  s /= std::sqrt(static_cast<double>(size_));
  return std::abs(s - e(signature_ / 8.0));
}

// ------------------------------------------------------------------ VVSeries

VVSeries::VVSeries(std::size_t components, std::int64_t denominator, Rational weight, int pi_power, int sigma,
                   std::int64_t precision)
    : components_(components),
      denominator_(denominator),
      weight_(std::move(weight)),
      pi_power_(pi_power),
      sigma_(sigma),
      precision_(precision) {
  if (components == 0 || denominator <= 0) throw error(errc::invalid_input, "bad series shape");
  if (sigma != 1 && sigma != -1) throw error(errc::invalid_input, "sigma must be +1 or -1");
  weight_.canonicalize();
}

Rational VVSeries::exponent(std::int64_t scaled) const {
  Rational r(static_cast<long>(scaled), static_cast<long>(denominator_));
  r.canonicalize();
  return r;
}

std::int64_t VVSeries::scale(const Rational& exponent) const {
  const Rational s = exponent * Rational(static_cast<long>(denominator_));
  if (!integral(s)) {
    throw error(errc::invalid_input, "exponent " + s.get_str() + " not representable over denominator " +
                                         std::to_string(denominator_));
  }
  return s.get_num().get_si();
}

Rational VVSeries::precision_exponent() const { return exponent(precision_); }

bool VVSeries::complete_at(const Rational& ex) const {
  if (precision_ == kComplete) return true;
  return ex <= precision_exponent();
}

void VVSeries::add_scaled(std::size_t mu, std::int64_t scaled, const Rational& value) {
  if (mu >= components_) throw error(errc::invalid_input, "component index out of range");
  if (value == 0) return;
  auto [it, inserted] = terms_.try_emplace({mu, scaled}, value);
  if (!inserted) {
    it->second += value;
    if (it->second == 0) terms_.erase(it);
  }
}

void VVSeries::add(std::size_t mu, const Rational& ex, const Rational& value) {
  add_scaled(mu, scale(ex), value);
}

Rational VVSeries::coeff(std::size_t mu, const Rational& ex) const {
  const Rational s = ex * Rational(static_cast<long>(denominator_));
  if (!integral(s)) return 0;
  const auto it = terms_.find({mu, s.get_num().get_si()});
  return it == terms_.end() ? Rational(0) : it->second;
}

VVSeries VVSeries::rescaled(std::int64_t new_den) const {
  if (new_den % denominator_ != 0) throw error(errc::invalid_input, "denominator must be a multiple");
  const std::int64_t f = new_den / denominator_;
  VVSeries out(components_, new_den, weight_, pi_power_, sigma_,
               precision_ == kComplete ? kComplete : precision_ * f);
  for (const auto& [key, v] : terms_) out.terms_.emplace(Key{key.first, key.second * f}, v);
  return out;
}

VVSeries VVSeries::scaled_by(const Rational& factor) const {
  VVSeries out(components_, denominator_, weight_, pi_power_, sigma_, precision_);
  if (factor == 0) return out;
  for (const auto& [key, v] : terms_) out.terms_.emplace(key, v * factor);
  return out;
}

VVSeries VVSeries::relabelled(const std::vector<std::optional<std::size_t>>& map, std::size_t components) const {
  if (map.size() != components_) throw error(errc::invalid_input, "relabelling map has the wrong size");
  VVSeries out(components, denominator_, weight_, pi_power_, sigma_, precision_);
  for (const auto& [key, v] : terms_) {
    if (map[key.first]) out.add_scaled(*map[key.first], key.second, v);
  }
  return out;
}

bool VVSeries::satisfies_exponent_rule(const FQModule& module) const {
  if (module.size() != components_) return false;
  for (const auto& [key, v] : terms_) {
    const Rational diff = exponent(key.second) - Rational(sigma_) * module.q(key.first);
    if (!integral(diff)) return false;
  }
  return true;
}

CVector VVSeries::evaluate(std::complex<double> tau) const {
  CVector out(components_, 0.0);
  const double scale_pi = std::pow(std::numbers::pi, pi_power_);
  for (const auto& [key, v] : terms_) {
    const double ex = static_cast<double>(key.second) / static_cast<double>(denominator_);
    out[key.first] += v.get_d() * std::exp(2.0 * std::numbers::pi * std::complex<double>(0, 1) * ex * tau);
  }
  for (auto& x : out) x *= scale_pi;
  return out;
}

std::string VVSeries::serialize() const {
  std::ostringstream os;
  os << weight_.get_str() << '\t' << pi_power_ << '\t' << sigma_ << '\t' << denominator_ << '\t'
     << (precision_ == kComplete ? std::string("inf") : std::to_string(precision_)) << '\t' << components_
     << '\n';
  for (const auto& [key, v] : terms_) os << key.first << '\t' << key.second << '\t' << arith::to_string(v) << '\n';
  return os.str();
}

VVSeries VVSeries::parse(const std::string& text) {
  std::istringstream is(text);
  std::string weight, prec;
  int pi_power = 0, sigma = 1;
  std::int64_t den = 1;
  std::size_t comps = 1;
  if (!(is >> weight >> pi_power >> sigma >> den >> prec >> comps)) {
    throw error(errc::invalid_input, "bad series header");
  }
  std::int64_t precision = kComplete;
  if (prec != "inf") {
    try {
      precision = std::stoll(prec);
    } catch (const std::exception&) {
      throw error(errc::invalid_input, "bad precision field '" + prec + "'");
    }
  }
  VVSeries out(comps, den, arith::parse_rational(weight), pi_power, sigma, precision);
  std::size_t mu;
  std::int64_t scaled;
  std::string value;
  while (is >> mu >> scaled >> value) out.add_scaled(mu, scaled, arith::parse_rational(value));
  if (!is.eof()) throw error(errc::invalid_input, "bad series line");
  return out;
}

std::ostream& operator<<(std::ostream& os, const VVSeries& f) { return os << f.serialize(); }

// ------------------------------------------------------- series operations

namespace {

std::pair<VVSeries, VVSeries> common_denominator(const VVSeries& f, const VVSeries& g) {
  const std::int64_t den = lcm64(f.denominator(), g.denominator());
  return {f.rescaled(den), g.rescaled(den)};
}

std::int64_t min_exponent(const VVSeries& f) {
  std::int64_t m = VVSeries::kComplete;
  for (const auto& [key, v] : f.terms()) m = std::min(m, key.second);
  return m;
}

// Precision of a product: each factor's truncation shifted by the other's
// lowest exponent.
std::int64_t product_precision(const VVSeries& f, const VVSeries& g) {
  std::int64_t p = VVSeries::kComplete;
  if (f.precision() != VVSeries::kComplete && !g.terms().empty()) p = std::min(p, f.precision() + min_exponent(g));
  if (g.precision() != VVSeries::kComplete && !f.terms().empty()) p = std::min(p, g.precision() + min_exponent(f));
  if (p == VVSeries::kComplete && (f.precision() != VVSeries::kComplete || g.precision() != VVSeries::kComplete)) {
    p = std::min(f.precision(), g.precision());
  }
  return p;
}

// Gamma(x + n) / (Gamma(m + 1) Gamma(x + n - m)) as a falling factorial.
Rational falling_ratio(const Rational& top, unsigned m) {
  Rational out = 1;
  for (unsigned j = 1; j <= m; ++j) out *= (top - Rational(j)) / Rational(j);
  return out;
}

bool nonpositive_integer(const Rational& x) { return integral(x) && x <= 0; }

}  // namespace

VVSeries tensor(const VVSeries& f, const VVSeries& g) { return rankin_cohen(f, g, 0); }

VVSeries rankin_cohen(const VVSeries& f0, const VVSeries& g0, unsigned n) {
  if (f0.sigma() != g0.sigma()) {
    throw error(errc::invalid_input, "series carry different representation signs");
  }
  const Rational kappa = f0.weight();
  const Rational ell = g0.weight();
  if (n > 0 && (nonpositive_integer(kappa + Rational(n)) || nonpositive_integer(ell + Rational(n)))) {
    throw error(errc::gamma_pole, "Gamma pole in the bracket coefficients");
  }
  const auto [f, g] = common_denominator(f0, g0);
  // coefficient of theta^r f theta^s g
  std::vector<Rational> coef(n + 1);
  for (unsigned r = 0; r <= n; ++r) {
    const unsigned s = n - r;
    coef[r] = falling_ratio(kappa + Rational(n), s) * falling_ratio(ell + Rational(n), r);
    if (r % 2 == 1) coef[r] = -coef[r];
  }
  VVSeries out(f.components() * g.components(), f.denominator(), kappa + ell + Rational(2 * n),
               f.pi_power() + g.pi_power(), f.sigma(), product_precision(f, g));
  for (const auto& [kf, vf] : f.terms()) {
    const Rational a = f.exponent(kf.second);
    for (const auto& [kg, vg] : g.terms()) {
      const Rational b = g.exponent(kg.second);
      Rational c = 0;
      for (unsigned r = 0; r <= n; ++r) c += coef[r] * arith::pow(a, r) * arith::pow(b, n - r);
      if (c != 0) out.add_scaled(kf.first * g.components() + kg.first, kf.second + kg.second, c * vf * vg);
    }
  }
  return out;
}

PiRational ct_pairing(const VVSeries& f0, const VVSeries& g0) {
  if (f0.components() != g0.components()) {
    throw error(errc::invalid_input, "pairing needs series on the same module");
  }
  const auto [f, g] = common_denominator(f0, g0);
  auto check = [](const VVSeries& needed_from, const VVSeries& other) {
    for (const auto& [key, v] : other.terms()) {
      if (needed_from.precision() != VVSeries::kComplete && -key.second > needed_from.precision()) {
        throw error(errc::insufficient_precision,
                    "need coefficients up to exponent " + needed_from.exponent(-key.second).get_str() +
                        ", series is complete only to " + needed_from.precision_exponent().get_str());
      }
    }
  };
  check(g, f);
  check(f, g);
  PiRational out{0, f.pi_power() + g.pi_power()};
  for (const auto& [key, v] : f.terms()) {
    const auto it = g.terms().find({key.first, -key.second});
    if (it != g.terms().end()) out.value += v * it->second;
  }
  return out;
}

VVSeries theta_series(const IntLattice& lattice, const FQModule& module, const Rational& prec) {
  if (!lattice.positive_definite()) {
    throw error(errc::not_positive_definite, "theta series needs a positive definite lattice");
  }
  const std::size_t n = lattice.rank();
  const RatMatrix ginv = inverse(to_rational(lattice.gram()));
  // |x_i| <= sqrt(2 prec (G^-1)_ii) on the ellipsoid q(x) <= prec
  std::vector<std::int64_t> bound(n);
  for (std::size_t i = 0; i < n; ++i) {
    bound[i] = static_cast<std::int64_t>(std::ceil(std::sqrt(2.0 * prec.get_d() * ginv[i][i].get_d()))) + 1;
  }
  Integer scaled_prec;
  const Rational p_scaled = prec * Rational(static_cast<long>(module.level()));
  mpz_fdiv_q(scaled_prec.get_mpz_t(), p_scaled.get_num_mpz_t(), p_scaled.get_den_mpz_t());
  VVSeries out(module.size(), module.level(), Rational(static_cast<long>(n), 2), 0, 1, scaled_prec.get_si());
  std::vector<std::int64_t> v(n);
  for (std::size_t mu = 0; mu < module.size(); ++mu) {
    const RatVector& rep = module.representative(mu);
    std::fill(v.begin(), v.end(), 0);
    for (std::size_t i = 0; i < n; ++i) v[i] = -bound[i] - 1;
    // odometer over the box
    for (;;) {
      RatVector x(n);
      for (std::size_t i = 0; i < n; ++i) x[i] = rep[i] + Rational(static_cast<long>(v[i]));
      const Rational qx = lattice.q(x);
      if (qx <= prec) out.add(mu, qx, 1);
      std::size_t i = 0;
      while (i < n && ++v[i] > bound[i] + 1) {
        v[i] = -bound[i] - 1;
        ++i;
      }
      if (i == n) break;
    }
  }
  return out;
}

// --------------------------------------------------------------- embeddings

LatticeEmbedding::LatticeEmbedding(const IntLattice& source, const IntLattice& target, IntMatrix basis)
    : basis_(std::move(basis)) {
  const std::size_t nk = source.rank();
  const std::size_t nl = target.rank();
  if (basis_.size() != nl || (nl > 0 && basis_[0].size() != nk) || nk != nl) {
    throw error(errc::incompatible_embedding, "embedding matrix has the wrong shape");
  }
  // E^T G_L E = G_K
  for (std::size_t i = 0; i < nk; ++i)
    for (std::size_t j = 0; j < nk; ++j) {
      std::int64_t s = 0;
      for (std::size_t a = 0; a < nl; ++a)
        for (std::size_t b = 0; b < nl; ++b) s += basis_[a][i] * target.gram()[a][b] * basis_[b][j];
      if (s != source.gram()[i][j]) throw error(errc::incompatible_embedding, "Gram matrices do not match");
    }
  source_module_ = disc_group(source);
  target_module_ = disc_group(target);
  const Integer dk = abs(source.det());
  const Integer dl = abs(target.det());
  Integer idx2 = dk / dl;
  if (idx2 * dl != dk || !mpz_perfect_square_p(idx2.get_mpz_t())) {
    throw error(errc::incompatible_embedding, "determinants are not related by a square index");
  }
  Integer idx;
  mpz_sqrt(idx.get_mpz_t(), idx2.get_mpz_t());
  index_ = idx.get_si();
  map_.resize(source_module_.size());
  for (std::size_t mu = 0; mu < source_module_.size(); ++mu) {
    const RatVector& x = source_module_.representative(mu);
    RatVector y(nl, Rational(0));
    for (std::size_t a = 0; a < nl; ++a)
      for (std::size_t i = 0; i < nk; ++i) y[a] += Rational(static_cast<long>(basis_[a][i])) * x[i];
    if (target_module_.in_dual(y)) map_[mu] = target_module_.index_of(y);
  }
}

VVSeries restrict(const VVSeries& f, const LatticeEmbedding& embedding) {
  const auto& src = embedding.source_module();
  if (f.components() != embedding.target_module().size()) {
    throw error(errc::incompatible_embedding, "series does not live on the target module");
  }
  VVSeries out(src.size(), f.denominator(), f.weight(), f.pi_power(), f.sigma(), f.precision());
  const auto& map = embedding.component_map();
  for (const auto& [key, v] : f.terms()) {
    for (std::size_t mu = 0; mu < src.size(); ++mu) {
      if (map[mu] && *map[mu] == key.first) out.add_scaled(mu, key.second, v);
    }
  }
  return out;
}

VVSeries trace_up(const VVSeries& g, const LatticeEmbedding& embedding) {
  if (g.components() != embedding.source_module().size()) {
    throw error(errc::incompatible_embedding, "series does not live on the source module");
  }
  return g.relabelled(embedding.component_map(), embedding.target_module().size());
}

CVector trace_up(const CVector& g, const LatticeEmbedding& embedding) {
  if (g.size() != embedding.source_module().size()) {
    throw error(errc::incompatible_embedding, "vector does not live on the source module");
  }
  CVector out(embedding.target_module().size(), 0.0);
  const auto& map = embedding.component_map();
  for (std::size_t mu = 0; mu < g.size(); ++mu)
    if (map[mu]) out[*map[mu]] += g[mu];
  return out;
}

// ------------------------------------------------------------------- numeric

std::pair<CMatrix, CMatrix> weil_matrices(const FQModule& module) {
  const std::size_t n = module.size();
  CMatrix t(n, CVector(n, 0.0));
  CMatrix s(n, CVector(n, 0.0));
  const std::complex<double> phase = e(-module.signature_mod8() / 8.0) / std::sqrt(static_cast<double>(n));
  for (std::size_t mu = 0; mu < n; ++mu) {
    t[mu][mu] = e(module.q(mu).get_d());
    for (std::size_t nu = 0; nu < n; ++nu) s[nu][mu] = phase * e(-module.bilinear(nu, mu).get_d());
  }
  return {t, s};
}

std::vector<std::optional<std::size_t>> identify(const FQModule& from, const FQModule& to) {
  std::vector<std::optional<std::size_t>> map(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    const RatVector& x = from.representative(i);
    if (to.in_dual(x)) map[i] = to.index_of(x);
  }
  return map;
}

std::vector<std::size_t> sum_identification(const FQModule& a, const FQModule& b, const FQModule& sum) {
  std::vector<std::size_t> out(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      RatVector x = a.representative(i);
      const auto& y = b.representative(j);
      x.insert(x.end(), y.begin(), y.end());
      out[i * b.size() + j] = sum.index_of(x);
    }
  return out;
}

CVector theta_value(const IntLattice& lattice, const FQModule& module, std::complex<double> tau, double tol) {
  if (!lattice.positive_definite()) {
    throw error(errc::not_positive_definite, "theta series needs a positive definite lattice");
  }
  if (tau.imag() <= 0) throw error(errc::invalid_input, "tau must lie in the upper half-plane");
  // exp(-2 pi v q) < tol once q > qmax
  const double qmax = -std::log(tol) / (2.0 * std::numbers::pi * tau.imag()) + 1.0;
  const Rational prec(static_cast<long>(std::ceil(qmax)));
  const VVSeries th = theta_series(lattice, module, prec);
  return th.evaluate(tau);
}

CVector siegel_theta_eval(const FQModule& module, std::complex<double> tau, std::complex<double> z, int cutoff) {
  if (tau.imag() <= 0 || z.imag() <= 0) throw error(errc::invalid_input, "tau and z must lie in the upper half-plane");
  if (module.lattice().rank() != 3) throw error(errc::invalid_input, "Siegel theta needs the rank-3 lattice of forms");
  const double x = z.real(), y = z.imag();
  const double v = tau.imag();
  CVector out(module.size(), 0.0);
  const std::complex<double> two_pi_i(0, 2.0 * std::numbers::pi);
  for (std::size_t mu = 0; mu < module.size(); ++mu) {
    const auto& rep = module.representative(mu);
    const double r0 = rep[0].get_d(), r1 = rep[1].get_d(), r2 = rep[2].get_d();
    std::complex<double> acc = 0;
    for (int i = -cutoff; i <= cutoff; ++i)
      for (int j = -cutoff; j <= cutoff; ++j)
        for (int k = -cutoff; k <= cutoff; ++k) {
          const double a = r0 + i, beta = r1 + j, c = r2 + k;
          const double p = (a * (x * x + y * y) + 2.0 * beta * x + c) / y;
          const std::complex<double> Qz = (a * z + 2.0 * beta) * z + c;
          const double qz = p * p / 4.0;
          const double qperp = -std::norm(Qz) / (4.0 * y * y);
          acc += std::exp(two_pi_i * (qz * tau + qperp * std::conj(tau)));
        }
    out[mu] = v * acc;
  }
  return out;
}

}  // namespace cyclotrace::fqm
