#include "cyclotrace/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <sstream>

#include "cyclotrace/analytic.hpp"
#include "cyclotrace/bqf.hpp"
#include "cyclotrace/cli.hpp"
#include "cyclotrace/error.hpp"
#include "cyclotrace/fqm.hpp"
#include "cyclotrace/special_forms.hpp"
#include "oracles.hpp"

namespace cyclotrace::selftest {

namespace {

using analytic::cplx;

template <class... Args>
std::string why(Args&&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

double max_diff(const fqm::CVector& a, const fqm::CVector& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

fqm::CVector apply(const fqm::CMatrix& m, const fqm::CVector& v) {
  fqm::CVector out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  return out;
}

std::string hurwitz_relations() {
  const auto ref = oracle::hurwitz_recursion(200);
  for (std::int64_t n = 0; n <= 200; ++n)
    if (special::hurwitz(n) != ref[static_cast<std::size_t>(n)]) return why("H(", n, ") differs");
  return {};
}

std::string constant_term_duality() {
  for (std::int64_t D = 5; D <= 200; ++D) {
    if (!arith::is_discriminant(D) || arith::is_square(D)) continue;
    if (special::fD_const_term(2, D) != -120 * oracle::zagier_L_minus1(D)) return why("D = ", D);
  }
  return {};
}

std::string hypothesis_scan() {
  for (std::int64_t D = 5; D <= 300; ++D) {
    if (!arith::is_discriminant(D) || arith::is_square(D)) continue;
    if (bqf::hypothesis_check(D, -4) != oracle::hypothesis_d4_brute(D)) return why("D = ", D);
  }
  return {};
}

std::string exact_vs_closed() {
  for (int k : {2, 4})
    for (std::int64_t D = 5; D <= 100; ++D) {
      if (!arith::is_discriminant(D) || arith::is_square(D) || !bqf::hypothesis_check(D, -4)) continue;
      if (special::rhs_trace(k, D) != special::closed_formula(k, D)) return why("k = ", k, ", D = ", D);
    }
  return {};
}

std::string milgram() {
  const auto& L = special::lattices();
  for (const fqm::FQModule* m : {&L.P_module, &L.N_module, &L.N_minus_module, &L.embedding.source_module(),
                                 &L.embedding.target_module()}) {
    if (m->milgram_defect() >= 1e-10) return why("defect ", m->milgram_defect());
  }
  return {};
}

std::string theta_transforms() {
  const auto& L = special::lattices();
  const cplx tau(0.3, 1.0);
  for (const auto* pair : {&L.P, &L.N_minus}) {
    const auto m = fqm::disc_group(*pair);
    const auto [t, s] = fqm::weil_matrices(m);
    const auto th = fqm::theta_value(*pair, m, tau);
    if (max_diff(fqm::theta_value(*pair, m, tau + 1.0), apply(t, th)) >= 1e-6) return "T";
    auto rhs = apply(s, th);
    for (auto& x : rhs) x *= std::pow(tau, static_cast<double>(pair->rank()) / 2);
    if (max_diff(fqm::theta_value(*pair, m, -1.0 / tau), rhs) >= 1e-6) return "S";
  }
  return {};
}

std::string siegel_split() {
  const auto& L = special::lattices();
  const cplx tau(0, 2);
  const auto siegel = fqm::siegel_theta_eval(L.embedding.target_module(), tau, cplx(0, 1), 10);
  const auto tp = fqm::theta_value(L.P, L.P_module, tau);
  const auto tn = fqm::theta_value(L.N_minus, L.N_minus_module, tau);
  const auto to_n = fqm::identify(L.N_minus_module, L.N_module);
  const auto into_k = fqm::sum_identification(L.P_module, L.N_module, L.embedding.source_module());
  fqm::CVector split(L.embedding.source_module().size(), 0.0);
  for (std::size_t i = 0; i < tp.size(); ++i)
    for (std::size_t j = 0; j < tn.size(); ++j)
      split[into_k[i * L.N_module.size() + *to_n[j]]] += tau.imag() * tp[i] * std::conj(tn[j]);
  const double diff = max_diff(fqm::trace_up(split, L.embedding), siegel);
  return diff < 1e-8 ? std::string() : why("diff ", diff);
}

std::string hyp2f1_closed() {
  const double v = analytic::hyp2f1(0.5, 0.5, 1.5, 0.95);
  const double want = std::asin(std::sqrt(0.95)) / std::sqrt(0.95);
  return std::abs(v - want) < 1e-13 ? std::string() : why("2F1 = ", v);
}

std::string fkA_proportional() {
  const cplx pts[] = {{0.3, 0.9}, {0.1, 1.7}, {-0.45, 0.95}, {0.2, 0.5}, {-0.12, 2.1}};
  double lo = INFINITY, hi = -INFINITY;
  for (cplx z : pts) {
    const auto e4 = oracle::eisenstein(4, z), e6 = oracle::eisenstein(6, z);
    const double r = (analytic::eval_fkA(z, 2, -4, {1, 0, 1}, 1e-9) * e6 * e6 / (e4 * oracle::delta(z))).real();
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return (hi - lo) / std::abs(lo) < 1e-6 ? std::string() : why("spread ", (hi - lo) / std::abs(lo));
}

std::string geodesic_example() {
  const double v = analytic::lhs_geodesic(2, 12, -4).value;
  return std::abs(v - 24) < 25e-6 ? std::string() : why("tr(2,12) = ", v);
}

std::string latticesum_example() {
  const double v = analytic::lhs_latticesum(4, 12, -4).value;
  return std::abs(v - 72) < 73e-4 ? std::string() : why("tr(4,12) = ", v);
}

std::string odd_k_agreement() {
  const double g = analytic::lhs_geodesic(3, 12, -4).value;
  const double l = analytic::lhs_latticesum(3, 12, -4).value;
  return std::abs(g - l) < 1e-4 * (1 + std::abs(g)) ? std::string() : why(g, " vs ", l);
}

std::string hypothesis_rejected() {
  try {
    analytic::lhs_geodesic(2, 5, -4);
  } catch (const error& e) {
    return e.code() == errc::hypothesis_violated ? std::string() : std::string(e.what());
  }
  return "numeric answer for D = 5";
}

std::string csv_round_trip() {
  cli::Row a;
  a.k = 2;
  a.D = 12;
  a.d = -4;
  a.value = "24";
  a.error_estimate = 0;
  cli::Row b = a;
  b.method = analytic::Method::geodesic;
  b.value = cli::format_double(24.000000001);
  b.error_estimate = 1.5e-9;
  b.seconds = 0.25;
  std::stringstream s1, s2;
  cli::write_csv(s1, {a, b});
  std::stringstream in(s1.str());
  cli::write_csv(s2, cli::read_csv(in));
  return s1.str() == s2.str() ? std::string() : "CSV changed on re-read";
}

}  // namespace

std::vector<Check> invariant_suite() {
  return {
      {"hurwitz class numbers match the class number relations (n <= 200)", hurwitz_relations},
      {"H(0) = -1/12", [] { return special::hurwitz(0) == arith::ratio(-1, 12) ? std::string() : "H(0)"; }},
      {"-120 L_D(-1) is the constant term of f_D (D <= 200)", constant_term_duality},
      {"hypothesis check matches b^2 + 4a^2 (D <= 300)", hypothesis_scan},
      {"exact trace equals the closed formulas (k = 2, 4; D <= 100)", exact_vs_closed},
      {"Milgram invariant on all modules", milgram},
      {"theta transformation under T and S", theta_transforms},
      {"Siegel theta splits at (2i, i)", siegel_split},
      {"2F1 closed form near w = 1", hyp2f1_closed},
      {"f_{2,[1,0,1]} is proportional to E4 Delta / E6^2", fkA_proportional},
      {"geodesic tr(2,12) = 24", geodesic_example},
      {"lattice sum tr(4,12) = 72", latticesum_example},
      {"k = 3 geodesic and lattice sum agree at D = 12", odd_k_agreement},
      {"geodesic method refuses D = 5", hypothesis_rejected},
      {"CSV round trip", csv_round_trip},
  };
}

}  // namespace cyclotrace::selftest

namespace cyclotrace::cli {

int cmd_selftest(const RunConfig&, std::ostream& out, std::ostream&) {
  int passed = 0, failed = 0;
  for (const auto& c : selftest::invariant_suite()) {
    std::string reason;
    try {
      reason = c.run();
    } catch (const std::exception& e) {
      reason = e.what();
    }
    if (reason.empty()) {
      ++passed;
      out << "pass  " << c.name << '\n';
    } else {
      ++failed;
      out << "FAIL  " << c.name << ": " << reason << '\n';
    }
  }
  out << passed << " passed, " << failed << " failed\n";
  return failed ? mismatch : ok;
}

}  // namespace cyclotrace::cli
