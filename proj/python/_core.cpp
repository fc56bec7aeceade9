#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cyclotrace/analytic.hpp"
#include "cyclotrace/bqf.hpp"
#include "cyclotrace/error.hpp"
#include "cyclotrace/selftest.hpp"
#include "cyclotrace/special_forms.hpp"

namespace py = pybind11;
using namespace cyclotrace;

namespace {

py::object fraction(const arith::Rational& q) {
  static py::object Fraction = py::module_::import("fractions").attr("Fraction");
  return Fraction(py::int_(py::str(q.get_num().get_str())), py::int_(py::str(q.get_den().get_str())));
}

analytic::Options options(std::optional<double> tol, unsigned threads) {
  analytic::Options opt;
  opt.tol = tol;
  opt.threads = threads;
  return opt;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Traces of cycle integrals of f_{k,A}: exact, geodesic and lattice-sum evaluation.";

  static py::exception<error> base(m, "CyclotraceError");
  static py::exception<error> hypothesis(m, "HypothesisViolated", base.ptr());
  static py::exception<error> convergence(m, "NoConvergence", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const error& e) {
      switch (e.code()) {
        case errc::hypothesis_violated: py::set_error(hypothesis, e.what()); break;
        case errc::no_convergence: py::set_error(convergence, e.what()); break;
        default: py::set_error(base, e.what());
      }
    }
  });

  py::class_<analytic::TraceReport>(m, "TraceReport")
      .def_readonly("k", &analytic::TraceReport::k)
      .def_readonly("D", &analytic::TraceReport::D)
      .def_readonly("d", &analytic::TraceReport::d)
      .def_property_readonly("method", [](const analytic::TraceReport& r) { return std::string(to_string(r.method)); })
      .def_readonly("value", &analytic::TraceReport::value)
      .def_readonly("error_estimate", &analytic::TraceReport::error_estimate)
      .def_readonly("hypothesis_ok", &analytic::TraceReport::hypothesis_ok)
      .def_readonly("seconds", &analytic::TraceReport::seconds)
      .def_readonly("cutoff", &analytic::TraceReport::cutoff)
      .def_readonly("a_max", &analytic::TraceReport::a_max)
      .def("__repr__", [](const analytic::TraceReport& r) {
        return "<TraceReport " + std::string(to_string(r.method)) + " k=" + std::to_string(r.k) +
               " D=" + std::to_string(r.D) + " value=" + r.value_text() + ">";
      });

  m.def("hurwitz", [](std::int64_t n) { return fraction(special::hurwitz(n)); }, py::arg("n"));
  m.def("fD_const_term", [](int k, std::int64_t D) { return fraction(special::fD_const_term(k, D)); }, py::arg("k"),
        py::arg("D"));
  m.def("rhs_trace", [](int k, std::int64_t D) { return fraction(special::rhs_trace(k, D)); }, py::arg("k"),
        py::arg("D"), "Exact trace as a Fraction (even k, d = -4).");
  m.def("closed_formula", [](int k, std::int64_t D) { return fraction(special::closed_formula(k, D)); },
        py::arg("k"), py::arg("D"));
  m.def("hypothesis_check", &bqf::hypothesis_check, py::arg("D"), py::arg("d") = -4);

  m.def(
      "lhs_geodesic",
      [](int k, std::int64_t D, std::int64_t d, std::optional<double> tol, unsigned threads) {
        return analytic::lhs_geodesic(k, D, d, options(tol, threads));
      },
      py::arg("k"), py::arg("D"), py::arg("d") = -4, py::arg("tol") = py::none(), py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "lhs_latticesum",
      [](int k, std::int64_t D, std::int64_t d, std::optional<double> tol, unsigned threads) {
        return analytic::lhs_latticesum(k, D, d, options(tol, threads));
      },
      py::arg("k"), py::arg("D"), py::arg("d") = -4, py::arg("tol") = py::none(), py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "eval_fkA",
      [](std::complex<double> z, int k, std::int64_t d, double tol) {
        return analytic::eval_fkA(z, k, d, analytic::principal_form(d), tol);
      },
      py::arg("z"), py::arg("k"), py::arg("d") = -4, py::arg("tol") = 1e-10, py::call_guard<py::gil_scoped_release>());
  m.def("hyp2f1", &analytic::hyp2f1, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("w"));

  m.def("selftest", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& c : selftest::invariant_suite()) {
      std::string reason;
      try {
        reason = c.run();
      } catch (const std::exception& e) {
        reason = e.what();
      }
      out.emplace_back(c.name, reason);
    }
    return out;
  }, "List of (check, failure reason); an empty reason means the check passed.");
}
