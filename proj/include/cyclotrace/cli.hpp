#pragma once

// Command layer behind the cyclotrace executable. Argument parsing lives in
// the executable; everything here takes a RunConfig and an output stream so
// it can be driven from tests.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cyclotrace/analytic.hpp"
#include "cyclotrace/error.hpp"

namespace cyclotrace::cli {

enum exit_code : int { ok = 0, mismatch = 1, hypothesis = 2, bad_input = 3, convergence = 4 };

struct RunConfig {
  int k = 2;
  std::optional<std::int64_t> D;     // trace/verify: the discriminant; table: lower end (default 1)
  std::optional<std::int64_t> Dmax;  // table: upper end (default D)
  std::int64_t d = -4;
  std::string method;  // exact|geodesic|latticesum|all; empty picks a default
  std::optional<double> tol;
  std::string out;  // empty: stdout
  bool json = false;
  unsigned threads = 1;
};

/// --threads if given, else CYCLOTRACE_THREADS, else hardware parallelism.
/// Throws errc::invalid_input for a malformed or zero count.
unsigned resolve_threads(std::optional<long long> flag, const char* env_value);

/// Methods selected by cfg.method, in output order. Throws errc::invalid_input
/// (unknown name, exact with odd k or d != -4) and errc::unsupported_k.
std::vector<analytic::Method> selected_methods(const RunConfig& cfg);

/// One output row. value is empty when the hypothesis fails or the method
/// did not converge.
struct Row {
  int k = 0;
  std::int64_t D = 0;
  std::int64_t d = 0;
  analytic::Method method = analytic::Method::exact;
  std::string value;
  std::optional<double> error_estimate;
  bool hypothesis_ok = true;
  double seconds = 0;
};

inline constexpr const char* kCsvHeader = "k,D,d,method,value,error_estimate,hypothesis_ok,seconds";

Row to_row(const analytic::TraceReport& r);
std::string format_double(double x);  // %.12e
std::string csv_line(const Row& row);
void write_csv(std::ostream& os, const std::vector<Row>& rows);
void write_json(std::ostream& os, const std::vector<Row>& rows);
/// Inverse of write_csv. Throws errc::invalid_input.
std::vector<Row> read_csv(std::istream& is);
std::vector<Row> read_json(std::istream& is);

/// Runs one method. Tolerance is cfg.tol or the method default.
analytic::TraceReport compute(analytic::Method m, int k, std::int64_t D, std::int64_t d, std::optional<double> tol,
                              unsigned threads);

/// Each command prints to `out` (diagnostics to `err`) and returns the exit
/// code; library errors are mapped, never propagated.
int cmd_trace(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_table(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_selftest(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int exit_code_for(errc code) noexcept;

}  // namespace cyclotrace::cli
