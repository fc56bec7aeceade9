#include "cyclotrace/cli.hpp"

#include <json.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "cyclotrace/bqf.hpp"
#include "cyclotrace/error.hpp"
#include "cyclotrace/parallel.hpp"
#include "cyclotrace/special_forms.hpp"

namespace cyclotrace::cli {

using analytic::Method;
using analytic::TraceReport;

namespace {

bool exact_applicable(int k, std::int64_t d) { return k % 2 == 0 && d == -4; }

// Pairs involving the lattice sum are compared no tighter than this.
constexpr double kLatticeCompareTol = 1e-4;

std::optional<long long> parse_count(const std::string& s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw error(errc::invalid_input, "bad number '" + s + "'");
  return v;
}

void check_config(const RunConfig& cfg) {
  if (cfg.k < 2) throw error(errc::unsupported_k, "k must be >= 2");
  if (cfg.d >= 0 || !arith::is_discriminant(cfg.d)) {
    throw error(errc::invalid_discriminant, "d = " + std::to_string(cfg.d) + " is not a negative discriminant");
  }
  if (cfg.tol && !(*cfg.tol > 0)) throw error(errc::invalid_input, "--tol must be positive");
}

std::int64_t require_D(const RunConfig& cfg) {
  if (!cfg.D) throw error(errc::invalid_input, "--D is required");
  return *cfg.D;
}

// Runs fn, turning library errors into an exit code and a message on err.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

void write_rows(const RunConfig& cfg, const std::vector<Row>& rows, std::ostream& out) {
  if (cfg.json)
    write_json(out, rows);
  else
    write_csv(out, rows);
}

// Opens the output file before any work so an unwritable path fails fast.
std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw error(errc::invalid_input, "cannot write " + path);
  return f;
}

}  // namespace

int exit_code_for(errc code) noexcept {
  switch (code) {
    case errc::hypothesis_violated: return hypothesis;
    case errc::no_convergence: return convergence;
    default: return bad_input;
  }
}

unsigned resolve_threads(std::optional<long long> flag, const char* env_value) {
  std::optional<long long> n = flag;
  if (!n && env_value && *env_value) {
    n = parse_count(env_value);
    if (!n) throw error(errc::invalid_input, std::string("CYCLOTRACE_THREADS='") + env_value + "' is not a count");
  }
  if (!n) return std::max(1u, std::thread::hardware_concurrency());
  if (*n < 1 || *n > 4096) throw error(errc::invalid_input, "thread count must be in 1..4096");
  return static_cast<unsigned>(*n);
}

std::vector<Method> selected_methods(const RunConfig& cfg) {
  check_config(cfg);
  const bool exact_ok = exact_applicable(cfg.k, cfg.d);
  if (cfg.method == "all") {
    if (exact_ok) return {Method::exact, Method::geodesic, Method::latticesum};
    return {Method::geodesic, Method::latticesum};
  }
  if (cfg.method.empty()) return {exact_ok ? Method::exact : Method::geodesic};
  const Method m = analytic::parse_method(cfg.method);
  if (m == Method::exact && !exact_ok) {
    throw error(errc::invalid_input, "the exact method needs even k and d = -4");
  }
  return {m};
}

std::string format_double(double x) {
  if (x == 0) x = 0;  // no "-0"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

Row to_row(const TraceReport& r) {
  Row row;
  row.k = r.k;
  row.D = r.D;
  row.d = r.d;
  row.method = r.method;
  row.value = r.value_text();
  row.error_estimate = r.error_estimate;
  row.hypothesis_ok = r.hypothesis_ok;
  row.seconds = r.seconds;
  return row;
}

std::string csv_line(const Row& row) {
  std::ostringstream os;
  os << row.k << ',' << row.D << ',' << row.d << ',' << analytic::to_string(row.method) << ',' << row.value << ','
     << (row.error_estimate ? format_double(*row.error_estimate) : "") << ','
     << (row.hypothesis_ok ? "true" : "false") << ',' << format_double(row.seconds);
  return os.str();
}

void write_csv(std::ostream& os, const std::vector<Row>& rows) {
  os << kCsvHeader << '\n';
  for (const Row& r : rows) os << csv_line(r) << '\n';
}

void write_json(std::ostream& os, const std::vector<Row>& rows) {
  // Numbers carry exactly the digits of the CSV fields, so either format
  // regenerates the other.
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Row& r : rows) {
    nlohmann::ordered_json o;
    o["k"] = r.k;
    o["D"] = r.D;
    o["d"] = r.d;
    o["method"] = std::string(analytic::to_string(r.method));
    if (r.value.empty())
      o["value"] = nullptr;
    else if (r.method == Method::exact)
      o["value"] = r.value;
    else
      o["value"] = parse_double(r.value);
    if (r.error_estimate)
      o["error_estimate"] = parse_double(format_double(*r.error_estimate));
    else
      o["error_estimate"] = nullptr;
    o["hypothesis_ok"] = r.hypothesis_ok;
    o["seconds"] = parse_double(format_double(r.seconds));
    arr.push_back(std::move(o));
  }
  os << arr.dump(2) << '\n';
}

std::vector<Row> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw error(errc::invalid_input, "missing CSV header");
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw error(errc::invalid_input, "CSV row needs 8 fields: " + line);
    Row r;
    const auto k = parse_count(f[0]);
    const auto D = parse_count(f[1]);
    const auto d = parse_count(f[2]);
    if (!k || !D || !d) throw error(errc::invalid_input, "bad integer field: " + line);
    r.k = static_cast<int>(*k);
    r.D = *D;
    r.d = *d;
    r.method = analytic::parse_method(f[3]);
    r.value = f[4];
    if (!f[5].empty()) r.error_estimate = parse_double(f[5]);
    if (f[6] != "true" && f[6] != "false") throw error(errc::invalid_input, "bad flag: " + line);
    r.hypothesis_ok = f[6] == "true";
    r.seconds = parse_double(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<Row> read_json(std::istream& is) {
  nlohmann::json arr;
  try {
    arr = nlohmann::json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::invalid_input, e.what());
  }
  if (!arr.is_array()) throw error(errc::invalid_input, "expected a JSON array");
  std::vector<Row> rows;
  try {
    for (const auto& o : arr) {
      Row r;
      r.k = o.at("k").get<int>();
      r.D = o.at("D").get<std::int64_t>();
      r.d = o.at("d").get<std::int64_t>();
      r.method = analytic::parse_method(o.at("method").get<std::string>());
      const auto& v = o.at("value");
      if (v.is_string())
        r.value = v.get<std::string>();
      else if (v.is_number())
        r.value = format_double(v.get<double>());
      if (!o.at("error_estimate").is_null()) r.error_estimate = o.at("error_estimate").get<double>();
      r.hypothesis_ok = o.at("hypothesis_ok").get<bool>();
      r.seconds = o.at("seconds").get<double>();
      rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::invalid_input, e.what());
  }
  return rows;
}

TraceReport compute(Method m, int k, std::int64_t D, std::int64_t d, std::optional<double> tol, unsigned threads) {
  analytic::Options opt;
  opt.tol = tol;
  opt.threads = threads;
  switch (m) {
    case Method::geodesic: return analytic::lhs_geodesic(k, D, d, opt);
    case Method::latticesum: return analytic::lhs_latticesum(k, D, d, opt);
    case Method::exact: break;
  }
  if (d != -4) throw error(errc::invalid_input, "the exact method needs d = -4");
  const auto t0 = std::chrono::steady_clock::now();
  TraceReport r;
  r.k = k;
  r.D = D;
  r.d = d;
  r.method = Method::exact;
  r.exact = special::rhs_trace(k, D);
  r.value = r.exact->get_d();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

int cmd_trace(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto methods = selected_methods(cfg);
    const std::int64_t D = require_D(cfg);
    std::optional<std::ofstream> file;
    if (!cfg.out.empty()) file = open_out(cfg.out);
    std::vector<Row> rows;
    int code = ok;
    for (Method m : methods) {
      try {
        rows.push_back(to_row(compute(m, cfg.k, D, cfg.d, cfg.tol, cfg.threads)));
      } catch (const error& e) {
        if (e.code() != errc::hypothesis_violated && e.code() != errc::no_convergence) throw;
        err << e.what() << '\n';
        Row r;
        r.k = cfg.k;
        r.D = D;
        r.d = cfg.d;
        r.method = m;
        r.hypothesis_ok = e.code() != errc::hypothesis_violated;
        rows.push_back(r);
        code = std::max(code, exit_code_for(e.code()));
      }
    }
    if (file) {
      write_rows(cfg, rows, *file);
      if (!*file) throw error(errc::invalid_input, "cannot write " + cfg.out);
    } else if (cfg.json) {
      write_json(out, rows);
    } else {
      for (const Row& r : rows) {
        if (methods.size() > 1) out << "method " << analytic::to_string(r.method) << '\n';
        out << (r.value.empty() ? "-" : r.value) << '\n';
        out << "error_estimate " << (r.error_estimate ? format_double(*r.error_estimate) : "-") << '\n';
        out << "hypothesis_ok " << (r.hypothesis_ok ? "true" : "false") << '\n';
      }
    }
    return code;
  });
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig all = cfg;
    all.method = "all";
    const auto methods = selected_methods(all);
    const std::int64_t D = require_D(cfg);
    const double tol = cfg.tol.value_or(1e-6);

    // Numeric methods run at their default tolerances; tol only sets the
    // comparison bound.
    std::vector<TraceReport> reports;
    for (Method m : methods) reports.push_back(compute(m, cfg.k, D, cfg.d, std::nullopt, cfg.threads));

    out << std::left << std::setw(12) << "method" << std::setw(24) << "value" << "error_estimate\n";
    for (const auto& r : reports) {
      out << std::setw(12) << analytic::to_string(r.method) << std::setw(24) << r.value_text()
          << format_double(r.error_estimate) << '\n';
    }
    const double ref = reports.front().value;
    bool all_ok = true;
    out << '\n' << std::setw(24) << "pair" << std::setw(22) << "delta" << std::setw(22) << "bound" << "ok\n";
    for (std::size_t i = 0; i < reports.size(); ++i)
      for (std::size_t j = i + 1; j < reports.size(); ++j) {
        const bool lattice = reports[i].method == Method::latticesum || reports[j].method == Method::latticesum;
        const double bound = (lattice ? std::max(tol, kLatticeCompareTol) : tol) * (1 + std::abs(ref));
        const double delta = std::abs(reports[i].value - reports[j].value);
        const bool pass = delta < bound;
        all_ok = all_ok && pass;
        const std::string name =
            std::string(analytic::to_string(reports[i].method)) + "-" + std::string(analytic::to_string(reports[j].method));
        out << std::setw(24) << name << std::setw(22) << format_double(delta) << std::setw(22) << format_double(bound)
            << (pass ? "yes" : "NO") << '\n';
      }
    return all_ok ? ok : mismatch;
  });
}

int cmd_table(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto methods = selected_methods(cfg);
    if (!cfg.D && !cfg.Dmax) throw error(errc::invalid_input, "table needs --Dmax (and optionally --D)");
    const std::int64_t lo = cfg.D.value_or(1);
    const std::int64_t hi = cfg.Dmax.value_or(lo);
    std::optional<std::ofstream> file;
    if (!cfg.out.empty()) file = open_out(cfg.out);

    struct Job {
      std::int64_t D;
      Method m;
      bool admissible;
    };
    std::vector<Job> jobs;
    for (std::int64_t D = std::max<std::int64_t>(lo, 1); D <= hi; ++D) {
      if (!arith::is_discriminant(D) || arith::is_square(D)) continue;
      const bool admissible = bqf::hypothesis_check(D, cfg.d);
      for (Method m : methods) jobs.push_back({D, m, admissible});
    }

    std::vector<Row> rows(jobs.size());
    std::vector<std::optional<errc>> failed(jobs.size());
    // Parallel over rows; each row single-threaded so the values do not
    // depend on scheduling.
    parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
      const Job& j = jobs[i];
      Row& r = rows[i];
      r.k = cfg.k;
      r.D = j.D;
      r.d = cfg.d;
      r.method = j.m;
      r.hypothesis_ok = j.admissible;
      if (!j.admissible) return;
      try {
        r = to_row(compute(j.m, cfg.k, j.D, cfg.d, cfg.tol, 1));
      } catch (const error& e) {
        failed[i] = e.code();
      }
    });

    int code = ok;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (!failed[i]) continue;
      err << "D = " << jobs[i].D << " " << analytic::to_string(jobs[i].m) << ": " << to_string(*failed[i]) << '\n';
      code = std::max(code, exit_code_for(*failed[i]));
    }
    if (file) {
      write_rows(cfg, rows, *file);
      file->flush();
      if (!*file) throw error(errc::invalid_input, "cannot write " + cfg.out);
    } else {
      write_rows(cfg, rows, out);
    }
    return code;
  });
}

}  // namespace cyclotrace::cli
