#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cyclotrace/cli.hpp"
#include "cyclotrace/error.hpp"
#include "oracles.hpp"

using namespace cyclotrace;
using namespace cyclotrace::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

template <class Cmd>
Result run(Cmd cmd, const RunConfig& cfg) {
  std::ostringstream out, err;
  const int code = cmd(cfg, out, err);
  return {code, out.str(), err.str()};
}

RunConfig config(int k, std::int64_t D, std::string method = "") {
  RunConfig c;
  c.k = k;
  c.D = D;
  c.method = std::move(method);
  return c;
}

int binary(const std::string& args) {
  const std::string cmd = std::string(CYCLOTRACE_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

// CSV without the wall-clock column.
std::string without_seconds(const std::string& csv) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);) out += line.substr(0, line.rfind(',')) + '\n';
  return out;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("cyclotrace_test_" + name); }

}  // namespace

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3, "7") == 3);
  CHECK(resolve_threads(std::nullopt, "7") == 7);
  CHECK(resolve_threads(std::nullopt, nullptr) >= 1);
  CHECK(resolve_threads(std::nullopt, "") >= 1);
  CHECK_THROWS_AS(resolve_threads(std::nullopt, "four"), error);
  CHECK_THROWS_AS(resolve_threads(0, nullptr), error);
  CHECK_THROWS_AS(resolve_threads(-2, "3"), error);
}

TEST_CASE("method selection") {
  using analytic::Method;
  CHECK(selected_methods(config(2, 12)) == std::vector{Method::exact});
  CHECK(selected_methods(config(3, 12)) == std::vector{Method::geodesic});
  CHECK(selected_methods(config(4, 12, "all")).size() == 3);
  CHECK(selected_methods(config(3, 12, "all")) == std::vector{Method::geodesic, Method::latticesum});
  auto c = config(2, 12, "all");
  c.d = -3;
  CHECK(selected_methods(c).size() == 2);
  CHECK_THROWS_AS(selected_methods(config(3, 12, "exact")), error);
  CHECK_THROWS_AS(selected_methods(config(2, 12, "simpson")), error);
  CHECK_THROWS_AS(selected_methods(config(1, 12)), error);
}

TEST_CASE("trace") {
  auto r = run(cmd_trace, config(2, 12, "exact"));
  CHECK(r.code == 0);
  CHECK(r.out.substr(0, 3) == "24\n");
  CHECK(r.out.find("hypothesis_ok true") != std::string::npos);

  r = run(cmd_trace, config(2, 5, "geodesic"));
  CHECK(r.code == 2);
  CHECK(r.out.find("hypothesis_ok false") != std::string::npos);
  CHECK(run(cmd_trace, config(2, 5, "exact")).code == 2);
  CHECK(run(cmd_trace, config(2, 9)).code == 3);
  CHECK(run(cmd_trace, config(2, 14)).code == 3);
  CHECK(run(cmd_trace, config(1, 12)).code == 3);
  CHECK(run(cmd_trace, config(3, 12, "exact")).code == 3);
  auto missing = config(2, 12);
  missing.D.reset();
  CHECK(run(cmd_trace, missing).code == 3);

  auto neg = config(2, 12);
  neg.tol = -1;
  CHECK(run(cmd_trace, neg).code == 3);

  auto js = config(4, 12, "exact");
  js.json = true;
  r = run(cmd_trace, js);
  std::istringstream in(r.out);
  const auto rows = read_json(in);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].value == "72");
}

TEST_CASE("trace of a non-integral exact value prints p/q") {
  // k = 2 traces are integers here; pick a value through the row formatter
  Row row;
  row.k = 2;
  row.D = 12;
  row.d = -4;
  row.value = "7/3";
  row.error_estimate = 0.0;
  CHECK(csv_line(row) == "2,12,-4,exact,7/3,0.000000000000e+00,true,0.000000000000e+00");
}

TEST_CASE("verify") {
  auto r = run(cmd_verify, [] {
    auto c = config(2, 12);
    c.tol = 1e-6;
    return c;
  }());
  CHECK(r.code == 0);
  CHECK(r.out.find("exact-geodesic") != std::string::npos);
  CHECK(r.out.find("geodesic-latticesum") != std::string::npos);

  CHECK(run(cmd_verify, config(4, 12)).code == 0);

  r = run(cmd_verify, config(3, 12));
  CHECK(r.code == 0);
  CHECK(r.out.find("exact") == std::string::npos);
  CHECK(r.out.find("geodesic-latticesum") != std::string::npos);

  // a bound no double-precision method can meet
  auto tight = config(2, 12);
  tight.tol = 1e-14;
  r = run(cmd_verify, tight);
  CHECK(r.code == 1);
  CHECK(r.out.find("NO") != std::string::npos);

  CHECK(run(cmd_verify, config(2, 13)).code == 2);
  CHECK(run(cmd_verify, config(2, 16)).code == 3);
}

TEST_CASE("table rows, flags and file output") {
  const auto path = temp_file("t.csv");
  auto c = config(2, 1, "exact");
  c.D.reset();
  c.Dmax = 40;
  c.out = path.string();
  REQUIRE(run(cmd_table, c).code == 0);
  std::ifstream f(path);
  const auto rows = read_csv(f);
  std::vector<std::int64_t> Ds;
  for (const Row& r : rows) {
    Ds.push_back(r.D);
    CHECK(r.hypothesis_ok == oracle::hypothesis_d4_brute(r.D));
    CHECK(r.value.empty() == !r.hypothesis_ok);
  }
  CHECK(Ds == std::vector<std::int64_t>{5, 8, 12, 13, 17, 20, 21, 24, 28, 29, 32, 33, 37, 40});
  CHECK(rows[2].value == "24");

  // JSON mirrors the CSV values
  std::stringstream js;
  write_json(js, rows);
  std::ostringstream again;
  write_csv(again, read_json(js));
  CHECK(again.str() == slurp(path));
  fs::remove(path);
}

TEST_CASE("table edge cases") {
  auto c = config(2, 50, "exact");
  c.Dmax = 40;
  auto r = run(cmd_table, c);
  CHECK(r.code == 0);
  CHECK(r.out == std::string(kCsvHeader) + "\n");

  c.json = true;
  CHECK(run(cmd_table, c).out == "[]\n");

  c.json = false;
  c.D = 5;
  c.out = "/nonexistent-dir/t.csv";
  CHECK(run(cmd_table, c).code == 3);

  auto none = config(2, 12);
  none.D.reset();
  CHECK(run(cmd_table, none).code == 3);
}

TEST_CASE("table output does not depend on the thread count") {
  auto c = config(2, 10, "all");
  c.Dmax = 24;
  c.threads = 1;
  const auto one = run(cmd_table, c);
  c.threads = 3;
  const auto three = run(cmd_table, c);
  REQUIRE(one.code == 0);
  CHECK(without_seconds(one.out) == without_seconds(three.out));
  std::istringstream in(one.out);
  int numeric = 0;
  for (const Row& r : read_csv(in)) {
    if (r.D != 12 || r.method == analytic::Method::exact) continue;
    CHECK(std::abs(std::stod(r.value) - 24) < 1e-2);
    ++numeric;
  }
  CHECK(numeric == 2);
}

TEST_CASE("executable exit codes") {
  CHECK(binary("trace --k 2 --D 12 --method exact") == 0);
  CHECK(binary("trace --k 2 --D 5 --method geodesic") == 2);
  CHECK(binary("trace --k 2 --D 9") == 3);
  CHECK(binary("trace --k 2 --D 12 --method nope") == 3);
  CHECK(binary("trace --k two --D 12") == 3);
  CHECK(binary("frobnicate") == 3);
  CHECK(binary("trace --k 2 --D 12 --threads 0") == 3);
  CHECK(binary("verify --k 2 --D 12 --tol 1e-14") == 1);
  CHECK(binary("table --k 2 --Dmax 40 --out /nonexistent-dir/t.csv") == 3);
  CHECK(std::system((std::string("CYCLOTRACE_THREADS=x ") + CYCLOTRACE_BIN + " trace --k 2 --D 12 >/dev/null 2>&1").c_str()) !=
        0);

  const auto a = temp_file("a.csv"), b = temp_file("b.csv");
  CHECK(binary("table --k 2 --Dmax 60 --method exact --threads 2 --out " + a.string()) == 0);
  CHECK(binary("table --k 2 --Dmax 60 --method exact --threads 1 --out " + b.string()) == 0);
  CHECK(without_seconds(slurp(a)) == without_seconds(slurp(b)));
  fs::remove(a);
  fs::remove(b);
}
