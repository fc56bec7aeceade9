#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "cyclotrace/cli.hpp"
#include "cyclotrace/error.hpp"

namespace cli = cyclotrace::cli;

int main(int argc, char** argv) {
  CLI::App app{"Traces of cycle integrals of f_{k,A}: geodesic quadrature, lattice sum, exact formula"};
  app.require_subcommand(1, 1);

  cli::RunConfig cfg;
  std::optional<long long> threads;
  std::optional<std::int64_t> D, Dmax;
  std::optional<double> tol;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--k", cfg.k, "weight parameter k >= 2")->capture_default_str();
    sub->add_option("--D", D, "discriminant (table: lower end of the range)");
    sub->add_option("--d", cfg.d, "CM discriminant")->capture_default_str();
    sub->add_option("--method", cfg.method, "exact|geodesic|latticesum|all");
    sub->add_option("--tol", tol, "tolerance");
    sub->add_option("--out", cfg.out, "output file");
    sub->add_flag("--json", cfg.json, "JSON instead of CSV or text");
    sub->add_option("--threads", threads, "worker threads (overrides CYCLOTRACE_THREADS)");
  };
  auto* trace = app.add_subcommand("trace", "compute one trace");
  auto* verify = app.add_subcommand("verify", "compare all applicable methods");
  auto* table = app.add_subcommand("table", "traces over a range of D");
  auto* self = app.add_subcommand("selftest", "run the invariant suite");
  for (auto* sub : {trace, verify, table, self}) common(sub);
  table->add_option("--Dmax", Dmax, "upper end of the range");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::ok : cli::bad_input;
  }

  cfg.D = D;
  cfg.Dmax = Dmax;
  cfg.tol = tol;
  try {
    cfg.threads = cli::resolve_threads(threads, std::getenv("CYCLOTRACE_THREADS"));
  } catch (const cyclotrace::error& e) {
    std::cerr << e.what() << '\n';
    return cli::bad_input;
  }

  if (*trace) return cli::cmd_trace(cfg, std::cout, std::cerr);
  if (*verify) return cli::cmd_verify(cfg, std::cout, std::cerr);
  if (*table) return cli::cmd_table(cfg, std::cout, std::cerr);
  return cli::cmd_selftest(cfg, std::cout, std::cerr);
}
