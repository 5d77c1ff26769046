#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dunkl_lab/io.hpp"
#include "dunkl_lab/suites.hpp"

using namespace dunkl;

int main(int argc, char** argv) {
  CLI::App app{"dunkl-lab: verification suites for rational Dunkl analysis"};
  RunConfig flags;
  std::string config_path;
  std::uint64_t seed = flags.seed;
  app.add_option("--suite", flags.suite, "transform, semigroup, riesz, bellman, harness or all");
  app.add_option("--k", flags.k, "multiplicity (same value on every root)");
  app.add_option("--n-dim", flags.N, "dimension N");
  app.add_option("--p", flags.p, "exponent p > 1");
  app.add_option("--radius", flags.radius, "physical grid radius (0: suite default)");
  app.add_option("--resolution", flags.resolution, "physical grid nodes per axis (0: suite default)");
  app.add_option("--trials", flags.trials, "randomized trials");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--out", flags.out, "report path");
  app.add_option("--format", flags.format, "json or csv");
  app.add_option("--config", config_path, "JSON config file; flags given on the command line override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  flags.seed = seed;

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = config_from_json(read_file(config_path));
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--suite")) cfg.suite = flags.suite;
    if (given("--k")) cfg.k = flags.k;
    if (given("--n-dim")) cfg.N = flags.N;
    if (given("--p")) cfg.p = flags.p;
    if (given("--radius")) cfg.radius = flags.radius;
    if (given("--resolution")) cfg.resolution = flags.resolution;
    if (given("--trials")) cfg.trials = flags.trials;
    if (given("--seed")) cfg.seed = flags.seed;
    if (given("--out")) cfg.out = flags.out;
    if (given("--format")) cfg.format = flags.format;
    validate(cfg);
  } catch (const std::exception& e) {
    std::cerr << "dunkl-lab: invalid configuration: " << e.what() << "\n";
    return 2;
  }

  VerificationReport rep;
  try {
    rep = run_suite(cfg, [](const std::string& line) { std::cerr << line << "\n"; });
  } catch (const ConfigError& e) {
    std::cerr << "dunkl-lab: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "dunkl-lab: invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dunkl-lab: suite aborted: " << e.what() << "\n";
    return 1;
  }

  EmittedFiles files;
  try {
    files = emit_report(rep, cfg);
  } catch (const std::exception& e) {
    std::cerr << "dunkl-lab: cannot write report: " << e.what() << "\n";
    return 1;
  }
  int failed = 0;
  for (const auto& c : rep.checks) failed += c.pass ? 0 : 1;
  std::cerr << rep.suite << ": " << rep.checks.size() << " checks, " << failed << " failed\n";
  std::cout << files.summary << "\n";
  return exit_status(rep);
}
