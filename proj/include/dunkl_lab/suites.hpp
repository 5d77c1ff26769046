#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dunkl_lab/report.hpp"

namespace dunkl {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string suite = "all";  // transform, semigroup, riesz, bellman, harness, all
  double k = 1.0;
  int N = 1;
  double p = 2.0;
  double radius = 0.0;  // 0 picks the suite default
  int resolution = 0;
  int trials = 20;
  std::uint64_t seed = 7;
  std::string out = "dunkl_lab_report.json";
  std::string format = "json";  // json or csv

  // canonical text; fixed key order
  std::string to_json() const;
};

const std::vector<std::string>& suite_names();

// fields missing from the text keep their value in base
RunConfig config_from_json(const std::string& text, const RunConfig& base = {});
void validate(const RunConfig& c);

using Progress = std::function<void(const std::string&)>;

VerificationReport transform_suite(const RunConfig& c, const Progress& progress = {});
VerificationReport semigroup_suite(const RunConfig& c, const Progress& progress = {});
VerificationReport riesz_suite(const RunConfig& c, const Progress& progress = {});
VerificationReport bellman_suite(const RunConfig& c, const Progress& progress = {});
VerificationReport harness_suite(const RunConfig& c, const Progress& progress = {});

// validates, then runs the selected suite ("all" merges every suite under a name prefix)
VerificationReport run_suite(const RunConfig& c, const Progress& progress = {});

struct EmittedFiles {
  std::string summary;  // the JSON summary
  std::vector<std::string> all;
};

// json: one file at c.out. csv: checks at c.out, one file per table next to it, plus a JSON summary.
EmittedFiles emit_report(const VerificationReport& r, const RunConfig& c);

// 0 if every assertion-class check passes, else 1
int exit_status(const VerificationReport& r);

}  // namespace dunkl
