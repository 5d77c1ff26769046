#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "dunkl_lab/io.hpp"
#include "dunkl_lab/parallel.hpp"
#include "dunkl_lab/suites.hpp"
#include "json.hpp"

using namespace dunkl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("dunkl_lab_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config defaults and canonical text") {
    const RunConfig c;
    CHECK_NOTHROW(validate(c));
    const auto j = nlohmann::ordered_json::parse(c.to_json());
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"suite", "k", "n_dim", "p", "radius", "resolution", "trials", "seed", "out", "format"});
    const RunConfig back = config_from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
  }

  TEST_CASE("config file fields and errors") {
    RunConfig base;
    base.trials = 3;
    const RunConfig c = config_from_json(R"({"suite": "riesz", "k": 1.5, "N": 1, "p": 4, "seed": 11})", base);
    CHECK(c.suite == "riesz");
    CHECK(c.k == 1.5);
    CHECK(c.p == 4.0);
    CHECK(c.seed == 11);
    CHECK(c.trials == 3);
    CHECK(config_from_json(R"({"n_dim": 2})").N == 2);
    CHECK_THROWS_AS(config_from_json(R"({"suite": "riesz", "color": "red"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"k": "one"})"), ConfigError);
    CHECK_THROWS_AS(config_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(config_from_json("[1, 2]"), ConfigError);
  }

  TEST_CASE("validation guards") {
    auto bad = [](auto mutate) {
      RunConfig c;
      mutate(c);
      CHECK_THROWS_AS(validate(c), ConfigError);
    };
    bad([](RunConfig& c) { c.p = 1.0; });
    bad([](RunConfig& c) { c.p = 0.5; });
    bad([](RunConfig& c) { c.p = std::numeric_limits<double>::quiet_NaN(); });
    bad([](RunConfig& c) { c.k = -0.5; });
    bad([](RunConfig& c) { c.N = 0; });
    bad([](RunConfig& c) { c.N = 4; });
    bad([](RunConfig& c) { c.resolution = 8; });
    bad([](RunConfig& c) { c.radius = -1.0; });
    bad([](RunConfig& c) { c.trials = 0; });
    bad([](RunConfig& c) { c.format = "xml"; });
    bad([](RunConfig& c) { c.suite = "fourier"; });
    bad([](RunConfig& c) { c.out.clear(); });
    bad([](RunConfig& c) {
      c.suite = "harness";
      c.N = 3;
    });
    RunConfig c;
    c.suite = "riesz";
    c.p = 1.0;
    CHECK_THROWS_AS(run_suite(c), ConfigError);
    CHECK(suite_names().size() == 6);
  }

  TEST_CASE("empty report is a valid document with a header") {
    VerificationReport r;
    r.suite = "empty";
    const RunConfig c;
    const auto j = nlohmann::json::parse(report_to_json(r, c.to_json()));
    CHECK(j.at("suite") == "empty");
    CHECK(j.at("pass") == true);
    CHECK(j.at("checks").empty());
    CHECK(j.at("input_hash") == content_hash(c.to_json()));
    CHECK(j.at("config").at("seed") == 7);
    CHECK(checks_to_csv(r) == "name,value,threshold,relation,pass\n");
    CHECK(exit_status(r) == 0);
  }

  TEST_CASE("content hash is the git blob id") {
    CHECK(content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
    CHECK(content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
  }

  TEST_CASE("json reports parse strictly and round trip") {
    RunConfig c;
    c.suite = "transform";
    c.k = 0.5;
    const auto r = run_suite(c);
    const std::string text = report_to_json(r, c.to_json());
    const auto j = nlohmann::ordered_json::parse(text);
    CHECK(j.dump(2) + "\n" == text);
    REQUIRE(j.at("checks").size() == r.checks.size());
    for (const auto& e : j.at("checks")) {
      const Check* chk = r.find(e.at("name").get<std::string>());
      REQUIRE(chk != nullptr);
      CHECK(e.at("value").get<double>() == chk->value);
      CHECK(e.at("pass").get<bool>() == chk->pass);
    }
    std::vector<std::string> names;
    for (const auto& e : j.at("checks")) names.push_back(e.at("name"));
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(exit_status(r) == (r.all_pass() ? 0 : 1));
  }

  TEST_CASE("failing checks set the exit status") {
    VerificationReport r;
    r.add("ok", 0.5, 1.0);
    r.info("note", 99.0);
    CHECK(exit_status(r) == 0);
    r.add("bad", 2.0, 1.0);
    CHECK(exit_status(r) == 1);
    r.add("nan", std::numeric_limits<double>::quiet_NaN(), 1.0);
    CHECK_FALSE(r.find("nan")->pass);
  }

  TEST_CASE("reports are byte-identical across reruns and worker counts") {
    const fs::path dir = scratch_dir("determinism");
    RunConfig c;
    c.suite = "bellman";
    c.p = 3.0;
    c.out = (dir / "report.json").string();
    std::vector<std::string> texts;
    for (int workers : {1, 3, 1}) {
      set_worker_count(workers);
      emit_report(run_suite(c), c);
      texts.push_back(read_file(c.out));
    }
    set_worker_count(0);
    CHECK(texts[0] == texts[1]);
    CHECK(texts[0] == texts[2]);
    for (const auto& e : fs::directory_iterator(dir)) CHECK(e.path().filename() == "report.json");
    fs::remove_all(dir);
  }

  TEST_CASE("csv output layout") {
    const fs::path dir = scratch_dir("csv");
    RunConfig c;
    c.suite = "transform";
    c.format = "csv";
    c.out = (dir / "nested" / "run.csv").string();
    const auto r = run_suite(c);
    const auto files = emit_report(r, c);
    CHECK(files.summary == (dir / "nested" / "run.summary.json").string());
    CHECK(fs::exists(c.out));
    CHECK(fs::exists(dir / "nested" / "run.transform_functions.csv"));
    const auto summary = nlohmann::json::parse(read_file(files.summary));
    CHECK(summary.at("tables").empty());
    CHECK(summary.at("checks").size() == r.checks.size());
    CHECK(read_file(c.out) == checks_to_csv(r));
    for (const auto& f : files.all) CHECK(fs::exists(f));
    fs::remove_all(dir);
  }

  TEST_CASE("unwritable output path") {
    RunConfig c;
    c.suite = "transform";
    c.out = "/proc/definitely/not/writable/report.json";
    VerificationReport r;
    CHECK_THROWS(emit_report(r, c));
  }
}
