#pragma once

#include <string>
#include <vector>

namespace dunkl {

enum class Relation { LessEqual, GreaterEqual, Info };

struct Check {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::LessEqual;
  bool pass = true;
};

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct VerificationReport {
  std::string suite;
  std::vector<Check> checks;
  std::vector<Table> tables;

  // records value against threshold and returns whether it passed; non-finite values fail
  bool add(const std::string& name, double value, double threshold, Relation rel = Relation::LessEqual);
  void info(const std::string& name, double value);
  void merge(const VerificationReport& other, const std::string& prefix = "");
  bool all_pass() const;
  const Check* find(const std::string& name) const;
  Table& table(const std::string& name, const std::vector<std::string>& columns);
};

std::string to_string(Relation r);
std::string cell(double v);
std::string cell(long long v);

std::string report_to_json(const VerificationReport& r, const std::string& config_json);
// one csv document per report: name,value,threshold,relation,pass rows sorted by name
std::string checks_to_csv(const VerificationReport& r);
std::string table_to_csv(const Table& t);

// git blob id (sha1 of "blob <len>\0" + text)
std::string content_hash(const std::string& text);

}  // namespace dunkl
