#include "dunkl_lab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <boost/uuid/detail/sha1.hpp>

#include "dunkl_lab/io.hpp"
#include "json.hpp"

namespace dunkl {

bool VerificationReport::add(const std::string& name, double value, double threshold, Relation rel) {
  Check c{name, value, threshold, rel, true};
  if (!std::isfinite(value)) c.pass = false;
  else if (rel == Relation::LessEqual) c.pass = value <= threshold;
  else if (rel == Relation::GreaterEqual) c.pass = value >= threshold;
  checks.push_back(c);
  return c.pass;
}

void VerificationReport::info(const std::string& name, double value) {
  checks.push_back({name, value, 0.0, Relation::Info, true});
}

void VerificationReport::merge(const VerificationReport& other, const std::string& prefix) {
  for (auto c : other.checks) {
    c.name = prefix + c.name;
    checks.push_back(c);
  }
  for (auto t : other.tables) {
    t.name = prefix + t.name;
    tables.push_back(t);
  }
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Table& VerificationReport::table(const std::string& name, const std::vector<std::string>& columns) {
  for (auto& t : tables)
    if (t.name == name) return t;
  tables.push_back({name, columns, {}});
  return tables.back();
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::LessEqual: return "<=";
    case Relation::GreaterEqual: return ">=";
    default: return "info";
  }
}

std::string cell(double v) { return format_double(v); }
std::string cell(long long v) { return std::to_string(v); }

namespace {

nlohmann::ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

std::vector<Check> sorted_checks(const VerificationReport& r) {
  auto c = r.checks;
  std::stable_sort(c.begin(), c.end(), [](const Check& a, const Check& b) { return a.name < b.name; });
  return c;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string report_to_json(const VerificationReport& r, const std::string& config_json) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["config"] = config_json.empty() ? nlohmann::ordered_json::object() : nlohmann::ordered_json::parse(config_json);
  j["input_hash"] = content_hash(config_json);
  j["pass"] = r.all_pass();
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : sorted_checks(r)) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["value"] = num(c.value);
    e["threshold"] = c.relation == Relation::Info ? nlohmann::ordered_json(nullptr) : num(c.threshold);
    e["relation"] = to_string(c.relation);
    e["pass"] = c.pass;
    checks.push_back(e);
  }
  j["checks"] = checks;
  auto tables = nlohmann::ordered_json::object();
  for (const auto& t : r.tables) {
    nlohmann::ordered_json e;
    e["columns"] = t.columns;
    e["rows"] = t.rows;
    tables[t.name] = e;
  }
  j["tables"] = tables;
  return j.dump(2) + "\n";
}

std::string checks_to_csv(const VerificationReport& r) {
  std::ostringstream out;
  out << "name,value,threshold,relation,pass\n";
  for (const auto& c : sorted_checks(r))
    out << csv_escape(c.name) << "," << format_double(c.value) << ","
        << (c.relation == Relation::Info ? std::string() : format_double(c.threshold)) << "," << to_string(c.relation)
        << "," << (c.pass ? "true" : "false") << "\n";
  return out.str();
}

std::string table_to_csv(const Table& t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << csv_escape(t.columns[i]);
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_escape(row[i]);
    out << "\n";
  }
  return out.str();
}

std::string content_hash(const std::string& text) {
  boost::uuids::detail::sha1 h;
  const std::string header = "blob " + std::to_string(text.size()) + std::string(1, '\0');
  h.process_bytes(header.data(), header.size());
  h.process_bytes(text.data(), text.size());
  boost::uuids::detail::sha1::digest_type d;
  h.get_digest(d);
  char buf[41];
  for (int i = 0; i < 5; ++i) std::snprintf(buf + 8 * i, 9, "%08x", d[i]);
  return buf;
}

}  // namespace dunkl
