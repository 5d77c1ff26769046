#include "dunkl_lab/root_system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dunkl {

namespace {

constexpr std::size_t kGroupCap = 1024;

std::vector<double> identity(int n) {
  std::vector<double> m(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i * n + i)] = 1.0;
  return m;
}

std::vector<double> reflection_matrix(const Vec& a) {
  const int n = static_cast<int>(a.size());
  std::vector<double> m = identity(n);
  const double s = 2.0 / dot(a, a);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[static_cast<std::size_t>(i * n + j)] -= s * a[i] * a[j];
  return m;
}

std::vector<double> matmul(const std::vector<double>& a, const std::vector<double>& b, int n) {
  std::vector<double> c(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double v = a[static_cast<std::size_t>(i * n + k)];
      if (v == 0.0) continue;
      for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(i * n + j)] += v * b[static_cast<std::size_t>(k * n + j)];
    }
  return c;
}

bool same_matrix(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9) return false;
  return true;
}

bool same_vec(const Vec& a, const Vec& b, double tol = 1e-9) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

Vec matvec(const std::vector<double>& m, const Vec& x) {
  const std::size_t n = x.size();
  Vec y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) y[i] += m[i * n + j] * x[j];
  return y;
}

void build_group(RootSystemSpec& rs) {
  const int n = rs.dimension;
  std::vector<std::vector<double>> gens;
  for (const auto& a : rs.roots) gens.push_back(reflection_matrix(a));
  rs.group.clear();
  rs.group.push_back(identity(n));
  for (std::size_t head = 0; head < rs.group.size(); ++head) {
    for (const auto& g : gens) {
      auto c = matmul(g, rs.group[head], n);
      bool seen = false;
      for (const auto& h : rs.group)
        if (same_matrix(h, c)) { seen = true; break; }
      if (!seen) {
        if (rs.group.size() >= kGroupCap) throw std::runtime_error("reflection group exceeds 1024 elements");
        rs.group.push_back(std::move(c));
      }
    }
  }
}

void build_orbits(RootSystemSpec& rs) {
  const std::size_t m = rs.roots.size();
  rs.orbit.assign(m, -1);
  int next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (rs.orbit[i] >= 0) continue;
    rs.orbit[i] = next;
    for (const auto& g : rs.group) {
      Vec img = matvec(g, rs.roots[i]);
      for (std::size_t j = 0; j < m; ++j)
        if (rs.orbit[j] < 0 && same_vec(img, rs.roots[j])) rs.orbit[j] = next;
    }
    ++next;
  }
}

void validate_roots(const RootSystemSpec& rs) {
  for (const auto& a : rs.roots) {
    if (static_cast<int>(a.size()) != rs.dimension) throw std::runtime_error("root has wrong dimension");
    const double n2 = dot(a, a);
    if (std::abs(n2 - 2.0) > 1e-12) {
      std::ostringstream msg;
      msg << "root of squared length " << n2 << " is not normalized (expected 2)";
      throw std::runtime_error(msg.str());
    }
  }
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    bool has_neg = false;
    for (std::size_t j = 0; j < rs.roots.size(); ++j) {
      if (i == j) continue;
      const double c = dot(rs.roots[i], rs.roots[j]) / 2.0;
      if (std::abs(std::abs(c) - 1.0) < 1e-12) {
        if (c > 0) throw std::runtime_error("duplicate root");
        has_neg = true;
      }
    }
    if (!has_neg) throw std::runtime_error("root system must contain -alpha for every alpha");
  }
  for (const auto& a : rs.roots) {
    const auto s = reflection_matrix(a);
    for (const auto& b : rs.roots) {
      Vec img = matvec(s, b);
      bool found = false;
      for (const auto& c : rs.roots)
        if (same_vec(img, c)) { found = true; break; }
      if (!found) throw std::runtime_error("root set is not closed under its reflections");
    }
  }
}

void assign_multiplicity(RootSystemSpec& rs, const std::vector<double>& k_values) {
  for (double k : k_values)
    if (!(k >= 0.0) || !std::isfinite(k)) throw std::runtime_error("multiplicity values must be finite and >= 0");
  const int n_orbits = rs.orbit.empty() ? 0 : *std::max_element(rs.orbit.begin(), rs.orbit.end()) + 1;
  const std::size_t m = rs.roots.size();
  rs.orbit_k.assign(static_cast<std::size_t>(n_orbits), 0.0);
  if (k_values.size() == 1) {
    std::fill(rs.orbit_k.begin(), rs.orbit_k.end(), k_values[0]);
  } else if (static_cast<int>(k_values.size()) == n_orbits) {
    rs.orbit_k = k_values;
  } else if (k_values.size() == m) {
    for (std::size_t i = 0; i < m; ++i) {
      auto& slot = rs.orbit_k[static_cast<std::size_t>(rs.orbit[i])];
      bool first = true;
      for (std::size_t j = 0; j < i; ++j)
        if (rs.orbit[j] == rs.orbit[i]) first = false;
      if (first) slot = k_values[i];
      else if (std::abs(slot - k_values[i]) > 0.0)
        throw std::runtime_error("multiplicity is not constant on G-orbits of roots");
    }
  } else {
    std::ostringstream msg;
    msg << "expected 1, " << n_orbits << " (orbits) or " << m << " (roots) multiplicity values, got "
        << k_values.size();
    throw std::runtime_error(msg.str());
  }
  rs.multiplicity.resize(m);
  for (std::size_t i = 0; i < m; ++i) rs.multiplicity[i] = rs.orbit_k[static_cast<std::size_t>(rs.orbit[i])];
}

}  // namespace

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

std::string to_string(RootKind kind) {
  switch (kind) {
    case RootKind::RankOne: return "rank-one";
    case RootKind::Product: return "product";
    case RootKind::General: return "general";
  }
  return "general";
}

RootKind root_kind_from_string(const std::string& name) {
  if (name == "rank-one" || name == "rank_one") return RootKind::RankOne;
  if (name == "product") return RootKind::Product;
  if (name == "general") return RootKind::General;
  throw std::runtime_error("unknown root system kind: " + name);
}

double RootSystemSpec::k_sum() const {
  double s = 0.0;
  for (double k : multiplicity) s += k;
  return s;
}

bool RootSystemSpec::coordinate_aligned() const {
  for (const auto& a : roots) {
    int nonzero = 0;
    for (double v : a)
      if (v != 0.0) ++nonzero;
    if (nonzero != 1) return false;
  }
  return true;
}

std::vector<double> RootSystemSpec::axis_k() const {
  if (!coordinate_aligned()) throw std::runtime_error("axis multiplicities need coordinate-aligned roots");
  std::vector<double> k(static_cast<std::size_t>(dimension), 0.0);
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (int j = 0; j < dimension; ++j)
      if (roots[i][static_cast<std::size_t>(j)] != 0.0) k[static_cast<std::size_t>(j)] = multiplicity[i];
  return k;
}

RootSystemSpec make_root_system(RootKind kind, int N, const std::vector<double>& k_values,
                                const std::vector<Vec>& roots, double prefactor) {
  if (N < 1) throw std::runtime_error("dimension must be >= 1");
  if (!(prefactor > 0.0)) throw std::runtime_error("dw prefactor must be positive");
  if (k_values.empty()) throw std::runtime_error("at least one multiplicity value is required");
  RootSystemSpec rs;
  rs.kind = kind;
  rs.dimension = N;
  rs.prefactor = prefactor;
  const double r2 = std::sqrt(2.0);
  switch (kind) {
    case RootKind::RankOne:
      if (N != 1) throw std::runtime_error("rank-one root system requires N = 1");
      rs.roots = {{r2}, {-r2}};
      break;
    case RootKind::Product:
      for (int j = 0; j < N; ++j) {
        Vec a(static_cast<std::size_t>(N), 0.0);
        a[static_cast<std::size_t>(j)] = r2;
        rs.roots.push_back(a);
        a[static_cast<std::size_t>(j)] = -r2;
        rs.roots.push_back(a);
      }
      break;
    case RootKind::General:
      if (roots.empty()) throw std::runtime_error("general root system requires an explicit root list");
      rs.roots = roots;
      break;
  }
  validate_roots(rs);
  build_group(rs);
  build_orbits(rs);
  assign_multiplicity(rs, k_values);
  return rs;
}

Vec reflect(const Vec& alpha, const Vec& x) {
  const double c = 2.0 * dot(x, alpha) / dot(alpha, alpha);
  Vec y = x;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= c * alpha[i];
  return y;
}

Vec reflect(const RootSystemSpec&, const Vec& alpha, const Vec& x) { return reflect(alpha, x); }

Vec apply_group_element(const RootSystemSpec& rs, std::size_t g, const Vec& x) { return matvec(rs.group.at(g), x); }

double orbit_distance(const RootSystemSpec& rs, const Vec& x, const Vec& y) {
  double best = INFINITY;
  for (std::size_t g = 0; g < rs.group.size(); ++g) {
    Vec gx = apply_group_element(rs, g, x);
    double s = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) s += (gx[i] - y[i]) * (gx[i] - y[i]);
    best = std::min(best, std::sqrt(s));
  }
  return best;
}

double weight_density(const RootSystemSpec& rs, const Vec& x) {
  double w = 1.0;
  for (std::size_t i = 0; i < rs.roots.size(); ++i) {
    const double k = rs.multiplicity[i];
    if (k == 0.0) continue;
    w *= std::pow(std::abs(dot(x, rs.roots[i])), k);
  }
  return w;
}

std::string root_system_to_json(const RootSystemSpec& rs) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(rs.kind);
  j["dimension"] = rs.dimension;
  j["roots"] = rs.roots;
  nlohmann::ordered_json mult = nlohmann::ordered_json::object();
  for (std::size_t o = 0; o < rs.orbit_k.size(); ++o) mult[std::to_string(o)] = rs.orbit_k[o];
  j["multiplicity"] = mult;
  j["prefactor"] = rs.prefactor;
  return j.dump();
}

RootSystemSpec root_system_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const RootKind kind = root_kind_from_string(j.at("kind").get<std::string>());
  const int n = j.at("dimension").get<int>();
  std::vector<Vec> roots;
  if (j.contains("roots")) roots = j.at("roots").get<std::vector<Vec>>();
  std::vector<std::pair<int, double>> entries;
  for (const auto& [key, value] : j.at("multiplicity").items()) entries.emplace_back(std::stoi(key), value.get<double>());
  std::sort(entries.begin(), entries.end());
  std::vector<double> k;
  for (const auto& e : entries) k.push_back(e.second);
  const double pref = j.value("prefactor", 1.0);
  return make_root_system(kind, n, k, kind == RootKind::General ? roots : std::vector<Vec>{}, pref);
}

}  // namespace dunkl
