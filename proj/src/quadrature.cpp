#include "dunkl_lab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "dunkl_lab/io.hpp"
#include "json.hpp"

namespace dunkl {

const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  if (n < 1) throw std::runtime_error("Gauss-Legendre order must be >= 1");
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    long double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    long double pp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      long double p1 = 1.0L, p2 = 0.0L;
      for (int j = 1; j <= n; ++j) {
        const long double p3 = p2;
        p2 = p1;
        p1 = ((2.0L * j - 1.0L) * z * p2 - (j - 1.0L) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0L);
      const long double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    const long double w = 2.0L / ((1.0L - z * z) * pp * pp);
    rule.nodes[static_cast<std::size_t>(i)] = -static_cast<double>(z);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(z);
    rule.weights[static_cast<std::size_t>(i)] = static_cast<double>(w);
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(w);
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

AxisRule graded_axis_rule(double radius, int resolution, int layers) {
  if (!(radius > 0.0)) throw std::runtime_error("grid radius must be positive");
  if (resolution < 8 || resolution % 2 != 0) {
    std::ostringstream msg;
    msg << "grid resolution must be even and >= 8 (got " << resolution << ")";
    throw std::runtime_error(msg.str());
  }
  const int half = resolution / 2;
  int order = half;
  if (half % 16 == 0 && half / 16 >= 2) order = 16;
  else if (half % 8 == 0 && half / 8 >= 2) order = 8;
  else if (half % 4 == 0 && half / 4 >= 2) order = 4;
  const int panels = half / order;
  std::vector<double> edges{0.0};
  if (panels == 1) {
    edges.push_back(radius);
  } else {
    int L = layers >= 0 ? layers : std::max(1, panels / 3);
    L = std::min(L, panels - 1);
    const int uniform = panels - L;
    const double h = radius / uniform;
    for (int l = L; l >= 0; --l) edges.push_back(h * std::ldexp(1.0, -l));
    for (int u = 2; u <= uniform; ++u) edges.push_back(u == uniform ? radius : h * u);
  }
  const GaussRule& g = gauss_legendre(order);
  std::vector<double> pos, wpos;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    const double a = edges[e], b = edges[e + 1];
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
      pos.push_back(mid + hw * g.nodes[static_cast<std::size_t>(i)]);
      wpos.push_back(hw * g.weights[static_cast<std::size_t>(i)]);
    }
  }
  AxisRule rule;
  for (std::size_t i = pos.size(); i-- > 0;) {
    rule.nodes.push_back(-pos[i]);
    rule.weights.push_back(wpos[i]);
  }
  for (std::size_t i = 0; i < pos.size(); ++i) {
    rule.nodes.push_back(pos[i]);
    rule.weights.push_back(wpos[i]);
  }
  return rule;
}

Vec QuadratureGrid::node(std::size_t i) const {
  const auto n = static_cast<std::size_t>(dimension);
  return Vec(nodes.begin() + static_cast<std::ptrdiff_t>(i * n), nodes.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
}

std::vector<std::size_t> QuadratureGrid::permutation(std::size_t g) const {
  const auto& m = rs.group.at(g);
  const auto n = static_cast<std::size_t>(dimension);
  std::vector<int> sign(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t c = 0; c < n; ++c)
      if (c != j && m[j * n + c] != 0.0) throw std::runtime_error("group element is not a coordinate sign change");
    sign[j] = m[j * n + j] < 0 ? -1 : 1;
  }
  std::vector<std::size_t> ext(n);
  for (std::size_t j = 0; j < n; ++j) ext[j] = axes[j].nodes.size();
  std::vector<std::size_t> perm(size());
  for (std::size_t i = 0; i < size(); ++i) {
    std::size_t rem = i, out = 0;
    std::vector<std::size_t> idx(n);
    for (std::size_t j = n; j-- > 0;) {
      idx[j] = rem % ext[j];
      rem /= ext[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t v = sign[j] < 0 ? ext[j] - 1 - idx[j] : idx[j];
      out = out * ext[j] + v;
    }
    perm[i] = out;
  }
  return perm;
}

std::vector<std::size_t> QuadratureGrid::reflection_permutation(std::size_t root_index) const {
  const Vec& a = rs.roots.at(root_index);
  for (std::size_t g = 0; g < rs.group.size(); ++g) {
    const auto& m = rs.group[g];
    const auto n = static_cast<std::size_t>(dimension);
    bool match = true;
    for (std::size_t i = 0; i < n && match; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double expect = (i == j ? 1.0 : 0.0) - a[i] * a[j];
        if (std::abs(m[i * n + j] - expect) > 1e-12) { match = false; break; }
      }
    if (match) return permutation(g);
  }
  throw std::runtime_error("reflection not found in group");
}

std::string QuadratureGrid::descriptor_json() const {
  nlohmann::ordered_json j;
  j["root_system"] = nlohmann::ordered_json::parse(root_system_to_json(rs));
  j["radius"] = radius;
  j["resolution"] = resolution;
  j["nodes"] = size();
  return j.dump();
}

GridPtr build_grid(const RootSystemSpec& rs, double radius, int resolution, int layers) {
  if (rs.kind == RootKind::Product && rs.dimension > 3) throw std::runtime_error("product grids are limited to N <= 3");
  if (!rs.coordinate_aligned())
    throw std::runtime_error("grids require rank-one or product (coordinate-aligned) root systems");
  if (rs.dimension > 3) throw std::runtime_error("grids are limited to N <= 3");
  auto grid = std::make_shared<QuadratureGrid>();
  grid->rs = rs;
  grid->radius = radius;
  grid->resolution = resolution;
  grid->dimension = rs.dimension;
  const AxisRule axis = graded_axis_rule(radius, resolution, layers);
  const auto ks = rs.axis_k();
  for (int j = 0; j < rs.dimension; ++j) {
    grid->axes.push_back(axis);
    std::vector<double> dw(axis.nodes.size());
    const double k = ks[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < dw.size(); ++i)
      dw[i] = axis.weights[i] * (k == 0.0 ? 1.0 : std::pow(2.0 * axis.nodes[i] * axis.nodes[i], k));
    grid->axis_dw.push_back(std::move(dw));
  }
  const std::size_t n = axis.nodes.size();
  std::size_t total = 1;
  for (int j = 0; j < rs.dimension; ++j) total *= n;
  grid->nodes.resize(total * static_cast<std::size_t>(rs.dimension));
  grid->dw_weights.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rem = i;
    double w = rs.prefactor;
    for (int j = rs.dimension; j-- > 0;) {
      const std::size_t idx = rem % n;
      rem /= n;
      grid->nodes[i * static_cast<std::size_t>(rs.dimension) + static_cast<std::size_t>(j)] = axis.nodes[idx];
      w *= grid->axis_dw[static_cast<std::size_t>(j)][idx];
    }
    grid->dw_weights[i] = w;
  }
  return grid;
}

GridFunction make_grid_function(GridPtr grid, std::vector<cplx> values) {
  if (values.size() != grid->size()) throw std::runtime_error("grid function length does not match grid");
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw std::runtime_error("grid function has non-finite entries");
  return GridFunction{std::move(grid), std::move(values)};
}

GridFunction sample(GridPtr grid, const std::function<cplx(const Vec&)>& f) {
  std::vector<cplx> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
  return make_grid_function(std::move(grid), std::move(v));
}

GridFunction compose_with_group(const GridFunction& f, std::size_t g) {
  const auto perm = f.grid->permutation(g);
  std::vector<cplx> v(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) v[i] = f.values[perm[i]];
  return GridFunction{f.grid, std::move(v)};
}

namespace {

template <class T>
T pairwise(const T* v, std::size_t n) {
  // mirror-symmetric order: v and its reversal give bitwise equal sums
  const std::size_t h = n / 2;
  if (n <= 16) {
    T s{};
    for (std::size_t i = 0; i < h; ++i) s += v[i] + v[n - 1 - i];
    return n % 2 ? s + v[h] : s;
  }
  const T outer = pairwise(v, h) + pairwise(v + n - h, h);
  return n % 2 ? outer + v[h] : outer;
}

}  // namespace

double pairwise_sum(const std::vector<double>& v) { return v.empty() ? 0.0 : pairwise(v.data(), v.size()); }

cplx integrate(const QuadratureGrid& grid, const std::vector<cplx>& values) {
  std::vector<cplx> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = values[i] * grid.dw_weights[i];
  return terms.empty() ? cplx{} : pairwise(terms.data(), terms.size());
}

cplx integrate(const GridFunction& f) { return integrate(*f.grid, f.values); }

double integrate_real(const QuadratureGrid& grid, const std::vector<double>& values) {
  std::vector<double> terms(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) terms[i] = values[i] * grid.dw_weights[i];
  return pairwise_sum(terms);
}

double sup_norm(const GridFunction& f) {
  double m = 0.0;
  for (const auto& v : f.values) m = std::max(m, std::abs(v));
  return m;
}

double lp_norm(const GridFunction& f, double p) {
  if (!(p >= 1.0)) throw std::runtime_error("Lp norm requires p >= 1");
  if (std::isinf(p)) return sup_norm(f);
  std::vector<double> a(f.values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(std::abs(f.values[i]), p);
  return std::pow(integrate_real(*f.grid, a), 1.0 / p);
}

namespace {

// int_a^b 2^k |x|^{2k} dx
double interval_weight(double a, double b, double k) {
  auto prim = [k](double x) {
    const double e = 2.0 * k + 1.0;
    return (x < 0 ? -1.0 : 1.0) * std::pow(std::abs(x), e) / e;
  };
  return std::pow(2.0, k) * (prim(b) - prim(a));
}

double ball_axes(const double* c, const double* ks, int m, double r, int res) {
  if (r <= 0.0) return 0.0;
  if (m == 1) return interval_weight(c[0] - r, c[0] + r, ks[0]);
  std::vector<double> cuts{-M_PI / 2, M_PI / 2};
  if (std::abs(c[0]) < r) cuts.push_back(std::asin(-c[0] / r));
  if (std::abs(c[1]) < r) {
    const double th = std::acos(std::abs(c[1]) / r);
    cuts.push_back(th);
    cuts.push_back(-th);
  }
  std::sort(cuts.begin(), cuts.end());
  const GaussRule& g = gauss_legendre(res);
  double total = 0.0;
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double a = cuts[s], b = cuts[s + 1];
    if (b - a <= 0.0) continue;
    const double mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    double piece = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double th = mid + hw * g.nodes[i];
      const double x0 = c[0] + r * std::sin(th);
      const double rho = r * std::cos(th);
      const double w0 = ks[0] == 0.0 ? 1.0 : std::pow(2.0 * x0 * x0, ks[0]);
      piece += g.weights[i] * w0 * ball_axes(c + 1, ks + 1, m - 1, rho, res) * rho;
    }
    total += hw * piece;
  }
  return total;
}

double ball_general(const RootSystemSpec& rs, const Vec& center, double r, int res) {
  const int n = rs.dimension;
  const GaussRule& g = gauss_legendre(res);
  auto radial = [&](const Vec& dir) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double rho = 0.5 * r * (g.nodes[i] + 1.0);
      Vec x = center;
      for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] += rho * dir[static_cast<std::size_t>(j)];
      s += 0.5 * r * g.weights[i] * std::pow(rho, n - 1) * weight_density(rs, x);
    }
    return s;
  };
  if (n == 1) return radial({1.0}) + radial({-1.0});
  if (n == 2) {
    double s = 0.0;
    const int na = 4 * res;
    for (int a = 0; a < na; ++a) {
      const double th = 2.0 * M_PI * (a + 0.5) / na;
      s += radial({std::cos(th), std::sin(th)}) * 2.0 * M_PI / na;
    }
    return s;
  }
  if (n == 3) {
    double s = 0.0;
    const int na = 4 * res;
    for (std::size_t b = 0; b < g.nodes.size(); ++b) {
      const double ct = g.nodes[b];
      const double st = std::sqrt(1.0 - ct * ct);
      for (int a = 0; a < na; ++a) {
        const double ph = 2.0 * M_PI * (a + 0.5) / na;
        s += g.weights[b] * radial({st * std::cos(ph), st * std::sin(ph), ct}) * 2.0 * M_PI / na;
      }
    }
    return s;
  }
  throw std::runtime_error("ball_measure supports N <= 3 for general root systems");
}

}  // namespace

double ball_measure(const RootSystemSpec& rs, const Vec& center, double r, int resolution) {
  if (!(r > 0.0)) throw std::runtime_error("ball radius must be positive");
  if (static_cast<int>(center.size()) != rs.dimension) throw std::runtime_error("ball center has wrong dimension");
  if (rs.coordinate_aligned()) {
    const auto ks = rs.axis_k();
    return rs.prefactor * ball_axes(center.data(), ks.data(), rs.dimension, r, resolution);
  }
  return rs.prefactor * ball_general(rs, center, r, resolution);
}

FittedConstant ball_comparability(const RootSystemSpec& rs, const std::vector<std::pair<Vec, double>>& samples,
                                  int resolution) {
  FittedConstant out;
  out.min_ratio = INFINITY;
  out.max_ratio = 0.0;
  for (const auto& [x, r] : samples) {
    double model = rs.prefactor * std::pow(r, rs.dimension);
    for (std::size_t i = 0; i < rs.roots.size(); ++i)
      model *= std::pow(std::abs(dot(x, rs.roots[i])) + r, rs.multiplicity[i]);
    const double ratio = ball_measure(rs, x, r, resolution) / model;
    out.min_ratio = std::min(out.min_ratio, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  out.value = std::max({1.0, out.max_ratio, 1.0 / out.min_ratio});
  return out;
}

double doubling_constant(const RootSystemSpec& rs, const std::vector<std::pair<Vec, double>>& samples,
                         int resolution) {
  double c = 0.0;
  for (const auto& [x, r] : samples)
    c = std::max(c, ball_measure(rs, x, 2.0 * r, resolution) / ball_measure(rs, x, r, resolution));
  return c;
}

void write_grid_function_csv(const std::string& path, const GridFunction& f) {
  std::ostringstream out;
  for (int j = 0; j < f.grid->dimension; ++j) out << "x" << j << ",";
  out << "re,im\n";
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    for (int j = 0; j < f.grid->dimension; ++j) out << format_double(f.grid->coord(i, j)) << ",";
    out << format_double(f.values[i].real()) << "," << format_double(f.values[i].imag()) << "\n";
  }
  write_file_atomic(path, out.str());
}

namespace {

void check_node(const QuadratureGrid& grid, std::size_t i, const Vec& x) {
  for (int j = 0; j < grid.dimension; ++j)
    if (std::abs(grid.coord(i, j) - x[static_cast<std::size_t>(j)]) > 1e-12 * (1.0 + std::abs(x[static_cast<std::size_t>(j)])))
      throw std::runtime_error("stored node coordinates do not match the grid");
}

constexpr char kMagic[8] = {'D', 'L', 'G', 'F', 'v', '0', '0', '1'};

}  // namespace

GridFunction read_grid_function_csv(const std::string& path, GridPtr grid) {
  std::istringstream in(read_file(path));
  std::string line;
  std::getline(in, line);
  std::vector<cplx> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> cols;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(std::stod(cell));
    if (static_cast<int>(cols.size()) != grid->dimension + 2) throw std::runtime_error("malformed grid function row");
    if (vals.size() >= grid->size()) throw std::runtime_error("too many rows for grid");
    check_node(*grid, vals.size(), Vec(cols.begin(), cols.begin() + grid->dimension));
    vals.emplace_back(cols[static_cast<std::size_t>(grid->dimension)], cols[static_cast<std::size_t>(grid->dimension) + 1]);
  }
  return make_grid_function(std::move(grid), std::move(vals));
}

void write_grid_function_binary(const std::string& path, const GridFunction& f) {
  std::string buf(kMagic, sizeof kMagic);
  auto put = [&buf](const void* p, std::size_t n) { buf.append(static_cast<const char*>(p), n); };
  const std::uint32_t dim = static_cast<std::uint32_t>(f.grid->dimension);
  const std::uint64_t count = f.values.size();
  put(&dim, sizeof dim);
  put(&count, sizeof count);
  for (int j = 0; j < f.grid->dimension; ++j)
    for (std::size_t i = 0; i < count; ++i) {
      const double v = f.grid->coord(i, j);
      put(&v, sizeof v);
    }
  for (std::size_t i = 0; i < count; ++i) {
    const double v = f.values[i].real();
    put(&v, sizeof v);
  }
  for (std::size_t i = 0; i < count; ++i) {
    const double v = f.values[i].imag();
    put(&v, sizeof v);
  }
  write_file_atomic(path, buf);
}

GridFunction read_grid_function_binary(const std::string& path, GridPtr grid) {
  const std::string buf = read_file(path);
  std::size_t pos = 0;
  auto take = [&](void* p, std::size_t n) {
    if (pos + n > buf.size()) throw std::runtime_error("truncated binary grid function");
    std::memcpy(p, buf.data() + pos, n);
    pos += n;
  };
  char magic[8];
  take(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof magic) != 0) throw std::runtime_error("not a grid function file");
  std::uint32_t dim = 0;
  std::uint64_t count = 0;
  take(&dim, sizeof dim);
  take(&count, sizeof count);
  if (static_cast<int>(dim) != grid->dimension || count != grid->size())
    throw std::runtime_error("binary grid function does not match grid");
  std::vector<double> coords(count * dim);
  for (std::uint32_t j = 0; j < dim; ++j)
    for (std::uint64_t i = 0; i < count; ++i) take(&coords[i * dim + j], sizeof(double));
  std::vector<cplx> vals(count);
  for (auto& v : vals) {
    double re;
    take(&re, sizeof re);
    v.real(re);
  }
  for (auto& v : vals) {
    double im;
    take(&im, sizeof im);
    v.imag(im);
  }
  for (std::uint64_t i = 0; i < count; ++i)
    check_node(*grid, i, Vec(coords.begin() + static_cast<std::ptrdiff_t>(i * dim), coords.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim)));
  return make_grid_function(std::move(grid), std::move(vals));
}

}  // namespace dunkl
