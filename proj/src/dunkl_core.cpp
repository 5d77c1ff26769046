#include "dunkl_lab/dunkl_core.hpp"

#include <cmath>
#include <stdexcept>

namespace dunkl {

namespace {

void require_aligned(const RootSystemSpec& rs) {
  if (!rs.coordinate_aligned()) throw std::runtime_error("closed-form Dunkl operator needs coordinate-aligned roots");
}

Vec gradient(const GaussPoly& f, const Vec& x) {
  Vec g(static_cast<std::size_t>(f.dim));
  for (int j = 0; j < f.dim; ++j) g[static_cast<std::size_t>(j)] = f.partial(j)(x);
  return g;
}

// (f(x) - f(sigma_alpha x)) / <alpha, x>, with the segment average of d_alpha f near the hyperplane
double difference_quotient(const GaussPoly& f, const Vec& alpha, const Vec& x) {
  const double s = dot(alpha, x);
  const double scale = std::max(1.0, norm(x));
  if (std::abs(s) > 1e-6 * scale) return (f(x) - f(reflect(alpha, x))) / s;
  // sigma x = x - s alpha, f(x) - f(x - s alpha) = s int_0^1 d_alpha f(x - u s alpha) du
  const GaussPoly da = f.directional(alpha);
  const GaussRule& r = gauss_legendre(16);
  double acc = 0.0;
  Vec y(x.size());
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double u = 0.5 * (r.nodes[i] + 1.0);
    for (std::size_t j = 0; j < x.size(); ++j) y[j] = x[j] - u * s * alpha[j];
    acc += 0.5 * r.weights[i] * da(y);
  }
  return acc;
}

}  // namespace

GaussPoly apply_dunkl_operator(const RootSystemSpec& rs, const GaussPoly& f, const Vec& xi) {
  require_aligned(rs);
  if (static_cast<int>(xi.size()) != f.dim || f.dim != rs.dimension) throw std::runtime_error("direction has wrong dimension");
  const auto ks = rs.axis_k();
  GaussPoly r = f.scaled(0.0);
  for (int j = 0; j < f.dim; ++j) {
    const double c = xi[static_cast<std::size_t>(j)];
    if (c == 0.0) continue;
    GaussPoly tj = f.partial(j);
    if (ks[static_cast<std::size_t>(j)] != 0.0) tj = tj + f.odd_quotient(j).scaled(ks[static_cast<std::size_t>(j)]);
    r = r + tj.scaled(c);
  }
  return r;
}

GaussPoly dunkl_laplacian(const RootSystemSpec& rs, const GaussPoly& f) {
  GaussPoly r = f.scaled(0.0);
  for (int j = 0; j < f.dim; ++j) {
    Vec e(static_cast<std::size_t>(f.dim), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    r = r + apply_dunkl_operator(rs, apply_dunkl_operator(rs, f, e), e);
  }
  return r;
}

GridFunction apply_dunkl_operator(const TransformPlan& plan, const GridFunction& f, const Vec& xi, GridDerivative how) {
  const QuadratureGrid& g = *plan.grid();
  if (static_cast<int>(xi.size()) != g.dimension) throw std::runtime_error("direction has wrong dimension");
  const SpectralFunction F = plan.forward(f);
  if (how == GridDerivative::Spectral) {
    return plan.inverse(apply_multiplier(F, [&](const Vec& eta) { return cplx(0.0, dot(xi, eta)); }));
  }
  GridFunction out{plan.grid(), std::vector<cplx>(g.size(), 0.0)};
  for (int j = 0; j < g.dimension; ++j) {
    const double c = xi[static_cast<std::size_t>(j)];
    if (c == 0.0) continue;
    const GridFunction d = plan.inverse_partial(F, j);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] += c * d.values[i];
  }
  const RootSystemSpec& rs = g.rs;
  for (std::size_t a = 0; a < rs.roots.size(); ++a) {
    const Vec& al = rs.roots[a];
    const double w = 0.5 * rs.multiplicity[a] * dot(al, xi);
    if (w == 0.0) continue;
    const auto perm = g.reflection_permutation(a);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = dot(al, g.node(i));
      out.values[i] += w * (f.values[i] - f.values[perm[i]]) / s;
    }
  }
  return out;
}

GridFunction dunkl_laplacian(const TransformPlan& plan, const GridFunction& f) {
  return plan.inverse(apply_multiplier(plan.forward(f), [](const Vec& eta) { return cplx(-dot(eta, eta), 0.0); }));
}

FunctionRep apply_dunkl_operator(const RootSystemSpec& rs, const FunctionRep& f, const Vec& xi, const TransformPlan* plan) {
  if (const auto* p = std::get_if<GaussPoly>(&f)) return apply_dunkl_operator(rs, *p, xi);
  if (!plan) throw std::runtime_error("grid functions need a transform plan");
  return apply_dunkl_operator(*plan, std::get<GridFunction>(f), xi);
}

FunctionRep dunkl_laplacian(const RootSystemSpec& rs, const FunctionRep& f, const TransformPlan* plan) {
  if (const auto* p = std::get_if<GaussPoly>(&f)) return dunkl_laplacian(rs, *p);
  if (!plan) throw std::runtime_error("grid functions need a transform plan");
  return dunkl_laplacian(*plan, std::get<GridFunction>(f));
}

double dunkl_operator_at(const RootSystemSpec& rs, const GaussPoly& f, const Vec& xi, const Vec& x) {
  double v = dot(gradient(f, x), xi);
  for (std::size_t a = 0; a < rs.roots.size(); ++a) {
    const Vec& al = rs.roots[a];
    const double w = 0.5 * rs.multiplicity[a] * dot(al, xi);
    if (w != 0.0) v += w * difference_quotient(f, al, x);
  }
  return v;
}

double dunkl_laplacian_at(const RootSystemSpec& rs, const GaussPoly& f, const Vec& x) {
  double v = 0.0;
  for (int j = 0; j < f.dim; ++j) v += f.partial(j).partial(j)(x);
  const Vec grad = gradient(f, x);
  for (std::size_t a = 0; a < rs.roots.size(); ++a) {
    const double k = rs.multiplicity[a];
    if (k == 0.0) continue;
    const Vec& al = rs.roots[a];
    const double s = dot(al, x);
    if (s == 0.0) throw std::runtime_error("Dunkl Laplacian formula evaluated on a reflecting hyperplane");
    v += k * (dot(grad, al) / s - (f(x) - f(reflect(al, x))) / (s * s));
  }
  return v;
}

double carre_du_champ(const RootSystemSpec& rs, const GaussPoly& f, const GaussPoly& g, const Vec& x) {
  double v = dot(gradient(f, x), gradient(g, x));
  for (std::size_t a = 0; a < rs.roots.size(); ++a) {
    const double k = rs.multiplicity[a];
    const Vec& al = rs.roots[a];
    const double s = dot(al, x);
    if (s == 0.0) throw std::runtime_error("carre du champ evaluated on a reflecting hyperplane");
    if (k == 0.0) continue;
    const Vec sx = reflect(al, x);
    v += 0.5 * k * (f(x) - f(sx)) * (g(x) - g(sx)) / (s * s);
  }
  return v;
}

double carre_du_champ_from_laplacian(const RootSystemSpec& rs, const GaussPoly& f, const GaussPoly& g, const Vec& x) {
  return 0.5 * (dunkl_laplacian_at(rs, f * g, x) - f(x) * dunkl_laplacian_at(rs, g, x) -
                g(x) * dunkl_laplacian_at(rs, f, x));
}

double skew_symmetry_residual(const RootSystemSpec& rs, const QuadratureGrid& grid, const GaussPoly& f,
                              const GaussPoly& g, const Vec& xi) {
  std::vector<double> a(grid.size()), ff(grid.size()), gg(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec x = grid.node(i);
    const double fx = f(x), gx = g(x);
    a[i] = dunkl_operator_at(rs, f, xi, x) * gx + fx * dunkl_operator_at(rs, g, xi, x);
    ff[i] = fx * fx;
    gg[i] = gx * gx;
  }
  const double den = std::sqrt(integrate_real(grid, ff) * integrate_real(grid, gg));
  if (den == 0.0) return 0.0;
  return std::abs(integrate_real(grid, a)) / den;
}

}  // namespace dunkl
