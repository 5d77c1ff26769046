#include "dunkl_lab/riesz.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "dunkl_lab/dunkl_core.hpp"
#include "dunkl_lab/parallel.hpp"

namespace dunkl {

RieszParams RieszParams::make(double p, const RootSystemSpec& rs) {
  if (!(p > 1.0) || !std::isfinite(p)) {
    std::ostringstream msg;
    msg << "p must exceed 1 (got " << p << ")";
    throw std::invalid_argument(msg.str());
  }
  RieszParams r;
  r.p = p;
  r.q = p / (p - 1.0);
  r.p_star = std::max(r.p, r.q);
  r.k_sum = rs.k_sum();
  return r;
}

namespace {

void check_index(const TransformPlan& plan, int j) {
  if (j < 1 || j > plan.grid()->dimension) {
    std::ostringstream msg;
    msg << "Riesz index " << j << " outside 1.." << plan.grid()->dimension;
    throw std::runtime_error(msg.str());
  }
}

}  // namespace

SpectralFunction riesz_multiplier(const SpectralFunction& F, int j) {
  if (j < 1 || j > F.freq_grid->dimension) {
    std::ostringstream msg;
    msg << "Riesz index " << j << " outside 1.." << F.freq_grid->dimension;
    throw std::runtime_error(msg.str());
  }
  const auto ju = static_cast<std::size_t>(j - 1);
  return apply_multiplier(F, [&](const Vec& xi) { return cplx(0.0, -xi[ju] / norm(xi)); });
}

GridFunction riesz_apply(const TransformPlan& plan, const GridFunction& f, int j) {
  check_index(plan, j);
  return plan.inverse(riesz_multiplier(plan.forward(f), j));
}

GridFunction riesz_apply(const PoissonEvaluator& pe, const GridFunction& f, int j) { return riesz_apply(pe.plan(), f, j); }

GridFunction hilbert_apply(const PoissonEvaluator& pe, const GridFunction& f) {
  if (pe.rs().dimension != 1) throw std::runtime_error("Hilbert transform needs N = 1");
  return riesz_apply(pe, f, 1);
}

GridFunction riesz_vector_magnitude(const PoissonEvaluator& pe, const GridFunction& f) {
  const TransformPlan& plan = pe.plan();
  const SpectralFunction F = plan.forward(f);
  GridFunction out{f.grid, std::vector<cplx>(f.values.size(), 0.0)};
  for (int j = 1; j <= plan.grid()->dimension; ++j) {
    const GridFunction r = plan.inverse(riesz_multiplier(F, j));
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += std::norm(r.values[i]);
  }
  for (auto& v : out.values) v = std::sqrt(v.real());
  return out;
}

double low_frequency_shell_ratio(const SpectralFunction& F, double r) {
  const QuadratureGrid& g = *F.freq_grid;
  double s1 = 0.0, s2 = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    double r2 = 0.0;
    for (int j = 0; j < g.dimension; ++j) r2 += g.coord(i, j) * g.coord(i, j);
    const double rad = std::sqrt(r2);
    const double v = std::norm(F.values[i]) * g.dw_weights[i];
    tot += v;
    if (rad >= r && rad < 2 * r) s1 += v / r2;
    else if (rad >= 2 * r && rad < 4 * r) s2 += v / r2;
  }
  if (s1 + s2 <= 1e-24 * tot) return 0.0;
  return s2 > 0.0 ? s1 / s2 : INFINITY;
}

RieszIdentityResult riesz_identity(const PoissonEvaluator& pe, const GridFunction& f, int j) {
  const TransformPlan& plan = pe.plan();
  check_index(plan, j);
  const auto ju = static_cast<std::size_t>(j - 1);
  const SpectralFunction F = plan.forward(f);
  RieszIdentityResult res;
  res.shell_ratio = low_frequency_shell_ratio(F);
  if (!(res.shell_ratio < std::pow(2.0, -0.25))) {
    std::ostringstream msg;
    msg << "f carries non-integrable low-frequency mass for |xi|^{-1} (shell ratio " << res.shell_ratio << ")";
    throw LowFrequencyError(msg.str(), res.shell_ratio);
  }
  const GridFunction R = plan.inverse(apply_multiplier(F, [&](const Vec& xi) { return cplx(0.0, -xi[ju] / norm(xi)); }));
  const SpectralFunction H = apply_multiplier(F, [](const Vec& xi) { return cplx(1.0 / norm(xi), 0.0); });
  const GridFunction A = plan.inverse(apply_multiplier(H, [&](const Vec& xi) { return cplx(0.0, xi[ju]); }));
  // T_j on h = (-Delta_k)^{-1/2} f: kernel-derivative of the inverse plus difference quotients
  const QuadratureGrid& g = *plan.grid();
  const GridFunction h = plan.inverse(H);
  GridFunction B = plan.inverse_partial(H, j - 1);
  for (std::size_t a = 0; a < g.rs.roots.size(); ++a) {
    const Vec& al = g.rs.roots[a];
    const double w = 0.5 * g.rs.multiplicity[a] * al[ju];
    if (w == 0.0) continue;
    const auto perm = g.reflection_permutation(a);
    for (std::size_t i = 0; i < g.size(); ++i) B.values[i] += w * (h.values[i] - h.values[perm[i]]) / dot(al, g.node(i));
  }
  GridFunction d1{f.grid, std::vector<cplx>(f.values.size())}, d2 = d1;
  for (std::size_t i = 0; i < d1.values.size(); ++i) {
    d1.values[i] = R.values[i] + A.values[i];
    d2.values[i] = R.values[i] + B.values[i];
  }
  const double nf = lp_norm(f, 2.0);
  res.spectral = nf > 0.0 ? lp_norm(d1, 2.0) / nf : 0.0;
  res.direct = nf > 0.0 ? lp_norm(d2, 2.0) / nf : 0.0;
  return res;
}

double riesz_identity_residual(const PoissonEvaluator& pe, const GridFunction& f, int j) {
  return riesz_identity(pe, f, j).spectral;
}

GaussPoly draw_test_function(const RootSystemSpec& rs, const FamilySpec& fam, std::uint64_t seed, int trial) {
  const int n = rs.dimension;
  for (int attempt = 0;; ++attempt) {
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 rng(sq);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> aa(fam.a_min, fam.a_max);
    std::uniform_int_distribution<int> deg(0, fam.max_degree);
    const double a = aa(rng);
    const int d = deg(rng);
    GaussPoly f = GaussPoly::gaussian(n, a, 0.0);
    // all exponents of total degree <= d, in lexicographic order
    Exponent e(static_cast<std::size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int axis, int left) {
      if (axis == n) {
        f = f + GaussPoly::monomial(n, a, e, unit(rng));
        return;
      }
      for (int v = 0; v <= left; ++v) {
        e[static_cast<std::size_t>(axis)] = v;
        rec(axis + 1, left - v);
      }
      e[static_cast<std::size_t>(axis)] = 0;
    };
    rec(0, d);
    if (fam.symmetrize) {
      GaussPoly s = f.scaled(0.0);
      for (const auto& m : rs.group) {
        std::vector<int> signs(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) signs[static_cast<std::size_t>(j)] = m[static_cast<std::size_t>(j * n + j)] < 0 ? -1 : 1;
        s = s + f.signed_compose(signs);
      }
      f = s.scaled(1.0 / static_cast<double>(rs.group.size()));
    }
    if (!f.is_zero()) return f;
  }
}

double riesz_bound(const RieszParams& params, int dimension, bool g_invariant) {
  if (dimension == 1) return 1440.0 * (params.p_star - 1.0);
  if (g_invariant) return 144.0 * (params.p_star - 1.0);
  return 144.0 * (params.p_star - 1.0) * (params.k_sum + 128.0);
}

RatioReport norm_ratio_experiment(const PoissonEvaluator& pe, const RieszParams& params, const FamilySpec& fam,
                                  int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const RootSystemSpec& rs = pe.rs();
  const GridPtr grid = pe.plan().grid();
  const int n = rs.dimension;
  RatioReport rep;
  rep.bound = riesz_bound(params, n, fam.symmetrize);
  rep.bound_kind = n == 1 ? "1440(p*-1)" : fam.symmetrize ? "144(p*-1)" : "144(p*-1)(k_sum+2^7)";
  const double cut = 0.9 * grid->radius;
  for (int t = 0; t < trials; ++t) {
    const GaussPoly f = draw_test_function(rs, fam, seed, t);
    const GridFunction fg = sample(grid, [&](const Vec& x) { return cplx(f(x), 0.0); });
    const GridFunction rf = riesz_vector_magnitude(pe, fg);
    RatioRow row;
    row.trial = t;
    row.function = f.describe();
    row.f_norm = lp_norm(fg, params.p);
    row.rf_norm = lp_norm(rf, params.p);
    row.ratio = row.rf_norm / row.f_norm;
    row.bound = rep.bound;
    std::vector<double> all(rf.values.size()), outer(rf.values.size(), 0.0);
    for (std::size_t i = 0; i < all.size(); ++i) {
      all[i] = std::pow(std::abs(rf.values[i]), params.p);
      for (int j = 0; j < n; ++j)
        if (std::abs(grid->coord(i, j)) > cut) outer[i] = all[i];
    }
    const double tot = integrate_real(*grid, all);
    row.shell_fraction = tot > 0.0 ? integrate_real(*grid, outer) / tot : 0.0;
    row.spectral_tail = pe.plan().spectral_tail_fraction(pe.plan().forward(fg));
    row.flagged = row.shell_fraction > 0.01 || row.spectral_tail > 0.01;
    rep.flagged += row.flagged ? 1 : 0;
    rep.max_ratio = std::max(rep.max_ratio, row.ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

std::string ratio_report_csv(const RatioReport& r) {
  std::ostringstream out;
  out << "trial,f_norm,rf_norm,ratio,bound,shell_fraction,spectral_tail,flagged,function\n";
  for (const auto& row : r.rows)
    out << row.trial << "," << cell(row.f_norm) << "," << cell(row.rf_norm) << "," << cell(row.ratio) << ","
        << cell(row.bound) << "," << cell(row.shell_fraction) << "," << cell(row.spectral_tail) << ","
        << (row.flagged ? "true" : "false") << ",\"" << row.function << "\"\n";
  return out.str();
}

}  // namespace dunkl
