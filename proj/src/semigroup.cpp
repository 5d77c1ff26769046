#include "dunkl_lab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dunkl_lab/parallel.hpp"

namespace dunkl {

namespace {

void require_positive_t(double t) {
  if (!(t > 0.0)) {
    std::ostringstream msg;
    msg << "semigroup time must be positive (got " << t << ")";
    throw std::runtime_error(msg.str());
  }
}

double axis_ck(double k) { return std::pow(2.0, 2.0 * k + 0.5) * std::tgamma(k + 0.5); }

struct FreqAxis {
  std::vector<double> xi, w;  // w includes (2 xi^2)^k
};

FreqAxis freq_axis(double Xi, int panels, double k) {
  const AxisRule r = graded_axis_rule(Xi, 32 * panels);
  FreqAxis a;
  a.xi = r.nodes;
  a.w.resize(r.nodes.size());
  for (std::size_t i = 0; i < a.w.size(); ++i) a.w[i] = r.weights[i] * std::pow(2.0 * r.nodes[i] * r.nodes[i], k);
  return a;
}

double spectral_factor(double r, double t, int m) {
  double v = std::exp(-t * r);
  for (int i = 0; i < m; ++i) v *= -r;
  return v;
}

}  // namespace

PoissonEvaluator::PoissonEvaluator(PlanPtr plan, PoissonOptions opts) : plan_(std::move(plan)), opts_(opts) {
  if (!plan_) throw std::runtime_error("Poisson evaluator needs a transform plan");
}

SpectralFunction PoissonEvaluator::evolve(const SpectralFunction& F, double t, int m) const {
  require_positive_t(t);
  return apply_multiplier(F, [&](const Vec& xi) { return cplx(spectral_factor(norm(xi), t, m), 0.0); });
}

GridFunction PoissonEvaluator::apply(const GridFunction& f, double t) const { return apply_dt(f, t, 0); }

GridFunction PoissonEvaluator::apply_dt(const GridFunction& f, double t, int m) const {
  require_positive_t(t);
  return plan_->inverse(evolve(plan_->forward(f), t, m));
}

double PoissonEvaluator::kernel(const Vec& x, const Vec& y, double t, int m) const {
  return kernel_row(x, {y}, t, m)[0];
}

std::vector<double> PoissonEvaluator::kernel_row(const Vec& x, const std::vector<Vec>& ys, double t, int m) const {
  require_positive_t(t);
  const RootSystemSpec& r = rs();
  if (!r.coordinate_aligned()) throw std::runtime_error("Poisson kernel needs coordinate-aligned roots");
  const int n = r.dimension;
  if (static_cast<int>(x.size()) != n) throw std::runtime_error("point has wrong dimension");
  const auto ks = r.axis_k();
  const KernelEval& ke = plan_->kernel();
  const double Xi = std::min(opts_.max_freq, std::log(1.0 / opts_.tail_tol) / t);
  double ck = r.prefactor;
  for (double k : ks) ck *= axis_ck(k);
  const double scale = r.prefactor / (ck * ck);

  std::vector<double> out(ys.size());
  parallel_for(ys.size(), [&](std::size_t yi) {
    const Vec& y = ys[yi];
    if (static_cast<int>(y.size()) != n) throw std::runtime_error("point has wrong dimension");
    double reach = 2.0;
    for (int j = 0; j < n; ++j) reach += std::abs(x[static_cast<std::size_t>(j)]) + std::abs(y[static_cast<std::size_t>(j)]);
    const int panels = static_cast<int>(std::ceil(opts_.density * Xi * reach / 8.0)) + 2;
    std::vector<FreqAxis> axes;
    std::vector<std::vector<double>> prod;  // Re of E(i xi, x) E(-i xi, y) per axis, times weight
    std::vector<std::vector<double>> prod_im;
    for (int j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      axes.push_back(freq_axis(Xi, panels, ks[ju]));
      if (n == 1) {
        // Re of the integrand is even in xi
        auto& a = axes.back();
        const std::size_t h = a.xi.size() / 2;
        a.xi.erase(a.xi.begin(), a.xi.begin() + static_cast<std::ptrdiff_t>(h));
        a.w.erase(a.w.begin(), a.w.begin() + static_cast<std::ptrdiff_t>(h));
        for (double& w : a.w) w *= 2.0;
      }
      const auto& a = axes.back();
      std::vector<double> re(a.xi.size()), im(a.xi.size());
      for (std::size_t i = 0; i < a.xi.size(); ++i) {
        const cplx v = kernel_1d(ks[ju], a.xi[i] * x[ju], true, ke) * std::conj(kernel_1d(ks[ju], a.xi[i] * y[ju], true, ke));
        re[i] = v.real() * a.w[i];
        im[i] = v.imag() * a.w[i];
      }
      prod.push_back(std::move(re));
      prod_im.push_back(std::move(im));
    }
    if (n == 1) {
      std::vector<double> terms(axes[0].xi.size());
      for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = prod[0][i] * spectral_factor(std::abs(axes[0].xi[i]), t, m);
      out[yi] = scale * pairwise_sum(terms);
      return;
    }
    // tensor sum; the imaginary parts cancel in pairs only after the full sum, so carry complex products
    std::vector<std::size_t> ext(static_cast<std::size_t>(n));
    std::size_t total = 1;
    for (int j = 0; j < n; ++j) total *= (ext[static_cast<std::size_t>(j)] = axes[static_cast<std::size_t>(j)].xi.size());
    std::vector<double> terms(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    for (std::size_t lin = 0; lin < total; ++lin) {
      std::size_t rem = lin;
      for (int j = n; j-- > 0;) {
        idx[static_cast<std::size_t>(j)] = rem % ext[static_cast<std::size_t>(j)];
        rem /= ext[static_cast<std::size_t>(j)];
      }
      cplx v = 1.0;
      double r2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        v *= cplx(prod[ju][idx[ju]], prod_im[ju][idx[ju]]);
        r2 += axes[ju].xi[idx[ju]] * axes[ju].xi[idx[ju]];
      }
      terms[lin] = v.real() * spectral_factor(std::sqrt(r2), t, m);
    }
    out[yi] = scale * pairwise_sum(terms);
  });
  return out;
}

GridFunction poisson_apply(const PoissonEvaluator& pe, const GridFunction& f, double t) { return pe.apply(f, t); }

double poisson_kernel(const PoissonEvaluator& pe, const Vec& x, const Vec& y, double t) { return pe.kernel(x, y, t); }

MassResult kernel_mass(const PoissonEvaluator& pe, const Vec& x, double t, double Y, int resolution) {
  const RootSystemSpec& r = pe.rs();
  if (r.dimension != 1) throw std::runtime_error("kernel mass is implemented for N = 1");
  require_positive_t(t);
  const double k = r.axis_k()[0];
  const double ax = std::abs(x[0]);
  if (!(Y > 2.0 * ax + 4.0 * t)) throw std::runtime_error("mass truncation radius too small");
  // panel edges on (0, Y): geometric toward 0 and toward |x| on the scale t
  std::vector<double> edges{0.0, Y};
  for (double s = t / 8.0; s < Y; s *= 2.0) {
    edges.push_back(s);
    if (ax > 0.0) {
      edges.push_back(ax + s);
      edges.push_back(ax - s);
    }
  }
  if (ax > 0.0) edges.push_back(ax);
  std::sort(edges.begin(), edges.end());
  std::vector<double> clean;
  for (double e : edges)
    if (e >= 0.0 && e <= Y && (clean.empty() || e - clean.back() > 1e-12)) clean.push_back(e);
  // split long panels so that every panel is at most Y / (resolution / 16)
  const double hmax = Y / std::max(1, resolution / 16);
  std::vector<double> fine{clean[0]};
  for (std::size_t i = 1; i < clean.size(); ++i) {
    const double a = fine.back(), b = clean[i];
    const int parts = std::max(1, static_cast<int>(std::ceil((b - a) / hmax)));
    for (int p = 1; p <= parts; ++p) fine.push_back(a + (b - a) * p / parts);
  }
  const GaussRule& g = gauss_legendre(16);
  std::vector<Vec> ys;
  std::vector<double> wy;
  for (std::size_t e = 0; e + 1 < fine.size(); ++e) {
    const double a = fine[e], b = fine[e + 1], mid = 0.5 * (a + b), hw = 0.5 * (b - a);
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double y = mid + hw * g.nodes[i];
      ys.push_back({y});
      ys.push_back({-y});
      wy.push_back(hw * g.weights[i] * std::pow(2.0 * y * y, k));
    }
  }
  const Vec ends{0.75 * Y, Y};
  std::vector<Vec> tail_pts{{ends[0]}, {-ends[0]}, {ends[1]}, {-ends[1]}};
  const auto pv = pe.kernel_row(x, ys, t);
  const auto tv = pe.kernel_row(x, tail_pts, t);
  std::vector<double> terms(wy.size());
  for (std::size_t i = 0; i < wy.size(); ++i) terms[i] = (pv[2 * i] + pv[2 * i + 1]) * wy[i];
  MassResult m;
  m.truncated = r.prefactor * pairwise_sum(terms);
  // s(y) = A y^{-2k-2} + B y^{-2k-4} through the two outer points
  const double s1 = tv[0] + tv[1], s2 = tv[2] + tv[3];
  const double y1 = ends[0], y2 = ends[1];
  const double u1 = s1 * std::pow(y1, 2 * k + 2), u2 = s2 * std::pow(y2, 2 * k + 2);  // A + B / y^2
  const double B = (u1 - u2) / (1.0 / (y1 * y1) - 1.0 / (y2 * y2));
  const double A = u2 - B / (y2 * y2);
  m.tail = r.prefactor * std::pow(2.0, k) * (A / Y + B / (3.0 * Y * Y * Y));
  m.mass = m.truncated + m.tail;
  return m;
}

namespace {

double V(const RootSystemSpec& rs, const Vec& x, const Vec& y, double r, int res) {
  return std::max(ball_measure(rs, x, r, res), ball_measure(rs, y, r, res));
}

}  // namespace

KernelBoundReport check_kernel_bounds(const PoissonEvaluator& pe, const std::vector<KernelSample>& samples,
                                      int ball_resolution) {
  const RootSystemSpec& rs = pe.rs();
  KernelBoundReport rep;
  rep.rows.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    KernelBoundRow& row = rep.rows[i];
    const auto& s = samples[i];
    row.s = s;
    row.p = pe.kernel(s.x, s.y, s.t);
    row.dt = pe.kernel(s.x, s.y, s.t, 1);
    row.d = orbit_distance(rs, s.x, s.y);
    Vec diff(s.x.size());
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = s.x[j] - s.y[j];
    row.euclid = norm(diff);
    row.v_lower = V(rs, s.x, s.y, s.t + row.euclid, ball_resolution);
    row.v_upper = V(rs, s.x, s.y, s.t + row.d, ball_resolution);
    const double lower = s.t / (s.t + row.euclid) / row.v_lower;
    const double upper = s.t / (s.t + row.d) / row.v_upper;
    row.lower_ratio = lower / row.p;
    row.upper_ratio = row.p / upper;
    row.mixed_ratio = std::abs(row.dt) / (row.p / (s.t + row.d) * (1.0 + row.d / s.t));
  }
  rep.min_p = rep.rows.empty() ? 0.0 : rep.rows[0].p;
  for (const auto& row : rep.rows) {
    rep.min_p = std::min(rep.min_p, row.p);
    if (!(row.p > 0.0)) rep.positive = false;
    rep.fitted_c = std::max({rep.fitted_c, row.lower_ratio, row.upper_ratio});
    rep.mixed_c = std::max(rep.mixed_c, row.mixed_ratio);
  }
  return rep;
}

double pde_residual(const PoissonEvaluator& pe, const GridFunction& f, double t) {
  require_positive_t(t);
  const double h = std::min(0.02, t / 4.0);
  const SpectralFunction F = pe.plan().forward(f);
  std::vector<GridFunction> u;
  for (int j = -2; j <= 2; ++j) u.push_back(pe.plan().inverse(pe.evolve(F, t + j * h)));
  const GridFunction lap = pe.plan().inverse(
      apply_multiplier(pe.evolve(F, t), [](const Vec& xi) { return cplx(-dot(xi, xi), 0.0); }));
  GridFunction r{f.grid, std::vector<cplx>(f.values.size())};
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const cplx dtt = (-u[0].values[i] + 16.0 * u[1].values[i] - 30.0 * u[2].values[i] + 16.0 * u[3].values[i] -
                      u[4].values[i]) / (12.0 * h * h);
    r.values[i] = dtt + lap.values[i];
  }
  const double nf = sup_norm(f);
  return nf > 0.0 ? sup_norm(r) / nf : sup_norm(r);
}

namespace {

GaussPoly dilate(const GaussPoly& f, double lambda) {
  // f(x / lambda)
  GaussPoly g = f;
  g.a = f.a / (lambda * lambda);
  g.coeffs.clear();
  for (const auto& [e, c] : f.coeffs) {
    int deg = 0;
    for (int v : e) deg += v;
    g.coeffs[e] = c * std::pow(lambda, -deg);
  }
  return g;
}

std::string tag(double t) {
  std::ostringstream o;
  o << t;
  return o.str();
}

}  // namespace

VerificationReport semigroup_residuals(const PoissonEvaluator& pe, const GaussPoly& f, const std::vector<double>& t_list) {
  VerificationReport rep;
  rep.suite = "semigroup";
  const GridPtr grid = pe.plan().grid();
  auto sample_poly = [&](const GaussPoly& h) { return sample(grid, [&](const Vec& x) { return cplx(h(x), 0.0); }); };
  const GridFunction fg = sample_poly(f);
  const SpectralFunction F = pe.plan().forward(fg);
  const double f2 = lp_norm(fg, 2.0);
  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end());

  auto& pde_tab = rep.table("pde", {"t", "residual"});
  double pde_max = 0.0;
  for (double t : ts) {
    const double r = pde_residual(pe, fg, t);
    pde_tab.rows.push_back({cell(t), cell(r)});
    pde_max = std::max(pde_max, r);
  }
  rep.add("pde_residual_max", pde_max, 1e-4);

  {
    const GridFunction a = pe.plan().inverse(pe.evolve(pe.evolve(F, 0.7), 0.5));
    const GridFunction b = pe.plan().inverse(pe.evolve(F, 1.2));
    GridFunction d{grid, std::vector<cplx>(a.values.size())};
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = a.values[i] - b.values[i];
    rep.add("semigroup_law", lp_norm(d, 2.0) / f2, 1e-5);
    const GridFunction s = pe.apply(fg, 1e-3);
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] = s.values[i] - fg.values[i];
    rep.add("strong_continuity_t=0.001", sup_norm(d) / sup_norm(fg), 0.05);
  }

  // monotone L2 norm and contraction in p = 1, 2, inf
  double prev = f2, worst_increase = 0.0;
  double contraction[3] = {0.0, 0.0, 0.0};
  const double fp[3] = {lp_norm(fg, 1.0), f2, sup_norm(fg)};
  for (double t : ts) {
    const GridFunction u = pe.plan().inverse(pe.evolve(F, t));
    const double n2 = lp_norm(u, 2.0);
    worst_increase = std::max(worst_increase, (n2 - prev) / f2);
    prev = n2;
    const double up[3] = {lp_norm(u, 1.0), n2, sup_norm(u)};
    for (int i = 0; i < 3; ++i) contraction[i] = std::max(contraction[i], up[i] / fp[i]);
  }
  rep.add("l2_monotone_increase", worst_increase, 1e-6);
  rep.add("contraction_p=1", contraction[0], 1.0 + 1e-4);
  rep.add("contraction_p=2", contraction[1], 1.0 + 1e-4);
  rep.add("contraction_p=inf", contraction[2], 1.0 + 1e-4);

  // t^m |d_t^m P_t f|_2 / |f|_2, fitted over t_list for f and two dilates
  auto& decay_tab = rep.table("decay", {"m", "dilation", "fitted_c"});
  const double dil[3] = {1.0, std::sqrt(0.5), std::sqrt(2.0)};
  for (int m = 0; m <= 2; ++m) {
    double cmin = INFINITY, cmax = 0.0;
    for (double lam : dil) {
      const GaussPoly h = lam == 1.0 ? f : dilate(f, lam);
      const GridFunction hg = sample_poly(h);
      const SpectralFunction H = pe.plan().forward(hg);
      const double h2 = lp_norm(hg, 2.0);
      double c = 0.0;
      for (double t : ts) c = std::max(c, std::pow(t, m) * spectral_l2_norm(pe.evolve(H, t, m)) / h2);
      decay_tab.rows.push_back({cell(static_cast<long long>(m)), cell(lam), cell(c)});
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    rep.info("decay_fitted_c_m=" + tag(m), cmax);
    rep.add("decay_variation_m=" + tag(m), cmax / cmin, 4.0);
  }
  return rep;
}

}  // namespace dunkl
