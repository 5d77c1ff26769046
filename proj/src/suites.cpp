#include "dunkl_lab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <sstream>

#include "dunkl_lab/bellman.hpp"
#include "dunkl_lab/harness.hpp"
#include "dunkl_lab/io.hpp"
#include "dunkl_lab/kernel.hpp"
#include "dunkl_lab/riesz.hpp"
#include "dunkl_lab/semigroup.hpp"
#include "json.hpp"

namespace dunkl {

namespace {

RootSystemSpec system_for(const RunConfig& c) {
  return make_root_system(c.N == 1 ? RootKind::RankOne : RootKind::Product, c.N, {c.k});
}

double or_default(double v, double d) { return v > 0.0 ? v : d; }
int or_default(int v, int d) { return v > 0 ? v : d; }

void announce(const Progress& progress, const VerificationReport& r, const std::string& prefix) {
  if (!progress) return;
  for (const auto& c : r.checks) {
    std::ostringstream line;
    line << prefix << c.name << " = " << format_double(c.value);
    if (c.relation != Relation::Info) line << " (" << to_string(c.relation) << " " << format_double(c.threshold) << ") " << (c.pass ? "ok" : "FAIL");
    progress(line.str());
  }
}

void say(const Progress& progress, const std::string& msg) {
  if (progress) progress(msg);
}

std::string tag(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

// N-variate member of the x^d exp(-a|x|^2) family, degree carried by the first axis
GaussPoly family_member(int N, double a, int d) {
  Exponent e(static_cast<std::size_t>(N), 0);
  e[0] = d;
  return GaussPoly::monomial(N, a, e);
}

}  // namespace

std::string RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["k"] = k;
  j["n_dim"] = N;
  j["p"] = p;
  j["radius"] = radius;
  j["resolution"] = resolution;
  j["trials"] = trials;
  j["seed"] = seed;
  j["out"] = out;
  j["format"] = format;
  return j.dump();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"transform", "semigroup", "riesz", "bellman", "harness", "all"};
  return names;
}

RunConfig config_from_json(const std::string& text, const RunConfig& base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  RunConfig c = base;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "suite") c.suite = v.get<std::string>();
      else if (key == "k") c.k = v.get<double>();
      else if (key == "n_dim" || key == "N") c.N = v.get<int>();
      else if (key == "p") c.p = v.get<double>();
      else if (key == "radius") c.radius = v.get<double>();
      else if (key == "resolution") c.resolution = v.get<int>();
      else if (key == "trials") c.trials = v.get<int>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  }
  return c;
}

void validate(const RunConfig& c) {
  auto fail = [](const std::string& m) { throw ConfigError(m); };
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), c.suite) == names.end()) fail("unknown suite '" + c.suite + "'");
  if (!std::isfinite(c.k) || c.k < 0.0) fail("k must be a finite nonnegative multiplicity");
  if (c.N < 1 || c.N > 3) fail("n-dim must be 1, 2 or 3");
  if (!std::isfinite(c.p) || !(c.p > 1.0)) fail("p must exceed 1 (got " + format_double(c.p) + ")");
  if (!std::isfinite(c.radius) || c.radius < 0.0) fail("radius must be positive (0 selects the default)");
  if (c.resolution < 0 || (c.resolution > 0 && c.resolution < 16)) fail("resolution must be at least 16 (0 selects the default)");
  if (c.trials < 1) fail("trials must be >= 1");
  if (c.out.empty()) fail("output path is empty");
  if (c.format != "json" && c.format != "csv") fail("format must be json or csv");
  if (c.suite == "harness" && c.N > 2) fail("harness suite supports n-dim 1 or 2");
}

VerificationReport transform_suite(const RunConfig& c, const Progress& progress) {
  VerificationReport rep;
  rep.suite = "transform";
  const RootSystemSpec rs = system_for(c);
  const double radius = or_default(c.radius, 8.0);
  const int res = or_default(c.resolution, c.N == 1 ? 256 : 48);
  say(progress, "transform: building grid radius " + tag(radius) + " resolution " + tag(res));
  const GridPtr grid = build_grid(rs, radius, res);
  const PlanPtr plan = make_plan(grid, grid);
  Table& tab = rep.table("transform_functions", {"a", "degree", "plancherel", "round_trip", "spectral_tail"});
  double worst_p = 0.0, worst_rt = 0.0;
  for (double a : {0.4, 0.5, 0.6})
    for (int d = 0; d <= 3; ++d) {
      const GaussPoly f = family_member(c.N, a, d);
      const GridFunction fg = sample(grid, [&](const Vec& x) { return cplx(f(x), 0.0); });
      const SpectralFunction F = plan->forward(fg);
      const GridFunction back = plan->inverse(F);
      double rt = 0.0;
      for (std::size_t i = 0; i < back.values.size(); ++i) rt = std::max(rt, std::abs(back.values[i] - fg.values[i]));
      rt /= sup_norm(fg);
      const double pl = plancherel_residual(*plan, fg);
      worst_p = std::max(worst_p, pl);
      worst_rt = std::max(worst_rt, rt);
      tab.rows.push_back({cell(a), std::to_string(d), cell(pl), cell(rt), cell(plan->spectral_tail_fraction(F))});
    }
  rep.add("plancherel_max", worst_p, 1e-5);
  rep.add("round_trip_max", worst_rt, 1e-5);

  // kernel: exp oracle at k = 0, cosh at k = 1, eigen-equation at the configured k
  KernelEval k0(make_root_system(RootKind::RankOne, 1, {0.0}));
  double e0 = 0.0;
  for (int i = -8; i <= 8; ++i)
    for (int j = -8; j <= 8; ++j) {
      const double x = 0.5 * i, y = 0.5 * j;
      e0 = std::max(e0, std::abs(dunkl_kernel(k0, {x}, {y}) - std::exp(x * y)));
    }
  rep.add("kernel_k0_vs_exp", e0, 1e-10);
  KernelEval k1(make_root_system(RootKind::RankOne, 1, {1.0}));
  rep.add("kernel_k1_at_1_1_vs_cosh", std::abs(dunkl_kernel(k1, {1.0}, {1.0}) - std::cosh(1.0)), 1e-10);
  KernelEval kc(make_root_system(RootKind::RankOne, 1, {c.k}));
  double ode = 0.0;
  for (double x : {-2.0, -0.5, 0.3, 1.0, 2.0})
    for (double y : {-1.5, 0.25, 1.0, 2.0}) ode = std::max(ode, kernel_ode_residual(kc, x, y));
  rep.add("kernel_ode_residual", ode, 1e-10);
  announce(progress, rep, "transform/");
  return rep;
}

VerificationReport semigroup_suite(const RunConfig& c, const Progress& progress) {
  VerificationReport rep;
  rep.suite = "semigroup";
  const RootSystemSpec rs = system_for(c);
  const double radius = or_default(c.radius, 8.0);
  const int res = or_default(c.resolution, c.N == 1 ? 256 : 48);
  const GridPtr grid = build_grid(rs, radius, res);
  const PlanPtr plan = make_plan(grid, grid);
  const PoissonEvaluator pe(plan);
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> ux(-2.0, 2.0), ut(0.2, 3.0);
  auto point = [&] {
    Vec x(static_cast<std::size_t>(c.N));
    for (auto& v : x) v = ux(rng);
    return x;
  };

  if (c.N == 1) {
    say(progress, "semigroup: kernel mass at 10 sampled (x, t)");
    double worst = 0.0;
    Table& tab = rep.table("kernel_mass", {"x", "t", "mass", "tail"});
    for (int i = 0; i < 10; ++i) {
      const Vec x = point();
      const double t = ut(rng);
      const MassResult m = kernel_mass(pe, x, t);
      worst = std::max(worst, std::abs(m.mass - 1.0));
      tab.rows.push_back({cell(x[0]), cell(t), cell(m.mass), cell(m.tail)});
    }
    rep.add("kernel_mass_deviation", worst, 1e-3);
  }

  say(progress, "semigroup: positivity and symmetry at 100 sampled pairs");
  double min_p = INFINITY, asym = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vec x = point(), y = point();
    const double t = ut(rng);
    const double a = pe.kernel(x, y, t), b = pe.kernel(y, x, t);
    min_p = std::min(min_p, std::min(a, b));
    asym = std::max(asym, std::abs(a - b) / std::max(std::abs(a), 1e-300));
  }
  rep.add("kernel_min", min_p, 0.0, Relation::GreaterEqual);
  rep.add("kernel_symmetry", asym, 1e-10);

  if (c.k == 0.0) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const Vec x = point(), y = point();
      const double t = ut(rng);
      double d2 = 0.0;
      for (int j = 0; j < c.N; ++j) d2 += (x[j] - y[j]) * (x[j] - y[j]);
      const double cauchy = std::tgamma(0.5 * (c.N + 1)) / std::pow(M_PI, 0.5 * (c.N + 1)) * t /
                            std::pow(t * t + d2, 0.5 * (c.N + 1));
      worst = std::max(worst, std::abs(pe.kernel(x, y, t) - cauchy) / cauchy);
    }
    rep.add("cauchy_kernel_match", worst, 1e-4);
  }

  say(progress, "semigroup: residuals of P_t f");
  rep.merge(semigroup_residuals(pe, GaussPoly::gaussian(c.N, 0.5), {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0}));

  if (c.N == 1) {
    say(progress, "semigroup: two-sided kernel bounds under refinement");
    std::vector<KernelSample> ss;
    for (double x : {0.3, 1.0, 2.5})
      for (double y : {-2.0, 0.5, 1.0})
        for (double t : {0.2, 1.0, 4.0}) ss.push_back({{x}, {y}, t});
    const KernelBoundReport coarse = check_kernel_bounds(pe, ss);
    PoissonOptions fine_opts;
    fine_opts.density = 2.0;
    const GridPtr fine_grid = build_grid(rs, radius, 2 * res);
    const PoissonEvaluator fine(make_plan(fine_grid, fine_grid), fine_opts);
    const KernelBoundReport refined = check_kernel_bounds(fine, ss, 96);
    rep.add("kernel_bounds_positive", coarse.positive && refined.positive ? 1.0 : 0.0, 1.0, Relation::GreaterEqual);
    rep.info("kernel_bounds_fitted_c", coarse.fitted_c);
    rep.info("kernel_bounds_fitted_c_refined", refined.fitted_c);
    rep.add("kernel_bounds_fitted_c_drift", std::abs(refined.fitted_c / coarse.fitted_c - 1.0), 0.5);
    rep.info("kernel_dt_fitted_c", coarse.mixed_c);
    Table& tab = rep.table("kernel_bounds", {"x", "y", "t", "p", "orbit_distance", "lower_ratio", "upper_ratio", "mixed_ratio"});
    for (const auto& r : coarse.rows)
      tab.rows.push_back({cell(r.s.x[0]), cell(r.s.y[0]), cell(r.s.t), cell(r.p), cell(r.d), cell(r.lower_ratio),
                          cell(r.upper_ratio), cell(r.mixed_ratio)});
  }
  announce(progress, rep, "semigroup/");
  return rep;
}

VerificationReport riesz_suite(const RunConfig& c, const Progress& progress) {
  VerificationReport rep;
  rep.suite = "riesz";
  const RootSystemSpec rs = system_for(c);
  const RieszParams params = RieszParams::make(c.p, rs);
  const bool one = c.N == 1;
  const double radius = or_default(c.radius, one ? 24.0 : 12.0);
  const int res = or_default(c.resolution, one ? 768 : 128);
  const GridPtr grid = build_grid(rs, radius, res);
  const GridPtr freq = build_grid(rs, one ? 16.0 : 12.0, one ? 512 : 128);
  const PoissonEvaluator pe(make_plan(grid, freq));
  std::vector<bool> families{false};
  if (!one) families.push_back(true);
  for (bool sym : families) {
    FamilySpec fam;
    fam.symmetrize = sym;
    const std::string name = sym ? "invariant" : "general";
    say(progress, "riesz: " + std::to_string(c.trials) + " " + name + " trials at p = " + format_double(c.p));
    const RatioReport rr = norm_ratio_experiment(pe, params, fam, c.trials, c.seed);
    rep.info(name + "_bound", rr.bound);
    rep.add(name + "_max_ratio_over_bound", rr.max_ratio / rr.bound, 1.0);
    rep.info(name + "_max_ratio", rr.max_ratio);
    rep.info(name + "_flagged", rr.flagged);
    if (c.p == 2.0) {
      double dev = 0.0;
      for (const auto& row : rr.rows) dev = std::max(dev, std::abs(row.ratio - 1.0));
      rep.add(name + "_l2_isometry", dev, 1e-4);
    }
    Table& tab = rep.table("ratios_" + name, {"trial", "f_norm", "rf_norm", "ratio", "bound", "shell_fraction",
                                              "spectral_tail", "flagged", "function"});
    for (const auto& row : rr.rows)
      tab.rows.push_back({std::to_string(row.trial), cell(row.f_norm), cell(row.rf_norm), cell(row.ratio), cell(row.bound),
                          cell(row.shell_fraction), cell(row.spectral_tail), row.flagged ? "true" : "false", row.function});
  }
  const GaussPoly h = family_member(c.N, 0.5, 1);
  const GridFunction hg = sample(grid, [&](const Vec& x) { return cplx(h(x), 0.0); });
  const RieszIdentityResult id = riesz_identity(pe, hg, 1);
  rep.info("identity_residual_spectral", id.spectral);
  rep.info("identity_residual_direct", id.direct);
  announce(progress, rep, "riesz/");
  return rep;
}

VerificationReport bellman_suite(const RunConfig& c, const Progress& progress) {
  VerificationReport rep;
  rep.suite = "bellman";
  const double p = std::max(c.p, c.p / (c.p - 1.0));
  const BellmanParams bp = BellmanParams::make(p, 0.1, 1, c.N);
  rep.info("bellman_p", p);
  const int count = 10000;
  say(progress, "bellman: " + std::to_string(count) + " Hessian-margin samples at p = " + format_double(p));
  const auto samples = random_margin_samples(bp, count, 3.0, c.seed);
  rep.merge(certificate_margins(bp, samples, bp.kappa / 16.0));
  const std::vector<MarginSample> head(samples.begin(), samples.begin() + 2000);
  rep.merge(closed_form_hessian_check(bp, head));

  say(progress, "bellman: elementary-lemma samples at q = " + format_double(bp.q));
  const auto es = random_elementary_samples(c.N, count, c.seed + 1);
  rep.merge(elementary_lemma_margins(bp.q, es), "q=" + tag(bp.q) + "_");

  if (bp.q == 2.0) {
    const Vec e1{1.0}, z1{1.0}, z0{0.0};
    rep.add("q2_beta_0_1", std::abs(beta_eval(bp, 0.0, 1.0) - 1.0), 1e-14);
    rep.add("q2_beta_1_1", std::abs(beta_eval(bp, 1.0, 1.0) - 2.25), 1e-14);
    Vec zeta_unit(static_cast<std::size_t>(c.N), 0.0);
    zeta_unit[0] = 1.0;
    rep.add("q2_bellman_unit", std::abs(bellman_B(bp, e1, zeta_unit) - 1.125), 1e-14);
    double tau_gap = 0.0;
    for (const auto& s : samples) {
      tau_gap = std::max({tau_gap, std::abs(tau(bp, s.zeta) - 1.0), std::abs(tau1(bp, s.zeta) - 1.0),
                          std::abs(tau2(bp, s.zeta) - 1.0)});
    }
    rep.add("q2_tau_identically_one", tau_gap, 0.0);
    // region R1 at q = 2: (1+gamma) I, I, zero cross block
    Vec zr(static_cast<std::size_t>(c.N), 0.0);
    zr[0] = 2.0;
    const HessianAt H = bellman_hessian(bp, {0.5}, zr);
    double gap = 0.0;
    for (int i = 0; i < H.dim; ++i)
      for (int j = 0; j < H.dim; ++j) {
        double want = i == j ? 1.0 : 0.0;
        if (i == 0 && j == 0) want = 1.0 + bp.gamma;
        gap = std::max(gap, std::abs(H.at(i, j) - want));
      }
    rep.info("q2_probe_region_is_r1", H.region == Region::R1 ? 1.0 : 0.0);
    rep.add("q2_r1_hessian_blocks", gap, 1e-12);
    const ElementaryMargins em = elementary_margins(2.0, {0.3}, {-0.7});
    rep.add("q2_elementary_m1", std::abs(em.m1 - (0.5 - 1.0 / 64.0)), 1e-15);
    rep.add("q2_elementary_m2", std::abs(em.m2), 1e-15);
  }
  announce(progress, rep, "bellman/");
  return rep;
}

VerificationReport harness_suite(const RunConfig& c, const Progress& progress) {
  VerificationReport rep;
  rep.suite = "harness";
  const RootSystemSpec rs = system_for(c);
  const double p = std::max(c.p, c.p / (c.p - 1.0));
  const BellmanParams bp = BellmanParams::make(p, 0.1, 1, c.N);
  HarnessGrids grids = HarnessGrids::for_dimension(c.N);
  if (c.radius > 0.0) grids.radius = c.radius;
  if (c.resolution > 0) grids.resolution = c.resolution;
  const GaussPoly f = GaussPoly::gaussian(c.N, 0.5);
  std::vector<GaussPoly> g;
  for (int j = 0; j < c.N; ++j) {
    Exponent e(static_cast<std::size_t>(c.N), 0);
    e[static_cast<std::size_t>(j)] = 1;
    g.push_back(GaussPoly::monomial(c.N, 0.5, e) + GaussPoly::gaussian(c.N, 0.5, 0.3));
  }
  say(progress, "harness: building state");
  const HarnessState s = build_state(rs, f, g, bp, grids);

  say(progress, "harness: Laplace-on-Bellman identity at 10 sampled (x, t)");
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> ux(0.2, 2.0), ut(0.2, 2.0);
  std::bernoulli_distribution sign(0.5);
  double worst = 0.0;
  Table& tab = rep.table("laplace_on_bellman", {"x", "t", "lhs", "rhs", "residual"});
  for (int i = 0; i < 10; ++i) {
    Vec x(static_cast<std::size_t>(c.N));
    for (auto& v : x) v = sign(rng) ? ux(rng) : -ux(rng);
    const double t = ut(rng);
    const LaplaceBellmanTerms terms = laplace_bellman_terms(s, x, t, bp.kappa);
    worst = std::max(worst, terms.residual());
    std::ostringstream xs;
    for (std::size_t j = 0; j < x.size(); ++j) xs << (j ? " " : "") << format_double(x[j]);
    tab.rows.push_back({xs.str(), cell(t), cell(terms.lhs), cell(terms.rhs()), cell(terms.residual())});
  }
  rep.add("laplace_on_bellman_residual", worst, 1e-3);

  say(progress, "harness: nu'' integrals");
  const double limit = 2.0 * (1.0 + std::exp(-2.0));
  for (double a : {1.0, 0.1, 0.01, 0.001}) {
    const double v = nu_second_integral(a);
    if (a <= 0.01) rep.add("nu_second_integral_a=" + tag(a), v, limit + 0.05);
    else rep.info("nu_second_integral_a=" + tag(a), v);
  }

  say(progress, "harness: state report");
  rep.merge(state_report(s), "state_");
  say(progress, "harness: lower estimate over (n, eps)");
  rep.merge(lower_estimate_report(s, {1.0, 0.1}, {1, 2, 4, 8}), "lower_");
  say(progress, "harness: upper estimate over (n, eps)");
  rep.merge(upper_estimate_report(s, {1.0, 0.1, 0.01}, {1, 2, 4, 8}), "upper_");

  if (c.N == 1) {
    say(progress, "harness: dual identity on the radius-32 grid");
    const GridPtr dg = build_grid(rs, 32.0, 768);
    const GridPtr df = build_grid(rs, 12.0, 384);
    const PoissonEvaluator dpe(make_plan(dg, df));
    const GaussPoly f2 = family_member(1, 0.4, 2) + GaussPoly::gaussian(1, 0.4, -0.5);
    const std::vector<std::pair<GaussPoly, GaussPoly>> pairs{{f, g[0]}, {f2, family_member(1, 0.6, 3)}};
    double signed_worst = 0.0, abs_worst = 0.0;
    for (const auto& [a, b] : pairs) {
      const DualIdentity d = dual_identity(dpe, a, b, 1);
      signed_worst = std::max(signed_worst, d.signed_residual());
      abs_worst = std::max(abs_worst, d.absolute_residual());
    }
    rep.add("dual_identity_signed_residual", signed_worst, 1e-3);
    rep.info("dual_identity_absolute_residual", abs_worst);
    rep.merge(polarization_report(dpe, f, g[0], c.p));

    say(progress, "harness: one-dimensional pipeline");
    rep.merge(one_dim_pipeline(s, {1, 2, 4, 8}, 0.1, 4.0, p == 2.0), "one_dim_");
  } else {
    const DualIdentity d = dual_identity(*s.pe, f, g[0], 1);
    rep.info("dual_identity_signed_residual", d.signed_residual());
    rep.info("dual_identity_absolute_residual", d.absolute_residual());
  }
  announce(progress, rep, "harness/");
  return rep;
}

VerificationReport run_suite(const RunConfig& c, const Progress& progress) {
  validate(c);
  if (c.suite == "transform") return transform_suite(c, progress);
  if (c.suite == "semigroup") return semigroup_suite(c, progress);
  if (c.suite == "riesz") return riesz_suite(c, progress);
  if (c.suite == "bellman") return bellman_suite(c, progress);
  if (c.suite == "harness") return harness_suite(c, progress);
  VerificationReport all;
  all.suite = "all";
  all.merge(transform_suite(c, progress), "transform/");
  all.merge(semigroup_suite(c, progress), "semigroup/");
  all.merge(riesz_suite(c, progress), "riesz/");
  all.merge(bellman_suite(c, progress), "bellman/");
  if (c.N <= 2) all.merge(harness_suite(c, progress), "harness/");
  return all;
}

EmittedFiles emit_report(const VerificationReport& r, const RunConfig& c) {
  namespace fs = std::filesystem;
  EmittedFiles files;
  const std::string config = c.to_json();
  const fs::path out(c.out);
  if (!out.parent_path().empty()) fs::create_directories(out.parent_path());
  if (c.format == "json") {
    write_file_atomic(c.out, report_to_json(r, config));
    files.summary = c.out;
    files.all.push_back(c.out);
    return files;
  }
  const fs::path stem = out.parent_path() / out.stem();
  write_file_atomic(c.out, checks_to_csv(r));
  files.all.push_back(c.out);
  std::vector<const Table*> tables;
  for (const auto& t : r.tables) tables.push_back(&t);
  std::stable_sort(tables.begin(), tables.end(), [](const Table* a, const Table* b) { return a->name < b->name; });
  for (const Table* t : tables) {
    std::string name = lower(t->name);
    std::replace(name.begin(), name.end(), '/', '.');
    const std::string path = stem.string() + "." + name + ".csv";
    write_file_atomic(path, table_to_csv(*t));
    files.all.push_back(path);
  }
  // the summary carries checks only; tables live in their CSV files
  VerificationReport head = r;
  head.tables.clear();
  files.summary = stem.string() + ".summary.json";
  write_file_atomic(files.summary, report_to_json(head, config));
  files.all.push_back(files.summary);
  return files;
}

int exit_status(const VerificationReport& r) { return r.all_pass() ? 0 : 1; }

}  // namespace dunkl
