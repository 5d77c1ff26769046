#include <cmath>

#include "doctest.h"
#include "dunkl_lab/harness.hpp"
#include "generators.hpp"

using namespace dunkl;

namespace {

RootSystemSpec rank_one(double k) { return make_root_system(RootKind::RankOne, 1, {k}); }

HarnessGrids small_grids() {
  HarnessGrids g;
  g.radius = 12.0;
  g.resolution = 256;
  g.freq_radius = 12.0;
  g.freq_resolution = 256;
  return g;
}

GaussPoly x_gauss(double a, double shift = 0.0) { return GaussPoly::monomial(1, a, {1}) + GaussPoly::gaussian(1, a, shift); }

// int |nu_a''| over (0, inf): composite Simpson in log t, nu'' by central differences of nu
double nu_second_integral_oracle(double a) {
  const int n = 400000;
  const double lo = std::log(1e-7), hi = std::log(1e7), h = (hi - lo) / n;
  auto integrand = [&](double s) {
    const double t = std::exp(s), d = 1e-4 * t;
    const double dd = (nu(t + d, a) - 2 * nu(t, a) + nu(t - d, a)) / (d * d);
    return std::abs(dd) * t;
  };
  double sum = integrand(lo) + integrand(hi);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * integrand(lo + i * h);
  return sum * h / 3;
}

double value_of(const VerificationReport& r, const std::string& name) {
  const Check* c = r.find(name);
  REQUIRE_MESSAGE(c != nullptr, name);
  return c->value;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("cutoff") {
    gen::Source src(71);
    for (double n : {1.0, 2.0, 8.0}) {
      CHECK(cutoff_phi({0.0}, n) == 1.0);
      CHECK(cutoff_phi({n}, n) == 1.0);
      CHECK(cutoff_phi({-2 * n}, n) == 0.0);
      CHECK(cutoff_phi({0.6 * n, 0.8 * n}, n) == 1.0);
      CHECK(cutoff_phi({3 * n, 0.0}, n) == 0.0);
      double prev = 1.0;
      for (int i = 0; i <= 400; ++i) {
        const double r = 2.5 * n * i / 400.0;
        const double v = cutoff_phi({r}, n);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v <= prev);
        prev = v;
      }
    }
    for (int i = 0; i < 50; ++i) {
      const double r = src.uniform(1.05, 1.95), h = 1e-5;
      CHECK(std::abs((cutoff_profile(r + h) - cutoff_profile(r - h)) / (2 * h) - cutoff_profile(r, 1)) <= 1e-6);
      CHECK(std::abs((cutoff_profile(r + h, 1) - cutoff_profile(r - h, 1)) / (2 * h) - cutoff_profile(r, 2)) <= 1e-5);
    }
  }

  TEST_CASE("nu and its second-derivative integral") {
    CHECK(nu(1.0, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    gen::Source src(72);
    for (double a : {1.0, 0.1, 0.01}) {
      CHECK(nu(1e-4, a) < 1e-6);
      CHECK(nu(1e6, a) < 1e-6 * std::max(1.0, 1e6 * std::exp(-a * 1e6)) + 1e-300);
      for (int i = 0; i < 50; ++i) {
        const double t = std::exp(src.uniform(std::log(0.05), std::log(20.0)));
        CHECK(nu(t, a) > 0.0);
        const double h = 1e-5 * t;
        CHECK(std::abs((nu(t + h, a) - nu(t - h, a)) / (2 * h) - nu(t, a, 1)) <= 1e-6 * (1 + std::abs(nu(t, a, 1))));
        CHECK(std::abs((nu(t + h, a, 1) - nu(t - h, a, 1)) / (2 * h) - nu(t, a, 2)) <= 1e-5 * (1 + std::abs(nu(t, a, 2))));
      }
    }
    const double limit = 2 * (1 + std::exp(-2.0));
    double prev_gap = INFINITY;
    for (double a : {0.1, 0.01, 0.001}) {
      const double v = nu_second_integral(a);
      CHECK(v <= limit + 0.05);
      CHECK(std::abs(v - limit) < prev_gap);
      prev_gap = std::abs(v - limit);
    }
    for (double a : {1.0, 0.1}) CHECK(std::abs(nu_second_integral(a) - nu_second_integral_oracle(a)) <= 1e-5);
  }

  TEST_CASE("kappa(n) identity") {
    for (double k : {0.0, 1.0, 2.5})
      for (double q : {4.0 / 3.0, 2.0})
        for (double n : {1.0, 2.0, 4.0, 8.0}) {
          const auto rs = rank_one(k);
          const double kap = kappa_n(rs, n, q);
          CHECK(kap > 0.0);
          CHECK(kap <= 1.0);
          CHECK(std::abs(std::pow(kap, q) * n * std::max(1.0, ball_measure(rs, {0.0}, 2 * n)) - 1) <= 1e-10);
        }
  }

  TEST_CASE("geometric t rule integrates smooth profiles") {
    const auto rule = geometric_t_rule(1e-3, 1e3);
    double s = 0.0;
    for (const auto& [t, w] : rule) s += w * nu(t, 0.1);
    // int_0^inf t e^{-a(t + 1/t)} dt = 2 K_2(2a)
    const double want = 2 * std::cyl_bessel_k(2.0, 0.2);
    CHECK(std::abs(s - want) / want <= 1e-6);
  }

  TEST_CASE("state, Laplace-on-Bellman identity, reflection term") {
    const auto bp = BellmanParams::make(2.0, 0.1, 1, 1);
    const auto s = build_state(rank_one(1.0), GaussPoly::gaussian(1, 0.5), {GaussPoly::gaussian(1, 0.5)}, bp, small_grids());
    CHECK(s.components() == 2);
    for (double x : {-2.0, -0.3, 0.4, 1.7})
      for (double t : {0.1, 1.0, 10.0}) {
        const double b = s.b_kappa({x}, t, 0.1);
        CHECK(b > 0.0);
        CHECK(b < 10.0);
      }
    CHECK(laplace_on_bellman_residual(s, {0.7}, 1.0) <= 1e-3);
    CHECK(std::abs(laplace_bellman_terms(s, {0.7}, 1.0, 0.1).reflection) <= 1e-12);

    const auto s0 = build_state(rank_one(0.0), GaussPoly::gaussian(1, 0.5), {x_gauss(0.5, 0.3)}, bp, small_grids());
    for (double x : {-1.2, 0.35, 0.9})
      for (double t : {0.5, 1.5}) {
        const auto terms = laplace_bellman_terms(s0, {x}, t, 0.1);
        CHECK(terms.reflection == 0.0);
        CHECK(terms.residual() <= 1e-4);
      }

    const auto s1 = build_state(rank_one(1.0), GaussPoly::gaussian(1, 0.5), {x_gauss(0.5, 0.3)}, BellmanParams::make(4.0, 0.1, 1, 1), small_grids());
    gen::Source src(73);
    for (int i = 0; i < 4; ++i) {
      const Vec x = src.off_hyperplanes(1, 0.2, 2.0);
      CHECK(laplace_on_bellman_residual(s1, x, src.uniform(0.2, 2.0)) <= 1e-3);
    }
    CHECK_THROWS(build_state(rank_one(1.0), GaussPoly::gaussian(1, 0.5), {}, bp, small_grids()));
  }

  TEST_CASE("dual identity") {
    const auto rs1 = rank_one(1.0);
    const PoissonEvaluator pe(make_plan(build_grid(rs1, 32.0, 768), build_grid(rs1, 12.0, 384)));
    const auto f = GaussPoly::gaussian(1, 0.5);
    CHECK(dual_identity_residual(pe, x_gauss(0.5, 0.3), x_gauss(0.5, 0.3), 1) <= 1e-6);
    CHECK(dual_identity_residual(pe, f, GaussPoly::monomial(1, 0.5, {1}), 1) <= 1e-3);
    const auto rs0 = rank_one(0.0);
    const PoissonEvaluator pe0(make_plan(build_grid(rs0, 32.0, 768), build_grid(rs0, 12.0, 384)));
    const auto d0 = dual_identity(pe0, f, GaussPoly::monomial(1, 0.5, {1}), 1);
    CHECK(d0.signed_residual() <= 1e-3);
    CHECK(d0.tail < 1e-4);
  }

  TEST_CASE("pipeline: validated vs direct I, lower slack, even path") {
    const auto bp = BellmanParams::make(2.0, 0.1, 1, 1);
    const auto s = build_state(rank_one(1.0), GaussPoly::gaussian(1, 0.5), {x_gauss(0.5, 0.3)}, bp, small_grids());
    const double I = compute_I(s, 1.0, 1.0), direct = compute_I_direct(s, 1.0, 1.0);
    CHECK(std::abs(I - direct) <= 1e-3 * std::abs(direct));
    const auto rows = run_pipeline(s, {{2.0, 0.1}});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].I >= 0.0);
    CHECK(rows[0].I_t >= 0.0);
    CHECK(rows[0].I_x >= 0.0);
    CHECK(rows[0].I_reflection >= 0.0);
    CHECK(lower_estimate_slack(s, 2.0, 0.1) >= -1e-6 * (1 + std::abs(rows[0].I)));
    CHECK(rows[0].kappa == doctest::Approx(kappa_n(s.rs, 2.0, bp.q)).epsilon(1e-14));
    CHECK(s.f_invariant());
    CHECK(rows[0].lower_factor == doctest::Approx(2 / bp.gamma));

    const auto odd_f = build_state(rank_one(1.0), x_gauss(0.5, 0.0), {x_gauss(0.5, 0.3)}, bp, small_grids());
    CHECK_FALSE(odd_f.f_invariant());
    const auto odd_rows = run_pipeline(odd_f, {{2.0, 0.1}});
    CHECK(odd_rows[0].lower_factor == doctest::Approx(2 / bp.gamma * (2.0 + 128)));
    CHECK(lower_estimate_slack(odd_f, 2.0, 0.1) >= -1e-6 * (1 + std::abs(odd_rows[0].I)));
  }

  TEST_CASE("reports on a reduced grid") {
    const auto bp = BellmanParams::make(2.0, 0.1, 1, 1);
    const auto s = build_state(rank_one(1.0), GaussPoly::gaussian(1, 0.5), {x_gauss(0.5, 0.3)}, bp, small_grids());
    const auto lower = lower_estimate_report(s, {1.0, 0.1}, {1, 2, 4, 8});
    for (const auto& c : lower.checks) CHECK_MESSAGE(c.pass, c.name << " = " << c.value);
    CHECK(value_of(lower, "invariant_T_equals_partial") <= 1e-8);
    const auto upper = upper_estimate_report(s, {1.0, 0.1, 0.01}, {1, 2, 4, 8});
    for (const auto& c : upper.checks) CHECK_MESSAGE(c.pass, c.name << " = " << c.value);
    CHECK(value_of(upper, "dk_block_trend_ratio_eps1") <= 0.25);
    CHECK(value_of(upper, "dt2_block_combined_slack_n8_eps0.01") >= 0.0);
    const auto state = state_report(s);
    for (const auto& c : state.checks) CHECK_MESSAGE(c.pass, c.name << " = " << c.value);
    const auto one = one_dim_pipeline(s, {1, 2, 4, 8}, 0.1, 4.0, true);
    for (const auto& c : one.checks) CHECK_MESSAGE(c.pass, c.name << " = " << c.value);
    CHECK(value_of(one, "split_exact") == 0.0);
  }

  TEST_CASE("one-dimensional e-terms at p = 4") {
    const auto bp = BellmanParams::make(4.0, 0.1, 1, 1);
    const auto s = build_state(rank_one(1.5), GaussPoly::gaussian(1, 0.5), {GaussPoly::monomial(1, 0.5, {1})}, bp, small_grids());
    const auto one = one_dim_pipeline(s, {1, 2, 4, 8}, 0.1, 4.0, false);
    for (const auto& c : one.checks) CHECK_MESSAGE(c.pass, c.name << " = " << c.value);
    CHECK(value_of(one, "e2_trend_ratio") <= 0.5);
    CHECK_THROWS(one_dim_pipeline(build_state(make_root_system(RootKind::Product, 2, {1.0}), GaussPoly::gaussian(2, 0.5),
                                              {GaussPoly::gaussian(2, 0.5), GaussPoly::gaussian(2, 0.5)},
                                              BellmanParams::make(2.0, 0.1, 1, 2),
                                              HarnessGrids{8.0, 32, 8.0, 32}),
                                  {1, 2}, 0.1, 1.0));
  }

  TEST_CASE("even/odd split and polarization") {
    gen::Source src(74);
    const auto rs = rank_one(1.0);
    const auto g = build_grid(rs, 10.0, 256);
    for (int t = 0; t < 10; ++t) {
      const auto h = src.gauss_poly(1, src.uniform(0.3, 1.0), 5);
      const auto e = h.even_part(), o = h.odd_part();
      const auto sum = e + o;
      for (const auto& [ex, c] : h.coeffs) CHECK(sum.coeffs.at(ex) == c);
      auto norm_q = [&](const GaussPoly& p, double q) { return lp_norm(sample(g, [&](const Vec& x) { return cplx(p(x), 0.0); }), q); };
      for (double q : {4.0 / 3.0, 1.5, 2.0}) {
        CHECK(norm_q(e, q) <= norm_q(h, q) + 1e-10);
        CHECK(norm_q(o, q) <= norm_q(h, q) + 1e-10);
      }
    }
    const PoissonEvaluator pe(make_plan(build_grid(rs, 32.0, 768), build_grid(rs, 12.0, 384)));
    const auto rep = polarization_report(pe, GaussPoly::gaussian(1, 0.5), x_gauss(0.5, 0.3), 2.0);
    CHECK(value_of(rep, "pairing_scale_invariance") <= 1e-12);
  }
}
