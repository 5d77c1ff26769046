#include <cmath>

#include "doctest.h"
#include "dunkl_lab/riesz.hpp"
#include "generators.hpp"

using namespace dunkl;

namespace {

PoissonEvaluator one_dim(double k, double radius = 24.0, int res = 768, int freq_res = 512) {
  const auto rs = make_root_system(RootKind::RankOne, 1, {k});
  return PoissonEvaluator(make_plan(build_grid(rs, radius, res), build_grid(rs, 16.0, freq_res)));
}

PoissonEvaluator two_dim(double k, double radius = 12.0, int res = 128) {
  const auto rs = make_root_system(RootKind::Product, 2, {k});
  return PoissonEvaluator(make_plan(build_grid(rs, radius, res), build_grid(rs, 12.0, res)));
}

GridFunction riesz_twice_plus_identity(const PoissonEvaluator& pe, const GridFunction& f) {
  const auto F = pe.plan().forward(f);
  SpectralFunction sum{F.freq_grid, std::vector<cplx>(F.values.size())};
  for (int j = 1; j <= pe.rs().dimension; ++j) {
    const auto rr = riesz_multiplier(riesz_multiplier(F, j), j);
    for (std::size_t i = 0; i < sum.values.size(); ++i) sum.values[i] += rr.values[i];
  }
  auto out = pe.plan().inverse(sum);
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += f.values[i];
  return out;
}

GridFunction sample_poly(const GridPtr& g, const GaussPoly& f) {
  return sample(g, [&](const Vec& x) { return cplx(f(x), 0.0); });
}

double l2(const GridFunction& f) { return lp_norm(f, 2.0); }

}  // namespace

TEST_SUITE("riesz") {
  TEST_CASE("parameters") {
    const auto rs = make_root_system(RootKind::Product, 2, {0.5});
    for (double p : {4.0 / 3.0, 1.5, 2.0, 3.0, 4.0}) {
      const auto rp = RieszParams::make(p, rs);
      CHECK(std::abs(1 / rp.p + 1 / rp.q - 1) <= 1e-14);
      CHECK(rp.p_star == std::max(rp.p, rp.q));
      CHECK(rp.k_sum == doctest::Approx(2.0));
    }
    CHECK_THROWS(RieszParams::make(1.0, rs));
    CHECK_THROWS(RieszParams::make(0.5, rs));
    const auto rp = RieszParams::make(4.0, rs);
    CHECK(riesz_bound(rp, 2, false) == doctest::Approx(144 * 3 * (2.0 + 128)));
    CHECK(riesz_bound(rp, 2, true) == doctest::Approx(432.0));
    CHECK(riesz_bound(RieszParams::make(4.0, make_root_system(RootKind::RankOne, 1, {1.5})), 1, false) == doctest::Approx(4320.0));
  }

  TEST_CASE("one dimension: Hilbert transform") {
    const auto pe = one_dim(1.5, 32.0, 1024, 1024);
    const auto g = pe.plan().grid();
    const auto even = sample_poly(g, GaussPoly::gaussian(1, 0.5) + GaussPoly::monomial(1, 0.5, {2}, 0.3));
    const auto odd = sample_poly(g, GaussPoly::monomial(1, 0.6, {1}) + GaussPoly::monomial(1, 0.6, {3}, -0.2));
    for (const auto* f : {&even, &odd}) {
      const auto h = hilbert_apply(pe, *f);
      CHECK(std::abs(l2(h) / l2(*f) - 1) <= 1e-5);
      CHECK(l2(riesz_twice_plus_identity(pe, *f)) / l2(*f) <= 1e-5);
      const double sign = f == &even ? 1.0 : -1.0;
      double asym = 0.0, im = 0.0;
      const std::size_t n = h.values.size();
      for (std::size_t i = 0; i < n; ++i) {
        asym = std::max(asym, std::abs(h.values[i] + sign * h.values[n - 1 - i]));
        im = std::max(im, std::abs(h.values[i].imag()));
      }
      CHECK(asym <= 1e-8 * sup_norm(h));
      CHECK(im <= 1e-8 * sup_norm(h));
      const auto mag = riesz_vector_magnitude(pe, *f);
      for (std::size_t i = 0; i < n; ++i) {
        CHECK(mag.values[i].real() >= 0.0);
        CHECK(std::abs(mag.values[i].real() - std::abs(h.values[i])) <= 1e-14 * sup_norm(h));
      }
    }
  }

  TEST_CASE("one dimension, k = 0: conjugate Poisson kernel") {
    const auto pe = one_dim(0.0);
    const auto g = pe.plan().grid();
    const auto f = sample(g, [](const Vec& x) { return cplx(1 / (M_PI * (1 + x[0] * x[0])), 0.0); });
    const auto h = hilbert_apply(pe, f);
    double err = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
      const double x = g->coord(i, 0);
      err = std::max(err, std::abs(h.values[i] - cplx(x / (M_PI * (1 + x * x)), 0.0)));
    }
    CHECK(err <= 1e-3);
  }

  TEST_CASE("two dimensions: isometry, R o R = -1, symbol modulus") {
    const auto pe = two_dim(0.5, 24.0, 256);
    const auto g = pe.plan().grid();
    gen::Source src(51);
    for (int t = 0; t < 3; ++t) {
      const auto f = sample_poly(g, src.gauss_poly(2, src.uniform(0.4, 1.0), 3));
      const auto r1 = riesz_apply(pe, f, 1), r2 = riesz_apply(pe, f, 2);
      const double nf = l2(f);
      CHECK(std::abs((l2(r1) * l2(r1) + l2(r2) * l2(r2)) / (nf * nf) - 1) <= 1e-5);
      CHECK(l2(r1) <= nf * (1 + 1e-5));
      CHECK(std::abs(l2(riesz_vector_magnitude(pe, f)) / nf - 1) <= 1e-5);
    }
    const auto pe12 = two_dim(0.5);
    for (int t = 0; t < 3; ++t) {
      const auto f = sample_poly(pe12.plan().grid(), src.gauss_poly(2, src.uniform(0.4, 1.0), 3));
      CHECK(l2(riesz_twice_plus_identity(pe12, f)) / l2(f) <= 1e-5);
    }
    CHECK_THROWS(hilbert_apply(pe, sample_poly(g, GaussPoly::gaussian(2, 0.5))));
    CHECK_THROWS(riesz_apply(pe, sample_poly(g, GaussPoly::gaussian(2, 0.5)), 3));
    CHECK_THROWS(riesz_apply(pe, sample_poly(g, GaussPoly::gaussian(2, 0.5)), 0));
  }

  TEST_CASE("multiplier identity") {
    const auto pe = one_dim(1.0);
    const auto g = pe.plan().grid();
    CHECK(riesz_identity_residual(pe, sample_poly(g, GaussPoly::monomial(1, 0.5, {1})), 1) <= 1e-5);
    const auto pe0 = one_dim(0.0);
    CHECK_THROWS_AS(riesz_identity_residual(pe0, sample_poly(pe0.plan().grid(), GaussPoly::gaussian(1, 0.5)), 1),
                    LowFrequencyError);
  }

  TEST_CASE("ratio experiments") {
    FamilySpec fam;
    {
      const auto pe = one_dim(1.5);
      const auto r2 = norm_ratio_experiment(pe, RieszParams::make(2.0, pe.rs()), fam, 5, 7);
      for (const auto& row : r2.rows) CHECK(std::abs(row.ratio - 1) <= 1e-4);
      const auto r4 = norm_ratio_experiment(pe, RieszParams::make(4.0, pe.rs()), fam, 5, 7);
      CHECK(r4.bound == doctest::Approx(4320.0));
      CHECK(r4.max_ratio <= r4.bound);
      CHECK(r4.max_ratio < 10.0);
    }
    {
      const auto pe = two_dim(0.5);
      FamilySpec sym = fam;
      sym.symmetrize = true;
      const auto r = norm_ratio_experiment(pe, RieszParams::make(4.0 / 3.0, pe.rs()), sym, 3, 7);
      CHECK(r.bound == doctest::Approx(432.0));
      CHECK(r.max_ratio <= 432.0);
    }
  }

  TEST_CASE("property: ratios are homogeneous, reproducible and their max is monotone in trials") {
    const auto pe = one_dim(1.0);
    const auto g = pe.plan().grid();
    gen::Source src(52);
    for (int t = 0; t < 5; ++t) {
      const auto f = sample_poly(g, src.gauss_poly(1, src.uniform(0.3, 1.5), 4));
      auto cf = f;
      const double c = src.uniform(-50.0, 50.0);
      for (auto& v : cf.values) v *= c;
      for (double p : {4.0 / 3.0, 3.0}) {
        const double a = lp_norm(riesz_vector_magnitude(pe, f), p) / lp_norm(f, p);
        const double b = lp_norm(riesz_vector_magnitude(pe, cf), p) / lp_norm(cf, p);
        CHECK(std::abs(a - b) <= 1e-12 * a);
      }
    }
    const auto params = RieszParams::make(3.0, pe.rs());
    const auto few = norm_ratio_experiment(pe, params, FamilySpec{}, 3, 11);
    const auto more = norm_ratio_experiment(pe, params, FamilySpec{}, 6, 11);
    const auto again = norm_ratio_experiment(pe, params, FamilySpec{}, 6, 11);
    CHECK(more.max_ratio >= few.max_ratio);
    for (std::size_t i = 0; i < few.rows.size(); ++i) CHECK(few.rows[i].ratio == more.rows[i].ratio);
    CHECK(ratio_report_csv(more) == ratio_report_csv(again));
    CHECK(draw_test_function(pe.rs(), FamilySpec{}, 11, 2).describe() == draw_test_function(pe.rs(), FamilySpec{}, 11, 2).describe());
  }
}
