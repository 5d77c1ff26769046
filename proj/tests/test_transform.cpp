#include <cmath>
#include <limits>

#include "doctest.h"
#include "dunkl_lab/dunkl_core.hpp"
#include "dunkl_lab/transform.hpp"
#include "generators.hpp"

using namespace dunkl;

namespace {

RootSystemSpec rank_one(double k, double prefactor = 1.0) { return make_root_system(RootKind::RankOne, 1, {k}, {}, prefactor); }

struct Setup {
  GridPtr grid, freq;
  PlanPtr plan;
};

Setup setup(const RootSystemSpec& rs, double radius = 8.0, int res = 256) {
  Setup s;
  s.grid = build_grid(rs, radius, res);
  s.freq = build_grid(rs, radius, res);
  s.plan = make_plan(s.grid, s.freq);
  return s;
}

GridFunction sample_poly(const GridPtr& g, const GaussPoly& f) {
  return sample(g, [&](const Vec& x) { return cplx(f(x), 0.0); });
}

double max_rel(const GridFunction& a, const GridFunction& b) {
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    err = std::max(err, std::abs(a.values[i] - b.values[i]));
    scale = std::max(scale, std::abs(b.values[i]));
  }
  return err / scale;
}

}  // namespace

TEST_SUITE("transform") {
  TEST_CASE("normalizer") {
    CHECK(std::abs(compute_normalizer(*build_grid(rank_one(0.0), 8.0, 256)).c_k - std::sqrt(2 * M_PI)) <= 1e-8);
    for (double k : {0.5, 1.0, 2.5}) {
      const double want = std::pow(2.0, 2 * k + 0.5) * std::tgamma(k + 0.5);
      CHECK(std::abs(compute_normalizer(*build_grid(rank_one(k), 8.0, 256)).c_k / want - 1) <= 1e-8);
      const double scaled = compute_normalizer(*build_grid(rank_one(k, 2.5), 8.0, 256)).c_k;
      CHECK(std::abs(scaled / (2.5 * want) - 1) <= 1e-8);
    }
    const auto rs2 = make_root_system(RootKind::Product, 2, {1.0});
    CHECK(std::abs(compute_normalizer(*build_grid(rs2, 8.0, 64)).c_k / std::pow(std::pow(2.0, 2.5) * std::tgamma(1.5), 2) - 1) <= 1e-8);
  }

  TEST_CASE("forward transform examples") {
    const auto s0 = setup(rank_one(0.0));
    const auto F = s0.plan->forward(sample_poly(s0.grid, GaussPoly::gaussian(1, 0.5)));
    double err = 0.0;
    for (std::size_t i = 0; i < F.values.size(); ++i) {
      const double xi = s0.freq->coord(i, 0);
      err = std::max(err, std::abs(F.values[i] - cplx(std::exp(-xi * xi / 2), 0.0)));
    }
    CHECK(err <= 1e-6);
    for (double k : {0.0, 1.0, 2.5}) {
      const auto s = setup(rank_one(k));
      const auto even = GaussPoly::gaussian(1, 0.7) + GaussPoly::monomial(1, 0.7, {4}, -0.3);
      double im = 0.0;
      for (const auto& v : s.plan->forward(sample_poly(s.grid, even)).values) im = std::max(im, std::abs(v.imag()));
      CHECK(im <= 1e-10);
      const auto zero = s.plan->forward(sample(s.grid, [](const Vec&) { return cplx(0.0, 0.0); }));
      for (const auto& v : zero.values) CHECK(v == cplx(0.0, 0.0));
      const auto back = s.plan->inverse(SpectralFunction{s.freq, std::vector<cplx>(s.freq->size())});
      for (const auto& v : back.values) CHECK(v == cplx(0.0, 0.0));
    }
  }

  TEST_CASE("round trip and the inversion formula") {
    const auto s = setup(rank_one(1.5));
    const auto gf = sample_poly(s.grid, GaussPoly::gaussian(1, 0.5));
    CHECK(max_rel(s.plan->inverse(s.plan->forward(gf)), gf) <= 1e-5);
    const auto f = GaussPoly::gaussian(1, 0.5) + GaussPoly::monomial(1, 0.5, {1}, 0.8);
    const auto fg = sample_poly(s.grid, f);
    const auto back = make_plan(s.freq, s.grid);
    const auto F = s.plan->forward(fg);
    const auto FF = back->forward(GridFunction{s.freq, F.values});
    GridFunction mirrored{s.grid, std::vector<cplx>(s.grid->size())};
    for (std::size_t i = 0; i < s.grid->size(); ++i) mirrored.values[i] = FF.values[s.grid->size() - 1 - i];
    CHECK(max_rel(mirrored, fg) <= 1e-5);
  }

  TEST_CASE("multipliers") {
    for (double k : {0.0, 1.0, 2.5}) {
      const auto rs = rank_one(k);
      const auto s = setup(rs, 8.0, 256);
      const auto f = GaussPoly::gaussian(1, 0.5) + GaussPoly::monomial(1, 0.5, {1}, 0.6);
      const auto F = s.plan->forward(sample_poly(s.grid, f));
      const auto same = apply_multiplier(F, [](const Vec&) { return cplx(1.0, 0.0); });
      CHECK(same.values == F.values);
      const auto tf = s.plan->inverse(apply_multiplier(F, [](const Vec& xi) { return cplx(0.0, xi[0]); }));
      CHECK(max_rel(tf, sample_poly(s.grid, apply_dunkl_operator(rs, f, {1.0}))) <= 1e-5);
      const auto lf = s.plan->inverse(apply_multiplier(F, [](const Vec& xi) { return cplx(-xi[0] * xi[0], 0.0); }));
      CHECK(max_rel(lf, sample_poly(s.grid, dunkl_laplacian(rs, f))) <= 1e-5);
    }
  }

  TEST_CASE("Plancherel") {
    for (double k : {0.0, 0.5, 1.0, 2.5}) {
      const auto s = setup(rank_one(k));
      CHECK(plancherel_residual(*s.plan, sample_poly(s.grid, GaussPoly::gaussian(1, 0.5))) <= 1e-5);
    }
    const auto s1 = setup(rank_one(1.0));
    CHECK(plancherel_residual(*s1.plan, sample_poly(s1.grid, GaussPoly::monomial(1, 0.5, {1}))) <= 1e-5);
    CHECK(plancherel_residual(*s1.plan, sample(s1.grid, [](const Vec&) { return cplx(0.0, 0.0); })) == 0.0);
    const auto rs2 = make_root_system(RootKind::Product, 2, {0.5});
    const auto s2 = setup(rs2, 8.0, 48);
    gen::Source src(31);
    CHECK(plancherel_residual(*s2.plan, sample_poly(s2.grid, src.gauss_poly(2, 0.6, 2))) <= 1e-5);
  }

  TEST_CASE("property: linearity") {
    gen::Source src(32);
    const auto s = setup(rank_one(1.5));
    for (int t = 0; t < 10; ++t) {
      const auto f = sample_poly(s.grid, src.gauss_poly(1, src.uniform(0.3, 1.0), 4));
      const auto g = sample_poly(s.grid, src.gauss_poly(1, src.uniform(0.3, 1.0), 4));
      const double a = src.uniform(-2, 2), b = src.uniform(-2, 2);
      GridFunction h{s.grid, std::vector<cplx>(s.grid->size())};
      std::vector<double> abs_terms(s.grid->size());
      for (std::size_t i = 0; i < h.values.size(); ++i) {
        h.values[i] = a * f.values[i] + b * g.values[i];
        abs_terms[i] = std::abs(a * f.values[i]) + std::abs(b * g.values[i]);
      }
      // rounding scale of one quadrature sum: log2(n) additions of terms bounded by the absolute integrand
      const double scale = integrate_real(*s.grid, abs_terms) / s.plan->normalizer() * std::log2(static_cast<double>(s.grid->size()));
      const auto Fh = s.plan->forward(h), Ff = s.plan->forward(f), Fg = s.plan->forward(g);
      double err = 0.0;
      for (std::size_t i = 0; i < Fh.values.size(); ++i) err = std::max(err, std::abs(Fh.values[i] - (a * Ff.values[i] + b * Fg.values[i])));
      CHECK(err <= 4 * std::numeric_limits<double>::epsilon() * scale);
    }
  }

  TEST_CASE("property: multiplier composition and unit-modulus multipliers") {
    gen::Source src(33);
    const auto s = setup(rank_one(0.5));
    const auto fg = sample_poly(s.grid, src.gauss_poly(1, 0.5, 3));
    const auto F = s.plan->forward(fg);
    auto m1 = [](const Vec& xi) { return cplx(std::exp(-0.3 * std::abs(xi[0])), 0.0); };
    auto m2 = [](const Vec& xi) { return cplx(0.0, xi[0] > 0 ? -1.0 : 1.0); };
    const auto a = apply_multiplier(apply_multiplier(F, m2), m1);
    const auto b = apply_multiplier(F, [&](const Vec& xi) { return m1(xi) * m2(xi); });
    CHECK(a.values == b.values);
    const double res = plancherel_residual(*s.plan, fg);
    const double nf = lp_norm(fg, 2.0);
    CHECK(std::abs(spectral_l2_norm(apply_multiplier(F, m2)) - nf) / nf <= 2 * res + 1e-15);
    auto phase = [](const Vec& xi) { return std::polar(1.0, 0.7 * xi[0] * xi[0]); };
    CHECK(std::abs(spectral_l2_norm(apply_multiplier(F, phase)) - nf) / nf <= 2 * res + 1e-15);
  }

  TEST_CASE("plan guards") {
    const auto g1 = build_grid(rank_one(1.0), 8.0, 64);
    CHECK_THROWS(make_plan(g1, build_grid(rank_one(2.0), 8.0, 64)));
    CHECK_THROWS(make_plan(g1, build_grid(make_root_system(RootKind::Product, 2, {1.0}), 8.0, 16)));
  }
}
