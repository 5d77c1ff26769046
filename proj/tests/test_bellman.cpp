#include <cmath>
#include <limits>

#include "doctest.h"
#include "dunkl_lab/bellman.hpp"
#include "generators.hpp"

using namespace dunkl;

namespace {

const double kEps = std::numeric_limits<double>::epsilon();

double check_value(const VerificationReport& r, const std::string& name) {
  const Check* c = r.find(name);
  REQUIRE_MESSAGE(c != nullptr, name);
  return c->value;
}

}  // namespace

TEST_SUITE("bellman") {
  TEST_CASE("parameters") {
    const auto b2 = BellmanParams::make(2.0);
    CHECK(b2.q == 2.0);
    CHECK(b2.gamma == 0.25);
    const auto b4 = BellmanParams::make(4.0);
    CHECK(b4.q == doctest::Approx(4.0 / 3.0));
    CHECK(b4.gamma == doctest::Approx(1.0 / 18.0));
    CHECK_THROWS(BellmanParams::make(1.5));
    CHECK_THROWS(BellmanParams::make(3.0, 0.0));
    CHECK_THROWS(BellmanParams::make(3.0, 1.5));
  }

  TEST_CASE("beta and B examples") {
    const auto bp = BellmanParams::make(2.0);
    CHECK(beta_eval(bp, 0.0, 1.0) == 1.0);
    CHECK(beta_eval(bp, 1.0, 1.0) == doctest::Approx(2.25));
    for (double p : {2.0, 3.0, 4.0}) CHECK(beta_eval(BellmanParams::make(p), 0.0, 0.0) == 0.0);
    CHECK(bellman_B(bp, {0.0}, {0.0}) == 0.0);
    CHECK(bellman_B(bp, {1.0}, {1.0}) == doctest::Approx(1.125));
    const auto bp22 = BellmanParams::make(2.0, 0.1, 2, 2);
    CHECK(bellman_B(bp22, {0.6, 0.8}, {0.0, -1.0}) == doctest::Approx(1.125));
  }

  TEST_CASE("property: B is rotation invariant in each block") {
    gen::Source src(61);
    for (double p : {2.0, 3.0, 4.0}) {
      const auto bp = BellmanParams::make(p, 0.1, 3, 2);
      for (int t = 0; t < 100; ++t) {
        const Vec eta = src.point(3, 2.0), zeta = src.point(2, 2.0);
        const auto Q = src.orthogonal(3);
        const double b = bellman_B(bp, eta, zeta), bq = bellman_B(bp, gen::apply(Q, eta), zeta);
        CHECK(std::abs(b - bq) <= 4 * kEps * p * std::max(1.0, b));
      }
    }
  }

  TEST_CASE("property: branch continuity") {
    gen::Source src(62);
    for (double p : {2.0, 3.0, 4.0}) {
      const auto bp = BellmanParams::make(p);
      for (int t = 0; t < 200; ++t) {
        const double s = src.uniform(0.05, 3.0);
        const double t0 = std::pow(s, p / bp.q);
        const double below = beta_eval(bp, s, t0 * (1 + 1e-13)), above = beta_eval(bp, s, t0 * (1 - 1e-13));
        CHECK(std::abs(below - above) <= 1e-10 * std::max(1.0, below));
      }
    }
  }

  TEST_CASE("Hessian: q = 2 blocks in R1, zero cross block in R2") {
    const auto bp = BellmanParams::make(2.0, 0.1, 2, 2);
    const auto h = bellman_hessian(bp, {0.3, 0.2}, {1.5, -0.5});
    REQUIRE(h.region == Region::R1);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double want = i == j ? (i < 2 ? 1.25 : 1.0) : 0.0;
        CHECK(std::abs(h.at(i, j) - want) <= 1e-14);
      }
    for (double p : {2.0, 3.0, 4.0}) {
      const auto b = BellmanParams::make(p, 0.1, 2, 2);
      const auto r2 = bellman_hessian(b, {1.5, 0.9}, {0.4, 0.3});
      REQUIRE(r2.region == Region::R2);
      for (int i = 0; i < 2; ++i)
        for (int j = 2; j < 4; ++j) {
          CHECK(r2.at(i, j) == 0.0);
          CHECK(r2.at(j, i) == 0.0);
        }
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(std::abs(r2.at(i, j) - r2.at(j, i)) <= 4 * kEps * std::abs(r2.at(i, j)));
    }
    CHECK_NOTHROW(bellman_hessian(bp, {0.3, 0.2}, {0.0, 0.0}));
    const auto bp4 = BellmanParams::make(4.0, 0.1, 2, 2);
    CHECK_THROWS_AS(bellman_hessian(bp4, {0.3, 0.2}, {0.0, 0.0}), UpsilonError);
    CHECK_THROWS_AS(bellman_hessian(bp4, {1.0, 0.0}, {1.0, 0.0}), UpsilonError);
  }

  TEST_CASE("Hessian and gradient against finite differences") {
    gen::Source src(63);
    for (double p : {2.0, 3.0, 4.0}) {
      const auto bp = BellmanParams::make(p, 0.1, 1, 2);
      std::vector<MarginSample> ss;
      for (int t = 0; t < 300; ++t) ss.push_back({src.point(1, 2.5), src.point(2, 2.5), src.point(3, 1.0)});
      const auto rep = closed_form_hessian_check(bp, ss);
      CHECK(check_value(rep, "closed_form_vs_fd_hessian") <= 1e-5);
      CHECK(check_value(rep, "closed_form_fd_samples") >= 100);
      for (const auto& s : ss) {
        if (region_of(bp, s.eta, s.zeta) == Region::Boundary) continue;
        const double gap = std::abs(std::pow(norm(s.eta), p) - std::pow(norm(s.zeta), bp.q));
        if (gap < 1e-2 || norm(s.zeta) < 1e-2 || norm(s.eta) < 1e-2) continue;
        const Vec g = bellman_gradient(bp, s.eta, s.zeta);
        Vec x = s.eta;
        x.insert(x.end(), s.zeta.begin(), s.zeta.end());
        double err = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double h = 1e-5;
          Vec a = x, b = x;
          a[i] += h;
          b[i] -= h;
          auto B = [&](const Vec& v) { return bellman_B(bp, {v[0]}, {v[1], v[2]}); };
          err = std::max(err, std::abs((B(a) - B(b)) / (2 * h) - g[i]));
          scale = std::max(scale, std::abs(g[i]));
        }
        CHECK(err <= 1e-6 * std::max(1.0, scale));
      }
    }
  }

  TEST_CASE("mollified B: range, positivity, kappa trend") {
    gen::Source src(64);
    for (double p : {2.0, 4.0}) {
      std::vector<std::pair<Vec, Vec>> pts;
      for (int t = 0; t < 20; ++t) pts.emplace_back(src.point(1, 2.0), src.point(1, 2.0));
      double c_coarse = 0.0;
      for (double kappa : {0.4, 0.2, 0.1, 0.05}) {
        const auto bp = BellmanParams::make(p, kappa);
        for (const auto& [eta, zeta] : pts) {
          const double bk = mollified_B(bp, eta, zeta);
          CHECK(bk >= 0.0);
          const double cap = (1 + bp.gamma) / 2 * (std::pow(norm(eta) + kappa, p) + std::pow(norm(zeta) + kappa, bp.q));
          CHECK(bk <= cap);
          const double ratio = std::abs(bk - bellman_B(bp, eta, zeta)) / kappa;
          if (kappa == 0.4) c_coarse = std::max(c_coarse, ratio);
          else CHECK(ratio <= c_coarse * 1.5);
        }
      }
    }
  }

  TEST_CASE("mollifier normalization") {
    for (int d : {1, 2, 3, 4}) CHECK(mollifier_constant(d) > 0.0);
    const double c = mollifier_constant(1);
    double s = 0.0;
    for (int i = 0; i < 200000; ++i) {
      const double x = -1 + (i + 0.5) / 100000.0;
      s += mollifier(1, {x}) / 100000.0;
    }
    CHECK(std::abs(s - 1) <= 1e-6);
    CHECK(mollifier(2, {0.8, 0.7}) == 0.0);
    CHECK(c == doctest::Approx(mollifier(1, {0.0}) * std::exp(1.0)));
  }

  TEST_CASE("certificate margins") {
    const auto bp2 = BellmanParams::make(2.0);
    const auto s2 = random_margin_samples(bp2, 400, 3.0, 7);
    const auto rep2 = certificate_margins(bp2, s2, bp2.kappa / 16);
    CHECK(rep2.all_pass());
    const MarginSample zero{{0.4}, {1.1}, {0.0, 0.0}};
    const auto tc = tau_convolutions(bp2, zero.eta, zero.zeta);
    CHECK(hessian_margin(bp2, zero, mollified_hessian_fd(bp2, zero.eta, zero.zeta, bp2.kappa / 16), tc) == 0.0);
    const auto bp4 = BellmanParams::make(4.0);
    const auto s4 = random_margin_samples(bp4, 2000, 3.0, 8);
    const auto rep4 = certificate_margins(bp4, s4, bp4.kappa / 16);
    for (const auto& c : rep4.checks) CHECK_MESSAGE(c.pass, c.name << " = " << c.value);
    CHECK_THROWS(certificate_margins(bp4, s4, bp4.kappa / 4));
  }

  TEST_CASE("property: finite-difference Hessians are symmetric") {
    gen::Source src(65);
    const auto bp = BellmanParams::make(3.0);
    for (int t = 0; t < 20; ++t) {
      const Vec eta = src.point(1, 2.0), zeta = src.point(1, 2.0);
      const auto h = mollified_hessian_fd(bp, eta, zeta, bp.kappa / 16);
      const double scale = std::max({std::abs(h[0]), std::abs(h[1]), std::abs(h[3]), 1e-300});
      CHECK(std::abs(h[1] - h[2]) <= 1e-7 * scale);
    }
  }

  TEST_CASE("q = 2: every tau weight is identically one") {
    const auto bp = BellmanParams::make(2.0);
    gen::Source src(66);
    for (int t = 0; t < 50; ++t) {
      const Vec z = src.point(1, 3.0);
      CHECK(tau(bp, z) == 1.0);
      CHECK(tau1(bp, z) == 1.0);
      CHECK(tau2(bp, z) == 1.0);
      const auto tc = tau_convolutions(bp, src.point(1, 2.0), z);
      CHECK(tc.tau == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(tc.inv_tau == doctest::Approx(1.0).epsilon(1e-10));
    }
    const auto bp4 = BellmanParams::make(4.0);
    CHECK(tau2(bp4, {0.0}) > 0.0);
    CHECK(tau(bp4, {0.0}) == 0.0);
  }

  TEST_CASE("elementary lemma") {
    for (double q : {4.0 / 3.0, 1.5, 2.0}) {
      const Vec a{0.6, -1.3};
      const auto m = elementary_margins(q, a, a);
      CHECK(m.m1 == doctest::Approx(std::pow(norm(a), 2 - q) * (0.5 - 1.0 / 64)).epsilon(1e-12));
      CHECK(m.m1 > 0.0);
    }
    gen::Source src(67);
    for (int t = 0; t < 20; ++t) {
      const auto m = elementary_margins(2.0, src.point(3, 2.0), src.point(3, 2.0));
      CHECK(m.m1 == 0.5 - 1.0 / 64);
      CHECK(m.m2 == 0.0);
    }
    CHECK_THROWS(elementary_margins(1.5, {0.0, 0.0}, {0.0, 0.0}));
    const auto rep = elementary_lemma_margins(4.0 / 3.0, random_elementary_samples(2, 10000, 9));
    CHECK(rep.all_pass());
    for (const auto& c : rep.checks)
      if (c.relation == Relation::GreaterEqual) CHECK(c.value >= -1e-9);
  }
}
