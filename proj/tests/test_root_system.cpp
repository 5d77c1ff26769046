#include <cmath>
#include <limits>

#include "doctest.h"
#include "dunkl_lab/quadrature.hpp"
#include "dunkl_lab/root_system.hpp"
#include "generators.hpp"

using namespace dunkl;

namespace {

const double kRt2 = std::sqrt(2.0);

RootSystemSpec b2(double k_short, double k_long) {
  std::vector<Vec> roots{{kRt2, 0}, {-kRt2, 0}, {0, kRt2}, {0, -kRt2}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  return make_root_system(RootKind::General, 2, {k_short, k_long}, roots);
}

double ulps(double a, double b) { return std::abs(a - b) / (std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b)) + 1e-300); }

}  // namespace

TEST_SUITE("root_system") {
  TEST_CASE("rank-one construction") {
    const auto rs = make_root_system(RootKind::RankOne, 1, {1.0});
    REQUIRE(rs.roots.size() == 2);
    CHECK(rs.roots[0][0] == doctest::Approx(kRt2).epsilon(1e-15));
    CHECK(rs.roots[1][0] == doctest::Approx(-kRt2).epsilon(1e-15));
    CHECK(rs.group.size() == 2);
    CHECK(rs.k_sum() == 2.0);
  }

  TEST_CASE("product construction") {
    const auto rs = make_root_system(RootKind::Product, 3, {0.5});
    CHECK(rs.roots.size() == 6);
    CHECK(rs.group.size() == 8);
    for (const auto& a : rs.roots) CHECK(dot(a, a) == doctest::Approx(2.0));
    CHECK(rs.coordinate_aligned());
  }

  TEST_CASE("general kind rejects unnormalized roots") {
    CHECK_THROWS(make_root_system(RootKind::General, 1, {1.0}, {{1.0}, {-1.0}}));
    CHECK_THROWS(make_root_system(RootKind::General, 1, {1.0}, {{kRt2}}));
  }

  TEST_CASE("general kind: B2 has two orbits and |G| = 8") {
    const auto rs = b2(0.5, 1.5);
    CHECK(rs.group.size() == 8);
    CHECK(rs.orbit_k.size() == 2);
    CHECK(rs.k_sum() == doctest::Approx(4 * 0.5 + 4 * 1.5));
    CHECK_FALSE(rs.coordinate_aligned());
  }

  TEST_CASE("reflection examples") {
    const auto r1 = make_root_system(RootKind::RankOne, 1, {1.0});
    CHECK(reflect(r1, {kRt2}, {3.0})[0] == doctest::Approx(-3.0));
    const auto r2 = make_root_system(RootKind::Product, 2, {1.0});
    const Vec y = reflect(r2, {kRt2, 0.0}, {1.0, 2.0});
    CHECK(y[0] == doctest::Approx(-1.0));
    CHECK(y[1] == doctest::Approx(2.0));
    const Vec fixed = reflect({1.0, 1.0}, {2.0, -2.0});
    CHECK(fixed[0] == doctest::Approx(2.0));
    CHECK(fixed[1] == doctest::Approx(-2.0));
  }

  TEST_CASE("orbit distance examples") {
    const auto r1 = make_root_system(RootKind::RankOne, 1, {1.0});
    CHECK(orbit_distance(r1, {1.0}, {-1.0}) == doctest::Approx(0.0));
    CHECK(orbit_distance(r1, {1.0}, {2.0}) == doctest::Approx(1.0));
    const auto r2 = make_root_system(RootKind::Product, 2, {1.0});
    CHECK(orbit_distance(r2, {1.0, 1.0}, {-1.0, 1.0}) == doctest::Approx(0.0));
  }

  TEST_CASE("weight density examples") {
    CHECK(weight_density(make_root_system(RootKind::Product, 2, {0.0}), {0.3, -2.0}) == 1.0);
    const auto r1 = make_root_system(RootKind::RankOne, 1, {1.0});
    CHECK(weight_density(r1, {2.0}) == doctest::Approx(8.0));
    CHECK(weight_density(r1, {0.0}) == 0.0);
    const auto scaled = make_root_system(RootKind::RankOne, 1, {1.0}, {}, 3.0);
    CHECK(weight_density(scaled, {2.0}) == doctest::Approx(8.0));
    CHECK(ball_measure(scaled, {0.0}, 1.0) == doctest::Approx(4.0).epsilon(1e-9));
  }

  TEST_CASE("json round trip") {
    const auto rs = b2(0.25, 2.0);
    const auto back = root_system_from_json(root_system_to_json(rs));
    CHECK(back.roots.size() == rs.roots.size());
    CHECK(back.k_sum() == doctest::Approx(rs.k_sum()));
    CHECK(back.group.size() == rs.group.size());
    CHECK(root_system_to_json(back) == root_system_to_json(rs));
  }

  TEST_CASE("property: group invariance of the density, isometry, triangle inequality") {
    gen::Source src(101);
    const std::vector<RootSystemSpec> systems{make_root_system(RootKind::RankOne, 1, {1.5}),
                                              make_root_system(RootKind::Product, 3, {0.5}), b2(0.5, 1.5)};
    for (const auto& rs : systems) {
      for (int trial = 0; trial < 200; ++trial) {
        const Vec x = src.point(rs.dimension, 3.0), y = src.point(rs.dimension, 3.0), z = src.point(rs.dimension, 3.0);
        const double w = weight_density(rs, x);
        for (std::size_t g = 0; g < rs.group.size(); ++g)
          CHECK(ulps(weight_density(rs, apply_group_element(rs, g, x)), w) <= 64.0);
        for (const auto& a : rs.roots) {
          Vec d1(x.size()), d2(x.size());
          const Vec sx = reflect(rs, a, x), sy = reflect(rs, a, y);
          for (std::size_t i = 0; i < x.size(); ++i) {
            d1[i] = sx[i] - sy[i];
            d2[i] = x[i] - y[i];
          }
          CHECK(std::abs(norm(d1) - norm(d2)) <= 8 * std::numeric_limits<double>::epsilon() * (1 + norm(d2)));
          Vec gap(x.size());
          for (std::size_t i = 0; i < x.size(); ++i) gap[i] = x[i] - sx[i];
          CHECK(std::abs(kRt2 * std::abs(dot(x, a)) - norm(gap)) <= 1e-12 * (1 + norm(gap)));
        }
        CHECK(orbit_distance(rs, x, z) <= orbit_distance(rs, x, y) + orbit_distance(rs, y, z) + 1e-12);
      }
    }
  }
}
