#include <doctest.h>

#include <cmath>

#include "bmot/cdf1d.hpp"
#include "bmot/error.hpp"
#include "bmot/m2ot.hpp"
#include "bmot/motapprox.hpp"
#include "bmot/oracle.hpp"
#include "generators.hpp"

using namespace bmot;
using bmot::testing::Rng;

namespace {

double sq(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return s;
}

}  // namespace

TEST_CASE("grid spec") {
  const GridSpec g{{-1, 0}, {1, 2}, {3, 2}};
  CHECK(g.size() == 6);
  CHECK(g.nodes() == std::vector<double>{-1, 0, -1, 2, 0, 0, 0, 2, 1, 0, 1, 2});
  const GridSpec r = g.refined();
  CHECK(r.counts == std::vector<std::size_t>{5, 3});
  CHECK_THROWS_AS((GridSpec{{0}, {1}, {1}}).validate(), InputError);
  CHECK_THROWS_AS((GridSpec{{1}, {0}, {3}}).validate(), InputError);
  const DiscreteMeasure a(1, {0.5, 0.5}, {-1, 1});
  const DiscreteMeasure b(1, {0.5, 0.5}, {-3, 3});
  const GridSpec c = GridSpec::covering(a, b, 7);
  CHECK(c.lo[0] <= -3);
  CHECK(c.hi[0] >= 3);
}

TEST_CASE("dirac pair") {
  const DiscreteMeasure d = DiscreteMeasure::dirac({0.0, 0.0});
  const auto res = grid_dominance_lp(d, d, [](std::span<const double> z) { return 3.0 + sq(z); },
                                     GridSpec{{-1, -1}, {1, 1}, {3, 3}});
  CHECK(res.cost == doctest::Approx(3.0).epsilon(1e-7));
  REQUIRE(res.rho.size() == 1);
  CHECK(std::abs(res.rho.point(0)[0]) <= 1e-9);
  CHECK(std::abs(res.rho.point(0)[1]) <= 1e-9);
}

TEST_CASE("lattice example on the integer lattice") {
  const DiscreteMeasure mu(2, {0.25, 0.25, 0.25, 0.25}, {-1, 0, 1, 0, -2, 0, 2, 0});
  const DiscreteMeasure nu(2, {0.25, 0.25, 0.25, 0.25}, {0, -1, 0, 1, 0, -2, 0, 2});
  const auto res = grid_dominance_lp(mu, nu, sq, GridSpec{{-2, -2}, {2, 2}, {5, 5}});
  CHECK(res.cost == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(moment(res.rho, 2) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("1D grid cost approaches the closed form") {
  Rng rng(71);
  for (int t = 0; t < 5; ++t) {
    const DiscreteMeasure a = bmot::testing::centred_measure(rng, 1, bmot::testing::pick(rng, 1, 4));
    const DiscreteMeasure b = bmot::testing::centred_measure(rng, 1, bmot::testing::pick(rng, 1, 4));
    const double exact = moment(lub_1d(a, b), 2);
    const GridSpec g = GridSpec::covering(a, b, 161);
    const double h = (g.hi[0] - g.lo[0]) / 160.0;
    const double width = g.hi[0] - g.lo[0];
    const auto res = grid_dominance_lp(a, b, sq, g);
    CHECK(res.cost >= exact - 1e-6);
    // moving an atom by at most h changes z^2 by at most h (2|z| + h)
    CHECK(res.cost - exact <= h * (2 * width + h) + 1e-6);
  }
}

TEST_CASE("grid cost bounds the conic solve and refinement does not increase it") {
  Rng rng(72);
  for (int t = 0; t < 8; ++t) {
    const std::size_t d = 1 + static_cast<std::size_t>(t % 2);
    const DiscreteMeasure a = bmot::testing::centred_measure(rng, d, bmot::testing::pick(rng, 1, 3));
    const DiscreteMeasure b = bmot::testing::centred_measure(rng, d, bmot::testing::pick(rng, 1, 3));
    const double solver = solve_m2ot(a, b, ObjectiveSpec::quadratic()).objective;
    GridSpec g = GridSpec::covering(a, b, d == 1 ? 9 : 5);
    double prev = grid_dominance_lp(a, b, sq, g).cost;
    CHECK(prev >= solver - 1e-6);
    for (int k = 0; k < 2; ++k) {
      g = g.refined();
      const double next = grid_dominance_lp(a, b, sq, g).cost;
      CHECK(next <= prev + 1e-6);
      CHECK(next >= solver - 1e-6);
      prev = next;
    }
  }
}

TEST_CASE("oracle errors") {
  const DiscreteMeasure a(1, {0.5, 0.5}, {-1, 1});
  // grid misses the support
  CHECK_THROWS_AS(grid_dominance_lp(a, a, sq, GridSpec{{-0.5}, {0.5}, {3}}), InputError);
  // too many variables
  Rng rng(73);
  const DiscreteMeasure big = bmot::testing::centred_measure(rng, 2, 30);
  CHECK_THROWS_AS(grid_dominance_lp(big, big, sq, GridSpec::covering(big, big, 100)), InputError);
  // mismatched barycentres
  CHECK_THROWS_AS(grid_dominance_lp(a, DiscreteMeasure::dirac({0.5}), sq, GridSpec{{-1}, {1}, {5}}), InputError);
}

TEST_CASE("exact martingale transport") {
  // limit data of the instability example: value 2/3
  const DiscreteMeasure mu(2, {0.5, 0.5}, {-0.5, 0, 0.5, 0});
  const DiscreteMeasure nu(2, {0.25, 0.25, 0.25, 0.25}, {-1.5, 0, -0.5, 0, 0.5, 0, 1.5, 0});
  const auto res = exact_mot_lp(mu, nu, cost_l1(mu, nu));
  CHECK(res.cost == doctest::Approx(2.0 / 3.0).epsilon(1e-6));
  double total = 0.0;
  for (double g : res.gamma) total += g;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-7));

  // not in convex order
  const DiscreteMeasure s(1, {0.5, 0.5}, {-1, 1});
  CHECK_THROWS_AS(exact_mot_lp(s, DiscreteMeasure::dirac({0.0}), {1.0, 1.0}), InputError);
  CHECK_THROWS_AS(exact_mot_lp(s, s, {1.0}), InputError);
}
