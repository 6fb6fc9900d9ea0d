#include <cmath>
#include <numbers>

#include <doctest.h>

#include "heatlab/error.hpp"
#include "heatlab/potentials.hpp"

using namespace heatlab;

TEST_CASE("potential evaluation") {
  CHECK(Potential::monomial(2.0)(0.0) == 0.0);
  CHECK(Potential::monomial(2.0)(-3.0) == doctest::Approx(9.0));
  const auto osc = Potential::oscillating(1.0, 2.0);
  CHECK(osc(0.0) == 0.0);
  const double sp = std::sqrt(std::numbers::pi);
  CHECK(osc(sp) == doctest::Approx(std::numbers::pi + sp).epsilon(1e-12));
  CHECK(osc(sp) == doctest::Approx(4.9140).epsilon(1e-4));
  CHECK(osc(-sp) == osc(sp));
  CHECK_THROWS_AS(osc(std::nan("")), DomainError);
  CHECK_THROWS_AS(osc(INFINITY), DomainError);
  CHECK(Potential::shifted_monomial(2.0, 1.0, 0.5)(3.0) == doctest::Approx(4.5));
  CHECK(Potential::shifted_monomial(2.0, 1.0, 0.5)(0.5) == doctest::Approx(0.5));
}

TEST_CASE("tabulated potential interpolates and clamps") {
  const auto p = Potential::tabulated({0.0, 1.0, 2.0}, {0.0, 2.0, 0.0});
  CHECK(p(0.5) == doctest::Approx(1.0));
  CHECK(p(1.5) == doctest::Approx(1.0));
  CHECK(p(-4.0) == doctest::Approx(0.0));
  CHECK(p(9.0) == doctest::Approx(0.0));
}

TEST_CASE("growth bounds") {
  const auto xs = uniform_samples(-10.0, 10.0, 2001);
  GrowthBounds b{1.0, 1.0, 0.0, 2.0, 2.0};
  CHECK(verify_growth_bounds(Potential::monomial(2.0), b, xs).holds);

  const auto osc = Potential::oscillating(1.0, 2.0);
  GrowthBounds ob{1.0, 3.0, 0.0, 1.0, 2.0};
  const auto rep = verify_growth_bounds(osc, ob, xs);
  CHECK(rep.holds);
  CHECK(rep.samples == 2001);

  GrowthBounds bad{1.0, 1.0, 0.0, 3.0, 3.0};
  const auto fail = verify_growth_bounds(Potential::monomial(2.0), bad, xs);
  CHECK_FALSE(fail.holds);
  CHECK(std::abs(fail.witness) == doctest::Approx(10.0));
  CHECK(fail.worst_violation == doctest::Approx(900.0));
}

TEST_CASE("oscillating example bounds on a dense grid") {
  const auto osc = Potential::oscillating(1.0, 2.0);
  for (double x : uniform_samples(-50.0, 50.0, 100001)) {
    const double v = osc(x);
    REQUIRE(v >= std::abs(x));
    REQUIRE(v <= 3.0 * (1.0 + x * x));
  }
}

TEST_CASE("shift") {
  const auto p = Potential::monomial(2.0);
  const auto same = shift_potential(p, 0.0);
  for (double x : {-2.0, 0.3, 7.0}) CHECK(same(x) == p(x));
  CHECK(shift_potential(p, 1.0)(0.0) == 1.0);
  CHECK(shift_potential(Potential::oscillating(1.0, 2.0), 5.0)(0.0) == 5.0);
  CHECK_THROWS_AS(shift_potential(p, -1.0), DomainError);
}

TEST_CASE("split growth bound") {
  const auto xs = uniform_samples(-10.0, 10.0, 2001);
  const auto zero = Potential::constant(0.0);
  const auto x2 = Potential::monomial(2.0);

  const auto ok = verify_split(SplitBound{x2, zero, 3.0, 2.0}, xs);
  CHECK(ok.holds);
  CHECK(ok.max_ratio <= 3.0);

  const auto z = verify_split(SplitBound{zero, zero, 1.0, 2.0}, xs);
  CHECK(z.holds);
  CHECK(z.max_ratio == 0.0);

  const auto wide = uniform_samples(-1000.0, 1000.0, 2001);
  const auto bad = verify_split(SplitBound{zero, x2, 1.0, 2.0}, wide);
  CHECK_FALSE(bad.holds);
  CHECK(std::abs(bad.witness) == doctest::Approx(1000.0));
}

TEST_CASE("potential json round trip") {
  const auto p = Potential::oscillating(1.0, 2.0);
  const auto q = potential_from_json(to_json(p));
  for (double x : {-1.7, 0.0, 2.2}) CHECK(q(x) == p(x));
  CHECK(q.kind_name() == p.kind_name());
}
