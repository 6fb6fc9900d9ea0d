#include <cmath>
#include <numbers>

#include <doctest.h>

#include "heatlab/tridiagonal.hpp"

using namespace heatlab;

TEST_CASE("sturm count and bisection on the second-difference matrix") {
  const std::size_t n = 20;
  SymTridiagonal t{std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
  const auto ev = bisect_eigenvalues(t, 0, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double exact = 2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / (n + 1));
    CHECK(ev[k] == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(sturm_count(t, 0.0) == 0);
  CHECK(sturm_count(t, 4.0) == n);
  CHECK(sturm_count(t, 2.0 + 1e-9) == n / 2);
}

TEST_CASE("inverse iteration vectors") {
  const std::size_t n = 12;
  SymTridiagonal t{std::vector<double>(n, 2.0), std::vector<double>(n - 1, -1.0)};
  const auto ev = bisect_eigenvalues(t, 0, 3);
  const auto vecs = inverse_iteration(t, ev);
  std::vector<double> y(n);
  for (std::size_t k = 0; k < 3; ++k) {
    t.apply(vecs[k], y);
    double r = 0.0, nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r = std::max(r, std::abs(y[i] - ev[k] * vecs[k][i]));
      nrm += vecs[k][i] * vecs[k][i];
    }
    CHECK(r < 1e-12);
    CHECK(nrm == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("thomas solve") {
  const std::vector<double> sub{-1.0, -1.0}, diag{4.0, 4.0, 4.0}, sup{-1.0, -1.0};
  const std::vector<double> rhs{3.0, 2.0, 3.0};
  const auto x = thomas_solve(sub, diag, sup, rhs);
  for (double v : x) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}
