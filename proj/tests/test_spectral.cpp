#include <cmath>
#include <limits>

#include <doctest.h>

#include "heatlab/spectral_estimator.hpp"
#include "heatlab/thick_sets.hpp"

using namespace heatlab;

namespace {

const EigenBasis& oscillator() {
  static const EigenBasis b = solve_on_interval(Potential::monomial(2.0), 10.0, 5.0);
  return b;
}

IntervalSet thick(double gamma, std::uint64_t seed) {
  ThicknessProfile prof;
  prof.rho = PowerRho{1.0};
  prof.gamma = gamma;
  return generate_thick(prof, build_partition(1.0, 1.0, 200), seed).set;
}

}  // namespace

TEST_CASE("gram matrix on trivial sets") {
  const auto& b = oscillator();
  const auto full = gram_matrix(b, 5.0, IntervalSet::single(-10.0, 10.0));
  const auto n = full.G.rows();
  REQUIRE(n == static_cast<Eigen::Index>(b.count_below(5.0)));
  CHECK((full.G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);

  const auto none = gram_matrix(b, 5.0, IntervalSet());
  CHECK(none.singular);
  CHECK(none.G.cwiseAbs().maxCoeff() == 0.0);
  const auto outside = gram_matrix(b, 5.0, IntervalSet::single(20.0, 30.0));
  CHECK(outside.singular);

  const auto half = gram_matrix(b, 5.0, IntervalSet::single(0.0, 10.0));
  for (Eigen::Index k = 0; k < n; ++k) CHECK(half.G(k, k) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK((half.G - half.G.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("best constant") {
  CHECK(best_constant(Eigen::MatrixXd::Identity(3, 3)).K == 1.0);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 1.0;
  d(1, 1) = 0.04;
  CHECK(best_constant(d).K == doctest::Approx(5.0).epsilon(1e-14));
  const auto z = best_constant(Eigen::MatrixXd::Zero(2, 2));
  CHECK(z.unobservable);
  CHECK(z.K == std::numeric_limits<double>::infinity());
}

TEST_CASE("best constant against a circle sweep") {
  const auto g = gram_matrix(oscillator(), 1.8, thick(0.3, 2));
  REQUIRE(g.G.rows() == 2);
  double lo = std::numeric_limits<double>::infinity();
  const int steps = 2000000;
  for (int i = 0; i < steps; ++i) {
    const double t = M_PI * i / steps;
    const Eigen::Vector2d c(std::cos(t), std::sin(t));
    lo = std::min(lo, c.dot(g.G * c));
  }
  CHECK(best_constant(g.G).K == doctest::Approx(1.0 / std::sqrt(lo)).epsilon(1e-6));
}

TEST_CASE("spectral bounds of the gram matrix") {
  const auto g = gram_matrix(oscillator(), 5.0, thick(0.3, 5));
  const auto bc = best_constant(g.G);
  CHECK(bc.lambda_min >= 0.0);
  CHECK(bc.lambda_max <= 1.0 + 1e-10);
  CHECK(bc.K >= 1.0);
}

TEST_CASE("set monotonicity and interlacing") {
  const std::vector<double> lams{2.0, 3.0, 4.0, 5.0};
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto sparse = thick(0.3, seed);
    const auto dense = thick(0.6, seed);
    REQUIRE(dense.includes(sparse));
    const auto fs = scaling_sweep(oscillator(), lams, sparse, 1.0, false);
    const auto fd = scaling_sweep(oscillator(), lams, dense, 1.0, false);
    for (std::size_t i = 0; i < lams.size(); ++i) {
      CHECK(fs.points[i].lambda_min <= fd.points[i].lambda_min + 1e-10);
      if (i > 0) CHECK(fs.points[i].lambda_min <= fs.points[i - 1].lambda_min + 1e-10);
    }
  }
  const auto wide = generate_regular(1.0, 0.0, 0.25, 10.0);
  const auto narrow = generate_regular(1.0, 1.0, 0.25, 10.0);
  REQUIRE(wide.includes(narrow));
  const auto kw = scaling_sweep(oscillator(), lams, wide, 1.0, false);
  const auto kn = scaling_sweep(oscillator(), lams, narrow, 1.0, false);
  for (std::size_t i = 0; i < lams.size(); ++i) CHECK(kw.points[i].K <= kn.points[i].K * (1.0 + 1e-9));
}

TEST_CASE("full interval sweep") {
  const std::vector<double> lams{2.0, 3.0, 4.0, 5.0};
  const auto f = scaling_sweep(oscillator(), lams, IntervalSet::single(-10.0, 10.0), 1.0, false);
  for (const auto& p : f.points) CHECK(p.K == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(f.target.slope) <= 1e-9);
  CHECK_FALSE(f.zeta_hat.has_value());
}

TEST_CASE("regular sets for a quartic potential") {
  const auto V = Potential::monomial(4.0);
  const auto b = solve_on_interval(V, 6.0, 8.0);
  const std::vector<double> lams{3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
  const auto unit = aux_regular_check(b, lams, generate_regular(1.0, 0.0, 0.25, 6.0), 4.0, 4.0);
  for (const auto& p : unit.sweep.points) CHECK(std::isfinite(p.K));
  const auto r = aux_regular_check(b, lams, generate_regular(1.0, 1.0, 0.25, 6.0), 4.0, 4.0);
  CHECK(r.reference_exponent == 1.0);
  REQUIRE(r.sweep.zeta_hat.has_value());
  CHECK(*r.sweep.zeta_hat >= 0.5);
  CHECK(*r.sweep.zeta_hat <= 1.6);
  CHECK(r.log_reference.size() == lams.size());
}
