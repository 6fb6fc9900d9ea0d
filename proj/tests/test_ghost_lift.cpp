#include <cmath>
#include <numbers>

#include <doctest.h>

#include "heatlab/error.hpp"
#include "heatlab/fit.hpp"
#include "heatlab/ghost_lift.hpp"
#include "heatlab/thick_sets.hpp"

using namespace heatlab;

namespace {

std::shared_ptr<const EigenBasis> oscillator_basis(double R, int n, double lambda) {
  const Grid1D g(-R, R, n);
  return std::make_shared<const EigenBasis>(
      eigen_decompose(build_hamiltonian(Potential::monomial(2.0), g), lambda));
}

}  // namespace

TEST_CASE("lift rows and parity") {
  const auto b = oscillator_basis(6.0, 601, 3.0);
  const SpectralElement ground{b, {1.0}, 1.0};
  const auto f = lift(ground, 1.0, 21, LiftKind::Cosh);
  const auto c = static_cast<Eigen::Index>(f.center_row());
  CHECK(f.y[f.center_row()] == 0.0);
  CHECK(f.y.back() == doctest::Approx(1.0));
  const double l0 = b->lambda(0);
  for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
    REQUIRE(f.values(i, c) == b->modes()(i, 0));
    REQUIRE(f.values(i, 20) == doctest::Approx(std::cosh(l0) * b->modes()(i, 0)).epsilon(1e-14));
  }

  const auto e = random_element(b, 3.0, 4);
  const auto fc = lift(e, 2.0, 41, LiftKind::Cosh);
  const auto fs = lift(e, 2.0, 41, LiftKind::Sinh);
  for (Eigen::Index j = 0; j < 41; ++j) {
    REQUIRE(fc.values.col(j) == fc.values.col(40 - j));
    REQUIRE(fs.values.col(j) == -fs.values.col(40 - j));
  }
  CHECK(fs.values.col(20).cwiseAbs().maxCoeff() == 0.0);
  CHECK(to_string(LiftKind::Sinh) == "sinh");
}

TEST_CASE("lift guards") {
  const auto b = oscillator_basis(6.0, 601, 3.0);
  const auto e = random_element(b, 3.0, 1);
  CHECK_THROWS_AS(lift(e, 1.0, 20, LiftKind::Cosh), DomainError);
  try {
    lift(e, 20.0, 21, LiftKind::Cosh);
    FAIL("expected overflow guard");
  } catch (const DomainError& err) {
    const std::string msg = err.what();
    CHECK(msg.find("overflow guard: lambda_") != std::string::npos);
    CHECK(msg.find("exceeds 40") != std::string::npos);
  }
}

TEST_CASE("zero element residual") {
  const auto b = oscillator_basis(6.0, 201, 2.0);
  const SpectralElement zero{b, std::vector<double>(b->size(), 0.0), 2.0};
  const auto r = residual_nondivergence(lift(zero, 1.0, 11, LiftKind::Cosh), Potential::monomial(2.0));
  CHECK(r.degenerate);
  CHECK(r.relative == 0.0);
  CHECK(r.absolute == 0.0);
}

TEST_CASE("residual refinement on the oscillator ground state") {
  const auto V = Potential::monomial(2.0);
  std::vector<double> nd, dv;
  for (int k = 3; k <= 7; ++k) {
    const double h = std::ldexp(1.0, -k);
    const int n = static_cast<int>(std::lround(12.0 / h)) + 1;
    const auto b = oscillator_basis(6.0, n, 1.8);
    const auto f = lift(SpectralElement{b, {1.0}, 1.0}, 1.0, static_cast<int>(std::lround(2.0 / h)) + 1,
                        LiftKind::Cosh);
    nd.push_back(residual_nondivergence(f, V).relative);
    dv.push_back(residual_divergence(f, solve_aux_ode(V, -6.0, 6.0, n)).relative);
  }
  for (double o : observed_orders(nd)) CHECK(o >= 1.8);
  for (double o : observed_orders(dv)) CHECK(o >= 1.8);
}

TEST_CASE("closed-form lift sin(x) cosh(y)") {
  const auto Z = Potential::constant(0.0);
  std::vector<double> errs;
  for (int k = 3; k <= 7; ++k) {
    const int n = (1 << k) + 1;
    const auto b = std::make_shared<const EigenBasis>(
        eigen_decompose(build_hamiltonian(Z, Grid1D(0.0, std::numbers::pi, n)), 1.5));
    const SpectralElement e{b, {std::sqrt(std::numbers::pi / 2.0)}, 1.5};
    const auto f = lift(e, 1.0, 2 * (1 << k) + 1, LiftKind::Cosh);
    double err = 0.0;
    for (std::size_t i = 0; i < f.x.size(); ++i)
      for (std::size_t j = 0; j < f.y.size(); ++j)
        err = std::max(err, std::abs(f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                                     std::cosh(f.y[j]) * std::sin(f.x[i])));
    errs.push_back(err);
    const auto r = residual_nondivergence(f, Z);
    CHECK(r.degenerate);
    CHECK(r.absolute < 0.1 * std::ldexp(1.0, -2 * k) + 1e-3);
  }
  for (double o : observed_orders(errs)) CHECK(o >= 1.8);
}

TEST_CASE("unit coefficient divergence form matches the Laplacian") {
  const auto b = oscillator_basis(6.0, 241, 3.0);
  const auto f = lift(random_element(b, 3.0, 9), 1.0, 21, LiftKind::Cosh);
  const auto aux = solve_aux_ode(Potential::constant(0.0), -6.0, 6.0, 241);
  const auto d = residual_divergence(f, aux);
  const auto n = residual_nondivergence(f, Potential::constant(0.0));
  CHECK(d.absolute == n.absolute);
}

TEST_CASE("y-independent auxiliary field has zero divergence residual") {
  const auto V = Potential::constant(1.0);
  const auto aux = solve_aux_ode(V, 0.0, 1.0, 101);
  LiftedField f;
  f.x.resize(101);
  for (int i = 0; i < 101; ++i) f.x[static_cast<std::size_t>(i)] = aux.grid.x(i);
  f.y = {-0.1, 0.0, 0.1};
  f.hx = aux.grid.h();
  f.hy = 0.1;
  f.values.resize(101, 3);
  for (Eigen::Index i = 0; i < 101; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) f.values(i, j) = aux.values[static_cast<std::size_t>(i)];
  const auto r = residual_divergence(f, aux);
  CHECK(r.absolute == 0.0);
}

TEST_CASE("auxiliary ODE") {
  const auto zero = solve_aux_ode(Potential::constant(0.0), -3.0, 2.0, 51);
  CHECK(zero.boundary_value == 1.0);
  for (double v : zero.values) CHECK(v == 1.0);

  const auto one = solve_aux_ode(Potential::constant(1.0), 0.0, 1.0, 40001);
  const double e = std::numbers::e;
  const double A = (e - 1.0) / (e - 1.0 / e);
  const double B = e - A;
  const double mid = A * std::exp(0.5) + B * std::exp(-0.5);
  CHECK(mid == doctest::Approx(e / std::cosh(0.5)).epsilon(1e-14));
  CHECK(std::abs(one.at(0.5) - mid) <= 1e-8);
  CHECK(one.boundary_value == doctest::Approx(e));

  const auto x2 = solve_aux_ode(Potential::monomial(2.0), -1.0, 2.0, 3001);
  for (const auto* s : {&zero, &one, &x2}) {
    for (double v : s->values) {
      REQUIRE(v >= 1.0 - 1e-8);
      REQUIRE(v <= s->upper_bound() + 1e-8);
    }
  }
  CHECK(x2.v_sup == doctest::Approx(4.0));
  CHECK_THROWS_AS(solve_aux_ode(Potential::constant(-1.0), 0.0, 1.0, 11), DomainError);
}

TEST_CASE("energy lower bound for sinh lifts") {
  const auto b = oscillator_basis(8.0, 1601, 3.0);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto e = random_element(b, 3.0, seed);
    const auto f = lift(e, 1.0, 201, LiftKind::Sinh);
    for (double rho : {0.5, 1.0}) {
      const double h1 = h1_norm_squared(f, rho);
      CHECK(h1 >= 0.99 * 2.0 * rho * e.norm() * e.norm());
    }
  }
  const auto f = lift(random_element(b, 3.0, 1), 1.0, 201, LiftKind::Sinh);
  CHECK_THROWS_AS(h1_norm_squared(f, 0.333), DomainError);
}

TEST_CASE("rescaling") {
  const auto b = oscillator_basis(6.0, 601, 3.0);
  const auto f = lift(random_element(b, 3.0, 2), 2.5, 51, LiftKind::Cosh);
  const auto V = Potential::monomial(2.0);
  const auto id = rescale_to_unit(f, V, Interval{0.0, 1.0}, 1.0);
  REQUIRE(id.values.cols() == 51);
  for (std::size_t i = 0; i < id.xi.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(std::lround((id.xi[i] + 6.0) / f.hx));
    REQUIRE(id.xi[i] == doctest::Approx(f.x[static_cast<std::size_t>(row)]));
    REQUIRE(id.values.row(static_cast<Eigen::Index>(i)) == f.values.row(row));
  }
  CHECK(id.xi.front() == doctest::Approx(-2.0));
  CHECK(id.xi.back() == doctest::Approx(3.0));
  CHECK(id.v_tilde_sup == doctest::Approx(9.0));
  CHECK_THROWS_AS(rescale_to_unit(f, V, Interval{4.0, 5.0}, 1.0), DomainError);
}

TEST_CASE("rescaled potential along adapted and uniform partitions") {
  const auto V = Potential::monomial(2.0);
  const auto adapted = build_partition(1.0, 1.0, 50);
  double worst = 0.0;
  for (int n = 1; n <= 50; ++n) worst = std::max(worst, rescaled_potential_sup(V, adapted.piece(n)));
  CHECK(worst <= 16.0 + 1e-9);
  const double tail = rescaled_potential_sup(V, adapted.piece(50));
  CHECK(tail == doctest::Approx(1.0).epsilon(0.5));

  const auto uniform = build_partition(1.0, 0.0, 50);
  std::vector<double> lx, lv;
  for (int n = 10; n <= 50; ++n) {
    lx.push_back(std::log(uniform.centers()[static_cast<std::size_t>(n)]));
    lv.push_back(std::log(rescaled_potential_sup(V, uniform.piece(n))));
  }
  const auto fit = linear_fit(lx, lv);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(0.1));
}
