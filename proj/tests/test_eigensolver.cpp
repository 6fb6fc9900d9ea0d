#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>

#include <doctest.h>

#include "heatlab/eigensolver.hpp"
#include "heatlab/error.hpp"
#include "heatlab/fit.hpp"

using namespace heatlab;

TEST_CASE("stencil") {
  const auto h = build_hamiltonian(Potential::constant(0.0), Grid1D(0.0, 4.0, 5));
  REQUIRE(h.matrix.size() == 3);
  for (double d : h.matrix.diag) CHECK(d == 2.0);
  for (double o : h.matrix.off) CHECK(o == -1.0);

  const auto hx = build_hamiltonian(Potential::monomial(2.0), Grid1D(0.0, 4.0, 5));
  CHECK(hx.matrix.diag[0] == 3.0);
  CHECK(hx.matrix.diag[1] == 6.0);
  CHECK(hx.matrix.diag[2] == 11.0);
  CHECK(hx.matrix.off == h.matrix.off);

  CHECK(build_hamiltonian(Potential::constant(0.0), Grid1D(0.0, 4.0, 5), 1.0).coarse_warning);
  CHECK_FALSE(build_hamiltonian(Potential::constant(0.0), Grid1D(0.0, 4.0, 401), 1.0).coarse_warning);
}

TEST_CASE("harmonic oscillator spectrum") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto H = build_hamiltonian(Potential::monomial(2.0), Grid1D(-12.0, 12.0, 4000));
  const auto b = eigen_decompose(H, std::sqrt(40.0));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(b.size() == 20);
  for (std::size_t k = 0; k < 20; ++k)
    CHECK(std::abs(b.eigenvalues()[k] / (2.0 * k + 1.0) - 1.0) <= 1e-3);
  CHECK(orthonormality_defect(b) <= 1e-10);
  CHECK(max_relative_residual(b, H) <= 1e-8);
  CHECK(secs <= 30.0);
}

TEST_CASE("sine modes") {
  const auto H = build_hamiltonian(Potential::constant(0.0), Grid1D(0.0, std::numbers::pi, 2001));
  const auto b = eigen_decompose(H, 3.5);
  REQUIRE(b.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = (k + 1.0) * (k + 1.0);
    CHECK(b.eigenvalues()[k] == doctest::Approx(exact).epsilon(1e-5));
  }
  // sign convention: first significant entry positive
  for (std::size_t k = 0; k < 3; ++k) CHECK(b.modes()(1, static_cast<Eigen::Index>(k)) > 0.0);
  CHECK(b.modes()(0, 0) == 0.0);
  CHECK(b.modes()(2000, 0) == 0.0);
}

TEST_CASE("empty basis below the ground state") {
  const auto H = build_hamiltonian(Potential::monomial(2.0), Grid1D(-8.0, 8.0, 801));
  const auto b = eigen_decompose(H, 0.5);
  CHECK(b.size() == 0);
  CHECK(count_eigenvalues(b, 0.5, 2.0).count == 0);
}

TEST_CASE("eigenvalue refinement order") {
  std::vector<double> errs;
  for (int n : {201, 401, 801, 1601}) {
    const auto H = build_hamiltonian(Potential::monomial(2.0), Grid1D(-10.0, 10.0, n));
    const auto b = eigen_decompose(H, 3.0);
    errs.push_back(std::abs(b.eigenvalues()[3] - 7.0));
  }
  for (double o : observed_orders(errs)) CHECK(o >= 1.8);
}

TEST_CASE("eigenvalue count") {
  const auto b = solve_on_interval(Potential::monomial(2.0), 10.0, std::sqrt(10.0));
  const auto c = count_eigenvalues(b, std::sqrt(10.0), 2.0);
  CHECK(c.count == 5);
  CHECK(c.reference == doctest::Approx(std::pow(std::sqrt(10.0) + 1.0, 4.0)));
}

TEST_CASE("localization radius") {
  const auto p = Potential::monomial(2.0).with_bounds(GrowthBounds{1.0, 1.0, 0.0, 2.0, 2.0});
  const auto r = localization_radius(p, 3.0, 1e-8);
  CHECK(r.turning_point == doctest::Approx(3.0));
  CHECK(r.radius == doctest::Approx(6.0));
  CHECK(r.tail_mass <= 1e-8);
  const auto chk = check_localization(*r.basis, 3.0, r.radius, 100, 1);
  CHECK(chk.max_ratio <= 2.0);
  CHECK(chk.samples == 100);

  const auto full = check_localization(*r.basis, 3.0, r.basis->grid().x_max, 10, 2);
  CHECK(full.max_ratio == doctest::Approx(1.0).epsilon(1e-12));

  const double t1 = tail_mass(*r.basis, 3.0, r.radius);
  const double t2 = tail_mass(*r.basis, 3.0, 2.0 * r.radius);
  CHECK(t2 <= t1);
  CHECK_THROWS_AS(localization_radius(p, 3.0, 0.0), DomainError);
  CHECK_THROWS_AS(localization_radius(Potential::constant(1.0), 3.0, 1e-8), DomainError);
}

TEST_CASE("caccioppoli ratio") {
  const auto b = solve_on_interval(Potential::monomial(2.0), 10.0, 4.0);
  CHECK(caccioppoli_check(b, 0, 0.0, 1.0).ratio <= 1.0);
  for (std::size_t k = 0; k < b.size(); ++k)
    for (double x : {-2.0, 0.0, 0.7, 3.0})
      for (double r : {0.5, 1.0, 2.0}) CHECK(caccioppoli_check(b, k, x, r).ratio <= 1.0);

  const Grid1D g(0.0, 10.0, 101);
  const std::vector<double> ones(101, 1.0);
  const auto c = caccioppoli_ratio(g, ones, 1.0, 5.0, 1.0);
  CHECK(c.ratio == 0.0);
  CHECK_FALSE(c.degenerate);
  const std::vector<double> zeros(101, 0.0);
  CHECK(caccioppoli_ratio(g, zeros, 1.0, 5.0, 1.0).degenerate);
  CHECK_THROWS_AS(caccioppoli_check(b, 0, 9.0, 1.0), DomainError);
}

TEST_CASE("random elements are unit and seeded") {
  auto b = std::make_shared<const EigenBasis>(solve_on_interval(Potential::monomial(2.0), 8.0, 3.0));
  const auto e1 = random_element(b, 3.0, 5);
  const auto e2 = random_element(b, 3.0, 5);
  CHECK(e1.coeffs == e2.coeffs);
  CHECK(e1.coeffs.size() == b->count_below(3.0));
  CHECK(e1.norm() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("basis export") {
  const auto b = solve_on_interval(Potential::monomial(2.0), 6.0, 2.0);
  const auto dir = (std::filesystem::temp_directory_path() / "heatlab_basis_export").string();
  std::filesystem::remove_all(dir);
  export_basis(b, dir, {{"note", "test"}});
  CHECK(std::filesystem::exists(dir + "/eigenvalues.csv"));
  CHECK(std::filesystem::exists(dir + "/modes.csv"));
  CHECK(std::filesystem::exists(dir + "/metadata.json"));
}
