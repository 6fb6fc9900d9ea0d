#include <cmath>

#include <doctest.h>

#include "heatlab/control.hpp"
#include "heatlab/error.hpp"
#include "heatlab/spectral_estimator.hpp"
#include "heatlab/thick_sets.hpp"

using namespace heatlab;

namespace {

std::shared_ptr<const EigenBasis> oscillator() {
  static const auto b =
      std::make_shared<const EigenBasis>(solve_on_interval(Potential::monomial(2.0), 10.0, 5.0));
  return b;
}

IntervalSet thick_omega() {
  ThicknessProfile prof;
  prof.rho = PowerRho{1.0};
  prof.gamma = 0.3;
  return generate_thick(prof, build_partition(1.0, 1.0, 200), 1).set;
}

ControlConfig thick_config() {
  ControlConfig c;
  c.T = 1.0;
  c.cutoff = 5.0;
  c.omega = thick_omega();
  return c;
}

}  // namespace

TEST_CASE("heat semigroup") {
  const auto u = random_element(oscillator(), 5.0, 3);
  CHECK(heat_propagate(u, 0.0).coeffs == u.coeffs);
  const double l0 = oscillator()->eigenvalues()[0];
  const SpectralElement one{oscillator(), {1.0}, 5.0};
  CHECK(heat_propagate(one, 1.0 / l0).coeffs[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const auto a = heat_propagate(heat_propagate(u, 0.3), 0.2);
  const auto b = heat_propagate(u, 0.5);
  for (std::size_t k = 0; k < u.coeffs.size(); ++k) CHECK(std::abs(a.coeffs[k] - b.coeffs[k]) <= 1e-14);
  double prev = u.norm();
  for (double t : {0.01, 0.1, 0.5, 2.0}) {
    const double n = heat_propagate(u, t).norm();
    CHECK(n <= prev);
    prev = n;
  }
  CHECK_THROWS_AS(heat_propagate(u, -1.0), DomainError);
}

TEST_CASE("control gramian quadrature") {
  const auto& b = *oscillator();
  const auto K = static_cast<Eigen::Index>(b.count_below(5.0));
  const std::vector<double> eig(b.eigenvalues().begin(), b.eigenvalues().begin() + K);
  for (double T : {1.0, 0.1, 5.0}) {
    const auto full = control_gramian(b, 5.0, IntervalSet::single(-10.0, 10.0), T, 16);
    for (Eigen::Index k = 0; k < K; ++k) {
      const double l = eig[static_cast<std::size_t>(k)];
      CHECK(full(k, k) == doctest::Approx(-std::expm1(-2.0 * l * T) / (2.0 * l)).epsilon(1e-8));
    }
    const auto G = gram_matrix(b, 5.0, thick_omega()).G;
    const auto q = control_gramian(G, eig, T, 16);
    const auto exact = gramian_closed_form(G, eig, T);
    CHECK((q - exact).cwiseAbs().maxCoeff() <= 1e-8 * exact.cwiseAbs().maxCoeff());
    const auto cond = gramian_condition(q);
    CHECK(cond.lambda_min >= -1e-12 * q.norm());
  }
  CHECK(control_gramian(b, 5.0, IntervalSet(), 1.0, 16).cwiseAbs().maxCoeff() == 0.0);
  CHECK(control_gramian(b, 5.0, thick_omega(), 1e-12, 16).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("hum control") {
  ControlConfig cfg = thick_config();
  const SpectralElement zero{oscillator(), std::vector<double>(oscillator()->count_below(5.0), 0.0), 5.0};
  const auto z = synthesize_hum_control(zero, cfg);
  CHECK(z.cost == 0.0);
  CHECK(z.residual == 0.0);
  CHECK(z.q.cwiseAbs().maxCoeff() == 0.0);

  const auto u0 = random_element(oscillator(), 5.0, 1);
  const auto r = synthesize_hum_control(u0, cfg);
  CHECK(r.residual <= 1e-8);
  CHECK(std::isfinite(r.cost));
  CHECK_FALSE(r.condition.flagged);
  // observability bound: cost^2 lambda_min <= ||E(T) b0||^2
  double free2 = 0.0;
  for (std::size_t k = 0; k < u0.coeffs.size(); ++k)
    free2 += std::pow(std::exp(-oscillator()->eigenvalues()[k]) * u0.coeffs[k], 2);
  CHECK(r.cost_squared * r.condition.lambda_min <= free2 * (1.0 + 1e-10));

  std::vector<double> times{0.0, 0.5, 1.0};
  const auto h = control_samples(*oscillator(), r, 1.0, times, cfg.omega);
  CHECK(h.rows() == 3);
  const auto& g = oscillator()->grid();
  for (int i = 0; i < g.n; ++i)
    if (!cfg.omega.contains(g.x(i))) REQUIRE(h.col(i).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single mode on the full interval") {
  ControlConfig cfg;
  cfg.T = 1.0;
  cfg.cutoff = 5.0;
  cfg.omega = IntervalSet::single(-10.0, 10.0);
  const SpectralElement m0{oscillator(), {1.0}, 5.0};
  const auto r = synthesize_hum_control(m0, cfg);
  const double l = oscillator()->eigenvalues()[0];
  const double g = -std::expm1(-2.0 * l) / (2.0 * l);
  CHECK(r.q[0] == doctest::Approx(-std::exp(-l) / g).epsilon(1e-8));
  const double c2 = std::exp(-2.0 * l) * 2.0 * l / -std::expm1(-2.0 * l);
  CHECK(r.cost_squared == doctest::Approx(c2).epsilon(1e-8));
  CHECK(r.residual <= 1e-12);
}

TEST_CASE("observability constant") {
  ControlConfig cfg;
  CHECK(observability_constant(cfg) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  cfg.T = 0.25;
  CHECK(observability_constant(cfg) == doctest::Approx(std::exp(4.0)).epsilon(1e-14));
  cfg.zeta = 2.0;
  try {
    observability_constant(cfg);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()) == "Lebeau-Robbiano exponent must satisfy ζ<2");
  }
  CHECK_THROWS_AS(lebeau_robbiano_schedule(cfg, 1.0), DomainError);
}

TEST_CASE("staged schedule") {
  const auto cfg = thick_config();
  const auto s = lebeau_robbiano_schedule(cfg, 1.0);
  REQUIRE(s.stages.size() >= 2);
  double t = 0.0;
  for (std::size_t j = 0; j < s.stages.size(); ++j) {
    const auto& st = s.stages[j];
    CHECK(st.start == doctest::Approx(t));
    CHECK(st.lambda <= cfg.cutoff);
    t += st.control + st.decay;
  }
  CHECK(t == doctest::Approx(cfg.T).epsilon(1e-15));
  const std::size_t J = s.stages.size() - 1;
  const double lam = std::ldexp(1.0, static_cast<int>(J));
  const double TJ = cfg.T * std::ldexp(1.0, -static_cast<int>(J) - 1);
  CHECK(std::exp(-lam * lam * TJ / 2.0) < 1e-10);
  CHECK(lam >= cfg.cutoff);
  if (J > 0) {
    const double lp = lam / 2.0;
    CHECK_FALSE((std::exp(-lp * lp * TJ) < 1e-10 && lp >= cfg.cutoff));
  }
}

TEST_CASE("staged control") {
  const auto cfg = thick_config();
  const auto u0 = random_element(oscillator(), 5.0, 1);
  const auto r = run_lr_control(u0, cfg);
  CHECK(r.residual <= 1e-6);
  CHECK(r.skipped_stages == 0);

  LrSchedule one;
  one.stages.push_back(LrStage{0.0, cfg.T, 0.0, cfg.cutoff});
  const auto staged = run_lr_control(u0, cfg, one);
  const auto hum = synthesize_hum_control(u0, cfg);
  CHECK(staged.cost == doctest::Approx(hum.cost).epsilon(1e-10));
  CHECK((staged.terminal - hum.terminal).norm() <= 1e-10);

  double prev = 0.0;
  for (double T : {1.0, 0.5, 0.25, 0.125}) {
    ControlConfig c = cfg;
    c.T = T;
    const double cost = run_lr_control(u0, c).cost;
    CHECK(cost > prev);
    prev = cost;
  }
}

TEST_CASE("cost law regressor") {
  ControlConfig cfg = thick_config();
  const auto u0 = random_element(oscillator(), 5.0, 1);
  const std::vector<double> Ts{1.0, 0.5, 0.25, 0.125};
  const auto rep = cost_law_sweep(u0, cfg, Ts);
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    CHECK(rep.regressor[i] == doctest::Approx(1.0 / Ts[i]));
    CHECK(rep.c_obs[i] == doctest::Approx(std::exp(1.0 / Ts[i])));
  }
  CHECK(rep.monotone);
  CHECK(rep.fit.slope > 0.0);
  const std::vector<double> narrow{1.0, 0.8, 0.6, 0.5};
  CHECK_THROWS_AS(cost_law_sweep(u0, cfg, narrow), DomainError);
  CHECK_THROWS_AS(cost_law_sweep(u0, cfg, std::span(Ts).first(3)), DomainError);
}

TEST_CASE("trajectory reaches zero") {
  const auto cfg = thick_config();
  const auto u0 = random_element(oscillator(), 5.0, 2);
  const auto r = synthesize_hum_control(u0, cfg);
  const auto& b = *oscillator();
  const auto K = static_cast<Eigen::Index>(b.count_below(5.0));
  const std::vector<double> eig(b.eigenvalues().begin(), b.eigenvalues().begin() + K);
  Eigen::VectorXd b0 = Eigen::VectorXd::Zero(K);
  for (Eigen::Index k = 0; k < K; ++k) b0[k] = u0.coeffs[static_cast<std::size_t>(k)];
  const std::vector<double> times{0.0, 1.0};
  const auto n = trajectory_norms(gram_matrix(b, 5.0, cfg.omega).G, eig, b0, r.q, 1.0, times);
  CHECK(n[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(n[1] <= 1e-8);
}
