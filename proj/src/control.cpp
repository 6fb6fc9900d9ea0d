#include "heatlab/control.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "heatlab/error.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/spectral_estimator.hpp"

namespace heatlab {

void ControlConfig::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("T must be positive");
  if (!(cutoff > 0.0)) throw DomainError("cutoff λ must be positive");
  if (!(zeta > 0.0)) throw DomainError("ζ must be positive");
  if (!(zeta < 2.0)) throw DomainError("Lebeau-Robbiano exponent must satisfy ζ<2");
  if (m < 8) throw DomainError("time quadrature needs m >= 8 nodes");
  if (!(alpha0 >= 1.0)) throw DomainError("α0 must be at least 1");
  if (!(alpha1 >= 0.0)) throw DomainError("α1 must be nonnegative");
  if (!(kappa1 > 0.0 && kappa2 > 0.0 && kappa3 > 0.0)) throw DomainError("κ1, κ2, κ3 must be positive");
  if (lambda_base < 0.0) throw DomainError("lambda_base must be nonnegative");
}

SpectralElement heat_propagate(const SpectralElement& u, double t) {
  if (!(t >= 0.0)) throw DomainError("propagation time must be nonnegative");
  SpectralElement out = u;
  const auto& eig = u.basis->eigenvalues();
  for (std::size_t k = 0; k < out.coeffs.size(); ++k) out.coeffs[k] *= std::exp(-eig[k] * t);
  return out;
}

Eigen::MatrixXd control_gramian(const Eigen::MatrixXd& G, std::span<const double> eig, double T,
                                int m) {
  if (!(T >= 0.0)) throw DomainError("T must be nonnegative");
  if (m < 1) throw DomainError("need at least one quadrature node");
  const auto K = static_cast<Eigen::Index>(eig.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(K, K);
  if (K == 0 || T == 0.0) return M;
  const double mu_max = 2.0 * *std::max_element(eig.begin(), eig.end());
  const GaussRule rule = gauss_legendre(m);
  Eigen::VectorXd e(K);
  auto panel = [&](double lo, double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = mid + half * rule.nodes[q];
      for (Eigen::Index k = 0; k < K; ++k) e[k] = std::exp(-eig[static_cast<std::size_t>(k)] * s);
      M.noalias() += (half * rule.weights[q]) * e * e.transpose();
    }
  };
  double lo = 0.0;
  double hi = std::min(T, mu_max > 0.0 ? 1.0 / mu_max : T);
  while (true) {
    panel(lo, hi);
    if (hi >= T) break;
    lo = hi;
    hi = std::min(T, 1.5 * hi);
  }
  Eigen::MatrixXd L = G.cwiseProduct(M);
  return 0.5 * (L + L.transpose());
}

Eigen::MatrixXd control_gramian(const EigenBasis& basis, double lambda, const IntervalSet& omega,
                                double T, int m) {
  const GramMatrix g = gram_matrix(basis, lambda, omega);
  const std::span<const double> eig(basis.eigenvalues().data(),
                                    static_cast<std::size_t>(g.G.rows()));
  return control_gramian(g.G, eig, T, m);
}

namespace {

// (1 - e^{-mu t}) / mu, stable for small mu t
double decay_integral(double mu, double t) {
  if (mu * t < 1e-8) return t * (1.0 - 0.5 * mu * t);
  return -std::expm1(-mu * t) / mu;
}

}  // namespace

Eigen::MatrixXd gramian_closed_form(const Eigen::MatrixXd& G, std::span<const double> eig,
                                    double T) {
  const auto K = static_cast<Eigen::Index>(eig.size());
  Eigen::MatrixXd L(K, K);
  for (Eigen::Index j = 0; j < K; ++j)
    for (Eigen::Index k = 0; k < K; ++k)
      L(j, k) = G(j, k) * decay_integral(eig[static_cast<std::size_t>(j)] +
                                             eig[static_cast<std::size_t>(k)],
                                         T);
  return L;
}

GramianCondition gramian_condition(const Eigen::MatrixXd& gramian) {
  GramianCondition c;
  if (gramian.rows() == 0) return c;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gramian, Eigen::EigenvaluesOnly);
  c.lambda_min = es.eigenvalues()(0);
  c.lambda_max = es.eigenvalues()(gramian.rows() - 1);
  c.condition = c.lambda_min > 0.0 ? c.lambda_max / c.lambda_min
                                   : std::numeric_limits<double>::infinity();
  c.flagged = c.lambda_min <= 1e-13 * std::abs(c.lambda_max);
  return c;
}

namespace {

struct Truncation {
  Eigen::MatrixXd G;
  std::vector<double> eig;
  Eigen::VectorXd b0;
};

Truncation truncate(const SpectralElement& u0, const ControlConfig& cfg) {
  cfg.validate();
  const EigenBasis& basis = *u0.basis;
  const std::size_t K = basis.count_below(cfg.cutoff);
  if (K == 0) throw DomainError("no modes below the control cutoff");
  if (u0.coeffs.size() > K) throw DomainError("initial state has modes above the control cutoff");
  Truncation t;
  t.G = gram_matrix(basis, cfg.cutoff, cfg.omega).G;
  t.eig.assign(basis.eigenvalues().begin(),
               basis.eigenvalues().begin() + static_cast<std::ptrdiff_t>(K));
  t.b0 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < u0.coeffs.size(); ++k)
    t.b0[static_cast<Eigen::Index>(k)] = u0.coeffs[k];
  return t;
}

struct StageOutcome {
  Eigen::VectorXd q;
  double cost_squared = 0.0;
  GramianCondition condition;
};

// HUM on the first `active` modes over a window of length tau; returns the
// multipliers and advances `state` (all modes) to the end of the window.
StageOutcome control_stage(const Eigen::MatrixXd& G, std::span<const double> eig,
                           Eigen::VectorXd& state, Eigen::Index active, double tau, int m,
                           bool skip_flagged) {
  const auto K = static_cast<Eigen::Index>(eig.size());
  const auto Gs = G.topLeftCorner(active, active);
  const std::span<const double> es = eig.subspan(0, static_cast<std::size_t>(active));
  const Eigen::MatrixXd lam = control_gramian(Gs, es, tau, m);
  StageOutcome out;
  out.condition = gramian_condition(lam);
  out.q = Eigen::VectorXd::Zero(active);

  Eigen::VectorXd free(K);
  for (Eigen::Index k = 0; k < K; ++k) free[k] = std::exp(-eig[static_cast<std::size_t>(k)] * tau) * state[k];
  if (!(out.condition.flagged && skip_flagged) && state.head(active).squaredNorm() > 0.0) {
    const Eigen::VectorXd rhs = -free.head(active);
    out.q = lam.ldlt().solve(rhs);
    out.cost_squared = out.q.dot(lam * out.q);
  }
  // exact Duhamel: u_j(tau) = e^{-l_j tau} b_j + sum_k G_jk q_k (1 - e^{-mu tau}) / mu
  for (Eigen::Index j = 0; j < K; ++j) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < active; ++k) {
      if (out.q[k] == 0.0) continue;
      s += G(j, k) * out.q[k] *
           decay_integral(eig[static_cast<std::size_t>(j)] + eig[static_cast<std::size_t>(k)], tau);
    }
    state[j] = free[j] + s;
  }
  return out;
}

}  // namespace

ControlResult synthesize_hum_control(const SpectralElement& u0, const ControlConfig& cfg) {
  const Truncation t = truncate(u0, cfg);
  ControlResult r;
  r.terminal = t.b0;
  const StageOutcome s = control_stage(t.G, t.eig, r.terminal,
                                       static_cast<Eigen::Index>(t.eig.size()), cfg.T, cfg.m, false);
  r.q = s.q;
  r.cost_squared = s.cost_squared;
  r.cost = std::sqrt(std::max(s.cost_squared, 0.0));
  r.condition = s.condition;
  const double n0 = t.b0.norm();
  r.residual = n0 > 0.0 ? r.terminal.norm() / n0 : 0.0;
  return r;
}

Eigen::MatrixXd control_samples(const EigenBasis& basis, const ControlResult& r, double T,
                                std::span<const double> times, const IntervalSet& omega) {
  const Grid1D& g = basis.grid();
  const auto K = r.q.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(times.size()), g.n);
  std::vector<bool> inside(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) inside[static_cast<std::size_t>(i)] = omega.contains(g.x(i));
  const auto phi = basis.modes().leftCols(K);
  Eigen::VectorXd c(K);
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    for (Eigen::Index k = 0; k < K; ++k)
      c[k] = std::exp(-basis.eigenvalues()[static_cast<std::size_t>(k)] * (T - times[ti])) * r.q[k];
    const Eigen::VectorXd h = phi * c;
    for (int i = 0; i < g.n; ++i)
      if (inside[static_cast<std::size_t>(i)]) out(static_cast<Eigen::Index>(ti), i) = h[i];
  }
  return out;
}

std::vector<double> trajectory_norms(const Eigen::MatrixXd& G, std::span<const double> eig,
                                     const Eigen::VectorXd& b0, const Eigen::VectorXd& q, double T,
                                     std::span<const double> times) {
  const auto K = b0.size();
  std::vector<double> out;
  for (double t : times) {
    Eigen::VectorXd u(K);
    for (Eigen::Index j = 0; j < K; ++j) {
      const double lj = eig[static_cast<std::size_t>(j)];
      double s = std::exp(-lj * t) * b0[j];
      for (Eigen::Index k = 0; k < q.size(); ++k) {
        const double lk = eig[static_cast<std::size_t>(k)];
        // int_0^t e^{-lj (t - s)} e^{-lk (T - s)} ds
        s += G(j, k) * q[k] * std::exp(-lk * (T - t)) * decay_integral(lj + lk, t);
      }
      u[j] = s;
    }
    out.push_back(u.norm());
  }
  return out;
}

double observability_constant(const ControlConfig& cfg) {
  if (!(cfg.zeta > 0.0 && cfg.zeta < 2.0))
    throw DomainError("Lebeau-Robbiano exponent must satisfy ζ<2");
  const double z = cfg.zeta;
  return cfg.kappa1 * std::pow(cfg.alpha0, cfg.kappa2) *
         std::exp(cfg.kappa3 * std::pow(cfg.alpha1, 2.0 / (2.0 - z)) * std::pow(cfg.T, -z / (2.0 - z)));
}

LrSchedule lebeau_robbiano_schedule(const ControlConfig& cfg, double lambda_base) {
  cfg.validate();
  if (!(lambda_base > 0.0)) throw DomainError("lambda_base must be positive");
  LrSchedule s;
  s.c_obs = observability_constant(cfg);
  for (int j = 0; j < 64; ++j) {
    const double Tj = cfg.T * std::ldexp(1.0, -j - 1);
    const double lam = std::ldexp(lambda_base, j);
    LrStage st;
    st.start = cfg.T - 2.0 * Tj;
    st.control = 0.5 * Tj;
    st.decay = 0.5 * Tj;
    st.lambda = std::min(lam, cfg.cutoff);
    s.stages.push_back(st);
    if (std::exp(-lam * lam * Tj / 2.0) < 1e-10 && lam >= cfg.cutoff) {
      s.stages.back().decay += Tj;
      return s;
    }
  }
  throw NumericalError("Lebeau-Robbiano schedule did not terminate");
}

ControlResult run_lr_control(const SpectralElement& u0, const ControlConfig& cfg,
                             const LrSchedule& schedule) {
  const Truncation t = truncate(u0, cfg);
  const EigenBasis& basis = *u0.basis;
  ControlResult r;
  r.terminal = t.b0;
  r.stages = schedule.stages.size();
  r.condition.lambda_min = std::numeric_limits<double>::infinity();
  const auto K = static_cast<Eigen::Index>(t.eig.size());
  for (const LrStage& st : schedule.stages) {
    const auto active = std::min<Eigen::Index>(
        K, std::max<Eigen::Index>(1, static_cast<Eigen::Index>(basis.count_below(st.lambda))));
    const StageOutcome o = control_stage(t.G, t.eig, r.terminal, active, st.control, cfg.m, true);
    if (o.condition.flagged) ++r.skipped_stages;
    r.cost_squared += o.cost_squared;
    if (o.condition.lambda_min < r.condition.lambda_min) r.condition = o.condition;
    if (st.decay > 0.0)
      for (Eigen::Index k = 0; k < K; ++k)
        r.terminal[k] *= std::exp(-t.eig[static_cast<std::size_t>(k)] * st.decay);
    r.q = o.q;
  }
  r.cost = std::sqrt(std::max(r.cost_squared, 0.0));
  const double n0 = t.b0.norm();
  r.residual = n0 > 0.0 ? r.terminal.norm() / n0 : 0.0;
  return r;
}

ControlResult run_lr_control(const SpectralElement& u0, const ControlConfig& cfg) {
  const double base = cfg.lambda_base > 0.0 ? cfg.lambda_base : u0.basis->lambda(0);
  return run_lr_control(u0, cfg, lebeau_robbiano_schedule(cfg, base));
}

CostLawReport cost_law_sweep(const SpectralElement& u0, const ControlConfig& cfg,
                             std::span<const double> T_list, bool staged) {
  if (T_list.size() < 4) throw DomainError("cost law needs at least four horizons");
  const auto [tmin, tmax] = std::minmax_element(T_list.begin(), T_list.end());
  if (!(*tmin > 0.0) || *tmax < 8.0 * *tmin)
    throw DomainError("cost law horizons must span at least a factor of 8");
  CostLawReport rep;
  std::vector<double> logc;
  for (double T : T_list) {
    ControlConfig c = cfg;
    c.T = T;
    const ControlResult r = staged ? run_lr_control(u0, c) : synthesize_hum_control(u0, c);
    rep.T.push_back(T);
    rep.cost.push_back(r.cost);
    rep.c_obs.push_back(observability_constant(c));
    rep.regressor.push_back(std::pow(T, -c.zeta / (2.0 - c.zeta)));
    logc.push_back(std::log(r.cost));
  }
  rep.fit = linear_fit(rep.regressor, logc);
  std::vector<std::size_t> order(T_list.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rep.T[a] > rep.T[b]; });
  rep.monotone = true;
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    if (!(rep.cost[order[i + 1]] > rep.cost[order[i]])) rep.monotone = false;
  return rep;
}

}  // namespace heatlab
