#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "heatlab/eigensolver.hpp"
#include "heatlab/fit.hpp"
#include "heatlab/interval_set.hpp"

namespace heatlab {

struct ControlConfig {
  double T = 1.0;
  double cutoff = 1.0;  // lambda: modes with lambda_k <= cutoff are controlled
  IntervalSet omega;
  /// Gauss-Legendre nodes per time panel
  int m = 16;
  double alpha0 = 1.0;
  double alpha1 = 1.0;
  double zeta = 1.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double kappa3 = 1.0;
  /// first Lebeau-Robbiano cutoff; 0 selects lambda_0 of the basis
  double lambda_base = 0.0;

  void validate() const;
};

/// Coefficients b_k -> e^{-lambda_k^2 t} b_k.
SpectralElement heat_propagate(const SpectralElement& u, double t);

/// Lambda_T = int_0^T E(T - t) G E(T - t) dt by composite Gauss-Legendre on
/// panels [0, s_1], [s_1, 1.5 s_1], ... in s = T - t, with s_1 = min(T, 1 / mu_max).
Eigen::MatrixXd control_gramian(const EigenBasis& basis, double lambda, const IntervalSet& omega,
                                double T, int m);
/// Same from a precomputed Gram matrix and eigenvalues lambda_k^2.
Eigen::MatrixXd control_gramian(const Eigen::MatrixXd& G, std::span<const double> eig, double T,
                                int m);

/// Exact G_jk (1 - e^{-mu_jk T}) / mu_jk, mu_jk = lambda_j^2 + lambda_k^2.
Eigen::MatrixXd gramian_closed_form(const Eigen::MatrixXd& G, std::span<const double> eig,
                                    double T);

struct GramianCondition {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition = 0.0;
  /// lambda_min <= 1e-13 ||Lambda_T||
  bool flagged = false;
};

GramianCondition gramian_condition(const Eigen::MatrixXd& gramian);

struct ControlResult {
  /// HUM multipliers: h(t) = 1_Omega sum_k (E(T - t) q)_k phi_k
  Eigen::VectorXd q;
  double cost = 0.0;
  double cost_squared = 0.0;
  /// state coefficients at T from exact Duhamel integrals
  Eigen::VectorXd terminal;
  double residual = 0.0;  // ||u(T)|| / ||u_0||
  GramianCondition condition;
  std::size_t stages = 1;
  std::size_t skipped_stages = 0;
};

/// Minimal-norm null control of the truncated system.
ControlResult synthesize_hum_control(const SpectralElement& u0, const ControlConfig& cfg);

/// Control samples h(t, x) at the grid nodes; zero outside omega.
Eigen::MatrixXd control_samples(const EigenBasis& basis, const ControlResult& r, double T,
                                std::span<const double> times, const IntervalSet& omega);

/// ||u(t)|| for the single-shot HUM trajectory at the given times.
std::vector<double> trajectory_norms(const Eigen::MatrixXd& G, std::span<const double> eig,
                                     const Eigen::VectorXd& b0, const Eigen::VectorXd& q, double T,
                                     std::span<const double> times);

/// One stage: control for `control` time units with cutoff `lambda`, then free decay.
struct LrStage {
  double start = 0.0;
  double control = 0.0;
  double decay = 0.0;
  double lambda = 0.0;
};

struct LrSchedule {
  std::vector<LrStage> stages;
  double c_obs = 0.0;
};

/// kappa1 alpha0^kappa2 exp(kappa3 alpha1^{2/(2-zeta)} T^{-zeta/(2-zeta)})
double observability_constant(const ControlConfig& cfg);

/// Stages T_j = T 2^{-j-1}, lambda_j = min(2^j lambda_base, cutoff), j = 0..J,
/// J the smallest index with both e^{-(2^J lambda_base)^2 T_J / 2} < 1e-10 and
/// 2^J lambda_base >= cutoff. Each stage controls on the first half of its window;
/// the last stage also absorbs the leftover time T 2^{-J-1} as free decay.
LrSchedule lebeau_robbiano_schedule(const ControlConfig& cfg, double lambda_base);

/// Executes the schedule on the truncation at cfg.cutoff.
ControlResult run_lr_control(const SpectralElement& u0, const ControlConfig& cfg,
                             const LrSchedule& schedule);
ControlResult run_lr_control(const SpectralElement& u0, const ControlConfig& cfg);

struct CostLawReport {
  std::vector<double> T;
  std::vector<double> cost;
  std::vector<double> c_obs;
  std::vector<double> regressor;  // T^{-zeta/(2-zeta)}
  LinearFit fit;                  // log cost against the regressor
  bool monotone = false;          // cost increases as T decreases
};

CostLawReport cost_law_sweep(const SpectralElement& u0, const ControlConfig& cfg,
                             std::span<const double> T_list, bool staged = false);

}  // namespace heatlab
