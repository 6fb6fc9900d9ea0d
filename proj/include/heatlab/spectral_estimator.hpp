#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "heatlab/eigensolver.hpp"
#include "heatlab/fit.hpp"
#include "heatlab/interval_set.hpp"

namespace heatlab {

/// G_jk = integral over omega of phi_j phi_k for the modes with lambda_k <= cutoff.
struct GramMatrix {
  double cutoff = 0.0;
  IntervalSet omega;
  Eigen::MatrixXd G;
  /// omega does not meet the truncation
  bool singular = false;
};

/// Trapezoid quadrature with partial cells weighted by their overlap with omega.
/// Parts of omega outside the truncation carry no mass and are ignored.
GramMatrix gram_matrix(const EigenBasis& basis, double lambda, const IntervalSet& omega);

struct BestConstant {
  double K = 1.0;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  /// lambda_min <= 1e-14: K is +infinity
  bool unobservable = false;
};

/// K = lambda_min(G)^{-1/2}, the optimal constant in ||phi|| <= K ||phi||_omega
/// on the discrete subspace.
BestConstant best_constant(const Eigen::MatrixXd& G);

struct ScalingPoint {
  double lambda = 0.0;
  std::size_t dimension = 0;
  double lambda_min = 0.0;
  double K = 0.0;
  bool dropped = false;
};

struct ScalingFit {
  std::vector<ScalingPoint> points;
  double zeta_target = 1.0;
  bool with_log = false;
  /// log K against lambda^zeta_target (times log(lambda + 1) if with_log)
  LinearFit target;
  /// log log K against log lambda; absent when fewer than two K exceed 1
  std::optional<LinearFit> free;
  std::optional<double> zeta_hat;
  std::size_t dropped = 0;
};

/// Sweep over lambda values using principal subspaces of one basis, so the
/// interlacing property holds by construction.
ScalingFit scaling_sweep(const EigenBasis& basis, std::span<const double> lambdas,
                         const IntervalSet& omega, double zeta_target, bool with_log);

struct AuxRegularReport {
  ScalingFit sweep;
  double reference_exponent = 0.0;  // beta2 / beta1
  /// log of e^{lambda^e + lambda^e log(lambda + 1)} per lambda (constant C = 1)
  std::vector<double> log_reference;
};

AuxRegularReport aux_regular_check(const EigenBasis& basis, std::span<const double> lambdas,
                                   const IntervalSet& omega, double beta1, double beta2);

nlohmann::json to_json(const ScalingFit& fit);

}  // namespace heatlab
