#include "heatlab/spectral_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "heatlab/error.hpp"
#include "heatlab/quadrature.hpp"

namespace heatlab {

GramMatrix gram_matrix(const EigenBasis& basis, double lambda, const IntervalSet& omega) {
  const Grid1D& g = basis.grid();
  const auto K = static_cast<Eigen::Index>(basis.count_below(lambda));
  GramMatrix out;
  out.cutoff = lambda;
  out.omega = omega;
  out.singular = omega.measure_within(g.x_min, g.x_max) <= 0.0;
  const auto w = node_weights(g, omega);
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), g.n);
  const auto phi = basis.modes().leftCols(K);
  out.G = phi.transpose() * wv.asDiagonal() * phi;
  out.G = 0.5 * (out.G + out.G.transpose()).eval();
  return out;
}

BestConstant best_constant(const Eigen::MatrixXd& G) {
  if (G.rows() == 0 || G.rows() != G.cols()) throw DomainError("Gram matrix must be square and nonempty");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolve failed");
  BestConstant b;
  b.lambda_min = es.eigenvalues()(0);
  b.lambda_max = es.eigenvalues()(G.rows() - 1);
  if (b.lambda_min <= 1e-14) {
    b.unobservable = true;
    b.K = std::numeric_limits<double>::infinity();
  } else {
    b.K = 1.0 / std::sqrt(b.lambda_min);
  }
  return b;
}

ScalingFit scaling_sweep(const EigenBasis& basis, std::span<const double> lambdas,
                         const IntervalSet& omega, double zeta_target, bool with_log) {
  if (lambdas.empty()) throw DomainError("λ list must be nonempty");
  ScalingFit fit;
  fit.zeta_target = zeta_target;
  fit.with_log = with_log;
  const double lam_max = *std::max_element(lambdas.begin(), lambdas.end());
  const GramMatrix full = gram_matrix(basis, lam_max, omega);
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> lx;
  std::vector<double> ly;
  for (double lam : lambdas) {
    ScalingPoint pt;
    pt.lambda = lam;
    pt.dimension = basis.count_below(lam);
    if (pt.dimension == 0) throw DomainError("no modes below λ = " + std::to_string(lam));
    const auto d = static_cast<Eigen::Index>(pt.dimension);
    const BestConstant bc = best_constant(full.G.topLeftCorner(d, d));
    pt.lambda_min = bc.lambda_min;
    pt.K = bc.K;
    pt.dropped = bc.unobservable;
    if (pt.dropped) {
      ++fit.dropped;
    } else {
      const double reg = std::pow(lam, zeta_target) * (with_log ? std::log(lam + 1.0) : 1.0);
      xs.push_back(reg);
      ys.push_back(std::log(pt.K));
      const double lk = std::log(pt.K);
      if (lk > 1e-12) {
        lx.push_back(std::log(lam));
        ly.push_back(std::log(lk));
      }
    }
    fit.points.push_back(pt);
  }
  if (xs.size() >= 2) fit.target = linear_fit(xs, ys);
  if (lx.size() >= 2) {
    fit.free = linear_fit(lx, ly);
    fit.zeta_hat = fit.free->slope;
  }
  return fit;
}

AuxRegularReport aux_regular_check(const EigenBasis& basis, std::span<const double> lambdas,
                                   const IntervalSet& omega, double beta1, double beta2) {
  if (!(beta1 > 0.0 && beta2 >= beta1)) throw DomainError("need 0 < beta1 <= beta2");
  AuxRegularReport r;
  r.reference_exponent = beta2 / beta1;
  r.sweep = scaling_sweep(basis, lambdas, omega, r.reference_exponent, false);
  for (double lam : lambdas) {
    const double p = std::pow(lam, r.reference_exponent);
    r.log_reference.push_back(p + p * std::log(lam + 1.0));
  }
  return r;
}

nlohmann::json to_json(const ScalingFit& fit) {
  nlohmann::json j;
  j["zeta_target"] = fit.zeta_target;
  j["with_log"] = fit.with_log;
  j["target_fit"] = {{"slope", fit.target.slope},
                     {"intercept", fit.target.intercept},
                     {"r_squared", fit.target.r_squared},
                     {"rms_residual", fit.target.rms_residual}};
  if (fit.free) {
    j["free_fit"] = {{"zeta_hat", fit.free->slope},
                     {"log_coefficient", fit.free->intercept},
                     {"r_squared", fit.free->r_squared}};
  } else {
    j["free_fit"] = nullptr;
  }
  j["dropped"] = fit.dropped;
  return j;
}

}  // namespace heatlab
