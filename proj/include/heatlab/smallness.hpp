#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "heatlab/eigensolver.hpp"
#include "heatlab/interval_set.hpp"
#include "heatlab/thick_sets.hpp"

namespace heatlab {

/// Three-region record for one lifted field.
struct SmallnessSample {
  double sup_inner = 0.0;
  double sup_omega = 0.0;
  double sup_outer = 0.0;
  double omega_measure = 0.0;  // |omega| on the unit scale
  double ellipticity = 0.0;    // Lambda proxy
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

/// Physical placement of the unit geometry: the piece [x_start, x_start + length]
/// plays the role of [0, 1]. Regions are D1 = piece x [-l/2, l/2] and
/// D2 = [x_start - l, x_start + 2l] x [-3l/2, 3l/2]; omega = x_start + l * omega_line
/// on the line y = 0.
struct SmallnessGeometry {
  double x_start = 0.0;
  double length = 1.0;
  /// y rows per half-length l/2; the lift uses 6 q + 1 rows on [-3l/2, 3l/2]
  int rows_per_half = 8;
};

/// Lambda proxy exp(sqrt(sup V~)) with V~ = l^2 sup V over [x_start - 2l, x_start + 3l].
double ellipticity_proxy(const Potential& p, const SmallnessGeometry& geom);

/// n_random seeded cosh lifts per lambda. Sample i (counting across all lambdas)
/// uses seed + i. Sups are over the piecewise-linear interpolant in x on the
/// y rows inside each region, so sup_omega <= sup_inner <= sup_outer exactly.
std::vector<SmallnessSample> collect_samples(std::shared_ptr<const EigenBasis> basis,
                                             const Potential& p, std::span<const double> lambdas,
                                             const IntervalSet& omega_line,
                                             const SmallnessGeometry& geom, std::size_t n_random,
                                             std::uint64_t seed);

struct AlphaBand {
  double alpha_lo = 0.0;
  double alpha_hi = 0.0;
  double c_lo = 0.0;
  double c_hi = 0.0;
};

/// alpha in [e^{-d2 L^2}, e^{-d1 L^2}] / |log w|^2 and C in [e^{d1 L^2}, e^{d2 L^2}].
AlphaBand theoretical_band(double Lambda, double omega_measure, double d1, double d2);

struct SmallnessReport {
  double alpha = 0.0;
  double log_c = 0.0;
  double c = 1.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  /// per-sample slack log C + alpha log sup_omega + (1 - alpha) log sup_outer - log sup_inner
  std::vector<double> slack;
  bool degenerate = false;
  bool infeasible = false;
  /// hull slope fell outside (0, 1] and was clamped
  bool clamped = false;
  std::optional<AlphaBand> band;
};

/// Smallest log C for which every sample satisfies the inequality at this alpha.
double minimal_log_constant(std::span<const SmallnessSample> samples, double alpha);

/// Supporting-line fit of log(sup_inner / sup_outer) >= ... in the variables
/// u = log(sup_outer / sup_omega), v = log(sup_outer / sup_inner): every feasible
/// (alpha, C) has log C >= max_i(alpha u_i - v_i). The returned alpha is the slope
/// of the lower convex hull of (u_i, v_i) at the mean of u, which minimizes the
/// mean slack among feasible lines; C = max(1, e^{c(alpha)}).
SmallnessReport fit_alpha(std::span<const SmallnessSample> samples);

/// Lower bound (1/d) / |log gamma_n|^2 and scale a_n = 1 / |I_n|.
struct PieceConstants {
  double alpha_lower = 0.0;
  double a = 0.0;
};
PieceConstants piece_constants(const Partition& partition, int n, double gamma_n,
                                       double d);

/// Reference curve exp(d exp(d C0^{1/2})).
double smallness_constant_reference(double d, double c0);

nlohmann::json to_json(const SmallnessReport& r);

}  // namespace heatlab
