#pragma once

#include <span>
#include <vector>

namespace heatlab {

/// Ordinary least squares y ≈ intercept + slope * x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double rms_residual = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Observed convergence orders log2(e_k / e_{k+1}) for errors under 2x refinement.
std::vector<double> observed_orders(std::span<const double> errors);

}  // namespace heatlab
