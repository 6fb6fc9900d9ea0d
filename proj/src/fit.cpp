#include "heatlab/fit.hpp"

#include <cmath>

#include "heatlab/error.hpp"

namespace heatlab {

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw DomainError("linear_fit: size mismatch");
  if (n < 2) throw DomainError("linear_fit: need at least two points");
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("linear_fit: regressor is constant");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss_res += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  f.rms_residual = std::sqrt(ss_res / static_cast<double>(n));
  return f;
}

std::vector<double> observed_orders(std::span<const double> errors) {
  std::vector<double> out;
  for (std::size_t k = 0; k + 1 < errors.size(); ++k)
    out.push_back(std::log2(errors[k] / errors[k + 1]));
  return out;
}

}  // namespace heatlab
