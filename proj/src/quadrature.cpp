#include "heatlab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "heatlab/error.hpp"

namespace heatlab {

std::vector<double> node_weights(const Grid1D& grid, const IntervalSet& omega) {
  const int n = grid.n;
  const double h = grid.h();
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const double a = grid.x(i);
    const double b = grid.x(i + 1);
    const double overlap = omega.measure_within(a, b);
    if (overlap <= 0.0) continue;
    const double theta = overlap >= b - a ? 1.0 : overlap / (b - a);
    w[static_cast<std::size_t>(i)] += 0.5 * theta * h;
    w[static_cast<std::size_t>(i) + 1] += 0.5 * theta * h;
  }
  return w;
}

std::vector<double> trapezoid_weights(const Grid1D& grid) {
  return node_weights(grid, IntervalSet::single(grid.x_min, grid.x_max));
}

GaussRule gauss_legendre(int q) {
  if (q < 1) throw DomainError("Gauss-Legendre rule needs q >= 1");
  GaussRule r;
  r.nodes.resize(static_cast<std::size_t>(q));
  r.weights.resize(static_cast<std::size_t>(q));
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= q; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = q * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute the derivative at the converged node
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= q; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = q * (x * p1 - p0) / (x * x - 1.0);
    // ascending order
    r.nodes[static_cast<std::size_t>(q - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(q - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace heatlab
