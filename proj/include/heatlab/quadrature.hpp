#pragma once

#include <vector>

#include "heatlab/eigensolver.hpp"
#include "heatlab/interval_set.hpp"

namespace heatlab {

/// Node weights of the trapezoid rule restricted to omega: each cell
/// [x_i, x_{i+1}] contributes theta * h / 2 to both end nodes, theta being the
/// fraction of the cell covered by omega.
std::vector<double> node_weights(const Grid1D& grid, const IntervalSet& omega);

/// Full trapezoid weights on the grid.
std::vector<double> trapezoid_weights(const Grid1D& grid);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int q);

}  // namespace heatlab
