#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "heatlab/eigensolver.hpp"
#include "heatlab/interval_set.hpp"
#include "heatlab/potentials.hpp"

namespace heatlab {

enum class LiftKind { Cosh, Sinh };

std::string to_string(LiftKind k);

/// Phi(x, y) = sum_k b_k w_k(y) phi_k(x) with w_k = cosh(lambda_k y) or
/// sinh(lambda_k y) / lambda_k, sampled on x nodes of the basis grid and a
/// y grid symmetric about 0.
struct LiftedField {
  LiftKind kind = LiftKind::Cosh;
  std::vector<double> x;
  std::vector<double> y;  // odd count, y[m/2] == 0
  Eigen::MatrixXd values;  // values(i, j) = Phi(x[i], y[j])
  double hx = 0.0;
  double hy = 0.0;

  std::size_t center_row() const { return y.size() / 2; }
};

/// Builds the lift on m points in [-y_max, y_max]. Rows with y < 0 are mirror
/// copies, so parity is exact. `x_window` restricts to the basis nodes inside it.
LiftedField lift(const SpectralElement& element, double y_max, int m, LiftKind kind,
                 std::optional<Interval> x_window = std::nullopt);

struct ResidualReport {
  double absolute = 0.0;  // discrete L2 norm over interior points
  double relative = 0.0;
  bool degenerate = false;  // normalizing norm vanished; relative set to 0
};

/// Interior residual of -Delta_h Phi + V Phi with the 5-point Laplacian,
/// relative to ||V Phi||.
ResidualReport residual_nondivergence(const LiftedField& field, const Potential& p);

/// Positive solution of -phi'' + V phi = 0 on [a, b] with
/// phi(a) = phi(b) = exp((b - a) sup V^{1/2}).
struct AuxOdeSolution {
  Grid1D grid;
  std::vector<double> values;
  double v_sup = 0.0;
  double boundary_value = 1.0;

  double upper_bound() const { return boundary_value; }
  /// Value at x: the stored sample when x is a node, linear interpolation otherwise.
  double at(double x) const;
};

AuxOdeSolution solve_aux_ode(const Potential& p, double a, double b, int n);

/// Residual of div(phi_aux^2 grad(Phi / phi_aux)) in flux form with arithmetic
/// face averages of phi_aux^2, relative to ||phi_aux^2 d_yy(Phi / phi_aux)||.
ResidualReport residual_divergence(const LiftedField& field, const AuxOdeSolution& aux);

/// Field on the unit geometry xi = a (x - x_n), eta = a y, restricted to
/// xi in [-2, 3], |eta| <= 5/2.
struct RescaledField {
  std::vector<double> xi;
  std::vector<double> eta;
  Eigen::MatrixXd values;
  double scale = 1.0;
  /// sup of a^{-2} V(x_n + xi / a) over xi in [-2, 3]
  double v_tilde_sup = 0.0;
};

RescaledField rescale_to_unit(const LiftedField& field, const Potential& p, Interval piece,
                              double a);

/// sup over xi in [xi_lo, xi_hi] of |I|^2 V(lo + xi |I|) for the piece I = [lo, hi].
double rescaled_potential_sup(const Potential& p, Interval piece, double xi_lo = -2.0,
                              double xi_hi = 3.0, std::size_t samples = 2001);

/// ||Phi||^2_{H^1} over the strip |y| <= rho by cell-centred quadrature.
/// rho must be a y grid line.
double h1_norm_squared(const LiftedField& field, double rho);

/// field.csv (x, y, Phi) and metadata.json.
void export_field(const LiftedField& field, const std::string& dir, const nlohmann::json& meta);

}  // namespace heatlab
