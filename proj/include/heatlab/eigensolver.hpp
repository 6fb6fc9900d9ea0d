#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "heatlab/interval_set.hpp"
#include "heatlab/potentials.hpp"
#include "heatlab/tridiagonal.hpp"

namespace heatlab {

/// Uniform grid of n points on [x_min, x_max], endpoints included.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 1.0;
  int n = 3;

  Grid1D() = default;
  Grid1D(double a, double b, int points);

  double h() const { return (x_max - x_min) / (n - 1); }
  double x(int i) const { return x_min + i * h(); }
};

/// Finite-difference H = -d^2/dx^2 + V on the interior nodes of a grid with
/// homogeneous Dirichlet values at both endpoints.
struct Hamiltonian {
  Grid1D grid;
  SymTridiagonal matrix;  // size n - 2
  bool coarse_warning = false;
};

/// Builds the operator. When lambda_max > 0, flags grids with h > pi/(8 lambda_max).
Hamiltonian build_hamiltonian(const Potential& p, const Grid1D& g, double lambda_max = 0.0);

/// Eigenpairs of the discretized H below a cutoff.
///
/// eigenvalues() holds lambda_k^2 ascending; modes() is n x K with column k the
/// grid function phi_k, zero at both endpoints and normalized so that
/// h * sum_i phi_j(x_i) phi_k(x_i) = delta_jk. The first component larger
/// than 1e-8 * max|phi_k| is positive.
class EigenBasis {
 public:
  EigenBasis(Grid1D grid, std::vector<double> eigenvalues, Eigen::MatrixXd modes,
             std::string potential_name);

  const Grid1D& grid() const { return grid_; }
  const std::vector<double>& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& modes() const { return modes_; }
  std::size_t size() const { return eigenvalues_.size(); }
  const std::string& potential_name() const { return potential_name_; }

  /// Number of modes with lambda_k <= lambda.
  std::size_t count_below(double lambda) const;
  double lambda(std::size_t k) const { return std::sqrt(eigenvalues_[k]); }

 private:
  Grid1D grid_;
  std::vector<double> eigenvalues_;
  Eigen::MatrixXd modes_;
  std::string potential_name_;
};

/// All pairs with lambda_k^2 <= lambda_max^2 (lambda_max is a frequency, not
/// its square). An empty basis is returned when none qualify.
EigenBasis eigen_decompose(const Hamiltonian& h, double lambda_max,
                           const std::string& potential_name = "");

/// Element sum_k b_k phi_k of the spectral subspace below `cutoff`.
struct SpectralElement {
  std::shared_ptr<const EigenBasis> basis;
  std::vector<double> coeffs;
  double cutoff = 0.0;

  double norm() const;
  Eigen::VectorXd values() const;
};

/// Seeded random unit element of E_lambda.
SpectralElement random_element(std::shared_ptr<const EigenBasis> basis, double lambda,
                               std::uint64_t seed);

struct BasisOptions {
  double safety_factor = 2.0;
  /// grid spacing target; 0 selects min(pi / (16 lambda), 0.02)
  double spacing = 0.0;
  int max_doublings = 6;
};

struct LocalizationRadius {
  double turning_point = 0.0;
  double radius = 0.0;
  double tail_mass = 0.0;
  int doublings = 0;
  /// the certifying basis, computed on [-2 radius, 2 radius]
  std::shared_ptr<const EigenBasis> basis;
};

/// Radius outside which every mode with lambda_k <= lambda carries mass below
/// tail_tol. Starts at safety_factor times the turning point of the lower bound
/// c3 + (lambda^2 / c1)^{1/beta1} and doubles until certified.
LocalizationRadius localization_radius(const Potential& p, double lambda, double tail_tol,
                                       const BasisOptions& opts = {});

/// Largest mass outside [-r, r] among the modes with lambda_k <= lambda.
double tail_mass(const EigenBasis& basis, double lambda, double r);

/// Convenience: basis for V on [-R, R] with the default spacing rule.
EigenBasis solve_on_interval(const Potential& p, double R, double lambda,
                             const BasisOptions& opts = {});

struct LocalizationCheck {
  double max_ratio = 0.0;
  std::size_t samples = 0;
  std::size_t dimension = 0;
};

/// max over seeded random unit elements of ||phi|| / ||phi||_{[-r, r]}.
LocalizationCheck check_localization(const EigenBasis& basis, double lambda, double r,
                                     std::size_t samples = 100, std::uint64_t seed = 1);

struct EigenCount {
  std::size_t count = 0;
  double reference = 0.0;  // (lambda + 1)^{(2 + 3 beta1) / beta1}
  double ratio = 0.0;
};

EigenCount count_eigenvalues(const EigenBasis& basis, double lambda, double beta1);

struct CaccioppoliResult {
  double ratio = 0.0;
  bool degenerate = false;
};

/// ||D phi||^2_{I_r(x)} / [(1 + 8/r^2)(1 + eig) ||phi||^2_{I_2r(x)}] for a grid function.
CaccioppoliResult caccioppoli_ratio(const Grid1D& grid, std::span<const double> values,
                                    double eigenvalue, double x, double r);
CaccioppoliResult caccioppoli_check(const EigenBasis& basis, std::size_t k, double x, double r);

/// max |Gram - I| of the basis in the discrete L2 inner product.
double orthonormality_defect(const EigenBasis& basis);
/// max_k ||H phi_k - lambda_k^2 phi_k||_2 / lambda_k^2 (discrete L2 norm).
double max_relative_residual(const EigenBasis& basis, const Hamiltonian& h);

/// Writes eigenvalues.csv, modes.csv and metadata.json into dir.
void export_basis(const EigenBasis& basis, const std::string& dir, const nlohmann::json& meta);

}  // namespace heatlab
