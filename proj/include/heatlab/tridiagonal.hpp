#pragma once

#include <span>
#include <vector>

namespace heatlab {

/// Real symmetric tridiagonal matrix: diag[0..n), off[0..n-1).
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;

  std::size_t size() const { return diag.size(); }
  /// y = T x
  void apply(std::span<const double> x, std::span<double> y) const;
  /// max row sum of |entries|
  double norm_inf() const;
};

/// Number of eigenvalues strictly less than `shift` (Sturm count via LDL^T).
std::size_t sturm_count(const SymTridiagonal& t, double shift);

/// Eigenvalues with index in [first, last) in ascending order, by bisection.
std::vector<double> bisect_eigenvalues(const SymTridiagonal& t, std::size_t first,
                                       std::size_t last);

/// Eigenvectors for the given (ascending) eigenvalues by inverse iteration,
/// re-orthogonalized within clusters. Each vector has unit Euclidean norm.
std::vector<std::vector<double>> inverse_iteration(const SymTridiagonal& t,
                                                   std::span<const double> eigenvalues);

/// Solves the (possibly nonsymmetric) tridiagonal system sub/diag/super x = rhs
/// by the Thomas algorithm. Intended for diagonally dominant systems.
std::vector<double> thomas_solve(std::span<const double> sub, std::span<const double> diag,
                                 std::span<const double> super, std::span<const double> rhs);

}  // namespace heatlab
