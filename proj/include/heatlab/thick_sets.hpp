#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "heatlab/interval_set.hpp"

namespace heatlab {

/// rho_s(x) = <x>^{-s}
struct PowerRho {
  double s;
};
/// rho(x) = min{(R log log<x> - 1/R)^p <x>^{-beta2/2}, 1}, p = 1 or 1/2.
struct LogLogRho {
  double R;
  double beta2;
  bool sqrt_factor = false;
};
/// Unit windows [x, x + L] with exponent <x/L>^tau (decaying-density sets).
struct UnitRho {};

using RhoKind = std::variant<PowerRho, LogLogRho, UnitRho>;

struct ThicknessProfile {
  RhoKind rho = PowerRho{0.0};
  double gamma = 0.5;
  double L = 1.0;
  double tau = 0.0;

  void validate() const;
  /// Window used by the pointwise density condition at x. Empty (lo == hi)
  /// when the loglog profile is degenerate at x.
  Interval window(double x) const;
  /// Required density gamma^{<x>^tau} (gamma^{<x/L>^tau} for the unit kind).
  double required_density(double x) const;
  bool degenerate_at(double x) const;
};

/// Symmetric partition from x_0 = 0, x_1 = L, x_{n+1} = x_n + L x_n^{-s}.
///
/// Pieces are I_0 = [-L, L], I_n = [x_n, x_{n+1}] and I_{-n} = -I_n for
/// 1 <= n <= N. Nothing outside [-x_{N+1}, x_{N+1}] is described.
class Partition {
 public:
  Partition(double L, double s, std::vector<double> centers);

  double L() const { return L_; }
  double s() const { return s_; }
  int pieces_per_side() const { return static_cast<int>(centers_.size()) - 2; }
  /// x_0 .. x_{N+1}
  const std::vector<double>& centers() const { return centers_; }

  Interval piece(int n) const;
  /// x_{|n|}, the point whose bracket sets the required density of piece n.
  double anchor(int n) const;
  Interval covered_range() const;

 private:
  double L_;
  double s_;
  std::vector<double> centers_;
};

Partition build_partition(double L, double s, int N);

/// r_n = x_n / ((s+1) L n)^{1/(s+1)} for n = 1..N.
std::vector<double> partition_asymptotics(const Partition& p);

struct PointCheck {
  double x;
  double ratio;     // |Omega ∩ window| / |window|
  double required;  // gamma^{<x>^tau}
  bool degenerate;
};

struct ThicknessReport {
  bool holds = true;
  double worst_x = 0.0;
  /// min over checked points of ratio / required
  double worst_margin = std::numeric_limits<double>::infinity();
  std::size_t degenerate_points = 0;
  bool truncated = false;
  std::vector<PointCheck> points;
};

/// Pointwise density condition at each sample. If `described` is given,
/// windows leaving it mark the report as truncated.
ThicknessReport is_thick_pointwise(const IntervalSet& omega, const ThicknessProfile& profile,
                                   std::span<const double> xs,
                                   std::optional<Interval> described = std::nullopt);

struct PieceCheck {
  int n;
  Interval piece;
  double ratio;
  double required;
};

struct PartitionThicknessReport {
  bool holds = true;
  int worst_piece = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  Interval checked_range{0.0, 0.0};  // outside this range: unchecked
  std::vector<PieceCheck> pieces;
};

PartitionThicknessReport is_thick_partitionwise(const IntervalSet& omega, const Partition& p,
                                                double gamma, double tau);

struct GeneratedSet {
  IntervalSet set;
  /// First |n| at which the placed length underflowed; pieces with |n| >= it
  /// are left empty.
  std::optional<int> stopped_at;
};

/// One subinterval of length gamma^{<x_n>^tau} |I_n| per piece at a seeded
/// offset fraction. Offsets depend only on (seed, n), so raising gamma for a
/// fixed seed yields a superset.
GeneratedSet generate_thick(const ThicknessProfile& profile, const Partition& p,
                            std::uint64_t seed);

/// One interval of radius width * <k>^{-sigma} * L centred in each cell
/// [kL, (k+1)L] that meets [-extent, extent].
IntervalSet generate_regular(double L, double sigma, double width, double extent);

nlohmann::json to_json(const Partition& p);
nlohmann::json to_json(const ThicknessProfile& p);
ThicknessProfile thickness_profile_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace heatlab
