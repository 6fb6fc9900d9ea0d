#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace heatlab {

/// Japanese bracket <x> = (1 + x^2)^{1/2}, evaluated directly.
inline double japanese_bracket(double x) { return std::sqrt(1.0 + x * x); }

/// Two-sided power growth constants: c1 (|x|-c3)_+^beta1 <= V(x) <= c2 <x>^beta2.
struct GrowthBounds {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 0.0;
  double beta1 = 1.0;
  double beta2 = 1.0;

  void validate() const;
  double lower(double x) const;
  double upper(double x) const;
};

struct Monomial {
  double beta;
};
/// |x|^beta2 (sin(x^2) + 1) + |x|^beta1
struct OscillatingExample {
  double beta1;
  double beta2;
};
/// (|x| - c3)_+^beta + theta
struct ShiftedMonomial {
  double beta;
  double c3;
  double theta;
};
/// Piecewise-linear interpolation of samples, constant beyond the ends.
struct TabulatedSamples {
  std::vector<double> x;
  std::vector<double> v;
};
struct Constant {
  double value;
};

using PotentialKind =
    std::variant<Monomial, OscillatingExample, ShiftedMonomial, TabulatedSamples, Constant>;

class Potential {
 public:
  static Potential monomial(double beta);
  static Potential oscillating(double beta1, double beta2);
  static Potential shifted_monomial(double beta, double c3, double theta);
  static Potential tabulated(std::vector<double> x, std::vector<double> v);
  static Potential constant(double value);

  /// V(x). Throws DomainError for non-finite x.
  double operator()(double x) const;

  const PotentialKind& kind() const { return kind_; }
  const std::optional<GrowthBounds>& bounds() const { return bounds_; }
  double shift() const { return shift_; }
  std::string kind_name() const;

  Potential with_bounds(std::optional<GrowthBounds> b) const;
  Potential with_shift(double total_shift) const;

  /// Largest value on the nodes of a uniform sampling of [a, b].
  double sup_on(double a, double b, int samples = 10001) const;

 private:
  explicit Potential(PotentialKind kind);

  PotentialKind kind_;
  std::optional<GrowthBounds> bounds_;
  double shift_ = 0.0;
};

double evaluate(const Potential& p, double x);

/// x -> V(x) + theta. Throws DomainError for theta < 0.
Potential shift_potential(const Potential& p, double theta);

struct GrowthReport {
  bool holds = true;
  double worst_violation = 0.0;  // max over samples of max(lower - V, V - upper)
  double witness = 0.0;
  std::size_t samples = 0;
};

GrowthReport verify_growth_bounds(const Potential& p, const GrowthBounds& b,
                                  std::span<const double> xs);

/// V = V1 + V2 with |V1| + |DV1| + |V2|^{4/3} <= c4 <x>^beta2.
struct SplitBound {
  Potential v1;
  Potential v2;
  double c4;
  double beta2;
};

struct SplitReport {
  bool holds = true;
  double max_ratio = 0.0;
  double witness = 0.0;
};

SplitReport verify_split(const SplitBound& split, std::span<const double> xs, double h = 1e-5);

/// Uniform grid of n points on [a, b].
std::vector<double> uniform_samples(double a, double b, std::size_t n);

nlohmann::json to_json(const Potential& p);
Potential potential_from_json(const nlohmann::json& j);

}  // namespace heatlab
