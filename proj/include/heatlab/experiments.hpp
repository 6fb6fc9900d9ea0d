#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "heatlab/interval_set.hpp"
#include "heatlab/potentials.hpp"

namespace heatlab {

/// Invalid configuration; the message starts with the offending field path.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FullSet {};
struct EmptySet {};
struct ExplicitSet {
  IntervalSet set;
};
struct ThickSetSpec {
  double gamma = 0.5;
  double tau = 0.0;
  double L = 1.0;
  double s = 0.0;
  std::uint64_t seed = 0;
  std::optional<int> N;
};
struct RegularSetSpec {
  double L = 1.0;
  double sigma = 0.0;
  double width = 0.25;
};
using SetSpec = std::variant<FullSet, EmptySet, ExplicitSet, ThickSetSpec, RegularSetSpec>;

/// Realizes a set spec on the truncation [-extent, extent].
IntervalSet build_set(const SetSpec& spec, double extent);

struct ExperimentConfig {
  std::string experiment;
  std::string output_dir;
  std::optional<Potential> potential;
  std::optional<SetSpec> set;
  nlohmann::json params;  // validated, with defaults filled in
  nlohmann::json resolved;
  std::vector<std::string> warnings;
};

/// Schema and semantic validation. Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);

enum class CheckStatus { Pass, Fail, ReportOnly };

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::ReportOnly;
  std::string detail;
};

std::string summary_line(const Check& c);

struct RunOutcome {
  std::string output_dir;
  std::vector<Check> checks;
  /// a numerical guard tripped (flagged Gramian, unobservable constant, infeasible fit)
  std::vector<std::string> numerical_flags;

  bool failed() const;
};

/// Output directory: output_dir joined to `root` when relative and root is nonempty.
std::string resolve_output_dir(const ExperimentConfig& cfg, const std::string& root);

/// Runs the experiment, writing metadata.json, summary.txt and its artifacts.
RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& output_dir);

/// Human-readable digest of a finished output directory.
std::string report_directory(const std::string& dir);

}  // namespace heatlab
