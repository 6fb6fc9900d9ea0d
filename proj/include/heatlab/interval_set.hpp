#pragma once

#include <vector>

#include <json.hpp>

namespace heatlab {

struct Interval {
  double lo;
  double hi;

  double length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

/// Finite union of disjoint closed intervals.
///
/// Stored sorted by left endpoint with strictly positive gaps: overlapping or
/// touching intervals are merged and zero-length pieces dropped on
/// construction. All set operations are exact on endpoints.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> intervals);

  static IntervalSet single(double lo, double hi);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }

  double measure() const;
  /// |this ∩ [a, b]|, O(log n) plus the pieces straddling the ends.
  double measure_within(double a, double b) const;
  bool contains(double x) const;
  /// True when every interval of `other` lies inside this set.
  bool includes(const IntervalSet& other) const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet complement_within(double a, double b) const;

  bool operator==(const IntervalSet& other) const { return intervals_ == other.intervals_; }

 private:
  std::vector<Interval> intervals_;
  std::vector<double> prefix_;  // prefix_[i] = total length of intervals_[0..i)

  void rebuild_prefix();
};

nlohmann::json to_json(const IntervalSet& s);
IntervalSet interval_set_from_json(const nlohmann::json& j);

}  // namespace heatlab
