#include "heatlab/interval_set.hpp"

#include <algorithm>
#include <cmath>

#include "heatlab/error.hpp"

namespace heatlab {

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  for (const auto& iv : intervals) {
    if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw DomainError("interval endpoints must be finite");
    if (iv.lo > iv.hi) throw DomainError("interval must satisfy lo <= hi");
  }
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : intervals) {
    if (iv.hi <= iv.lo) continue;
    if (!intervals_.empty() && iv.lo <= intervals_.back().hi) {
      intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
    } else {
      intervals_.push_back(iv);
    }
  }
  rebuild_prefix();
}

IntervalSet IntervalSet::single(double lo, double hi) { return IntervalSet({{lo, hi}}); }

void IntervalSet::rebuild_prefix() {
  prefix_.assign(intervals_.size() + 1, 0.0);
  for (std::size_t i = 0; i < intervals_.size(); ++i)
    prefix_[i + 1] = prefix_[i] + intervals_[i].length();
}

double IntervalSet::measure() const {
  // Summed directly instead of via prefix_ so the value does not depend on
  // how the set was assembled.
  double m = 0.0;
  for (const auto& iv : intervals_) m += iv.length();
  return m;
}

double IntervalSet::measure_within(double a, double b) const {
  if (!(b > a) || intervals_.empty()) return 0.0;
  // first interval with hi > a
  auto first = std::upper_bound(intervals_.begin(), intervals_.end(), a,
                                [](double v, const Interval& iv) { return v < iv.hi; });
  // first interval with lo >= b
  auto last = std::lower_bound(intervals_.begin(), intervals_.end(), b,
                               [](const Interval& iv, double v) { return iv.lo < v; });
  if (first >= last) return 0.0;
  const auto i0 = static_cast<std::size_t>(first - intervals_.begin());
  const auto i1 = static_cast<std::size_t>(last - intervals_.begin());
  if (i1 - i0 <= 2) {
    double m = 0.0;
    for (std::size_t i = i0; i < i1; ++i)
      m += std::min(b, intervals_[i].hi) - std::max(a, intervals_[i].lo);
    return m;
  }
  double m = prefix_[i1 - 1] - prefix_[i0 + 1];
  m += std::min(b, intervals_[i0].hi) - std::max(a, intervals_[i0].lo);
  m += std::min(b, intervals_[i1 - 1].hi) - std::max(a, intervals_[i1 - 1].lo);
  return m;
}

bool IntervalSet::contains(double x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return false;
  --it;
  return x >= it->lo && x <= it->hi;
}

bool IntervalSet::includes(const IntervalSet& other) const {
  for (const auto& iv : other.intervals_) {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), iv.lo,
                               [](double v, const Interval& j) { return v < j.lo; });
    if (it == intervals_.begin()) return false;
    --it;
    if (!(iv.lo >= it->lo && iv.hi <= it->hi)) return false;
  }
  return true;
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& a = intervals_;
  const auto& b = other.intervals_;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::complement_within(double a, double b) const {
  if (!(b > a)) return {};
  std::vector<Interval> out;
  double cursor = a;
  for (const auto& iv : intervals_) {
    if (iv.hi <= a) continue;
    if (iv.lo >= b) break;
    if (iv.lo > cursor) out.push_back({cursor, iv.lo});
    cursor = std::max(cursor, iv.hi);
  }
  if (cursor < b) out.push_back({cursor, b});
  return IntervalSet(std::move(out));
}

nlohmann::json to_json(const IntervalSet& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& iv : s.intervals()) arr.push_back({iv.lo, iv.hi});
  return arr;
}

IntervalSet interval_set_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DomainError("interval set must be an array of [a, b] pairs");
  std::vector<Interval> ivs;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw DomainError("interval set entries must be [a, b] number pairs");
    ivs.push_back({e[0].get<double>(), e[1].get<double>()});
  }
  return IntervalSet(std::move(ivs));
}

}  // namespace heatlab
