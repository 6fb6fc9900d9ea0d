#include "heatlab/thick_sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatlab/error.hpp"
#include "heatlab/potentials.hpp"
#include "heatlab/rng.hpp"

namespace heatlab {

namespace {

constexpr double kRelativeSlack = 1e-12;

double loglog_factor(const LogLogRho& r, double x) {
  const double b = japanese_bracket(x);
  const double f = r.R * std::log(std::log(b)) - 1.0 / r.R;
  return f;
}

}  // namespace

void ThicknessProfile::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("γ must lie in (0,1)");
  if (!(L > 0.0)) throw DomainError("L must be positive");
  if (!(tau >= 0.0)) throw DomainError("τ must be nonnegative");
  if (const auto* p = std::get_if<PowerRho>(&rho); p && !(p->s >= 0.0))
    throw DomainError("s must be nonnegative");
  if (const auto* q = std::get_if<LogLogRho>(&rho)) {
    if (!(q->R > 0.0)) throw DomainError("R must be positive");
    if (!(q->beta2 > 0.0)) throw DomainError("beta2 must be positive");
  }
}

bool ThicknessProfile::degenerate_at(double x) const {
  if (const auto* q = std::get_if<LogLogRho>(&rho)) {
    const double f = loglog_factor(*q, x);
    return !(f > 0.0);  // also catches NaN/-inf near x = 0
  }
  return false;
}

Interval ThicknessProfile::window(double x) const {
  if (std::holds_alternative<UnitRho>(rho)) return {x, x + L};
  double r = 0.0;
  if (const auto* p = std::get_if<PowerRho>(&rho)) {
    r = std::pow(japanese_bracket(x), -p->s);
  } else {
    const auto& q = std::get<LogLogRho>(rho);
    double f = loglog_factor(q, x);
    if (!(f > 0.0)) return {x, x};
    if (q.sqrt_factor) f = std::sqrt(f);
    r = std::min(f * std::pow(japanese_bracket(x), -q.beta2 / 2.0), 1.0);
  }
  const double radius = L * r;
  return {x - radius, x + radius};
}

double ThicknessProfile::required_density(double x) const {
  const double arg = std::holds_alternative<UnitRho>(rho) ? x / L : x;
  return std::pow(gamma, std::pow(japanese_bracket(arg), tau));
}

Partition::Partition(double L, double s, std::vector<double> centers)
    : L_(L), s_(s), centers_(std::move(centers)) {
  if (centers_.size() < 3) throw DomainError("partition needs at least one piece per side");
}

Interval Partition::piece(int n) const {
  const int N = pieces_per_side();
  if (n < -N || n > N) throw DomainError("piece index outside generated range");
  if (n == 0) return {-L_, L_};
  const auto m = static_cast<std::size_t>(std::abs(n));
  if (n > 0) return {centers_[m], centers_[m + 1]};
  return {-centers_[m + 1], -centers_[m]};
}

double Partition::anchor(int n) const { return centers_[static_cast<std::size_t>(std::abs(n))]; }

Interval Partition::covered_range() const { return {-centers_.back(), centers_.back()}; }

Partition build_partition(double L, double s, int N) {
  if (!(L > 0.0)) throw DomainError("partition length L must be positive");
  if (!(s >= 0.0)) throw DomainError("partition exponent s must be nonnegative");
  if (N < 1) throw DomainError("partition needs N >= 1");
  std::vector<double> x(static_cast<std::size_t>(N) + 2);
  x[0] = 0.0;
  x[1] = L;
  for (std::size_t n = 1; n + 1 < x.size(); ++n) {
    const double step = s == 0.0 ? L : L * std::pow(x[n], -s);
    // s = 0: x_n = L n exactly rather than by repeated addition
    x[n + 1] = s == 0.0 ? L * static_cast<double>(n + 1) : x[n] + step;
  }
  return Partition(L, s, std::move(x));
}

std::vector<double> partition_asymptotics(const Partition& p) {
  const auto& x = p.centers();
  const double e = 1.0 / (p.s() + 1.0);
  std::vector<double> r;
  r.reserve(x.size());
  for (std::size_t n = 1; n < x.size(); ++n) {
    const double ref = std::pow((p.s() + 1.0) * p.L() * static_cast<double>(n), e);
    r.push_back(x[n] / ref);
  }
  return r;
}

ThicknessReport is_thick_pointwise(const IntervalSet& omega, const ThicknessProfile& profile,
                                   std::span<const double> xs, std::optional<Interval> described) {
  profile.validate();
  ThicknessReport rep;
  rep.points.reserve(xs.size());
  for (const double x : xs) {
    PointCheck pc{x, 0.0, profile.required_density(x), false};
    const Interval w = profile.window(x);
    if (profile.degenerate_at(x) || !(w.hi > w.lo)) {
      pc.degenerate = true;
      ++rep.degenerate_points;
      rep.points.push_back(pc);
      continue;
    }
    if (described && (w.lo < described->lo || w.hi > described->hi)) rep.truncated = true;
    pc.ratio = omega.measure_within(w.lo, w.hi) / w.length();
    const double margin = pc.ratio / pc.required;
    if (pc.ratio < pc.required * (1.0 - kRelativeSlack)) rep.holds = false;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_x = x;
    }
    rep.points.push_back(pc);
  }
  return rep;
}

PartitionThicknessReport is_thick_partitionwise(const IntervalSet& omega, const Partition& p,
                                                double gamma, double tau) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("γ must lie in (0,1)");
  if (!(tau >= 0.0)) throw DomainError("τ must be nonnegative");
  PartitionThicknessReport rep;
  rep.checked_range = p.covered_range();
  const int N = p.pieces_per_side();
  rep.pieces.reserve(static_cast<std::size_t>(2 * N + 1));
  for (int n = -N; n <= N; ++n) {
    const Interval piece = p.piece(n);
    const double len = piece.length();
    PieceCheck pc{n, piece, omega.measure_within(piece.lo, piece.hi) / len,
                  std::pow(gamma, std::pow(japanese_bracket(p.anchor(n)), tau))};
    if (pc.ratio < pc.required * (1.0 - kRelativeSlack)) rep.holds = false;
    const double margin = pc.ratio / pc.required;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.worst_piece = n;
    }
    rep.pieces.push_back(pc);
  }
  return rep;
}

GeneratedSet generate_thick(const ThicknessProfile& profile, const Partition& p,
                            std::uint64_t seed) {
  profile.validate();
  const int N = p.pieces_per_side();
  // Offsets are drawn for n = -N..N in order, independent of gamma and tau.
  Rng rng(seed);
  std::vector<double> offset(static_cast<std::size_t>(2 * N + 1));
  for (auto& u : offset) u = rng.uniform();

  GeneratedSet out;
  for (int m = 0; m <= N; ++m) {
    const double len = std::pow(profile.gamma, std::pow(japanese_bracket(p.anchor(m)), profile.tau)) *
                       p.piece(m).length();
    if (!(len > 0.0) || len < std::numeric_limits<double>::min()) {
      out.stopped_at = m;
      break;
    }
  }
  const int limit = out.stopped_at.value_or(N + 1);
  std::vector<Interval> ivs;
  for (int n = -N; n <= N; ++n) {
    if (std::abs(n) >= limit) continue;
    const Interval piece = p.piece(n);
    const double full = piece.length();
    const double len =
        std::pow(profile.gamma, std::pow(japanese_bracket(p.anchor(n)), profile.tau)) * full;
    const double u = offset[static_cast<std::size_t>(n + N)];
    double lo = piece.lo + u * (full - len);
    double hi = lo + len;
    // keep the placement inside the piece despite rounding
    if (hi > piece.hi) {
      hi = piece.hi;
      lo = hi - len;
    }
    // far out, len can be a few ulps of the endpoints; widen until hi - lo >= len
    while (hi - lo < len) {
      if (hi < piece.hi) {
        hi = std::nextafter(hi, piece.hi);
      } else if (lo > piece.lo) {
        lo = std::nextafter(lo, piece.lo);
      } else {
        break;
      }
    }
    ivs.push_back({lo, hi});
  }
  out.set = IntervalSet(std::move(ivs));
  return out;
}

IntervalSet generate_regular(double L, double sigma, double width, double extent) {
  if (!(L > 0.0)) throw DomainError("cell length L must be positive");
  if (!(sigma >= 0.0)) throw DomainError("σ must be nonnegative");
  if (!(width > 0.0 && width <= 0.5)) throw DomainError("width must lie in (0, 1/2]");
  const auto kmax = static_cast<long>(std::ceil(extent / L));
  std::vector<Interval> ivs;
  for (long k = -kmax - 1; k <= kmax; ++k) {
    const double mid = (static_cast<double>(k) + 0.5) * L;
    const double r = width * std::pow(japanese_bracket(static_cast<double>(k)), -sigma) * L;
    ivs.push_back({mid - r, mid + r});
  }
  return IntervalSet(std::move(ivs));
}

nlohmann::json to_json(const Partition& p) {
  return {{"L", p.L()}, {"s", p.s()}, {"centers", p.centers()}};
}

nlohmann::json to_json(const ThicknessProfile& p) {
  nlohmann::json rho;
  if (const auto* a = std::get_if<PowerRho>(&p.rho)) {
    rho = {{"kind", "power"}, {"s", a->s}};
  } else if (const auto* b = std::get_if<LogLogRho>(&p.rho)) {
    rho = {{"kind", "loglog"}, {"R", b->R}, {"beta2", b->beta2}, {"sqrt_factor", b->sqrt_factor}};
  } else {
    rho = {{"kind", "unit"}};
  }
  return {{"rho", rho}, {"gamma", p.gamma}, {"L", p.L}, {"tau", p.tau}};
}

ThicknessProfile thickness_profile_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw DomainError(path + ": must be an object");
  for (const auto& [k, _] : j.items())
    if (k != "rho" && k != "gamma" && k != "L" && k != "tau")
      throw DomainError(path + "." + k + ": unknown field");
  auto num = [&](const nlohmann::json& o, const char* key, const std::string& p) {
    if (!o.contains(key) || !o.at(key).is_number()) throw DomainError(p + "." + key + ": missing");
    return o.at(key).get<double>();
  };
  ThicknessProfile prof;
  prof.gamma = num(j, "gamma", path);
  prof.L = num(j, "L", path);
  prof.tau = j.contains("tau") ? num(j, "tau", path) : 0.0;
  const std::string rp = path + ".rho";
  if (!j.contains("rho") || !j.at("rho").is_object()) throw DomainError(rp + ": missing");
  const auto& r = j.at("rho");
  const std::string kind = r.value("kind", "");
  if (kind == "power") {
    prof.rho = PowerRho{num(r, "s", rp)};
  } else if (kind == "loglog") {
    prof.rho = LogLogRho{num(r, "R", rp), num(r, "beta2", rp), r.value("sqrt_factor", false)};
  } else if (kind == "unit") {
    prof.rho = UnitRho{};
  } else {
    throw DomainError(rp + ".kind: must be one of power, loglog, unit");
  }
  if (!(prof.gamma > 0.0 && prof.gamma < 1.0))
    throw DomainError(path + ".gamma: γ must lie in (0,1)");
  try {
    prof.validate();
  } catch (const DomainError& e) {
    throw DomainError(path + ": " + e.what());
  }
  return prof;
}

}  // namespace heatlab
