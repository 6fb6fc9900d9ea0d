#include "heatlab/smallness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "heatlab/error.hpp"
#include "heatlab/ghost_lift.hpp"

namespace heatlab {

namespace {

constexpr double kMaxLogC = 27.631021115928547;  // log(1e12)

// sup of |f| over [lo, hi] for the piecewise-linear interpolant of column j
double pl_sup(const LiftedField& f, Eigen::Index j, double lo, double hi) {
  const double x0 = f.x.front();
  const auto n = static_cast<long>(f.x.size());
  auto value_at = [&](double x) {
    const double t = (x - x0) / f.hx;
    const long i = std::clamp(static_cast<long>(std::floor(t)), 0L, n - 2);
    const double s = t - static_cast<double>(i);
    const auto ii = static_cast<Eigen::Index>(i);
    return (1.0 - s) * f.values(ii, j) + s * f.values(ii + 1, j);
  };
  double best = std::max(std::abs(value_at(lo)), std::abs(value_at(hi)));
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    if (f.x[i] > lo && f.x[i] < hi)
      best = std::max(best, std::abs(f.values(static_cast<Eigen::Index>(i), j)));
  }
  return best;
}

}  // namespace

double ellipticity_proxy(const Potential& p, const SmallnessGeometry& geom) {
  const double l = geom.length;
  const double v = rescaled_potential_sup(p, Interval{geom.x_start, geom.x_start + l});
  return std::exp(std::sqrt(std::max(v, 0.0)));
}

std::vector<SmallnessSample> collect_samples(std::shared_ptr<const EigenBasis> basis,
                                             const Potential& p, std::span<const double> lambdas,
                                             const IntervalSet& omega_line,
                                             const SmallnessGeometry& geom, std::size_t n_random,
                                             std::uint64_t seed) {
  if (!(geom.length > 0.0)) throw DomainError("geometry length must be positive");
  if (geom.rows_per_half < 1) throw DomainError("rows_per_half must be at least 1");
  if (omega_line.empty() || omega_line.intervals().front().lo < 0.0 ||
      omega_line.intervals().back().hi > 1.0)
    throw DomainError("omega must lie in [0, 1]");
  const double wm = omega_line.measure();
  if (!(wm > 0.0 && wm < 0.5)) throw DomainError("|omega| must lie in (0, 1/2)");

  const double l = geom.length;
  const double xs = geom.x_start;
  const Grid1D& g = basis->grid();
  const double outer_lo = xs - l;
  const double outer_hi = xs + 2.0 * l;
  if (outer_lo < g.x_min || outer_hi > g.x_max)
    throw DomainError("region D2 exits the computed field");
  const Interval window{std::max(g.x_min, outer_lo - g.h()), std::min(g.x_max, outer_hi + g.h())};
  const int q = geom.rows_per_half;
  const int m = 6 * q + 1;
  const double y_max = 1.5 * l;
  const double lambda_proxy = ellipticity_proxy(p, geom);

  std::vector<SmallnessSample> out;
  std::uint64_t index = 0;
  for (double lam : lambdas) {
    for (std::size_t r = 0; r < n_random; ++r, ++index) {
      const std::uint64_t s = seed + index;
      const SpectralElement e = random_element(basis, lam, s);
      const LiftedField f = lift(e, y_max, m, LiftKind::Cosh, window);
      const auto c = static_cast<Eigen::Index>(f.center_row());
      SmallnessSample smp;
      smp.lambda = lam;
      smp.seed = s;
      smp.omega_measure = wm;
      smp.ellipticity = lambda_proxy;
      for (const auto& iv : omega_line.intervals())
        smp.sup_omega = std::max(smp.sup_omega, pl_sup(f, c, xs + l * iv.lo, xs + l * iv.hi));
      for (Eigen::Index j = c - q; j <= c + q; ++j)
        smp.sup_inner = std::max(smp.sup_inner, pl_sup(f, j, xs, xs + l));
      for (Eigen::Index j = 0; j < m; ++j)
        smp.sup_outer = std::max(smp.sup_outer, pl_sup(f, j, outer_lo, outer_hi));
      out.push_back(smp);
    }
  }
  return out;
}

AlphaBand theoretical_band(double Lambda, double omega_measure, double d1, double d2) {
  if (!(omega_measure > 0.0 && omega_measure < 0.5))
    throw DomainError("|omega| must lie in (0, 1/2)");
  if (!(Lambda > 1.0)) throw DomainError("Lambda must exceed 1");
  if (!(d1 > 0.0 && d1 <= d2)) throw DomainError("need 0 < d1 <= d2");
  const double lw = std::log(omega_measure);
  const double l2 = Lambda * Lambda;
  AlphaBand b;
  b.alpha_lo = std::exp(-d2 * l2) / (lw * lw);
  b.alpha_hi = std::exp(-d1 * l2) / (lw * lw);
  b.c_lo = std::exp(d1 * l2);
  b.c_hi = std::exp(d2 * l2);
  return b;
}

namespace {

struct Transformed {
  std::vector<double> u;
  std::vector<double> v;
};

Transformed transform(std::span<const SmallnessSample> samples) {
  Transformed t;
  for (const auto& s : samples) {
    if (!(s.sup_outer > 0.0) || !(s.sup_omega > 0.0) || !(s.sup_inner > 0.0))
      throw DomainError("samples need positive sups");
    t.u.push_back(std::log(s.sup_outer / s.sup_omega));
    t.v.push_back(std::log(s.sup_outer / s.sup_inner));
  }
  return t;
}

double max_offset(const Transformed& t, double alpha) {
  double c = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.u.size(); ++i) c = std::max(c, alpha * t.u[i] - t.v[i]);
  return c;
}

}  // namespace

double minimal_log_constant(std::span<const SmallnessSample> samples, double alpha) {
  return max_offset(transform(samples), alpha);
}

SmallnessReport fit_alpha(std::span<const SmallnessSample> samples) {
  if (samples.size() < 30) throw DomainError("fit_alpha needs at least 30 samples");
  const Transformed t = transform(samples);
  const std::size_t n = t.u.size();
  SmallnessReport r;
  r.samples = n;

  const double umax = *std::max_element(t.u.begin(), t.u.end());
  const double umean = std::accumulate(t.u.begin(), t.u.end(), 0.0) / static_cast<double>(n);
  if (umax <= 1e-14) {
    r.degenerate = true;
    r.alpha = 0.5;
  } else {
    // lower convex hull of (u_i, v_i), monotone chain
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return t.u[a] < t.u[b] || (t.u[a] == t.u[b] && t.v[a] < t.v[b]);
    });
    std::vector<std::size_t> hull;
    for (std::size_t k : idx) {
      if (!hull.empty() && t.u[hull.back()] == t.u[k]) continue;
      while (hull.size() >= 2) {
        const std::size_t a = hull[hull.size() - 2];
        const std::size_t b = hull.back();
        const double cross =
            (t.u[b] - t.u[a]) * (t.v[k] - t.v[a]) - (t.v[b] - t.v[a]) * (t.u[k] - t.u[a]);
        if (cross <= 0.0) {
          hull.pop_back();
        } else {
          break;
        }
      }
      hull.push_back(k);
    }
    double slope = 0.0;
    if (hull.size() >= 2) {
      std::size_t e = 0;
      while (e + 2 < hull.size() && t.u[hull[e + 1]] <= umean) ++e;
      const std::size_t a = hull[e];
      const std::size_t b = hull[e + 1];
      slope = (t.v[b] - t.v[a]) / (t.u[b] - t.u[a]);
    }
    r.alpha = slope;
    if (!(slope > 0.0)) {
      r.alpha = 1e-12;
      r.clamped = true;
    } else if (slope > 1.0) {
      r.alpha = 1.0;
      r.clamped = true;
    }
  }

  const double c = max_offset(t, r.alpha);
  r.log_c = std::max(c, 0.0);
  r.c = std::exp(r.log_c);
  r.slack.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.slack[i] = r.log_c - (r.alpha * t.u[i] - t.v[i]);
    if (r.slack[i] < 0.0) ++r.violations;
  }
  r.infeasible = r.log_c > kMaxLogC;
  return r;
}

PieceConstants piece_constants(const Partition& partition, int n, double gamma_n,
                                       double d) {
  if (std::abs(n) > partition.pieces_per_side())
    throw DomainError("piece index outside the partition");
  if (!(gamma_n > 0.0 && gamma_n < 1.0)) throw DomainError("γ must lie in (0,1)");
  if (!(d > 0.0)) throw DomainError("d must be positive");
  const double lg = std::log(gamma_n);
  PieceConstants out;
  out.alpha_lower = 1.0 / (d * lg * lg);
  out.a = 1.0 / partition.piece(n).length();
  return out;
}

double smallness_constant_reference(double d, double c0) {
  return std::exp(d * std::exp(d * std::sqrt(c0)));
}

nlohmann::json to_json(const SmallnessReport& r) {
  nlohmann::json j{{"alpha", r.alpha},           {"C", r.c},
                   {"log_C", r.log_c},           {"samples", r.samples},
                   {"violations", r.violations}, {"degenerate", r.degenerate},
                   {"infeasible", r.infeasible}, {"clamped", r.clamped}};
  if (r.band) {
    j["band"] = {{"alpha_lo", r.band->alpha_lo},
                 {"alpha_hi", r.band->alpha_hi},
                 {"C_lo", r.band->c_lo},
                 {"C_hi", r.band->c_hi}};
  }
  return j;
}

}  // namespace heatlab
