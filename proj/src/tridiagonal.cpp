#include "heatlab/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatlab/error.hpp"
#include "heatlab/rng.hpp"

namespace heatlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Gershgorin {
  double lo;
  double hi;
};

Gershgorin gershgorin(const SymTridiagonal& t) {
  const std::size_t n = t.size();
  Gershgorin g{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.off[i - 1]);
    if (i + 1 < n) r += std::abs(t.off[i]);
    g.lo = std::min(g.lo, t.diag[i] - r);
    g.hi = std::max(g.hi, t.diag[i] + r);
  }
  return g;
}

double pivot_floor(const SymTridiagonal& t) {
  double m = 1.0;
  for (double e : t.off) m = std::max(m, e * e);
  return std::numeric_limits<double>::min() * m;
}

// LU factorization of (T - shift I) with partial pivoting, LAPACK dgttrf layout.
struct TridiagonalLu {
  std::vector<double> dl, d, du, du2;
  std::vector<bool> swapped;

  TridiagonalLu(const SymTridiagonal& t, double shift, double tiny) {
    const std::size_t n = t.size();
    d.resize(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;
    dl = t.off;
    du = t.off;
    du2.assign(n > 2 ? n - 2 : 0, 0.0);
    swapped.assign(n > 0 ? n - 1 : 0, false);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (std::abs(d[i]) >= std::abs(dl[i])) {
        if (d[i] == 0.0) d[i] = tiny;
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      } else {
        const double fact = d[i] / dl[i];
        d[i] = dl[i];
        dl[i] = fact;
        const double temp = du[i];
        du[i] = d[i + 1];
        d[i + 1] = temp - fact * d[i + 1];
        if (i + 2 < n) {
          du2[i] = du[i + 1];
          du[i + 1] = -fact * du[i + 1];
        }
        swapped[i] = true;
      }
    }
    if (n > 0 && d[n - 1] == 0.0) d[n - 1] = tiny;
  }

  void solve(std::vector<double>& b) const {
    const std::size_t n = d.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (swapped[i]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= dl[i] * b[i];
    }
    if (n == 0) return;
    b[n - 1] /= d[n - 1];
    if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for (std::size_t k = n >= 2 ? n - 2 : 0; k-- > 0;) {
      b[k] = (b[k] - du[k] * b[k + 1] - du2[k] * b[k + 2]) / d[k];
    }
  }
};

void normalize(std::vector<double>& v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  const double inv = 1.0 / std::sqrt(s);
  for (double& c : v) c *= inv;
}

}  // namespace

void SymTridiagonal::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = diag[i] * x[i];
    if (i > 0) s += off[i - 1] * x[i - 1];
    if (i + 1 < n) s += off[i] * x[i + 1];
    y[i] = s;
  }
}

double SymTridiagonal::norm_inf() const {
  double m = 0.0;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double r = std::abs(diag[i]);
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    m = std::max(m, r);
  }
  return m;
}

std::size_t sturm_count(const SymTridiagonal& t, double shift) {
  const std::size_t n = t.size();
  const double pivmin = pivot_floor(t);
  std::size_t count = 0;
  double q = t.diag[0] - shift;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < n; ++i) {
    q = t.diag[i] - shift - t.off[i - 1] * t.off[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> bisect_eigenvalues(const SymTridiagonal& t, std::size_t first,
                                       std::size_t last) {
  const std::size_t n = t.size();
  if (last > n) last = n;
  if (first >= last) return {};
  const Gershgorin g = gershgorin(t);
  const double scale = std::max(std::abs(g.lo), std::abs(g.hi));
  const double pad = 2.0 * kEps * scale + pivot_floor(t);
  std::vector<double> out;
  out.reserve(last - first);
  double floor_lo = g.lo - pad;
  for (std::size_t k = first; k < last; ++k) {
    // lambda_k is the smallest x with sturm_count(x) > k
    double lo = floor_lo;
    double hi = g.hi + pad;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + pad * 1e-3) break;
      if (sturm_count(t, mid) > k) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    const double value = 0.5 * (lo + hi);
    out.push_back(value);
    floor_lo = lo;
  }
  return out;
}

std::vector<std::vector<double>> inverse_iteration(const SymTridiagonal& t,
                                                   std::span<const double> eigenvalues) {
  const std::size_t n = t.size();
  const double norm = std::max(t.norm_inf(), std::numeric_limits<double>::min());
  const double cluster_tol = 1e-3 * norm;
  const double tiny = kEps * norm;
  std::vector<std::vector<double>> vecs;
  vecs.reserve(eigenvalues.size());
  std::size_t cluster_start = 0;
  double prev_shift = 0.0;
  for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
    double shift = eigenvalues[k];
    if (k > 0 && eigenvalues[k] - eigenvalues[k - 1] > cluster_tol) cluster_start = k;
    // separate numerically equal shifts so the vectors differ
    if (k > cluster_start && shift - prev_shift < 10.0 * kEps * std::abs(shift))
      shift = prev_shift + 10.0 * kEps * std::abs(shift);
    prev_shift = shift;

    const TridiagonalLu lu(t, shift, tiny);
    Rng rng(0x9e3779b97f4a7c15ULL + k);
    std::vector<double> v(n);
    for (double& c : v) c = rng.uniform() - 0.5;
    normalize(v);
    for (int it = 0; it < 5; ++it) {
      lu.solve(v);
      for (std::size_t j = cluster_start; j < k; ++j) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += v[i] * vecs[j][i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * vecs[j][i];
      }
      normalize(v);
      if (!std::isfinite(v[0])) throw NumericalError("inverse iteration diverged");
    }
    vecs.push_back(std::move(v));
  }
  return vecs;
}

std::vector<double> thomas_solve(std::span<const double> sub, std::span<const double> diag,
                                 std::span<const double> super, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (rhs.size() != n || sub.size() + 1 != n || super.size() + 1 != n)
    throw DomainError("thomas_solve: inconsistent sizes");
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  double denom = diag[0];
  if (denom == 0.0) throw NumericalError("singular tridiagonal system");
  c[0] = n > 1 ? super[0] / denom : 0.0;
  d[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - sub[i - 1] * c[i - 1];
    if (denom == 0.0 || !std::isfinite(denom)) throw NumericalError("singular tridiagonal system");
    c[i] = i + 1 < n ? super[i] / denom : 0.0;
    d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / denom;
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

}  // namespace heatlab
