#include "heatlab/ghost_lift.hpp"

#include <algorithm>
#include <cmath>

#include "heatlab/error.hpp"
#include "heatlab/io.hpp"

namespace heatlab {

namespace {

constexpr double kOverflowGuard = 40.0;

void require_interior(const LiftedField& f) {
  if (f.x.size() < 3 || f.y.size() < 3) throw DomainError("field has no interior points");
}

}  // namespace

std::string to_string(LiftKind k) { return k == LiftKind::Cosh ? "cosh" : "sinh"; }

LiftedField lift(const SpectralElement& element, double y_max, int m, LiftKind kind,
                 std::optional<Interval> x_window) {
  if (m < 3 || m % 2 == 0) throw DomainError("y point count must be odd and at least 3");
  if (!(y_max > 0.0)) throw DomainError("y_max must be positive");
  const EigenBasis& basis = *element.basis;
  const std::size_t K = element.coeffs.size();
  for (std::size_t k = 0; k < K; ++k) {
    const double ly = basis.lambda(k) * y_max;
    if (ly > kOverflowGuard)
      throw DomainError("overflow guard: lambda_" + std::to_string(k) + " * y_max = " +
                        format_double(ly) + " exceeds 40");
  }

  const Grid1D& g = basis.grid();
  int i0 = 0;
  int i1 = g.n - 1;
  if (x_window) {
    if (x_window->lo < g.x_min - 1e-12 || x_window->hi > g.x_max + 1e-12)
      throw DomainError("x window leaves the basis truncation");
    while (i0 < g.n && g.x(i0) < x_window->lo - 1e-12 * g.h()) ++i0;
    while (i1 >= 0 && g.x(i1) > x_window->hi + 1e-12 * g.h()) --i1;
    if (i1 - i0 < 2) throw DomainError("x window holds fewer than 3 grid nodes");
  }

  LiftedField f;
  f.kind = kind;
  f.hx = g.h();
  f.hy = 2.0 * y_max / (m - 1);
  for (int i = i0; i <= i1; ++i) f.x.push_back(g.x(i));
  const int half = m / 2;
  f.y.resize(static_cast<std::size_t>(m));
  for (int j = 0; j <= half; ++j) {
    const double y = j == half ? y_max : j * f.hy;
    f.y[static_cast<std::size_t>(half + j)] = y;
    f.y[static_cast<std::size_t>(half - j)] = -y;
  }

  const auto rows = static_cast<Eigen::Index>(f.x.size());
  const auto cols = static_cast<Eigen::Index>(K);
  const auto phi = basis.modes().block(i0, 0, rows, cols);
  const Eigen::Map<const Eigen::VectorXd> b(element.coeffs.data(), cols);
  f.values.resize(rows, m);
  Eigen::VectorXd w(cols);
  for (int j = 0; j <= half; ++j) {
    const double y = f.y[static_cast<std::size_t>(half + j)];
    for (Eigen::Index k = 0; k < cols; ++k) {
      const double lk = basis.lambda(static_cast<std::size_t>(k));
      w[k] = b[k] * (kind == LiftKind::Cosh ? std::cosh(lk * y) : std::sinh(lk * y) / lk);
    }
    f.values.col(half + j) = phi * w;
    if (kind == LiftKind::Cosh) {
      f.values.col(half - j) = f.values.col(half + j);
    } else {
      f.values.col(half - j) = -f.values.col(half + j);
    }
  }
  return f;
}

ResidualReport residual_nondivergence(const LiftedField& f, const Potential& p) {
  require_interior(f);
  const auto nx = static_cast<Eigen::Index>(f.x.size());
  const auto ny = static_cast<Eigen::Index>(f.y.size());
  const double ihx2 = 1.0 / (f.hx * f.hx);
  const double ihy2 = 1.0 / (f.hy * f.hy);
  std::vector<double> v(f.x.size());
  for (std::size_t i = 0; i < f.x.size(); ++i) v[i] = p(f.x[i]);
  const auto& u = f.values;
  double res = 0.0;
  double ref = 0.0;
  for (Eigen::Index j = 1; j + 1 < ny; ++j) {
    for (Eigen::Index i = 1; i + 1 < nx; ++i) {
      const double lap_x = ((u(i + 1, j) - u(i, j)) - (u(i, j) - u(i - 1, j))) * ihx2;
      const double lap_y = ((u(i, j + 1) - u(i, j)) - (u(i, j) - u(i, j - 1))) * ihy2;
      const double vu = v[static_cast<std::size_t>(i)] * u(i, j);
      const double r = -(lap_x + lap_y) + vu;
      res += r * r;
      ref += vu * vu;
    }
  }
  ResidualReport out;
  const double cell = f.hx * f.hy;
  out.absolute = std::sqrt(cell * res);
  if (ref == 0.0) {
    out.degenerate = true;
    out.relative = 0.0;
  } else {
    out.relative = std::sqrt(res / ref);
  }
  return out;
}

double AuxOdeSolution::at(double x) const {
  const double h = grid.h();
  const double t = (x - grid.x_min) / h;
  const long idx = std::lround(t);
  if (idx >= 0 && idx < grid.n && std::abs(t - static_cast<double>(idx)) <= 1e-9)
    return values[static_cast<std::size_t>(idx)];
  if (x < grid.x_min - 1e-12 * h || x > grid.x_max + 1e-12 * h)
    throw DomainError("auxiliary solution does not cover x = " + format_double(x));
  const auto i = static_cast<std::size_t>(std::clamp(static_cast<long>(std::floor(t)), 0L,
                                                     static_cast<long>(grid.n) - 2));
  const double s = t - static_cast<double>(i);
  return (1.0 - s) * values[i] + s * values[i + 1];
}

AuxOdeSolution solve_aux_ode(const Potential& p, double a, double b, int n) {
  AuxOdeSolution out;
  out.grid = Grid1D(a, b, n);
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = p(out.grid.x(i));
    if (v[static_cast<std::size_t>(i)] < 0.0)
      throw DomainError("auxiliary ODE needs V >= 0 on [a, b]");
    out.v_sup = std::max(out.v_sup, v[static_cast<std::size_t>(i)]);
  }
  out.boundary_value = std::exp((b - a) * std::sqrt(out.v_sup));
  if (out.v_sup == 0.0) {
    out.values.assign(static_cast<std::size_t>(n), 1.0);
    return out;
  }
  const double h = out.grid.h();
  const double ih2 = 1.0 / (h * h);
  const auto m = static_cast<std::size_t>(n - 2);
  std::vector<double> diag(m);
  std::vector<double> rhs(m, 0.0);
  const std::vector<double> off(m - 1, -ih2);
  for (std::size_t i = 0; i < m; ++i) diag[i] = 2.0 * ih2 + v[i + 1];
  rhs.front() += ih2 * out.boundary_value;
  rhs.back() += ih2 * out.boundary_value;
  const auto inner = thomas_solve(off, diag, off, rhs);
  out.values.resize(static_cast<std::size_t>(n));
  out.values.front() = out.boundary_value;
  out.values.back() = out.boundary_value;
  std::copy(inner.begin(), inner.end(), out.values.begin() + 1);
  return out;
}

ResidualReport residual_divergence(const LiftedField& f, const AuxOdeSolution& aux) {
  require_interior(f);
  const std::size_t nx = f.x.size();
  const auto ny = static_cast<Eigen::Index>(f.y.size());
  std::vector<double> phi(nx);
  std::vector<double> coef(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    phi[i] = aux.at(f.x[i]);
    coef[i] = phi[i] * phi[i];
  }
  const double ihx2 = 1.0 / (f.hx * f.hx);
  const double ihy2 = 1.0 / (f.hy * f.hy);
  double res = 0.0;
  double ref = 0.0;
  std::vector<double> w(nx);
  std::vector<double> w_dn(nx);
  std::vector<double> w_up(nx);
  for (Eigen::Index j = 1; j + 1 < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      w[i] = f.values(ii, j) / phi[i];
      w_dn[i] = f.values(ii, j - 1) / phi[i];
      w_up[i] = f.values(ii, j + 1) / phi[i];
    }
    for (std::size_t i = 1; i + 1 < nx; ++i) {
      const double a_plus = 0.5 * (coef[i] + coef[i + 1]);
      const double a_minus = 0.5 * (coef[i - 1] + coef[i]);
      const double div_x = (a_plus * (w[i + 1] - w[i]) - a_minus * (w[i] - w[i - 1])) * ihx2;
      const double div_y = coef[i] * ((w_up[i] - w[i]) - (w[i] - w_dn[i])) * ihy2;
      const double r = -(div_x + div_y);
      res += r * r;
      ref += div_y * div_y;
    }
  }
  ResidualReport out;
  out.absolute = std::sqrt(f.hx * f.hy * res);
  if (ref == 0.0) {
    out.degenerate = true;
    out.relative = 0.0;
  } else {
    out.relative = std::sqrt(res / ref);
  }
  return out;
}

double rescaled_potential_sup(const Potential& p, Interval piece, double xi_lo, double xi_hi,
                              std::size_t samples) {
  const double len = piece.length();
  if (!(len > 0.0)) throw DomainError("piece must have positive length");
  if (samples < 2) throw DomainError("need at least two samples");
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double xi = xi_lo + (xi_hi - xi_lo) * static_cast<double>(i) /
                                  static_cast<double>(samples - 1);
    best = std::max(best, len * len * p(piece.lo + xi * len));
  }
  return best;
}

RescaledField rescale_to_unit(const LiftedField& f, const Potential& p, Interval piece, double a) {
  if (!(a > 0.0)) throw DomainError("scale a must be positive");
  const double lo = piece.lo - 2.0 / a;
  const double hi = piece.lo + 3.0 / a;
  const double ymax = 2.5 / a;
  const double tol = 1e-9 * std::max(f.hx, f.hy);
  if (lo < f.x.front() - tol || hi > f.x.back() + tol || ymax > f.y.back() + tol)
    throw DomainError("rescaled window leaves the computed field");
  RescaledField out;
  out.scale = a;
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  for (std::size_t i = 0; i < f.x.size(); ++i) {
    if (f.x[i] >= lo - tol && f.x[i] <= hi + tol) {
      rows.push_back(static_cast<Eigen::Index>(i));
      out.xi.push_back(a * (f.x[i] - piece.lo));
    }
  }
  for (std::size_t j = 0; j < f.y.size(); ++j) {
    if (std::abs(f.y[j]) <= ymax + tol) {
      cols.push_back(static_cast<Eigen::Index>(j));
      out.eta.push_back(a * f.y[j]);
    }
  }
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (std::size_t r = 0; r < rows.size(); ++r)
      out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = f.values(rows[r], cols[c]);
  out.v_tilde_sup = rescaled_potential_sup(p, Interval{piece.lo, piece.lo + 1.0 / a});
  return out;
}

double h1_norm_squared(const LiftedField& f, double rho) {
  require_interior(f);
  const auto ny = static_cast<Eigen::Index>(f.y.size());
  const auto nx = static_cast<Eigen::Index>(f.x.size());
  const double tol = 1e-9 * f.hy;
  Eigen::Index j0 = -1;
  Eigen::Index j1 = -1;
  for (Eigen::Index j = 0; j < ny; ++j) {
    if (j0 < 0 && std::abs(f.y[static_cast<std::size_t>(j)] + rho) <= tol) j0 = j;
    if (std::abs(f.y[static_cast<std::size_t>(j)] - rho) <= tol) j1 = j;
  }
  if (j0 < 0 || j1 < 0) throw DomainError("rho must be a y grid line");
  const auto& u = f.values;
  double s = 0.0;
  for (Eigen::Index j = j0; j < j1; ++j) {
    for (Eigen::Index i = 0; i + 1 < nx; ++i) {
      const double dx = 0.5 * ((u(i + 1, j) - u(i, j)) + (u(i + 1, j + 1) - u(i, j + 1))) / f.hx;
      const double dy = 0.5 * ((u(i, j + 1) - u(i, j)) + (u(i + 1, j + 1) - u(i + 1, j))) / f.hy;
      const double sq = 0.25 * (u(i, j) * u(i, j) + u(i + 1, j) * u(i + 1, j) +
                                u(i, j + 1) * u(i, j + 1) + u(i + 1, j + 1) * u(i + 1, j + 1));
      s += (sq + dx * dx + dy * dy) * f.hx * f.hy;
    }
  }
  return s;
}

void export_field(const LiftedField& f, const std::string& dir, const nlohmann::json& meta) {
  ensure_directory(dir);
  CsvWriter csv(join_path(dir, "field.csv"), {"x", "y", "phi"});
  for (std::size_t j = 0; j < f.y.size(); ++j)
    for (std::size_t i = 0; i < f.x.size(); ++i)
      csv.row({f.x[i], f.y[j], f.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
  nlohmann::json m = meta;
  m["lift_kind"] = to_string(f.kind);
  m["y_max"] = f.y.back();
  m["y_points"] = f.y.size();
  m["x_points"] = f.x.size();
  m["overflow_guard"] = kOverflowGuard;
  m["face_average"] = "arithmetic";
  write_json(join_path(dir, "metadata.json"), m);
}

}  // namespace heatlab
