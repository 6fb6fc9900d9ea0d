#include "heatlab/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "heatlab/error.hpp"
#include "heatlab/io.hpp"
#include "heatlab/quadrature.hpp"
#include "heatlab/rng.hpp"

namespace heatlab {

Grid1D::Grid1D(double a, double b, int points) : x_min(a), x_max(b), n(points) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw DomainError("grid needs finite x_min < x_max");
  if (points < 3) throw DomainError("grid needs at least 3 points");
}

Hamiltonian build_hamiltonian(const Potential& p, const Grid1D& g, double lambda_max) {
  const double h = g.h();
  const double inv_h2 = 1.0 / (h * h);
  Hamiltonian out;
  out.grid = g;
  const auto m = static_cast<std::size_t>(g.n - 2);
  out.matrix.diag.resize(m);
  out.matrix.off.assign(m > 0 ? m - 1 : 0, -inv_h2);
  for (std::size_t i = 0; i < m; ++i)
    out.matrix.diag[i] = 2.0 * inv_h2 + p(g.x(static_cast<int>(i) + 1));
  if (lambda_max > 0.0) out.coarse_warning = h > std::numbers::pi / (8.0 * lambda_max);
  return out;
}

EigenBasis::EigenBasis(Grid1D grid, std::vector<double> eigenvalues, Eigen::MatrixXd modes,
                       std::string potential_name)
    : grid_(grid),
      eigenvalues_(std::move(eigenvalues)),
      modes_(std::move(modes)),
      potential_name_(std::move(potential_name)) {}

std::size_t EigenBasis::count_below(double lambda) const {
  const double l2 = lambda * lambda;
  return static_cast<std::size_t>(
      std::upper_bound(eigenvalues_.begin(), eigenvalues_.end(), l2) - eigenvalues_.begin());
}

namespace {

int sign_changes(const Eigen::VectorXd& v) {
  const double thresh = 1e-8 * v.cwiseAbs().maxCoeff();
  int changes = 0;
  double last = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) <= thresh) continue;
    if (last != 0.0 && (v[i] > 0.0) != (last > 0.0)) ++changes;
    last = v[i];
  }
  return changes;
}

}  // namespace

EigenBasis eigen_decompose(const Hamiltonian& h, double lambda_max,
                           const std::string& potential_name) {
  const auto& t = h.matrix;
  const double cut = lambda_max * lambda_max;
  const std::size_t count = sturm_count(t, std::nextafter(cut, std::numeric_limits<double>::infinity()));
  const int n = h.grid.n;
  if (count == 0) return EigenBasis(h.grid, {}, Eigen::MatrixXd(n, 0), potential_name);

  std::vector<double> values = bisect_eigenvalues(t, 0, count);
  const auto vecs = inverse_iteration(t, values);
  const double scale = 1.0 / std::sqrt(h.grid.h());

  Eigen::MatrixXd modes = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    for (std::size_t i = 0; i < vecs[k].size(); ++i)
      modes(static_cast<Eigen::Index>(i) + 1, col) = vecs[k][i] * scale;
    const double thresh = 1e-8 * modes.col(col).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(modes(i, col)) > thresh) {
        if (modes(i, col) < 0.0) modes.col(col) *= -1.0;
        break;
      }
    }
  }

  // numerically tied eigenvalues are ordered by node count
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<int> nodes(count);
  for (std::size_t k = 0; k < count; ++k) nodes[k] = sign_changes(modes.col(static_cast<Eigen::Index>(k)));
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double tol = 1e-10 * std::max(1.0, std::abs(values[a]));
    if (std::abs(values[a] - values[b]) <= tol) return nodes[a] < nodes[b];
    return values[a] < values[b];
  });
  std::vector<double> sorted(count);
  Eigen::MatrixXd sorted_modes(n, static_cast<Eigen::Index>(count));
  for (std::size_t k = 0; k < count; ++k) {
    sorted[k] = values[order[k]];
    sorted_modes.col(static_cast<Eigen::Index>(k)) = modes.col(static_cast<Eigen::Index>(order[k]));
  }
  return EigenBasis(h.grid, std::move(sorted), std::move(sorted_modes), potential_name);
}

double SpectralElement::norm() const {
  double s = 0.0;
  for (double c : coeffs) s += c * c;
  return std::sqrt(s);
}

Eigen::VectorXd SpectralElement::values() const {
  const auto k = static_cast<Eigen::Index>(coeffs.size());
  const Eigen::Map<const Eigen::VectorXd> b(coeffs.data(), k);
  return basis->modes().leftCols(k) * b;
}

SpectralElement random_element(std::shared_ptr<const EigenBasis> basis, double lambda,
                               std::uint64_t seed) {
  const std::size_t dim = basis->count_below(lambda);
  Rng rng(seed);
  SpectralElement e{std::move(basis), rng.unit_vector(dim), lambda};
  return e;
}

EigenBasis solve_on_interval(const Potential& p, double R, double lambda, const BasisOptions& opts) {
  if (!(R > 0.0)) throw DomainError("truncation radius must be positive");
  if (!(lambda > 0.0)) throw DomainError("λ must be positive");
  const double spacing =
      opts.spacing > 0.0 ? opts.spacing : std::min(std::numbers::pi / (16.0 * lambda), 0.02);
  const int n = static_cast<int>(std::ceil(2.0 * R / spacing)) + 1;
  const Grid1D grid(-R, R, std::max(n, 3));
  const Hamiltonian h = build_hamiltonian(p, grid, lambda);
  return eigen_decompose(h, lambda, p.kind_name());
}

double tail_mass(const EigenBasis& basis, double lambda, double r) {
  const auto& g = basis.grid();
  const IntervalSet outside = IntervalSet::single(-r, r).complement_within(g.x_min, g.x_max);
  const std::vector<double> w = node_weights(g, outside);
  const std::size_t K = basis.count_below(lambda);
  double worst = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    double m = 0.0;
    const auto col = basis.modes().col(static_cast<Eigen::Index>(k));
    for (int i = 0; i < g.n; ++i) m += w[static_cast<std::size_t>(i)] * col[i] * col[i];
    worst = std::max(worst, m);
  }
  return worst;
}

LocalizationRadius localization_radius(const Potential& p, double lambda, double tail_tol,
                                       const BasisOptions& opts) {
  if (!(tail_tol > 0.0)) throw DomainError("tail_tol must be positive");
  if (!(lambda > 0.0)) throw DomainError("λ must be positive");
  if (!p.bounds()) throw DomainError("localization radius needs growth bounds on the potential");
  const GrowthBounds& b = *p.bounds();
  LocalizationRadius out;
  out.turning_point = b.c3 + std::pow(lambda * lambda / b.c1, 1.0 / b.beta1);
  double r = opts.safety_factor * std::max(out.turning_point, 1e-3);
  for (int d = 0; d <= opts.max_doublings; ++d) {
    auto basis = std::make_shared<const EigenBasis>(solve_on_interval(p, 2.0 * r, lambda, opts));
    const double tm = tail_mass(*basis, lambda, r);
    out.radius = r;
    out.tail_mass = tm;
    out.doublings = d;
    out.basis = basis;
    if (tm <= tail_tol) return out;
    r *= 2.0;
  }
  throw NumericalError("localization radius not certified within the doubling budget");
}

LocalizationCheck check_localization(const EigenBasis& basis, double lambda, double r,
                                     std::size_t samples, std::uint64_t seed) {
  const auto& g = basis.grid();
  const std::size_t K = basis.count_below(lambda);
  const auto cols = static_cast<Eigen::Index>(K);
  const auto w_full = trapezoid_weights(g);
  const auto w_in = node_weights(g, IntervalSet::single(-r, r));
  const Eigen::Map<const Eigen::VectorXd> wf(w_full.data(), g.n);
  const Eigen::Map<const Eigen::VectorXd> wi(w_in.data(), g.n);
  const auto phi = basis.modes().leftCols(cols);
  const Eigen::MatrixXd g_full = phi.transpose() * wf.asDiagonal() * phi;
  const Eigen::MatrixXd g_in = phi.transpose() * wi.asDiagonal() * phi;

  LocalizationCheck out;
  out.samples = samples;
  out.dimension = K;
  Rng rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const auto b = rng.unit_vector(K);
    const Eigen::Map<const Eigen::VectorXd> bv(b.data(), cols);
    const double num = bv.dot(g_full * bv);
    const double den = bv.dot(g_in * bv);
    const double ratio =
        den > 0.0 ? std::sqrt(num / den) : std::numeric_limits<double>::infinity();
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

EigenCount count_eigenvalues(const EigenBasis& basis, double lambda, double beta1) {
  EigenCount c;
  c.count = basis.count_below(lambda);
  c.reference = std::pow(lambda + 1.0, (2.0 + 3.0 * beta1) / beta1);
  c.ratio = static_cast<double>(c.count) / c.reference;
  return c;
}

CaccioppoliResult caccioppoli_ratio(const Grid1D& grid, std::span<const double> values,
                                    double eigenvalue, double x, double r) {
  if (!(r > 0.0)) throw DomainError("Caccioppoli radius must be positive");
  if (x - 2.0 * r < grid.x_min - 1e-12 || x + 2.0 * r > grid.x_max + 1e-12)
    throw DomainError("Caccioppoli window [x-2r, x+2r] leaves the truncation");
  const double h = grid.h();
  const IntervalSet inner = IntervalSet::single(x - r, x + r);
  double grad = 0.0;
  for (int i = 0; i + 1 < grid.n; ++i) {
    const double overlap = inner.measure_within(grid.x(i), grid.x(i + 1));
    if (overlap <= 0.0) continue;
    const double d = (values[static_cast<std::size_t>(i) + 1] - values[static_cast<std::size_t>(i)]) / h;
    grad += d * d * overlap;
  }
  const auto w = node_weights(grid, IntervalSet::single(x - 2.0 * r, x + 2.0 * r));
  double mass = 0.0;
  for (int i = 0; i < grid.n; ++i)
    mass += w[static_cast<std::size_t>(i)] * values[static_cast<std::size_t>(i)] *
            values[static_cast<std::size_t>(i)];
  const double denom = (1.0 + 8.0 / (r * r)) * (1.0 + eigenvalue) * mass;
  CaccioppoliResult res;
  if (denom < 1e-300) {
    res.degenerate = true;
    res.ratio = 0.0;
    return res;
  }
  res.ratio = grad / denom;
  return res;
}

CaccioppoliResult caccioppoli_check(const EigenBasis& basis, std::size_t k, double x, double r) {
  const auto col = basis.modes().col(static_cast<Eigen::Index>(k));
  const std::vector<double> v(col.data(), col.data() + col.size());
  return caccioppoli_ratio(basis.grid(), v, basis.eigenvalues()[k], x, r);
}

double orthonormality_defect(const EigenBasis& basis) {
  if (basis.size() == 0) return 0.0;
  const auto w = trapezoid_weights(basis.grid());
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), basis.grid().n);
  const Eigen::MatrixXd gram = basis.modes().transpose() * wv.asDiagonal() * basis.modes();
  const auto K = static_cast<Eigen::Index>(basis.size());
  return (gram - Eigen::MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff();
}

double max_relative_residual(const EigenBasis& basis, const Hamiltonian& h) {
  const std::size_t m = h.matrix.size();
  const double hh = basis.grid().h();
  std::vector<double> in(m);
  std::vector<double> out(m);
  double worst = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto col = basis.modes().col(static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < m; ++i) in[i] = col[static_cast<Eigen::Index>(i) + 1];
    h.matrix.apply(in, out);
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = out[i] - basis.eigenvalues()[k] * in[i];
      s += r * r;
    }
    worst = std::max(worst, std::sqrt(hh * s) / basis.eigenvalues()[k]);
  }
  return worst;
}

void export_basis(const EigenBasis& basis, const std::string& dir, const nlohmann::json& meta) {
  ensure_directory(dir);
  {
    CsvWriter ev(join_path(dir, "eigenvalues.csv"), {"k", "lambda_sq"});
    for (std::size_t k = 0; k < basis.size(); ++k)
      ev.row({static_cast<double>(k), basis.eigenvalues()[k]});
  }
  {
    std::vector<std::string> header{"x"};
    for (std::size_t k = 0; k < basis.size(); ++k) header.push_back("phi_" + std::to_string(k));
    CsvWriter modes(join_path(dir, "modes.csv"), header);
    std::vector<double> row(basis.size() + 1);
    for (int i = 0; i < basis.grid().n; ++i) {
      row[0] = basis.grid().x(i);
      for (std::size_t k = 0; k < basis.size(); ++k)
        row[k + 1] = basis.modes()(i, static_cast<Eigen::Index>(k));
      modes.row(row);
    }
  }
  nlohmann::json m = meta;
  m["grid"] = {{"x_min", basis.grid().x_min}, {"x_max", basis.grid().x_max}, {"n", basis.grid().n}};
  m["modes"] = basis.size();
  write_json(join_path(dir, "metadata.json"), m);
}

}  // namespace heatlab
