#include "heatlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <Eigen/Core>

#include "heatlab/control.hpp"
#include "heatlab/eigensolver.hpp"
#include "heatlab/error.hpp"
#include "heatlab/ghost_lift.hpp"
#include "heatlab/io.hpp"
#include "heatlab/smallness.hpp"
#include "heatlab/spectral_estimator.hpp"
#include "heatlab/thick_sets.hpp"

namespace heatlab {

namespace {

constexpr const char* kVersion = "1.0.0";

using json = nlohmann::json;

// Reads fields of one JSON object, records resolved values and rejects unknown keys.
class Fields {
 public:
  Fields(const json* obj, std::string path) : path_(std::move(path)) {
    if (obj != nullptr && !obj->is_null()) {
      if (!obj->is_object()) fail("", "must be an object");
      obj_ = *obj;
    } else {
      obj_ = json::object();
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError((key.empty() ? path_ : path_ + "." + key) + ": " + msg);
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  double num(const std::string& key) {
    seen_.push_back(key);
    if (!obj_.contains(key)) fail(key, "missing");
    const json& v = obj_.at(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "must be finite");
    out[key] = d;
    return d;
  }
  double num(const std::string& key, double def) {
    if (!obj_.contains(key)) {
      seen_.push_back(key);
      out[key] = def;
      return def;
    }
    return num(key);
  }
  std::optional<double> opt_num(const std::string& key) {
    if (!obj_.contains(key) || obj_.at(key).is_null()) {
      seen_.push_back(key);
      return std::nullopt;
    }
    return num(key);
  }
  double positive(const std::string& key) {
    const double d = num(key);
    if (!(d > 0.0)) fail(key, "must be positive");
    return d;
  }
  double positive(const std::string& key, double def) {
    const double d = num(key, def);
    if (!(d > 0.0)) fail(key, "must be positive");
    return d;
  }
  long long integer(const std::string& key, std::optional<long long> def = std::nullopt) {
    seen_.push_back(key);
    if (!obj_.contains(key)) {
      if (!def) fail(key, "missing");
      out[key] = *def;
      return *def;
    }
    const json& v = obj_.at(key);
    if (!v.is_number_integer()) fail(key, "must be an integer");
    const long long i = v.get<long long>();
    out[key] = i;
    return i;
  }
  std::uint64_t seed(const std::string& key, std::uint64_t def) {
    seen_.push_back(key);
    if (!obj_.contains(key)) {
      out[key] = def;
      return def;
    }
    const json& v = obj_.at(key);
    if (!v.is_number_unsigned()) fail(key, "must be a nonnegative integer");
    const auto s = v.get<std::uint64_t>();
    out[key] = s;
    return s;
  }
  bool flag(const std::string& key, bool def) {
    seen_.push_back(key);
    if (!obj_.contains(key)) {
      out[key] = def;
      return def;
    }
    if (!obj_.at(key).is_boolean()) fail(key, "must be a boolean");
    const bool b = obj_.at(key).get<bool>();
    out[key] = b;
    return b;
  }
  std::string str(const std::string& key, std::optional<std::string> def = std::nullopt) {
    seen_.push_back(key);
    if (!obj_.contains(key)) {
      if (!def) fail(key, "missing");
      out[key] = *def;
      return *def;
    }
    if (!obj_.at(key).is_string()) fail(key, "must be a string");
    const auto s = obj_.at(key).get<std::string>();
    out[key] = s;
    return s;
  }
  std::vector<double> nums(const std::string& key) {
    seen_.push_back(key);
    if (!obj_.contains(key)) fail(key, "missing");
    const json& v = obj_.at(key);
    if (!v.is_array()) fail(key, "must be an array of numbers");
    if (v.empty()) fail(key, "must be nonempty");
    std::vector<double> r;
    for (const auto& e : v) {
      if (!e.is_number()) fail(key, "must be an array of numbers");
      r.push_back(e.get<double>());
      if (!std::isfinite(r.back())) fail(key, "entries must be finite");
    }
    out[key] = r;
    return r;
  }
  IntervalSet intervals(const std::string& key) {
    seen_.push_back(key);
    if (!obj_.contains(key)) fail(key, "missing");
    try {
      IntervalSet s = interval_set_from_json(obj_.at(key));
      out[key] = to_json(s);
      return s;
    } catch (const std::exception& e) {
      fail(key, e.what());
    }
  }
  void done() const {
    for (const auto& [k, _] : obj_.items())
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end()) fail(k, "unknown field");
  }

  json out = json::object();

 private:
  std::string path_;
  json obj_;
  std::vector<std::string> seen_;
};

const std::vector<std::string> kExperiments{"partition", "thickness",      "eigen",   "lift",
                                            "smallness", "spectral-sweep", "control", "costlaw"};

bool needs_potential(const std::string& e) { return e != "partition" && e != "thickness"; }
bool needs_set(const std::string& e) {
  return e == "thickness" || e == "spectral-sweep" || e == "control" || e == "costlaw";
}

SetSpec parse_set(const json& j, json& resolved) {
  Fields f(&j, "set");
  const std::string type = f.str("type");
  SetSpec spec;
  if (type == "full") {
    spec = FullSet{};
  } else if (type == "empty") {
    spec = EmptySet{};
  } else if (type == "intervals") {
    spec = ExplicitSet{f.intervals("intervals")};
  } else if (type == "thick") {
    ThickSetSpec t;
    t.gamma = f.num("gamma");
    if (!(t.gamma > 0.0 && t.gamma < 1.0)) f.fail("gamma", "γ must lie in (0,1)");
    t.tau = f.num("tau", 0.0);
    if (t.tau < 0.0) f.fail("tau", "must be nonnegative");
    t.L = f.positive("L", 1.0);
    t.s = f.num("s", 0.0);
    if (t.s < 0.0) f.fail("s", "must be nonnegative");
    t.seed = f.seed("seed", 0);
    if (f.has("N")) {
      const long long n = f.integer("N");
      if (n < 1) f.fail("N", "must be at least 1");
      t.N = static_cast<int>(n);
    }
    spec = t;
  } else if (type == "regular") {
    RegularSetSpec r;
    r.L = f.positive("L", 1.0);
    r.sigma = f.num("sigma", 0.0);
    if (r.sigma < 0.0) f.fail("sigma", "must be nonnegative");
    r.width = f.positive("width", 0.25);
    if (r.width > 0.5) f.fail("width", "must not exceed 1/2");
    spec = r;
  } else {
    f.fail("type", "must be one of full, empty, intervals, thick, regular");
  }
  f.done();
  resolved = f.out;
  return spec;
}

// basis options shared by experiments that need an eigenbasis
void parse_basis_fields(Fields& f) {
  if (f.has("R")) f.positive("R");
  f.num("spacing", 0.0);
  f.positive("tail_tol", 1e-8);
}

void parse_control_fields(Fields& f, bool need_T) {
  f.positive("lambda");
  if (need_T) f.positive("T");
  if (f.integer("m", 16) < 8) f.fail("m", "time quadrature needs m >= 8");
  f.seed("seed", 1);
  if (f.has("mode") && f.integer("mode") < 0) f.fail("mode", "must be nonnegative");
  if (f.num("alpha0", 1.0) < 1.0) f.fail("alpha0", "α0 must be at least 1");
  if (f.num("alpha1", 1.0) < 0.0) f.fail("alpha1", "α1 must be nonnegative");
  const double z = f.num("zeta", 1.0);
  if (!(z > 0.0)) f.fail("zeta", "ζ must be positive");
  if (!(z < 2.0)) f.fail("zeta", "Lebeau-Robbiano exponent must satisfy ζ<2");
  f.positive("kappa1", 1.0);
  f.positive("kappa2", 1.0);
  f.positive("kappa3", 1.0);
  if (f.num("lambda_base", 0.0) < 0.0) f.fail("lambda_base", "must be nonnegative");
  f.flag("staged", false);
  parse_basis_fields(f);
}

json parse_params(const std::string& e, const json* j) {
  Fields f(j, "params");
  if (e == "partition") {
    f.positive("L");
    if (f.num("s") < 0.0) f.fail("s", "must be nonnegative");
    const long long n = f.integer("N");
    if (n < 1 || n > 100000000) f.fail("N", "must lie in [1, 1e8]");
    if (f.has("asymptotic_tol")) f.positive("asymptotic_tol");
  } else if (e == "thickness") {
    // all inputs live in the set spec
  } else if (e == "eigen") {
    const double a = f.num("x_min");
    const double b = f.num("x_max");
    if (!(a < b)) f.fail("x_max", "must exceed x_min");
    if (f.integer("n") < 3) f.fail("n", "must be at least 3");
    f.positive("lambda_max");
  } else if (e == "lift") {
    f.positive("lambda");
    f.positive("y_max");
    const long long m = f.integer("m", 41);
    if (m < 3 || m % 2 == 0) f.fail("m", "must be odd and at least 3");
    const std::string kind = f.str("kind", std::string("cosh"));
    if (kind != "cosh" && kind != "sinh") f.fail("kind", "must be cosh or sinh");
    f.seed("seed", 1);
    if (f.has("mode") && f.integer("mode") < 0) f.fail("mode", "must be nonnegative");
    f.flag("aux", true);
    parse_basis_fields(f);
  } else if (e == "smallness") {
    const auto lams = f.nums("lambda_list");
    for (double l : lams)
      if (!(l > 0.0)) f.fail("lambda_list", "entries must be positive");
    const IntervalSet w = f.intervals("omega");
    if (w.empty() || w.intervals().front().lo < 0.0 || w.intervals().back().hi > 1.0)
      f.fail("omega", "must lie in [0, 1]");
    if (!(w.measure() > 0.0 && w.measure() < 0.5)) f.fail("omega", "|ω| must lie in (0, 1/2)");
    f.num("x_start", 0.0);
    f.positive("length", 1.0);
    if (f.integer("rows_per_half", 8) < 1) f.fail("rows_per_half", "must be at least 1");
    if (f.integer("n_random", 50) < 1) f.fail("n_random", "must be at least 1");
    f.seed("seed", 1);
    const double d1 = f.positive("d1", 1.0);
    if (f.positive("d2", 1.0) < d1) f.fail("d2", "must be at least d1");
    parse_basis_fields(f);
  } else if (e == "spectral-sweep") {
    const auto lams = f.nums("lambda_list");
    for (double l : lams)
      if (!(l > 0.0)) f.fail("lambda_list", "entries must be positive");
    f.positive("zeta_target", 1.0);
    f.flag("with_log", false);
    parse_basis_fields(f);
  } else if (e == "control") {
    parse_control_fields(f, true);
    if (f.has("residual_tol")) f.positive("residual_tol");
    if (f.integer("time_samples", 33) < 2) f.fail("time_samples", "must be at least 2");
  } else if (e == "costlaw") {
    parse_control_fields(f, false);
    auto ts = f.nums("T_list");
    for (double t : ts)
      if (!(t > 0.0)) f.fail("T_list", "entries must be positive");
    const auto [lo, hi] = std::minmax_element(ts.begin(), ts.end());
    if (ts.size() < 4) f.fail("T_list", "needs at least 4 horizons");
    if (*hi < 8.0 * *lo * (1.0 - 1e-12)) f.fail("T_list", "must span at least a factor 8");
  }
  f.done();
  return f.out;
}

json set_to_json(const SetSpec& s) {
  if (std::holds_alternative<FullSet>(s)) return {{"type", "full"}};
  if (std::holds_alternative<EmptySet>(s)) return {{"type", "empty"}};
  if (const auto* e = std::get_if<ExplicitSet>(&s)) return {{"type", "intervals"}, {"intervals", to_json(e->set)}};
  if (const auto* t = std::get_if<ThickSetSpec>(&s)) {
    json j{{"type", "thick"}, {"gamma", t->gamma}, {"tau", t->tau}, {"L", t->L}, {"s", t->s}, {"seed", t->seed}};
    if (t->N) j["N"] = *t->N;
    return j;
  }
  const auto& r = std::get<RegularSetSpec>(s);
  return {{"type", "regular"}, {"L", r.L}, {"sigma", r.sigma}, {"width", r.width}};
}

Partition partition_covering(const ThickSetSpec& t, double extent) {
  if (t.N) return build_partition(t.L, t.s, *t.N);
  int n = std::max(4, static_cast<int>(std::ceil(extent / t.L)) + 2);
  while (true) {
    Partition p = build_partition(t.L, t.s, n);
    if (p.covered_range().hi >= extent) return p;
    if (n > 50000000) throw NumericalError("partition cannot cover the truncation");
    n *= 2;
  }
}

}  // namespace

IntervalSet build_set(const SetSpec& spec, double extent) {
  if (std::holds_alternative<FullSet>(spec)) return IntervalSet::single(-extent, extent);
  if (std::holds_alternative<EmptySet>(spec)) return IntervalSet{};
  if (const auto* e = std::get_if<ExplicitSet>(&spec)) return e->set;
  if (const auto* t = std::get_if<ThickSetSpec>(&spec)) {
    const Partition p = partition_covering(*t, extent);
    const ThicknessProfile prof{PowerRho{t->s}, t->gamma, t->L, t->tau};
    return generate_thick(prof, p, t->seed).set;
  }
  const auto& r = std::get<RegularSetSpec>(spec);
  return generate_regular(r.L, r.sigma, r.width, extent);
}

ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (k != "experiment" && k != "output_dir" && k != "potential" && k != "set" && k != "params")
      throw ConfigError(k + ": unknown field");
  ExperimentConfig c;
  if (!j.contains("experiment") || !j.at("experiment").is_string())
    throw ConfigError("experiment: missing");
  c.experiment = j.at("experiment").get<std::string>();
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end())
    throw ConfigError("experiment: must be one of partition, thickness, eigen, lift, smallness, "
                      "spectral-sweep, control, costlaw");
  if (!j.contains("output_dir") || !j.at("output_dir").is_string() ||
      j.at("output_dir").get<std::string>().empty())
    throw ConfigError("output_dir: missing");
  c.output_dir = j.at("output_dir").get<std::string>();

  c.resolved = {{"experiment", c.experiment}, {"output_dir", c.output_dir}};
  if (j.contains("potential")) {
    try {
      c.potential = potential_from_json(j.at("potential"));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
    c.resolved["potential"] = to_json(*c.potential);
  } else if (needs_potential(c.experiment)) {
    throw ConfigError("potential: missing");
  }
  if (j.contains("set")) {
    json r;
    c.set = parse_set(j.at("set"), r);
    c.resolved["set"] = set_to_json(*c.set);
  } else if (needs_set(c.experiment)) {
    throw ConfigError("set: missing");
  }
  if (c.experiment == "thickness") {
    const auto* t = std::get_if<ThickSetSpec>(&*c.set);
    if (t == nullptr) throw ConfigError("set.type: thickness experiment needs a thick set");
    if (!t->N) throw ConfigError("set.N: missing");
  }
  c.params = parse_params(c.experiment, j.contains("params") ? &j.at("params") : nullptr);
  c.resolved["params"] = c.params;

  const bool wants_basis_bounds =
      c.experiment != "partition" && c.experiment != "thickness" && c.experiment != "eigen" &&
      !c.params.contains("R");
  if (wants_basis_bounds && c.potential && !c.potential->bounds())
    throw ConfigError("params.R: required when the potential carries no growth bounds");

  if ((c.experiment == "control" || c.experiment == "costlaw") && c.potential &&
      c.potential->bounds()) {
    if (const auto* t = std::get_if<ThickSetSpec>(&*c.set)) {
      const GrowthBounds& b = *c.potential->bounds();
      if (t->s < b.beta2 / 2.0)
        c.warnings.push_back("set.s: s >= β2/2 expected for null control, got s < β2/2");
      if (t->tau >= b.beta1 / 4.0) c.warnings.push_back("set.tau: strict inequality τ < β1/4 required");
    }
  }
  return c;
}

std::string summary_line(const Check& c) {
  const char* tag = c.status == CheckStatus::Pass   ? "PASS"
                    : c.status == CheckStatus::Fail ? "FAIL"
                                                    : "REPORT-ONLY";
  return std::string(tag) + " " + c.name + (c.detail.empty() ? "" : ": " + c.detail);
}

bool RunOutcome::failed() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const Check& c) { return c.status == CheckStatus::Fail; });
}

std::string resolve_output_dir(const ExperimentConfig& cfg, const std::string& root) {
  const std::filesystem::path p(cfg.output_dir);
  if (root.empty() || p.is_absolute()) return p.string();
  return (std::filesystem::path(root) / p).string();
}

namespace {

struct Context {
  const ExperimentConfig& cfg;
  std::string dir;
  RunOutcome out;
  json extra = json::object();

  void check(const std::string& name, bool ok, const std::string& detail) {
    out.checks.push_back({name, ok ? CheckStatus::Pass : CheckStatus::Fail, detail});
  }
  void report(const std::string& name, const std::string& detail) {
    out.checks.push_back({name, CheckStatus::ReportOnly, detail});
  }
  void flag(const std::string& what) { out.numerical_flags.push_back(what); }
  std::string path(const std::string& file) const { return join_path(dir, file); }
};

std::string fmt(double v) { return format_double(v); }

double p_num(const json& p, const char* key) { return p.at(key).get<double>(); }

std::shared_ptr<const EigenBasis> make_basis(const Potential& pot, double lambda_max,
                                             const json& p, double& extent) {
  BasisOptions opts;
  opts.spacing = p_num(p, "spacing");
  if (p.contains("R")) {
    extent = p_num(p, "R");
    return std::make_shared<const EigenBasis>(solve_on_interval(pot, extent, lambda_max, opts));
  }
  const LocalizationRadius lr = localization_radius(pot, lambda_max, p_num(p, "tail_tol"), opts);
  extent = 2.0 * lr.radius;
  return lr.basis;
}

void run_partition(Context& ctx) {
  const json& p = ctx.cfg.params;
  const double L = p_num(p, "L");
  const double s = p_num(p, "s");
  const int N = p.at("N").get<int>();
  const Partition part = build_partition(L, s, N);
  const auto& xs = part.centers();
  {
    CsvWriter csv(ctx.path("partition.csv"), {"n", "x_n", "ratio"});
    for (std::size_t n = 0; n < xs.size(); ++n) {
      const double ratio = n == 0 ? std::nan("")
                                  : xs[n] / std::pow((s + 1.0) * L * static_cast<double>(n), 1.0 / (s + 1.0));
      csv.row({static_cast<double>(n), xs[n], ratio});
    }
  }
  write_json(ctx.path("partition.json"), to_json(part));
  bool increasing = true;
  for (std::size_t n = 0; n + 1 < xs.size(); ++n) increasing = increasing && xs[n + 1] > xs[n];
  ctx.check("centers strictly increasing", increasing, "");
  const double rN = partition_asymptotics(part).back();
  if (p.contains("asymptotic_tol")) {
    ctx.check("asymptotic ratio at n=N", std::abs(rN - 1.0) <= p_num(p, "asymptotic_tol"),
              "r_N = " + fmt(rN));
  } else {
    ctx.report("asymptotic ratio at n=N", "r_N = " + fmt(rN));
  }
}

void run_thickness(Context& ctx) {
  const auto& t = std::get<ThickSetSpec>(*ctx.cfg.set);
  const Partition part = build_partition(t.L, t.s, *t.N);
  const ThicknessProfile prof{PowerRho{t.s}, t.gamma, t.L, t.tau};
  const GeneratedSet g = generate_thick(prof, part, t.seed);
  write_json(ctx.path("set.json"), to_json(g.set));
  const PartitionThicknessReport rep = is_thick_partitionwise(g.set, part, t.gamma, t.tau);
  {
    CsvWriter csv(ctx.path("pieces.csv"), {"n", "lo", "hi", "ratio", "required"});
    for (const auto& pc : rep.pieces)
      csv.row({static_cast<double>(pc.n), pc.piece.lo, pc.piece.hi, pc.ratio, pc.required});
  }
  ctx.check("partitionwise thickness", rep.holds,
            "worst margin " + fmt(rep.worst_margin) + " at piece " + std::to_string(rep.worst_piece));
  if (g.stopped_at) ctx.report("generator underflow", "pieces with |n| >= " + std::to_string(*g.stopped_at) + " left empty");
  ctx.report("measure", fmt(g.set.measure()));
}

void run_eigen(Context& ctx) {
  const json& p = ctx.cfg.params;
  const Grid1D grid(p_num(p, "x_min"), p_num(p, "x_max"), p.at("n").get<int>());
  const double lmax = p_num(p, "lambda_max");
  const Hamiltonian h = build_hamiltonian(*ctx.cfg.potential, grid, lmax);
  const EigenBasis basis = eigen_decompose(h, lmax, ctx.cfg.potential->kind_name());
  export_basis(basis, ctx.dir, ctx.cfg.resolved);
  const double defect = orthonormality_defect(basis);
  ctx.check("orthonormality", defect <= 1e-8, "max |Gram - I| = " + fmt(defect));
  if (basis.size() > 0) ctx.report("max relative residual", fmt(max_relative_residual(basis, h)));
  ctx.report("modes", std::to_string(basis.size()));
  if (h.coarse_warning) ctx.report("grid resolution", "h exceeds pi/(8 lambda_max)");
}

SpectralElement initial_element(std::shared_ptr<const EigenBasis> basis, double lambda,
                                const json& p) {
  if (p.contains("mode")) {
    const auto k = p.at("mode").get<std::size_t>();
    if (k >= basis->count_below(lambda)) throw DomainError("params.mode: mode above the cutoff");
    std::vector<double> c(k + 1, 0.0);
    c[k] = 1.0;
    return SpectralElement{std::move(basis), c, lambda};
  }
  return random_element(std::move(basis), lambda, p.at("seed").get<std::uint64_t>());
}

void run_lift(Context& ctx) {
  const json& p = ctx.cfg.params;
  const Potential& pot = *ctx.cfg.potential;
  const double lam = p_num(p, "lambda");
  double extent = 0.0;
  const auto basis = make_basis(pot, lam, p, extent);
  const SpectralElement e = initial_element(basis, lam, p);
  const LiftKind kind = p.at("kind").get<std::string>() == "cosh" ? LiftKind::Cosh : LiftKind::Sinh;
  const LiftedField f = lift(e, p_num(p, "y_max"), p.at("m").get<int>(), kind);
  export_field(f, ctx.dir, ctx.cfg.resolved);
  bool parity = true;
  const auto m = static_cast<Eigen::Index>(f.y.size());
  for (Eigen::Index j = 0; j < m; ++j) {
    const double sign = kind == LiftKind::Cosh ? 1.0 : -1.0;
    parity = parity && (f.values.col(j) == sign * f.values.col(m - 1 - j));
  }
  ctx.check("parity in y", parity, to_string(kind));
  const ResidualReport nd = residual_nondivergence(f, pot);
  ctx.report("nondivergence residual", "relative " + fmt(nd.relative) + ", absolute " + fmt(nd.absolute));
  if (p.at("aux").get<bool>()) {
    const AuxOdeSolution aux = solve_aux_ode(pot, basis->grid().x_min, basis->grid().x_max, basis->grid().n);
    if (!std::isfinite(aux.boundary_value)) throw NumericalError("auxiliary boundary value overflows");
    const auto [lo, hi] = std::minmax_element(aux.values.begin(), aux.values.end());
    ctx.check("auxiliary bounds", *lo >= 1.0 - 1e-8 && *hi <= aux.upper_bound() + 1e-8,
              "min " + fmt(*lo) + ", max " + fmt(*hi));
    const ResidualReport dv = residual_divergence(f, aux);
    ctx.report("divergence residual", "relative " + fmt(dv.relative) + ", absolute " + fmt(dv.absolute));
  }
}

void run_smallness(Context& ctx) {
  const json& p = ctx.cfg.params;
  const Potential& pot = *ctx.cfg.potential;
  const auto lams = p.at("lambda_list").get<std::vector<double>>();
  const double lmax = *std::max_element(lams.begin(), lams.end());
  double extent = 0.0;
  const auto basis = make_basis(pot, lmax, p, extent);
  const IntervalSet omega = interval_set_from_json(p.at("omega"));
  SmallnessGeometry geom;
  geom.x_start = p_num(p, "x_start");
  geom.length = p_num(p, "length");
  geom.rows_per_half = p.at("rows_per_half").get<int>();
  const auto samples = collect_samples(basis, pot, lams, omega, geom,
                                       p.at("n_random").get<std::size_t>(),
                                       p.at("seed").get<std::uint64_t>());
  {
    CsvWriter csv(ctx.path("samples.csv"),
                  {"sup_inner", "sup_omega", "sup_outer", "omega_measure", "Lambda", "lambda", "seed"});
    for (const auto& s : samples)
      csv.row({s.sup_inner, s.sup_omega, s.sup_outer, s.omega_measure, s.ellipticity, s.lambda,
               static_cast<double>(s.seed)});
  }
  bool ordered = true;
  for (const auto& s : samples) ordered = ordered && s.sup_omega <= s.sup_inner && s.sup_inner <= s.sup_outer;
  ctx.check("region ordering", ordered, std::to_string(samples.size()) + " samples");
  if (samples.size() < 30) {
    ctx.report("alpha fit", "skipped: fewer than 30 samples");
    return;
  }
  SmallnessReport rep = fit_alpha(samples);
  const double Lam = samples.front().ellipticity;
  if (Lam > 1.0) rep.band = theoretical_band(Lam, omega.measure(), p_num(p, "d1"), p_num(p, "d2"));
  json rj = to_json(rep);
  rj["Lambda"] = Lam;
  rj["omega_measure"] = omega.measure();
  rj["reference_constant"] = smallness_constant_reference(p_num(p, "d1"), Lam);
  write_json(ctx.path("report.json"), rj);
  ctx.check("zero violations", rep.violations == 0, std::to_string(rep.violations) + " violations");
  ctx.check("feasible constant", !rep.infeasible, "C = " + fmt(rep.c));
  if (rep.infeasible) ctx.flag("no feasible (alpha, C) with C <= 1e12");
  const double lw = std::log(omega.measure());
  ctx.report("alpha", fmt(rep.alpha) + ", alpha |log|omega||^2 = " + fmt(rep.alpha * lw * lw) +
                          (rep.degenerate ? " (degenerate)" : ""));
}

void run_spectral(Context& ctx) {
  const json& p = ctx.cfg.params;
  const Potential& pot = *ctx.cfg.potential;
  const auto lams = p.at("lambda_list").get<std::vector<double>>();
  const double lmax = *std::max_element(lams.begin(), lams.end());
  double extent = 0.0;
  const auto basis = make_basis(pot, lmax, p, extent);
  const IntervalSet omega = build_set(*ctx.cfg.set, extent);
  write_json(ctx.path("set.json"), to_json(omega));
  const ScalingFit fit = scaling_sweep(*basis, lams, omega, p_num(p, "zeta_target"),
                                       p.at("with_log").get<bool>());
  {
    CsvWriter csv(ctx.path("sweep.csv"), {"lambda", "dim", "lambda_min", "K"});
    for (const auto& pt : fit.points)
      csv.row({pt.lambda, static_cast<double>(pt.dimension), pt.lambda_min, pt.K});
  }
  write_json(ctx.path("fit.json"), to_json(fit));
  const GramMatrix g = gram_matrix(*basis, lmax, omega);
  const BestConstant bc = best_constant(g.G);
  ctx.check("Gram spectrum in [0, 1]", bc.lambda_min >= -1e-10 && bc.lambda_max <= 1.0 + 1e-10,
            "[" + fmt(bc.lambda_min) + ", " + fmt(bc.lambda_max) + "]");
  std::vector<std::size_t> order(fit.points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return fit.points[a].lambda < fit.points[b].lambda; });
  bool interlace = true;
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    interlace = interlace && fit.points[order[i + 1]].lambda_min <= fit.points[order[i]].lambda_min + 1e-10;
  ctx.check("interlacing", interlace, "");
  if (fit.dropped > 0) ctx.flag(std::to_string(fit.dropped) + " lambda values not observable at this precision");
  ctx.report("zeta_hat", fit.zeta_hat ? fmt(*fit.zeta_hat) : std::string("undefined (K = 1)"));
}

ControlConfig control_config(const json& p, const IntervalSet& omega) {
  ControlConfig c;
  if (p.contains("T")) c.T = p_num(p, "T");
  c.cutoff = p_num(p, "lambda");
  c.omega = omega;
  c.m = p.at("m").get<int>();
  c.alpha0 = p_num(p, "alpha0");
  c.alpha1 = p_num(p, "alpha1");
  c.zeta = p_num(p, "zeta");
  c.kappa1 = p_num(p, "kappa1");
  c.kappa2 = p_num(p, "kappa2");
  c.kappa3 = p_num(p, "kappa3");
  c.lambda_base = p_num(p, "lambda_base");
  return c;
}

void run_control(Context& ctx) {
  const json& p = ctx.cfg.params;
  const Potential& pot = *ctx.cfg.potential;
  const double lam = p_num(p, "lambda");
  double extent = 0.0;
  const auto basis = make_basis(pot, lam, p, extent);
  const IntervalSet omega = build_set(*ctx.cfg.set, extent);
  write_json(ctx.path("set.json"), to_json(omega));
  const ControlConfig cfg = control_config(p, omega);
  const SpectralElement u0 = initial_element(basis, lam, p);
  const bool staged = p.at("staged").get<bool>();
  const ControlResult r = staged ? run_lr_control(u0, cfg) : synthesize_hum_control(u0, cfg);
  const double tol = p.contains("residual_tol") ? p_num(p, "residual_tol") : (staged ? 1e-6 : 1e-8);

  json rj{{"cost", r.cost},
          {"cost_squared", r.cost_squared},
          {"residual", r.residual},
          {"stages", r.stages},
          {"skipped_stages", r.skipped_stages},
          {"gramian", {{"lambda_min", r.condition.lambda_min},
                       {"lambda_max", r.condition.lambda_max},
                       {"condition", r.condition.condition},
                       {"flagged", r.condition.flagged}}},
          {"c_obs", observability_constant(cfg)}};
  write_json(ctx.path("result.json"), rj);

  if (!staged) {
    const int nt = p.at("time_samples").get<int>();
    std::vector<double> times(static_cast<std::size_t>(nt));
    for (int i = 0; i < nt; ++i) times[static_cast<std::size_t>(i)] = cfg.T * i / (nt - 1);
    const Eigen::MatrixXd h = control_samples(*basis, r, cfg.T, times, omega);
    {
      CsvWriter csv(ctx.path("control.csv"), {"t", "x", "h"});
      for (int i = 0; i < nt; ++i)
        for (int k = 0; k < basis->grid().n; ++k)
          csv.row({times[static_cast<std::size_t>(i)], basis->grid().x(k), h(i, k)});
    }
    const GramMatrix g = gram_matrix(*basis, lam, omega);
    Eigen::VectorXd b0 = Eigen::VectorXd::Zero(r.q.size());
    for (std::size_t k = 0; k < u0.coeffs.size(); ++k) b0[static_cast<Eigen::Index>(k)] = u0.coeffs[k];
    const std::span<const double> eig(basis->eigenvalues().data(), static_cast<std::size_t>(r.q.size()));
    const auto norms = trajectory_norms(g.G, eig, b0, r.q, cfg.T, times);
    CsvWriter csv(ctx.path("trajectory.csv"), {"t", "norm"});
    for (int i = 0; i < nt; ++i) csv.row({times[static_cast<std::size_t>(i)], norms[static_cast<std::size_t>(i)]});

    Eigen::VectorXd eb(b0.size());
    for (Eigen::Index k = 0; k < b0.size(); ++k) eb[k] = std::exp(-eig[static_cast<std::size_t>(k)] * cfg.T) * b0[k];
    ctx.check("observability identification",
              r.cost_squared * r.condition.lambda_min <= eb.squaredNorm() * (1.0 + 1e-8) + 1e-300,
              "cost^2 lambda_min = " + fmt(r.cost_squared * r.condition.lambda_min));
  }
  ctx.check("terminal residual", r.residual <= tol, fmt(r.residual) + " (tolerance " + fmt(tol) + ")");
  ctx.report("cost", fmt(r.cost));
  if (r.condition.flagged) ctx.flag("Gramian numerically singular");
}

void run_costlaw(Context& ctx) {
  const json& p = ctx.cfg.params;
  const Potential& pot = *ctx.cfg.potential;
  const double lam = p_num(p, "lambda");
  double extent = 0.0;
  const auto basis = make_basis(pot, lam, p, extent);
  const IntervalSet omega = build_set(*ctx.cfg.set, extent);
  const ControlConfig cfg = control_config(p, omega);
  const SpectralElement u0 = initial_element(basis, lam, p);
  const auto ts = p.at("T_list").get<std::vector<double>>();
  const CostLawReport rep = cost_law_sweep(u0, cfg, ts, p.at("staged").get<bool>());
  {
    CsvWriter csv(ctx.path("costlaw.csv"), {"T", "cost", "C_obs", "regressor"});
    for (std::size_t i = 0; i < rep.T.size(); ++i) csv.row({rep.T[i], rep.cost[i], rep.c_obs[i], rep.regressor[i]});
  }
  write_json(ctx.path("fit.json"), {{"zeta", cfg.zeta},
                                    {"slope", rep.fit.slope},
                                    {"intercept", rep.fit.intercept},
                                    {"r_squared", rep.fit.r_squared}});
  ctx.check("cost increases as T decreases", rep.monotone, "");
  ctx.report("log-cost fit", "slope " + fmt(rep.fit.slope) + ", R^2 " + fmt(rep.fit.r_squared));
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& cfg, const std::string& output_dir) {
  Context ctx{cfg, output_dir, {}, json::object()};
  ctx.out.output_dir = output_dir;
  ensure_directory(output_dir);
  const std::string& e = cfg.experiment;
  for (const auto& w : cfg.warnings) ctx.report("warning", w);
  if (e == "partition") run_partition(ctx);
  else if (e == "thickness") run_thickness(ctx);
  else if (e == "eigen") run_eigen(ctx);
  else if (e == "lift") run_lift(ctx);
  else if (e == "smallness") run_smallness(ctx);
  else if (e == "spectral-sweep") run_spectral(ctx);
  else if (e == "control") run_control(ctx);
  else if (e == "costlaw") run_costlaw(ctx);

  json meta = e == "eigen" || e == "lift" ? read_json(ctx.path("metadata.json")) : json::object();
  meta["config"] = cfg.resolved;
  meta["version"] = kVersion;
  meta["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION);
  json seeds = json::array();
  if (cfg.params.contains("seed")) seeds.push_back(cfg.params.at("seed"));
  if (cfg.set)
    if (const auto* t = std::get_if<ThickSetSpec>(&*cfg.set)) seeds.push_back(t->seed);
  meta["seeds"] = seeds;
  meta["numerical_flags"] = ctx.out.numerical_flags;
  write_json(ctx.path("metadata.json"), meta);

  std::ofstream summary(ctx.path("summary.txt"), std::ios::binary);
  for (const auto& c : ctx.out.checks) summary << summary_line(c) << '\n';
  for (const auto& f : ctx.out.numerical_flags) summary << "FLAG " << f << '\n';
  return ctx.out;
}

std::string report_directory(const std::string& dir) {
  const std::string meta_path = join_path(dir, "metadata.json");
  if (!std::filesystem::exists(meta_path)) throw DomainError(dir + ": no metadata.json");
  const json meta = read_json(meta_path);
  std::ostringstream os;
  os << "experiment: " << meta.at("config").at("experiment").get<std::string>() << '\n';
  os << "version: " << meta.value("version", "?") << '\n';
  std::ifstream summary(join_path(dir, "summary.txt"));
  std::string line;
  while (std::getline(summary, line)) os << line << '\n';
  os << "artifacts:";
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path().filename().string());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) os << ' ' << f;
  os << '\n';
  return os.str();
}

}  // namespace heatlab
