#include "heatlab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "heatlab/error.hpp"

namespace heatlab {

namespace {

double positive_part(double a) { return std::max(0.0, a); }

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
  return v;
}

}  // namespace

void GrowthBounds::validate() const {
  if (!(beta1 > 0.0)) throw DomainError("beta1 must be positive");
  if (!(beta2 >= beta1)) throw DomainError("beta2 must satisfy beta2 >= beta1");
  if (!(c1 > 0.0)) throw DomainError("c1 must be positive");
  if (!(c2 > 0.0)) throw DomainError("c2 must be positive");
  if (!(c3 >= 0.0)) throw DomainError("c3 must be nonnegative");
}

double GrowthBounds::lower(double x) const {
  return c1 * std::pow(positive_part(std::abs(x) - c3), beta1);
}

double GrowthBounds::upper(double x) const { return c2 * std::pow(japanese_bracket(x), beta2); }

Potential::Potential(PotentialKind kind) : kind_(std::move(kind)) {}

Potential Potential::monomial(double beta) {
  if (!(beta > 0.0)) throw DomainError("monomial exponent must be positive");
  Potential p(Monomial{beta});
  p.bounds_ = GrowthBounds{1.0, 1.0, 0.0, beta, beta};
  return p;
}

Potential Potential::oscillating(double beta1, double beta2) {
  if (!(beta1 > 0.0) || !(beta2 >= beta1))
    throw DomainError("oscillating example needs 0 < beta1 <= beta2");
  Potential p(OscillatingExample{beta1, beta2});
  // V <= 2|x|^b2 + |x|^b1 <= 3<x>^b2; the constants are a choice, not ground truth.
  p.bounds_ = GrowthBounds{1.0, 3.0, 0.0, beta1, beta2};
  return p;
}

Potential Potential::shifted_monomial(double beta, double c3, double theta) {
  if (!(beta > 0.0)) throw DomainError("shifted monomial exponent must be positive");
  if (!(c3 >= 0.0)) throw DomainError("c3 must be nonnegative");
  if (!(theta >= 0.0)) throw DomainError("theta must be nonnegative");
  Potential p(ShiftedMonomial{beta, c3, theta});
  p.bounds_ = GrowthBounds{1.0, 1.0 + theta, c3, beta, beta};
  return p;
}

Potential Potential::tabulated(std::vector<double> x, std::vector<double> v) {
  if (x.size() < 2 || x.size() != v.size())
    throw DomainError("tabulated potential needs >= 2 samples with matching lengths");
  for (std::size_t i = 0; i < x.size(); ++i) {
    require_finite(x[i], "tabulated abscissa");
    require_finite(v[i], "tabulated value");
    if (v[i] < 0.0) throw DomainError("tabulated potential values must be nonnegative");
    if (i > 0 && !(x[i] > x[i - 1]))
      throw DomainError("tabulated abscissae must be strictly increasing");
  }
  return Potential(TabulatedSamples{std::move(x), std::move(v)});
}

Potential Potential::constant(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw DomainError("constant potential must be finite and nonnegative");
  return Potential(Constant{value});
}

std::string Potential::kind_name() const {
  return std::visit(overloaded{[](const Monomial&) { return std::string("monomial"); },
                               [](const OscillatingExample&) { return std::string("oscillating"); },
                               [](const ShiftedMonomial&) { return std::string("shifted_monomial"); },
                               [](const TabulatedSamples&) { return std::string("tabulated"); },
                               [](const Constant&) { return std::string("constant"); }},
                    kind_);
}

Potential Potential::with_bounds(std::optional<GrowthBounds> b) const {
  if (b) b->validate();
  Potential p = *this;
  p.bounds_ = b;
  return p;
}

Potential Potential::with_shift(double total_shift) const {
  if (!(total_shift >= 0.0) || !std::isfinite(total_shift))
    throw DomainError("potential shift must be finite and nonnegative");
  Potential p = *this;
  p.shift_ = total_shift;
  return p;
}

double Potential::operator()(double x) const {
  require_finite(x, "evaluation point");
  const double ax = std::abs(x);
  const double base = std::visit(
      overloaded{
          [&](const Monomial& m) { return std::pow(ax, m.beta); },
          [&](const OscillatingExample& o) {
            return std::pow(ax, o.beta2) * (std::sin(x * x) + 1.0) + std::pow(ax, o.beta1);
          },
          [&](const ShiftedMonomial& s) {
            return std::pow(positive_part(ax - s.c3), s.beta) + s.theta;
          },
          [&](const TabulatedSamples& t) {
            if (x <= t.x.front()) return t.v.front();
            if (x >= t.x.back()) return t.v.back();
            const auto it = std::upper_bound(t.x.begin(), t.x.end(), x);
            const auto i = static_cast<std::size_t>(it - t.x.begin());
            const double w = (x - t.x[i - 1]) / (t.x[i] - t.x[i - 1]);
            return (1.0 - w) * t.v[i - 1] + w * t.v[i];
          },
          [&](const Constant& c) { return c.value; }},
      kind_);
  return base + shift_;
}

double Potential::sup_on(double a, double b, int samples) const {
  if (samples < 2) samples = 2;
  double sup = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / (samples - 1);
    sup = std::max(sup, (*this)(x));
  }
  return sup;
}

double evaluate(const Potential& p, double x) { return p(x); }

Potential shift_potential(const Potential& p, double theta) {
  if (!(theta >= 0.0)) throw DomainError("shift theta must be nonnegative");
  return p.with_shift(p.shift() + theta);
}

GrowthReport verify_growth_bounds(const Potential& p, const GrowthBounds& b,
                                  std::span<const double> xs) {
  GrowthReport r;
  r.samples = xs.size();
  r.worst_violation = -std::numeric_limits<double>::infinity();
  for (const double x : xs) {
    const double v = p(x);
    const double lo = b.lower(x);
    const double hi = b.upper(x);
    const double violation = std::max(lo - v, v - hi);
    const double slack = 1e-12 * std::max(1.0, std::abs(v));
    if (violation > slack) r.holds = false;
    if (violation >= r.worst_violation) {
      r.worst_violation = violation;
      r.witness = x;
    }
  }
  return r;
}

SplitReport verify_split(const SplitBound& split, std::span<const double> xs, double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  SplitReport r;
  for (const double x : xs) {
    const double v1 = split.v1(x);
    const double dv1 = (split.v1(x + h) - split.v1(x - h)) / (2.0 * h);
    const double v2 = split.v2(x);
    const double lhs = std::abs(v1) + std::abs(dv1) + std::pow(std::abs(v2), 4.0 / 3.0);
    const double ratio = lhs / std::pow(japanese_bracket(x), split.beta2);
    if (ratio >= r.max_ratio) {
      r.max_ratio = ratio;
      r.witness = x;
    }
  }
  r.holds = r.max_ratio <= split.c4 * (1.0 + 1e-12);
  return r;
}

std::vector<double> uniform_samples(double a, double b, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {a};
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i)
    xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return xs;
}

nlohmann::json to_json(const Potential& p) {
  nlohmann::json params = std::visit(
      overloaded{[](const Monomial& m) { return nlohmann::json{{"beta", m.beta}}; },
                 [](const OscillatingExample& o) {
                   return nlohmann::json{{"beta1", o.beta1}, {"beta2", o.beta2}};
                 },
                 [](const ShiftedMonomial& s) {
                   return nlohmann::json{{"beta", s.beta}, {"c3", s.c3}, {"theta", s.theta}};
                 },
                 [](const TabulatedSamples& t) { return nlohmann::json{{"x", t.x}, {"v", t.v}}; },
                 [](const Constant& c) { return nlohmann::json{{"value", c.value}}; }},
      p.kind());
  if (p.shift() != 0.0) params["shift"] = p.shift();
  nlohmann::json j{{"kind", p.kind_name()}, {"params", params}};
  if (p.bounds()) {
    const auto& b = *p.bounds();
    j["bounds"] = {{"c1", b.c1}, {"c2", b.c2}, {"c3", b.c3}, {"beta1", b.beta1}, {"beta2", b.beta2}};
  } else {
    j["bounds"] = nullptr;
  }
  return j;
}

namespace {

double get_number(const nlohmann::json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw DomainError(path + "." + key + ": missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw DomainError(path + "." + key + ": must be a number");
  return v.get<double>();
}

void reject_unknown(const nlohmann::json& obj, std::initializer_list<const char*> allowed,
                    const std::string& path) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw DomainError(path + "." + key + ": unknown field");
  }
}

}  // namespace

Potential potential_from_json(const nlohmann::json& j) {
  const std::string path = "potential";
  if (!j.is_object()) throw DomainError(path + ": must be an object");
  reject_unknown(j, {"kind", "params", "bounds"}, path);
  if (!j.contains("kind") || !j.at("kind").is_string()) throw DomainError(path + ".kind: missing");
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  const std::string pp = path + ".params";
  if (!params.is_object()) throw DomainError(pp + ": must be an object");

  Potential p = Potential::constant(0.0);
  if (kind == "monomial") {
    reject_unknown(params, {"beta", "shift"}, pp);
    p = Potential::monomial(get_number(params, "beta", pp));
  } else if (kind == "oscillating") {
    reject_unknown(params, {"beta1", "beta2", "shift"}, pp);
    p = Potential::oscillating(get_number(params, "beta1", pp), get_number(params, "beta2", pp));
  } else if (kind == "shifted_monomial") {
    reject_unknown(params, {"beta", "c3", "theta", "shift"}, pp);
    p = Potential::shifted_monomial(get_number(params, "beta", pp), get_number(params, "c3", pp),
                                    get_number(params, "theta", pp));
  } else if (kind == "tabulated") {
    reject_unknown(params, {"x", "v", "shift"}, pp);
    if (!params.contains("x") || !params.contains("v"))
      throw DomainError(pp + ": tabulated potential needs x and v arrays");
    p = Potential::tabulated(params.at("x").get<std::vector<double>>(),
                             params.at("v").get<std::vector<double>>());
  } else if (kind == "constant") {
    reject_unknown(params, {"value", "shift"}, pp);
    p = Potential::constant(get_number(params, "value", pp));
  } else {
    throw DomainError(path + ".kind: unknown potential kind '" + kind + "'");
  }
  if (params.contains("shift")) p = shift_potential(p, get_number(params, "shift", pp));

  if (j.contains("bounds")) {
    const auto& b = j.at("bounds");
    if (b.is_null()) {
      p = p.with_bounds(std::nullopt);
    } else {
      const std::string bp = path + ".bounds";
      if (!b.is_object()) throw DomainError(bp + ": must be an object or null");
      reject_unknown(b, {"c1", "c2", "c3", "beta1", "beta2"}, bp);
      GrowthBounds g{get_number(b, "c1", bp), get_number(b, "c2", bp), get_number(b, "c3", bp),
                     get_number(b, "beta1", bp), get_number(b, "beta2", bp)};
      try {
        g.validate();
      } catch (const DomainError& e) {
        throw DomainError(bp + ": " + e.what());
      }
      p = p.with_bounds(g);
    }
  }
  return p;
}

}  // namespace heatlab
