#include "fb/functionals.hpp"

#include <cmath>

#include "fb/io.hpp"

namespace fb {

double functional_H(double r, const Vec& Q, const Field& f, const SphereRule& rule) {
  if (r <= 0) throw std::invalid_argument("functional_H: radius must be positive");
  double s = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    const double v = f.value(Q + r * rule.node(i));
    s += rule.weights[i] * v * v;
  }
  return s * std::pow(r, rule.n - 1);
}

double functional_D(double r, const Vec& Q, const Field& f, const SphereRule& rule,
                    int radial_order) {
  if (r <= 0) throw std::invalid_argument("functional_D: radius must be positive");
  auto [t, wt] = gauss_legendre(radial_order);
  double acc = 0.0;
  for (int k = 0; k < radial_order; ++k) {
    const double s = 0.5 * r * (t[k] + 1.0);  // node in (0, r)
    double shell = 0.0;
    for (int i = 0; i < rule.size(); ++i)
      shell += rule.weights[i] * f.gradient(Q + s * rule.node(i)).squaredNorm();
    acc += wt[k] * 0.5 * r * std::pow(s, rule.n - 1) * shell;
  }
  return acc;
}

double frequency_N(double r, const Vec& Q, const Field& f, const SphereRule& rule,
                   int radial_order) {
  const double H = functional_H(r, Q, f, rule);
  if (H < kDegenerateH) throw DegenerateRadiusError(r);
  return r * functional_D(r, Q, f, rule, radial_order) / H;
}

double weiss_W(double r, const Vec& Q, const Field& f, double d, const SphereRule& rule,
               int radial_order) {
  if (d <= 0) throw std::invalid_argument("weiss_W: d must be positive");
  const int n = rule.n;
  const double H = functional_H(r, Q, f, rule);
  const double D = functional_D(r, Q, f, rule, radial_order);
  const double term_D = D / std::pow(r, n - 2 + 2 * d);
  const double term_H = d * H / std::pow(r, n - 1 + 2 * d);
  const double W = term_D - term_H;
  if (H >= kDegenerateH) {
    const double N = r * D / H;
    const double W_id = H / std::pow(r, n - 1 + 2 * d) * (N - d);
    // relative to the scale of the two terms, which may nearly cancel
    if (std::abs(W - W_id) > 1e-8 * std::max({std::abs(term_D), std::abs(term_H), 1e-30}))
      throw std::runtime_error("weiss_W: identity W = H(N-d)/r^{n-1+2d} violated");
  }
  return W;
}

std::string FunctionalScan::to_csv() const {
  CsvWriter w;
  w.row({"r", "H", "D", "N", "W", "flags"});
  for (const auto& row : rows) {
    if (row.degenerate) {
      w.row({format_double(row.r), format_double(row.H), format_double(row.D), "", "",
             "degenerate"});
    } else {
      w.row({format_double(row.r), format_double(row.H), format_double(row.D),
             format_double(row.N), format_double(row.W), "ok"});
    }
  }
  return w.str();
}

nlohmann::ordered_json FunctionalScan::metadata_json() const {
  nlohmann::ordered_json j;
  j["center"] = std::vector<double>(center.data(), center.data() + center.size());
  j["d"] = d;
  j["rule_exact_degree"] = rule_exact_degree;
  j["radial_order"] = radial_order;
  j["gradient_mode"] = analytic_gradient ? "analytic" : "finite-difference";
  j["rows"] = rows.size();
  int degenerate = 0;
  for (const auto& r : rows) degenerate += r.degenerate ? 1 : 0;
  j["degenerate_rows"] = degenerate;
  return j;
}

const ScanRow& FunctionalScan::finest() const {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it)
    if (!it->degenerate) return *it;
  throw std::runtime_error("scan: all radii degenerate");
}

FunctionalScan scan_functionals(const Field& f, const Vec& Q, double d, double r_max, double r_min,
                                int points_per_decade, const SphereRulePtr& rule,
                                int radial_order) {
  if (!(0 < r_min && r_min < r_max)) throw std::invalid_argument("scan: need 0 < r_min < r_max");
  if (points_per_decade < 1) throw std::invalid_argument("scan: points_per_decade must be >= 1");
  FunctionalScan out;
  out.center = Q;
  out.d = d;
  out.rule_exact_degree = rule->exact_degree;
  out.radial_order = radial_order;
  out.analytic_gradient = f.has_analytic_gradient();
  const double decades = std::log10(r_max / r_min);
  const int m = std::max(2, static_cast<int>(std::lround(points_per_decade * decades)) + 1);
  const int n = rule->n;
  for (int i = 0; i < m; ++i) {
    const double r = r_max * std::pow(r_min / r_max, static_cast<double>(i) / (m - 1));
    ScanRow row;
    row.r = r;
    row.H = functional_H(r, Q, f, *rule);
    row.D = functional_D(r, Q, f, *rule, radial_order);
    if (row.H < kDegenerateH) {
      row.degenerate = true;
    } else {
      row.N = r * row.D / row.H;
      const double term_D = row.D / std::pow(r, n - 2 + 2 * d);
      const double term_H = d * row.H / std::pow(r, n - 1 + 2 * d);
      row.W = term_D - term_H;
      const double W_id = row.H / std::pow(r, n - 1 + 2 * d) * (row.N - d);
      if (std::abs(row.W - W_id) > 1e-8 * std::max({std::abs(term_D), std::abs(term_H), 1e-30}))
        throw std::runtime_error("scan: Weiss identity violated");
    }
    out.rows.push_back(row);
  }
  return out;
}

WeissDerivativeReport weiss_derivative_check(const Field& f, const Vec& Q, double d, double r,
                                             const SphereRulePtr& rule, int L,
                                             std::optional<int> trace_poly_degree,
                                             int radial_order) {
  const int n = rule->n;
  const double h = 1e-4 * r;
  WeissDerivativeReport rep;
  rep.fd_value = (weiss_W(r + h, Q, f, d, *rule, radial_order) -
                  weiss_W(r - h, Q, f, d, *rule, radial_order)) /
                 (2.0 * h);

  // Normalized trace y -> f(Q + r y) / r^d on the unit sphere.
  BoundaryTrace trace;
  trace.rule = rule;
  trace.center = Q;
  trace.radius = 1.0;
  trace.poly_degree = trace_poly_degree;
  trace.values.resize(rule->size());
  const double rd = std::pow(r, d);
  for (int i = 0; i < rule->size(); ++i) trace.values[i] = f.value(Q + r * rule->node(i)) / rd;
  const double w_hom = weiss_spectral(analyze(trace, L), d, ExtensionMode::Homogeneous);

  const double w_here = weiss_W(r, Q, f, d, *rule, radial_order);
  double bnd = 0.0;
  for (int i = 0; i < rule->size(); ++i) {
    const Vec nu = rule->node(i);
    const Vec x = Q + r * nu;
    const double defect = f.gradient(x).dot(nu) - (d / r) * f.value(x);
    bnd += rule->weights[i] * defect * defect;
  }
  bnd *= std::pow(r, n - 1);

  rep.formula_value = (n + 2.0 * d - 2.0) / r * (w_hom - w_here) + bnd / std::pow(r, n - 2 + 2 * d);
  rep.residual = std::abs(rep.fd_value - rep.formula_value);
  return rep;
}

AlmostMinimizerReport almost_minimizer_check(const Field& f, const Vec& Q, double d, double r,
                                             const SphereRulePtr& rule, int L,
                                             std::optional<int> trace_poly_degree,
                                             int radial_order) {
  AlmostMinimizerReport rep;
  rep.w_f = weiss_W(r, Q, f, d, *rule, radial_order);
  BoundaryTrace trace;
  trace.rule = rule;
  trace.center = Q;
  trace.radius = 1.0;
  trace.poly_degree = trace_poly_degree;
  trace.values.resize(rule->size());
  const double rd = std::pow(r, d);
  for (int i = 0; i < rule->size(); ++i) trace.values[i] = f.value(Q + r * rule->node(i)) / rd;
  rep.w_harmonic_competitor = weiss_spectral(analyze(trace, L), d, ExtensionMode::Harmonic);
  rep.gap = rep.w_f - rep.w_harmonic_competitor;
  return rep;
}

nlohmann::ordered_json RateFit::to_json() const {
  nlohmann::ordered_json j;
  j["identically_zero"] = identically_zero;
  if (!identically_zero) {
    j["amplitude"] = amplitude;
    j["exponent"] = exponent;
    j["r_squared"] = r_squared;
  }
  j["points_used"] = points_used;
  return j;
}

RateFit rate_fit(const std::vector<double>& radii, const std::vector<double>& values,
                 int min_points) {
  if (radii.size() != values.size()) throw std::invalid_argument("rate_fit: size mismatch");
  std::vector<double> lr, lv;
  for (size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(values[i]) || std::abs(values[i]) < 1e-14) continue;
    lr.push_back(std::log(radii[i]));
    lv.push_back(std::log(std::abs(values[i])));
  }
  RateFit fit;
  fit.points_used = static_cast<int>(lr.size());
  if (lr.empty()) {
    fit.identically_zero = true;
    return fit;
  }
  if (fit.points_used < min_points)
    throw std::invalid_argument("rate_fit: need at least " + std::to_string(min_points) +
                                " usable points, have " + std::to_string(fit.points_used));
  Mat A(lr.size(), 2);
  Vec b(lr.size());
  for (size_t i = 0; i < lr.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = lr[i];
    b[i] = lv[i];
  }
  Vec sol = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  fit.amplitude = std::exp(sol[0]);
  fit.exponent = sol[1];
  const Vec res = b - A * sol;
  const double mean = b.mean();
  double sstot = 0.0;
  for (int i = 0; i < b.size(); ++i) sstot += (b[i] - mean) * (b[i] - mean);
  fit.r_squared = sstot > 0 ? 1.0 - res.squaredNorm() / sstot : 1.0;
  return fit;
}

RateFit rate_fit_scan(const FunctionalScan& scan, ScanQuantity q, int min_points) {
  std::vector<double> r, v;
  for (const auto& row : scan.rows) {
    if (row.degenerate) continue;
    r.push_back(row.r);
    v.push_back(q == ScanQuantity::W ? row.W : row.N - scan.d);
  }
  return rate_fit(r, v, min_points);
}

}  // namespace fb
