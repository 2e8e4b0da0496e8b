#include "fb/spectral.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace fb {

BoundaryTrace trace_of_field(const Field& f, const SphereRulePtr& rule, const Vec& center,
                             double radius, std::optional<int> poly_degree) {
  if (f.dim() != rule->n) throw std::invalid_argument("trace_of_field: dimension mismatch");
  if (radius <= 0) throw std::invalid_argument("trace_of_field: radius must be positive");
  BoundaryTrace t;
  t.rule = rule;
  t.center = center;
  t.radius = radius;
  t.poly_degree = poly_degree;
  t.values.resize(rule->size());
  for (int i = 0; i < rule->size(); ++i) t.values[i] = f.value(center + radius * rule->node(i));
  return t;
}

SphericalBasis::SphericalBasis(SphereRulePtr rule, int L) : rule_(std::move(rule)), L_(L) {
  const int n = rule_->n;
  std::vector<Mat> coord_pow(n);  // node powers up to L
  for (int i = 0; i < n; ++i) {
    coord_pow[i].resize(rule_->size(), L + 1);
    coord_pow[i].col(0).setOnes();
    for (int k = 1; k <= L; ++k)
      coord_pow[i].col(k) = coord_pow[i].col(k - 1).cwiseProduct(rule_->nodes.col(i));
  }
  std::vector<Mat> blocks;
  int total = 0;
  for (int d = 0; d <= L; ++d) {
    auto basis = harmonic_basis(n, d);
    const auto mons = monomials_of_degree(n, d);
    Mat mon_vals(rule_->size(), mons.size());
    Vec col(rule_->size());
    for (size_t m = 0; m < mons.size(); ++m) {
      col = coord_pow[0].col(mons[m].exp[0]);
      for (int i = 1; i < n; ++i) col = col.cwiseProduct(coord_pow[i].col(mons[m].exp[i]));
      mon_vals.col(static_cast<int>(m)) = col;
    }
    Mat coeffs = Mat::Zero(mons.size(), basis.size());
    std::map<MultiIndex, int> row_of;
    for (size_t m = 0; m < mons.size(); ++m) row_of[mons[m]] = static_cast<int>(m);
    for (size_t b = 0; b < basis.size(); ++b)
      for (const auto& [a, c] : basis[b].poly().terms()) coeffs(row_of.at(a), static_cast<int>(b)) = c;
    blocks.push_back(mon_vals * coeffs);
    for (auto& hp : basis) {
      degrees_.push_back(d);
      polys_.push_back(std::move(hp));
    }
    total += static_cast<int>(blocks.back().cols());
  }
  values_.resize(rule_->size(), total);
  int at = 0;
  for (const Mat& b : blocks) {
    values_.block(0, at, rule_->size(), b.cols()) = b;
    at += static_cast<int>(b.cols());
  }
}

std::shared_ptr<const SphericalBasis> SphericalBasis::get(const SphereRulePtr& rule, int L) {
  static std::map<std::pair<const SphereRule*, int>, std::shared_ptr<const SphericalBasis>> cache;
  auto key = std::make_pair(rule.get(), L);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto basis = std::shared_ptr<const SphericalBasis>(new SphericalBasis(rule, L));
  cache.emplace(key, basis);
  return basis;
}

double SpectralCoefficients::coeff_norm_sq() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.c * e.c;
  return s;
}

double SpectralCoefficients::energy_at_degree(int d) const {
  double s = 0.0;
  for (const auto& e : entries)
    if (e.degree == d) s += e.c * e.c;
  return s;
}

nlohmann::ordered_json SpectralCoefficients::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["max_degree"] = max_degree;
  j["normalization"] = "unit-l2-sphere";
  j["coeffs"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json t;
    t["degree"] = e.degree;
    t["c"] = e.c;
    j["coeffs"].push_back(t);
  }
  j["parseval_defect"] = parseval_defect;
  return j;
}

SpectralCoefficients analyze(const BoundaryTrace& trace, int L) {
  if (!trace.rule) throw std::invalid_argument("analyze: trace has no rule");
  if (L < 0) throw std::invalid_argument("analyze: negative cutoff");
  const int need = trace.poly_degree ? *trace.poly_degree + L : 2 * L;
  if (trace.rule->exact_degree < need)
    throw std::runtime_error("analyze: insufficient rule exactness (" +
                             std::to_string(trace.rule->exact_degree) + " < " +
                             std::to_string(need) + "); refusing to alias");
  auto basis = SphericalBasis::get(trace.rule, L);
  const Vec weighted = trace.rule->weights.cwiseProduct(trace.values);
  const Vec c = basis->values().transpose() * weighted;
  SpectralCoefficients out;
  out.n = trace.rule->n;
  out.max_degree = L;
  out.basis = basis;
  out.trace_l2_sq = trace.l2_norm_sq();
  for (int j = 0; j < basis->size(); ++j)
    out.entries.push_back({j, basis->degree_of(j), c[j]});
  out.parseval_defect = out.trace_l2_sq - out.coeff_norm_sq();
  return out;
}

namespace {

/// Sum over degree groups of c_j |x|^{d-d_j} P_j(x) with P_j solid harmonics.
class HomogeneousExtensionField : public Field {
 public:
  HomogeneousExtensionField(const SpectralCoefficients& coeffs, double d) : d_(d) {
    n_ = coeffs.n;
    std::map<int, Polynomial> groups;
    for (const auto& e : coeffs.entries) {
      if (e.c == 0.0) continue;
      auto [it, inserted] = groups.try_emplace(e.degree, Polynomial(n_));
      it->second = it->second + coeffs.basis->poly(e.j).poly() * e.c;
    }
    for (auto& [deg, p] : groups) groups_.emplace_back(deg, std::move(p));
  }

  int dim() const override { return n_; }

  double value(const Vec& x) const override {
    const double r = x.norm();
    if (r < 1e-300) return 0.0;
    double s = 0.0;
    for (const auto& [deg, p] : groups_) s += std::pow(r, d_ - deg) * p(x);
    return s;
  }

  Vec gradient(const Vec& x) const override {
    const double r = x.norm();
    if (r < 1e-300) return Vec::Zero(n_);
    Vec g = Vec::Zero(n_);
    for (const auto& [deg, p] : groups_) {
      const double s = d_ - deg;
      const double rs = std::pow(r, s);
      g += rs * p.gradient_at(x) + s * rs / (r * r) * p(x) * x;
    }
    return g;
  }

  bool has_analytic_gradient() const override { return true; }

 private:
  int n_;
  double d_;
  std::vector<std::pair<int, Polynomial>> groups_;
};

}  // namespace

FieldPtr extend(const SpectralCoefficients& coeffs, ExtensionMode mode, double d) {
  if (!coeffs.basis) throw std::invalid_argument("extend: coefficients carry no basis");
  if (mode == ExtensionMode::Harmonic) {
    Polynomial sum(coeffs.n);
    for (const auto& e : coeffs.entries)
      if (e.c != 0.0) sum = sum + coeffs.basis->poly(e.j).poly() * e.c;
    return std::make_shared<PolynomialField>(std::move(sum));
  }
  if (d <= 0) throw std::invalid_argument("extend: homogeneous mode requires d > 0");
  return std::make_shared<HomogeneousExtensionField>(coeffs, d);
}

double weiss_spectral(const SpectralCoefficients& coeffs, double d, ExtensionMode mode) {
  if (d <= 0) throw std::invalid_argument("weiss_spectral: d must be positive");
  const int n = coeffs.n;
  double s = 0.0;
  for (const auto& e : coeffs.entries) {
    const double c2 = e.c * e.c;
    if (mode == ExtensionMode::Harmonic) {
      s += (e.degree - d) * c2;
    } else {
      const double lam = e.degree * (n + e.degree - 2.0);
      s += (d * d + lam - d * (n + 2.0 * d - 2.0)) / (n + 2.0 * d - 2.0) * c2;
    }
  }
  return s;
}

double kappa(int n, double d) {
  if (n < 2) throw std::invalid_argument("kappa: n must be >= 2");
  if (d <= 0) throw std::invalid_argument("kappa: d must be positive");
  const double fl = std::floor(d);
  return (1.0 + fl - d) / (n + fl + d - 1.0);
}

nlohmann::ordered_json EpiperimetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["w_harmonic"] = w_harmonic;
  j["w_homogeneous"] = w_homogeneous;
  j["kappa"] = kappa;
  j["margin"] = margin;
  j["pass"] = pass;
  j["parseval_defect"] = parseval_defect;
  return j;
}

EpiperimetricReport epiperimetric_check(const BoundaryTrace& trace, double d, int L) {
  auto coeffs = analyze(trace, L);
  EpiperimetricReport r;
  r.w_harmonic = weiss_spectral(coeffs, d, ExtensionMode::Harmonic);
  r.w_homogeneous = weiss_spectral(coeffs, d, ExtensionMode::Homogeneous);
  r.kappa = kappa(trace.rule->n, d);
  r.margin = (1.0 - r.kappa) * r.w_homogeneous - r.w_harmonic;
  r.pass = r.w_harmonic <= (1.0 - r.kappa) * r.w_homogeneous + 1e-10;
  r.parseval_defect = coeffs.parseval_defect;
  return r;
}

BoundaryTrace synthesize_trace(const std::shared_ptr<const SphericalBasis>& basis,
                               const std::vector<std::pair<int, double>>& coeffs) {
  BoundaryTrace t;
  t.rule = basis->rule();
  t.center = Vec::Zero(basis->n());
  t.radius = 1.0;
  t.values = Vec::Zero(t.rule->size());
  int max_deg = 0;
  for (const auto& [j, c] : coeffs) {
    if (j < 0 || j >= basis->size()) throw std::invalid_argument("synthesize_trace: bad index");
    t.values += c * basis->values().col(j);
    max_deg = std::max(max_deg, basis->degree_of(j));
  }
  t.poly_degree = max_deg;
  return t;
}

}  // namespace fb
