#include "fb/blowup.hpp"

#include <cmath>

#include "fb/io.hpp"

namespace fb {

BoundaryTrace rescale_trace(const Field& f, const Vec& Q, double r, double d, RescaleMode mode,
                            const SphereRulePtr& rule, const BallMassOracle* mass) {
  if (r <= 0) throw std::invalid_argument("rescale_trace: r must be positive");
  BoundaryTrace t;
  t.rule = rule;
  t.center = Q;
  t.radius = 1.0;
  t.values.resize(rule->size());
  double scale;
  if (mode == RescaleMode::Power) {
    scale = std::pow(r, d);
  } else {
    if (!mass) throw std::invalid_argument("rescale_trace: measure mode needs a ball-mass oracle");
    const double m = (*mass)(Q, r);
    if (!(m > 0)) throw std::runtime_error("rescale_trace: zero ball mass");
    scale = m / std::pow(r, rule->n - 2);
  }
  for (int i = 0; i < rule->size(); ++i) t.values[i] = f.value(Q + r * rule->node(i)) / scale;
  return t;
}

nlohmann::ordered_json BlowupRecord::to_json() const {
  nlohmann::ordered_json j;
  j["center"] = std::vector<double>(center.data(), center.data() + center.size());
  j["d"] = d;
  j["mode"] = mode == RescaleMode::Power ? "power" : "measure";
  j["scales"] = scales;
  if (tangent) j["tangent"] = tangent->poly().to_json();
  j["rate"] = rate.to_json();
  return j;
}

std::string BlowupRecord::distances_csv() const {
  CsvWriter w;
  std::vector<std::string> header{"scale"};
  for (double s : scales) header.push_back(format_double(s));
  w.row(header);
  for (int i = 0; i < distances.rows(); ++i) {
    std::vector<std::string> row{format_double(scales[i])};
    for (int j = 0; j < distances.cols(); ++j) row.push_back(format_double(distances(i, j)));
    w.row(row);
  }
  return w.str();
}

BlowupRecord blowup_sequence(const Field& f, const Vec& Q, int d,
                             const std::vector<double>& scales, const SphereRulePtr& rule,
                             RescaleMode mode, const BallMassOracle* mass) {
  if (scales.size() < 4) throw std::invalid_argument("blowup_sequence: need at least 4 scales");
  for (size_t i = 0; i + 1 < scales.size(); ++i)
    if (!(scales[i] > scales[i + 1]) || scales[i + 1] <= 0)
      throw std::invalid_argument("blowup_sequence: scales must be positive decreasing");

  BlowupRecord rec;
  rec.center = Q;
  rec.d = d;
  rec.mode = mode;
  rec.scales = scales;
  for (double s : scales) rec.traces.push_back(rescale_trace(f, Q, s, d, mode, rule, mass));

  const int m = static_cast<int>(scales.size());
  rec.distances = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const Vec diff = rec.traces[i].values - rec.traces[j].values;
      const double dist = std::sqrt(rule->weights.dot(diff.cwiseProduct(diff)));
      rec.distances(i, j) = rec.distances(j, i) = dist;
    }
  }

  // Tangent polynomial: degree-d harmonic projection of the finest trace.
  auto coeffs = analyze(rec.traces.back(), d);
  Polynomial tangent(rule->n);
  for (const auto& e : coeffs.entries)
    if (e.degree == d && e.c != 0.0)
      tangent = tangent + coeffs.basis->poly(e.j).poly() * e.c;
  rec.tangent = HarmonicPolynomial(tangent);

  // Rate: max distance to all smaller scales, fitted against the scale. Rows
  // with fewer than three smaller scales understate the max and would bias
  // the exponent, so they are used only when the sequence is short.
  const int slack = m >= 7 ? 3 : 1;
  std::vector<double> rr, dd;
  for (int i = 0; i + slack < m; ++i) {
    double worst = 0.0;
    for (int j = i + 1; j < m; ++j) worst = std::max(worst, rec.distances(i, j));
    rr.push_back(scales[i]);
    dd.push_back(worst);
  }
  rec.rate = rate_fit(rr, dd, 3);
  return rec;
}

double blowup_gradient_error(const Field& f, const Vec& Q, double r, int d,
                             const HarmonicPolynomial& tangent, const SphereRulePtr& rule,
                             int radial_order) {
  auto [t, wt] = gauss_legendre(radial_order);
  const double rd1 = std::pow(r, 1 - d);
  double acc = 0.0;
  for (int k = 0; k < radial_order; ++k) {
    const double s = 0.5 * (t[k] + 1.0);
    double shell = 0.0;
    for (int i = 0; i < rule->size(); ++i) {
      const Vec x = s * rule->node(i);
      const Vec diff = rd1 * f.gradient(Q + r * x) - tangent.gradient_at(x);
      shell += rule->weights[i] * diff.squaredNorm();
    }
    acc += wt[k] * 0.5 * std::pow(s, rule->n - 1) * shell;
  }
  return acc;
}

DensityLimit density_limit(const BallMassOracle& mass, const Vec& Q, int n, double d,
                           const std::vector<double>& scales) {
  if (scales.empty()) throw std::invalid_argument("density_limit: no scales");
  DensityLimit out;
  std::vector<double> q;
  for (double r : scales) q.push_back(mass(Q, r) / std::pow(r, n - 2 + d));
  out.value = q.back();
  const double r_last = scales.back();
  double lo = q.back(), hi = q.back();
  for (size_t i = 0; i < scales.size(); ++i) {
    if (scales[i] <= 10.0 * r_last) {
      lo = std::min(lo, q[i]);
      hi = std::max(hi, q[i]);
    }
  }
  out.variation = std::abs(out.value) > 0 ? (hi - lo) / std::abs(out.value) : 0.0;
  out.exists = out.variation < 0.05;
  return out;
}

HolderVariationReport holder_variation_check(const BlowupRecord& a, const BlowupRecord& b,
                                             double alpha, double beta) {
  if (!a.tangent || !b.tangent) throw std::invalid_argument("holder_variation_check: no tangents");
  if (a.tangent->dim() != b.tangent->dim() || a.d != b.d)
    throw std::invalid_argument("holder_variation_check: degree or dimension mismatch");
  HolderVariationReport rep;
  const Polynomial diff = a.tangent->poly() - b.tangent->poly();
  rep.sup_diff = diff.sup_ball();
  rep.separation = (a.center - b.center).norm();
  rep.exponent = alpha * beta / (beta + 2.0);
  rep.ratio = rep.separation > 0 ? rep.sup_diff / std::pow(rep.separation, rep.exponent) : 0.0;
  return rep;
}

std::string ClosedSetSample::to_csv() const {
  CsvWriter w;
  std::vector<std::string> header;
  for (int i = 0; i < n; ++i) header.push_back("x" + std::to_string(i));
  w.row(header);
  for (const Vec& p : points) {
    std::vector<std::string> row;
    for (int i = 0; i < n; ++i) row.push_back(format_double(p[i]));
    w.row(row);
  }
  return w.str();
}

ClosedSetSample ClosedSetSample::clipped(double radius) const {
  ClosedSetSample out;
  out.n = n;
  out.resolution = resolution;
  for (const Vec& p : points)
    if (p.norm() <= radius) out.points.push_back(p);
  return out;
}

ClosedSetSample ClosedSetSample::rescaled(const Vec& center, double r) const {
  ClosedSetSample out;
  out.n = n;
  out.resolution = resolution / r;
  for (const Vec& p : points) out.points.push_back((p - center) / r);
  return out;
}

ClosedSetSample zero_set_sample(const Field& f, const Vec& lo, const Vec& hi,
                                int cells_per_axis) {
  if (cells_per_axis < 1) throw std::invalid_argument("zero_set_sample: bad resolution");
  ClosedSetSample out;
  out.n = f.dim();
  out.points = zero_crossings_box(f, lo, hi, cells_per_axis);
  out.resolution = (hi - lo).norm() / cells_per_axis;
  return out;
}

double excess(const ClosedSetSample& A, const ClosedSetSample& B) {
  if (A.points.empty()) return 0.0;
  if (B.points.empty()) return std::numeric_limits<double>::infinity();
  double sup = 0.0;
  for (const Vec& a : A.points) {
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& b : B.points) best = std::min(best, (a - b).norm());
    sup = std::max(sup, best);
  }
  return sup;
}

std::vector<AttouchWetsEntry> attouch_wets_distance(const ClosedSetSample& A,
                                                    const ClosedSetSample& B,
                                                    const std::vector<double>& radii) {
  std::vector<AttouchWetsEntry> out;
  for (double r : radii) {
    AttouchWetsEntry e;
    e.radius = r;
    e.excess_ab = excess(A.clipped(r), B);
    e.excess_ba = excess(B.clipped(r), A);
    e.max_excess = std::max(e.excess_ab, e.excess_ba);
    out.push_back(e);
  }
  return out;
}

}  // namespace fb
