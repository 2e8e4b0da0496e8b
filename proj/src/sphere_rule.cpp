#include "fb/sphere_rule.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "fb/io.hpp"

namespace fb {

double sphere_area(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }

double monomial_sphere_integral(const MultiIndex& alpha) {
  double lg = 0.0, bsum = 0.0;
  for (int e : alpha.exp) {
    if (e < 0) throw std::invalid_argument("negative exponent");
    if (e % 2 != 0) return 0.0;
    double b = 0.5 * (e + 1);
    lg += std::lgamma(b);
    bsum += b;
  }
  return 2.0 * std::exp(lg - std::lgamma(bsum));
}

std::pair<Vec, Vec> gauss_gegenbauer(int m, double a) {
  if (m < 1) throw std::invalid_argument("need at least one node");
  // Golub-Welsch on the monic three-term recurrence for the weight (1-t^2)^a:
  // b_k = k(k+2a) / ((2k+2a+1)(2k+2a-1)).
  Mat J = Mat::Zero(m, m);
  for (int k = 1; k < m; ++k) {
    double bk = k * (k + 2.0 * a) / ((2.0 * k + 2.0 * a + 1.0) * (2.0 * k + 2.0 * a - 1.0));
    double s = std::sqrt(bk);
    J(k - 1, k) = s;
    J(k, k - 1) = s;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(J);
  if (es.info() != Eigen::Success) throw std::runtime_error("Gauss rule eigensolve failed");
  const double mu0 = std::sqrt(M_PI) * std::exp(std::lgamma(a + 1.0) - std::lgamma(a + 1.5));
  Vec nodes = es.eigenvalues();
  Vec weights(m);
  for (int i = 0; i < m; ++i) {
    double v = es.eigenvectors()(0, i);
    weights[i] = mu0 * v * v;
  }
  return {nodes, weights};
}

std::pair<Vec, Vec> gauss_legendre(int m) { return gauss_gegenbauer(m, 0.0); }

namespace {

SphereRule circle_rule(int exact_degree) {
  // Half-offset trapezoid: exact on trig polynomials of degree < K and never
  // places a node on a coordinate axis.
  const int K = 2 * exact_degree + 4;
  SphereRule r;
  r.n = 2;
  r.exact_degree = exact_degree;
  r.nodes.resize(K, 2);
  r.weights = Vec::Constant(K, 2.0 * M_PI / K);
  for (int k = 0; k < K; ++k) {
    double th = 2.0 * M_PI * (k + 0.5) / K;
    r.nodes(k, 0) = std::cos(th);
    r.nodes(k, 1) = std::sin(th);
  }
  return r;
}

SphereRule product_rule(int n, int exact_degree) {
  if (n == 2) return circle_rule(exact_degree);
  SphereRule inner = product_rule(n - 1, exact_degree);
  const int m = (exact_degree + 1) / 2 + 2;
  auto [t, wt] = gauss_gegenbauer(m, 0.5 * (n - 3));
  SphereRule r;
  r.n = n;
  r.exact_degree = exact_degree;
  const int total = m * inner.size();
  r.nodes.resize(total, n);
  r.weights.resize(total);
  int row = 0;
  for (int i = 0; i < m; ++i) {
    const double s = std::sqrt(std::max(0.0, 1.0 - t[i] * t[i]));
    for (int j = 0; j < inner.size(); ++j, ++row) {
      r.nodes.block(row, 0, 1, n - 1) = s * inner.nodes.row(j);
      r.nodes(row, n - 1) = t[i];
      r.weights[row] = wt[i] * inner.weights[j];
    }
  }
  return r;
}

void self_test(const SphereRule& r) {
  for (int i = 0; i < r.size(); ++i)
    if (std::abs(r.nodes.row(i).norm() - 1.0) > 1e-14)
      throw std::runtime_error("sphere rule: node off the unit sphere");
  if (std::abs(r.weights.sum() - sphere_area(r.n)) > 1e-10)
    throw std::runtime_error("sphere rule: weights do not sum to the sphere area");
  if (r.weights.minCoeff() <= 0.0) throw std::runtime_error("sphere rule: non-positive weight");

  // Exactness check against the closed form, all monomials up to exact_degree.
  // Per-node coordinate powers keep this O(nodes * monomials * n).
  const int D = r.exact_degree;
  std::vector<Mat> pw(r.n);  // pw[i](node, k) = x_i^k
  for (int i = 0; i < r.n; ++i) {
    pw[i].resize(r.size(), D + 1);
    pw[i].col(0).setOnes();
    for (int k = 1; k <= D; ++k) pw[i].col(k) = pw[i].col(k - 1).cwiseProduct(r.nodes.col(i));
  }
  Vec term(r.size());
  for (int d = 0; d <= D; ++d) {
    for (const MultiIndex& a : monomials_of_degree(r.n, d)) {
      term = pw[0].col(a.exp[0]);
      for (int i = 1; i < r.n; ++i) term = term.cwiseProduct(pw[i].col(a.exp[i]));
      const double got = r.weights.dot(term);
      const double want = monomial_sphere_integral(a);
      if (std::abs(got - want) > 1e-10 * std::max(1.0, std::abs(want)))
        throw std::runtime_error("sphere rule: exactness self-test failed at degree " +
                                 std::to_string(d));
    }
  }
}

}  // namespace

SphereRulePtr build_sphere_rule(int n, int exact_degree) {
  if (n < 2 || n > 5)
    throw std::invalid_argument("build_sphere_rule: supported dimensions are 2..5");
  if (exact_degree < 2) throw std::invalid_argument("build_sphere_rule: exact_degree must be >= 2");

  static std::map<std::pair<int, int>, SphereRulePtr> cache;
  auto key = std::make_pair(n, exact_degree);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  auto rule = std::make_shared<SphereRule>(product_rule(n, exact_degree));
  self_test(*rule);
  cache.emplace(key, rule);
  return rule;
}

std::string rule_to_csv(const SphereRule& rule) {
  CsvWriter w;
  std::vector<std::string> header;
  for (int i = 0; i < rule.n; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("weight");
  w.row(header);
  for (int r = 0; r < rule.size(); ++r) {
    std::vector<std::string> row;
    for (int i = 0; i < rule.n; ++i) row.push_back(format_double(rule.nodes(r, i)));
    row.push_back(format_double(rule.weights[r]));
    w.row(row);
  }
  return w.str();
}

}  // namespace fb
