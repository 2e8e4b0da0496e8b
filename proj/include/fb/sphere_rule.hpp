#pragma once

#include <memory>
#include <utility>

#include "fb/polynomial.hpp"

namespace fb {

/// Quadrature rule on S^{n-1} with declared polynomial exactness.
/// Nodes are unit vectors (rows), weights positive, sum of weights = |S^{n-1}|.
struct SphereRule {
  int n = 0;
  Mat nodes;     // size() x n
  Vec weights;   // size()
  int exact_degree = 0;

  int size() const { return static_cast<int>(weights.size()); }
  Vec node(int i) const { return nodes.row(i).transpose(); }

  /// Integrate a function given its values at the nodes.
  double integrate(const Vec& values) const { return weights.dot(values); }
};

using SphereRulePtr = std::shared_ptr<const SphereRule>;

/// Build (and verify) a rule for n in {2..5}. Results are cached per
/// (n, exact_degree), so repeated calls return the same object.
/// n=2: half-offset trapezoid on the circle; n=3: Gauss-Legendre (polar) x
/// trapezoid (azimuth); n=4,5: recursive product with Gegenbauer-weighted
/// Gauss nodes in the last coordinate.
SphereRulePtr build_sphere_rule(int n, int exact_degree);

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Closed-form integral of x^alpha over S^{n-1} (zero if any exponent is odd).
double monomial_sphere_integral(const MultiIndex& alpha);

/// Gauss-Legendre nodes/weights on (-1,1) for weight 1.
std::pair<Vec, Vec> gauss_legendre(int m);

/// Gauss nodes/weights on (-1,1) for weight (1-t^2)^a, a > -1.
std::pair<Vec, Vec> gauss_gegenbauer(int m, double a);

/// CSV serialization: one row per node, columns x0..x{n-1},weight.
std::string rule_to_csv(const SphereRule& rule);

}  // namespace fb
