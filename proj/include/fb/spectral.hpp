#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fb/field.hpp"
#include "fb/polynomial.hpp"
#include "fb/sphere_rule.hpp"

namespace fb {

/// Samples of a scalar function at the nodes of a sphere rule. Values are read
/// as a function on the unit sphere; center/radius record where the samples
/// came from. poly_degree, when set, declares that the trace is the
/// restriction of a polynomial of that degree (enables exactness checks).
struct BoundaryTrace {
  SphereRulePtr rule;
  Vec values;
  Vec center;
  double radius = 1.0;
  std::optional<int> poly_degree;

  double l2_norm_sq() const { return rule->weights.dot(values.cwiseProduct(values)); }
};

BoundaryTrace trace_of_field(const Field& f, const SphereRulePtr& rule, const Vec& center,
                             double radius, std::optional<int> poly_degree = std::nullopt);

/// Orthonormal spherical-harmonic basis up to degree L, with values cached at
/// the nodes of a fixed rule. Shared and reused per (rule, L).
class SphericalBasis {
 public:
  static std::shared_ptr<const SphericalBasis> get(const SphereRulePtr& rule, int L);

  int n() const { return rule_->n; }
  int max_degree() const { return L_; }
  const SphereRulePtr& rule() const { return rule_; }
  int size() const { return static_cast<int>(degrees_.size()); }
  int degree_of(int j) const { return degrees_[j]; }
  const HarmonicPolynomial& poly(int j) const { return polys_[j]; }
  /// nodes x basis matrix of values.
  const Mat& values() const { return values_; }

 private:
  SphericalBasis(SphereRulePtr rule, int L);
  SphereRulePtr rule_;
  int L_;
  std::vector<int> degrees_;
  std::vector<HarmonicPolynomial> polys_;
  Mat values_;
};

struct SpectralEntry {
  int j;       // basis index
  int degree;  // d_j
  double c;    // coefficient
};

struct SpectralCoefficients {
  int n = 0;
  int max_degree = 0;  // L
  std::vector<SpectralEntry> entries;
  double parseval_defect = 0.0;
  double trace_l2_sq = 0.0;
  std::shared_ptr<const SphericalBasis> basis;

  double coeff_norm_sq() const;
  /// Sum of c_j^2 over entries with d_j == d.
  double energy_at_degree(int d) const;
  nlohmann::ordered_json to_json() const;
};

/// Spherical-harmonic coefficients c_j = \int trace * phi_j dsigma for all
/// basis elements of degree <= L. Refuses (throws) when the rule exactness
/// cannot support the request: exact_degree >= poly_degree + L when the trace
/// degree is declared, >= 2L otherwise.
SpectralCoefficients analyze(const BoundaryTrace& trace, int L);

/// Default spectral cutoff for a fixture of the given polynomial degree.
inline int default_spectral_cutoff(int fixture_degree) { return 2 * fixture_degree + 4; }

enum class ExtensionMode { Harmonic, Homogeneous };

/// Harmonic mode: sum c_j r^{d_j} phi_j(theta). Homogeneous mode: sum c_j r^d phi_j(theta)
/// (requires d > 0). Both agree with the trace at r = 1.
FieldPtr extend(const SpectralCoefficients& coeffs, ExtensionMode mode, double d = 0.0);

/// Spectral Weiss values of the two extensions of a unit-sphere trace:
///   harmonic:    sum (d_j - d) c_j^2
///   homogeneous: sum [d^2 + d_j(n + d_j - 2) - d(n + 2d - 2)]/(n + 2d - 2) c_j^2
double weiss_spectral(const SpectralCoefficients& coeffs, double d, ExtensionMode mode);

/// kappa(n, d) = (1 + floor(d) - d) / (n + floor(d) + d - 1); equals
/// 1/(n + 2d - 1) at integer d.
double kappa(int n, double d);

struct EpiperimetricReport {
  double w_harmonic = 0.0;
  double w_homogeneous = 0.0;
  double kappa = 0.0;
  double margin = 0.0;  // (1-kappa) * w_homogeneous - w_harmonic
  bool pass = false;
  double parseval_defect = 0.0;
  nlohmann::ordered_json to_json() const;
};

/// Checks W_harm <= (1 - kappa) W_hom + 1e-10 for the given trace.
EpiperimetricReport epiperimetric_check(const BoundaryTrace& trace, double d, int L);

/// Synthesize the trace sum_k c_k phi_{j_k} at the rule nodes (basis indices
/// are positions in the basis for degree <= L).
BoundaryTrace synthesize_trace(const std::shared_ptr<const SphericalBasis>& basis,
                               const std::vector<std::pair<int, double>>& coeffs);

}  // namespace fb
