#pragma once

#include <optional>
#include <vector>

#include "fb/field.hpp"
#include "fb/functionals.hpp"
#include "fb/measures.hpp"
#include "fb/spectral.hpp"

namespace fb {

enum class RescaleMode { Power, Measure };

/// Unit-sphere trace of the rescaled field: power mode f(Q + r x)/r^d,
/// measure mode f(Q + r x) r^{n-2} / mass(B(Q,r)).
BoundaryTrace rescale_trace(const Field& f, const Vec& Q, double r, double d, RescaleMode mode,
                            const SphereRulePtr& rule,
                            const BallMassOracle* mass = nullptr);

struct BlowupRecord {
  Vec center;
  int d = 0;
  RescaleMode mode = RescaleMode::Power;
  std::vector<double> scales;  // descending
  std::vector<BoundaryTrace> traces;
  Mat distances;  // pairwise L^2(dB_1)
  std::optional<HarmonicPolynomial> tangent;  // degree-d projection of the finest trace
  RateFit rate;   // fit of max over smaller scales of dist(Y_r, Y_s) against r

  const HarmonicPolynomial& tangent_poly() const { return *tangent; }
  nlohmann::ordered_json to_json() const;
  std::string distances_csv() const;
};

/// Traces at >= 4 geometric scales, the pairwise distance matrix, the
/// degree-d harmonic projection of the finest trace, and the fitted
/// convergence rate.
BlowupRecord blowup_sequence(const Field& f, const Vec& Q, int d,
                             const std::vector<double>& scales, const SphereRulePtr& rule,
                             RescaleMode mode = RescaleMode::Power,
                             const BallMassOracle* mass = nullptr);

/// int_{B_1} |grad Y(r,.) - grad tangent|^2 for Y(r,x) = f(Q + r x)/r^d.
double blowup_gradient_error(const Field& f, const Vec& Q, double r, int d,
                             const HarmonicPolynomial& tangent, const SphereRulePtr& rule,
                             int radial_order = kDefaultRadialOrder);

struct DensityLimit {
  double value = 0.0;      // last-scale quotient
  double variation = 0.0;  // relative variation over the final decade
  bool exists = false;     // variation < 5%
};

DensityLimit density_limit(const BallMassOracle& mass, const Vec& Q, int n, double d,
                           const std::vector<double>& scales);

struct HolderVariationReport {
  double sup_diff = 0.0;  // sup over B_1 of |tangent_1 - tangent_2|
  double separation = 0.0;
  double exponent = 0.0;  // alpha beta / (beta + 2)
  double ratio = 0.0;     // sup_diff / separation^exponent (0 at separation 0)
};

HolderVariationReport holder_variation_check(const BlowupRecord& a, const BlowupRecord& b,
                                             double alpha, double beta);

/// Finite point cloud standing in for a closed set inside a ball.
struct ClosedSetSample {
  int n = 0;
  std::vector<Vec> points;
  double resolution = 0.0;  // grid cell diagonal of the extraction

  std::string to_csv() const;
  ClosedSetSample clipped(double radius) const;
  ClosedSetSample rescaled(const Vec& center, double r) const;  // (x - center)/r
};

ClosedSetSample zero_set_sample(const Field& f, const Vec& lo, const Vec& hi, int cells_per_axis);

/// excess(A,B) = sup_{x in A} inf_{y in B} |x - y|; excess({}, B) = 0.
double excess(const ClosedSetSample& A, const ClosedSetSample& B);

struct AttouchWetsEntry {
  double radius = 0.0;
  double excess_ab = 0.0;  // excess(A clipped, B)
  double excess_ba = 0.0;  // excess(B clipped, A)
  double max_excess = 0.0;
};

std::vector<AttouchWetsEntry> attouch_wets_distance(const ClosedSetSample& A,
                                                    const ClosedSetSample& B,
                                                    const std::vector<double>& radii);

}  // namespace fb
