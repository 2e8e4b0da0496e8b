#pragma once

#include <functional>
#include <optional>

#include "fb/field.hpp"
#include "fb/functionals.hpp"
#include "fb/measures.hpp"
#include "fb/polynomial.hpp"
#include "fb/spectral.hpp"

namespace fb {

/// Positive weight h = exp(g) with g Holder continuous of exponent alpha.
/// The construction spot-checks |g(x)-g(y)| <= seminorm |x-y|^alpha on 100
/// seeded random pairs.
struct HolderWeight {
  double alpha = 1.0;
  double seminorm = 0.0;
  std::function<double(const Vec&)> log_density;  // g
  nlohmann::ordered_json spec;                    // serializable description

  double h(const Vec& x) const { return std::exp(log_density(x)); }

  static HolderWeight constant(int n);
  /// g(x) = coeff * |<x - anchor, e_axis>|^alpha.
  static HolderWeight directional_power(int n, double alpha, double coeff, int axis,
                                        const Vec& anchor);
  static HolderWeight from_json(int n, const nlohmann::json& j);

  void spot_check(int n, double box_radius) const;
};

/// Single-layer Newtonian potential of the sampled density:
/// w(x) = sum_i weight_i density_i Phi(x - y_i), with Phi normalized so that
/// Laplacian(Phi) = delta (n=2: log|x|/2pi, n=3: -1/(4pi|x|)).
/// Throws on evaluation within 1e-9 of a sample point.
double newtonian_potential(const SurfaceSample& sample, const Vec& density, const Vec& x);
Vec newtonian_potential_gradient(const SurfaceSample& sample, const Vec& density, const Vec& x);

struct JumpBuildReport {
  double sub_degree_rel = 0.0;     // max sub-order coefficient, relative
  double fd_laplacian_rel = 0.0;   // max off-surface FD Laplacian, relative
  nlohmann::ordered_json to_json() const;
};

/// v = p + (w - T): base polynomial plus a single-layer correction whose
/// distributional Laplacian is (h(Q)/h - 1) |grad p| dH^{n-1} on Sigma_p
/// (zeroed inside B(Q, delta)), minus the harmonic Taylor truncation of w at Q
/// of degree <= vanish_order - 1. Exactly harmonic off the layer and inside
/// B(Q, delta); vanishes at Q to order vanish_order.
class JumpFunctionModel : public Field {
 public:
  int dim() const override { return base_.dim(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  bool has_analytic_gradient() const override { return true; }

  const HarmonicPolynomial& base() const { return base_; }
  const SurfaceSample& layer() const { return layer_; }
  const Vec& layer_density() const { return rho_; }
  /// (h(Q)/h(y_i) - 1), the density relative to om_p.
  const Vec& weight_ratio() const { return ratio_; }
  const Vec& anchor() const { return anchor_; }
  double delta() const { return delta_; }
  double outer_radius() const { return layer_.radius; }
  int vanish_order() const { return vanish_order_; }
  const HolderWeight& weight() const { return weight_; }
  const JumpBuildReport& build_report() const { return report_; }
  bool trivial() const { return trivial_; }  // h == 1, v == p exactly

  /// Empirical om_p ball masses from the layer sample.
  double surface_mass(const Vec& center, double r) const {
    return layer_.measure_in_ball(center, r);
  }

  nlohmann::ordered_json manifest(const std::string& fixture_id) const;

 private:
  explicit JumpFunctionModel(HarmonicPolynomial base) : base_(std::move(base)) {}
  friend JumpFunctionModel build_jump_function(const HarmonicPolynomial&, const HolderWeight&,
                                               const Vec&, double, double, SurfaceResolution,
                                               std::optional<int>);
  double potential(const Vec& x) const;
  Vec potential_gradient(const Vec& x) const;
  HarmonicPolynomial base_;
  // layer points with nonzero density, packed per coordinate for SIMD sums
  std::vector<Eigen::ArrayXd> active_coord_;
  Eigen::ArrayXd active_mass_;  // weight_i * rho_i
  HolderWeight weight_;
  SurfaceSample layer_;
  Vec rho_;    // weight-ratio * |grad p|
  Vec ratio_;  // h(Q)/h(y) - 1
  Vec anchor_;
  double delta_ = 0.0;
  int vanish_order_ = 0;
  bool trivial_ = false;
  // Taylor correction: solid-harmonic coefficients about the anchor.
  std::vector<std::pair<double, HarmonicPolynomial>> taylor_;
  JumpBuildReport report_;
};

JumpFunctionModel build_jump_function(const HarmonicPolynomial& p, const HolderWeight& weight,
                                      const Vec& Q, double R = 4.0, double delta = 0.05,
                                      SurfaceResolution res = {},
                                      std::optional<int> vanish_order = std::nullopt);

struct DistributionalLaplacianReport {
  double volume_route = 0.0;  // int v Laplacian(phi)
  double layer_route = 0.0;   // sum w_i rho_i phi(y_i)
  double rel_error = 0.0;
  nlohmann::ordered_json to_json() const;
};

DistributionalLaplacianReport distributional_laplacian_check(const JumpFunctionModel& model,
                                                             const TestFunction& phi,
                                                             int points_per_axis = 128);

struct HolderBoundReport {
  double max_ratio = 0.0;        // max |rho|/|grad p| / |y-Q|^alpha over the layer
  double predicted_bound = 0.0;  // exp-bounded function of the seminorm
  bool pass = false;
};

HolderBoundReport holder_laplacian_bound_check(const JumpFunctionModel& model);

/// Empirical constant C in N(r) - min_{s < r} N(s) >= -C r^alpha over the
/// non-degenerate rows of a scan (radii descending; strictly smaller radii).
double n_drop_constant(const FunctionalScan& scan, double alpha);

}  // namespace fb
