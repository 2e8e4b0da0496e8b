#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fb/field.hpp"
#include "fb/spectral.hpp"
#include "fb/sphere_rule.hpp"

namespace fb {

/// H(r) fell below 1e-300; the radius carries no usable frequency information.
struct DegenerateRadiusError : std::runtime_error {
  explicit DegenerateRadiusError(double r)
      : std::runtime_error("degenerate radius: H(" + std::to_string(r) + ") below 1e-300") {}
};

inline constexpr double kDegenerateH = 1e-300;
inline constexpr int kDefaultRadialOrder = 32;

/// H(r,Q,f) = int_{dB(Q,r)} f^2 dsigma  (surface element r^{n-1}).
double functional_H(double r, const Vec& Q, const Field& f, const SphereRule& rule);

/// D(r,Q,f) = int_{B(Q,r)} |grad f|^2 dx, Gauss-Legendre in radius x sphere rule.
double functional_D(double r, const Vec& Q, const Field& f, const SphereRule& rule,
                    int radial_order = kDefaultRadialOrder);

/// N(r,Q,f) = r D / H. Throws DegenerateRadiusError when H < 1e-300.
double frequency_N(double r, const Vec& Q, const Field& f, const SphereRule& rule,
                   int radial_order = kDefaultRadialOrder);

/// W_d(r,Q,f) = r^{-(n-2+2d)} D - d r^{-(n-1+2d)} H. Verifies the identity
/// W = H (N - d) / r^{n-1+2d} to 1e-8 relative as a self-check.
double weiss_W(double r, const Vec& Q, const Field& f, double d, const SphereRule& rule,
               int radial_order = kDefaultRadialOrder);

struct ScanRow {
  double r = 0;
  double H = 0;
  double D = 0;
  double N = 0;
  double W = 0;
  bool degenerate = false;
};

/// Table of (r, H, D, N, W_d) on a geometric radius grid, radii strictly
/// decreasing; degenerate radii flagged and excluded from fits.
struct FunctionalScan {
  Vec center;
  double d = 0;
  std::vector<ScanRow> rows;
  int rule_exact_degree = 0;
  int radial_order = kDefaultRadialOrder;
  bool analytic_gradient = true;

  std::string to_csv() const;
  nlohmann::ordered_json metadata_json() const;
  /// Finest non-degenerate radius row; throws if all rows are degenerate.
  const ScanRow& finest() const;
};

FunctionalScan scan_functionals(const Field& f, const Vec& Q, double d, double r_max, double r_min,
                                int points_per_decade, const SphereRulePtr& rule,
                                int radial_order = kDefaultRadialOrder);

struct WeissDerivativeReport {
  double fd_value = 0;
  double formula_value = 0;
  double residual = 0;
};

/// Central difference of W in r against the boundary-form derivative formula
/// (homogeneous-extension comparison term plus the normal-defect integral).
WeissDerivativeReport weiss_derivative_check(const Field& f, const Vec& Q, double d, double r,
                                             const SphereRulePtr& rule, int L,
                                             std::optional<int> trace_poly_degree = std::nullopt,
                                             int radial_order = kDefaultRadialOrder);

struct AlmostMinimizerReport {
  double w_f = 0;
  double w_harmonic_competitor = 0;
  double gap = 0;  // w_f - w_harmonic_competitor
};

/// Compares W_d of f on B(Q,r) against the harmonic extension of its own
/// trace (the Dirichlet minimizer in the trace class).
AlmostMinimizerReport almost_minimizer_check(const Field& f, const Vec& Q, double d, double r,
                                             const SphereRulePtr& rule, int L,
                                             std::optional<int> trace_poly_degree = std::nullopt,
                                             int radial_order = kDefaultRadialOrder);

struct RateFit {
  bool identically_zero = false;
  double amplitude = 0;  // C in C * r^exponent
  double exponent = 0;
  double r_squared = 0;
  int points_used = 0;
  nlohmann::ordered_json to_json() const;
};

/// Least-squares fit of log|values| against log r. Values below 1e-14 are
/// dropped; if none survive the fit reports identically_zero.
RateFit rate_fit(const std::vector<double>& radii, const std::vector<double>& values,
                 int min_points = 5);

enum class ScanQuantity { W, NDrop };

/// Series extraction from a scan: W rows or N - d, non-degenerate rows only.
RateFit rate_fit_scan(const FunctionalScan& scan, ScanQuantity q, int min_points = 5);

}  // namespace fb
