#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fb/field.hpp"
#include "fb/levelset.hpp"
#include "fb/polynomial.hpp"

namespace fb {

/// ||p||_{L^1(S^{n-1})} to near machine precision for n in {2,3}: the circle
/// integral splits at the roots of p, the sphere integral splits each ring at
/// its azimuthal roots and integrates adaptively in the polar angle.
double l1_norm_sphere(const Polynomial& p);

/// The measure om_p on Sigma_p = {p = 0} carried by a nonconstant homogeneous
/// harmonic p, with its ball masses in closed form.
struct PolynomialMeasure {
  HarmonicPolynomial p;
  double l1_norm = 0.0;
  int degree = 0;

  static PolynomialMeasure make(const HarmonicPolynomial& p);
};

/// om_p(B(0,r)) = (d/2) r^{n-2+d} ||p||_{L^1(S^{n-1})}.
double ball_measure(const PolynomialMeasure& pm, double r);

/// Points on Sigma_p with patch measures and the density |grad p|. Cone
/// samples carry per-point radial spans so ball masses about the origin can
/// split the straddling patch exactly in the radial direction.
struct SurfaceSample {
  int n = 0;
  int degree = 0;
  double radius = 0.0;  // sampled ball B(0, radius)
  Mat points;           // N x n
  Vec weights;          // patch H^{n-1} measure
  Vec grad_norms;       // |grad p| at the points
  bool cone = false;    // radial structure about the origin
  Vec radial_lo, radial_hi;
  std::vector<Vec> branch_points;

  int size() const { return static_cast<int>(weights.size()); }
  double total_weight() const { return weights.sum(); }
  /// sum of weight * |grad p| over the sample inside B(center, r).
  double measure_in_ball(const Vec& center, double r) const;
  std::string to_csv() const;
};

struct SurfaceResolution {
  int radial = 0;   // radial segments (0 = default for the dimension)
  int grid_theta = 0;
  int grid_phi = 0;

  static SurfaceResolution defaults(int n);
  SurfaceResolution scaled(double factor) const;
};

/// Sample Sigma_p inside B(0,R) for homogeneous p, n in {2,3}. n=2 walks the
/// root rays; n=3 cones over the traced spherical curve. Branch points (where
/// grad p vanishes on the curve) are excluded within radius 1e-3 and their
/// patch weight is absorbed by the neighboring patches.
SurfaceSample surface_sample(const HarmonicPolynomial& p, double R,
                             SurfaceResolution res = {});

/// Marching-tetrahedra sampling of Sigma_p in B(0,R) for harmonic p that is
/// not homogeneous (triangle centroids projected onto the surface).
SurfaceSample surface_sample_nonhomogeneous(const HarmonicPolynomial& p, double R,
                                            int cells_per_axis = 96);

struct MeasureValidation {
  std::vector<double> radii;
  std::vector<double> surface_mass;
  std::vector<double> closed_form;
  std::vector<double> rel_error;
  double max_rel_error = 0.0;
  nlohmann::ordered_json to_json() const;
};

/// Compares the sampled surface mass against the closed-form ball measure at
/// each requested radius.
MeasureValidation surface_measure_validate(const SurfaceSample& sample,
                                           const PolynomialMeasure& pm,
                                           const std::vector<double>& r_list);

struct DistributionalResult {
  double plus_route = 0.0;   // int p^+ Laplacian(phi)
  double minus_route = 0.0;  // int p^- Laplacian(phi)
  double rel_gap = 0.0;
};

/// Evaluates int phi d om_p through both signed parts of p by tensor-product
/// Gauss quadrature over the bounding box of supp(phi). Throws when the
/// support leaks outside the box or the two routes disagree beyond tol.
DistributionalResult distributional_measure(const Polynomial& p, const TestFunction& phi,
                                            int points_per_axis = 96, double route_tol = 1e-3);

using BallMassOracle = std::function<double(const Vec& center, double r)>;

struct DensityScan {
  std::vector<double> radii;
  std::vector<double> quotient;  // mass(B(Q,r)) / r^{n-2+d}
  double min_quotient = 0.0;
  double max_quotient = 0.0;
  double fitted_log_slope = 0.0;
  std::string to_csv() const;
  nlohmann::ordered_json to_json() const;
};

DensityScan density_scan(const BallMassOracle& mass, const Vec& Q, int n, double d,
                         const std::vector<double>& r_grid);
/// Closed-form variant at Q = 0 (the quotient is exactly constant).
DensityScan density_scan(const PolynomialMeasure& pm, const std::vector<double>& r_grid);

BallMassOracle sample_mass_oracle(const SurfaceSample& sample);
BallMassOracle exact_mass_oracle(const PolynomialMeasure& pm);

}  // namespace fb
