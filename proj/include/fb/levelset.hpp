#pragma once

#include <stdexcept>
#include <vector>

#include "fb/field.hpp"
#include "fb/polynomial.hpp"

namespace fb {

/// Raised when the scan grid cannot separate curve branches (a cell sees four
/// sign changes but the gradient does not vanish nearby).
struct BranchAmbiguityError : std::runtime_error {
  explicit BranchAmbiguityError(const std::string& what) : std::runtime_error(what) {}
};

/// Angles theta in [0, 2pi) where p(cos t, sin t) = 0, by dense sign scan and
/// bisection to ~1e-12 in angle. p must be a polynomial on R^2.
std::vector<double> circle_roots(const Polynomial& p, int scan_points = 8192);

/// Zero curve of a homogeneous polynomial on S^2: ordered polylines of unit
/// vectors plus any branch points (curve points where grad p = 0).
struct SphericalCurve {
  std::vector<std::vector<Vec>> polylines;
  std::vector<Vec> branch_points;
  double total_length() const;
};

/// Marching squares on a latitude/longitude grid with bisection-refined edge
/// crossings and Newton-projected vertices; polyline assembly starts at the
/// lexicographically smallest seed cell.
SphericalCurve trace_spherical_zero_set(const Polynomial& p, int n_theta = 256, int n_phi = 512);

/// Sign-change edge crossings of f on a uniform box grid (marching squares /
/// cubes style), refined by bisection along each crossing edge. n in {2,3}.
std::vector<Vec> zero_crossings_box(const Field& f, const Vec& lo, const Vec& hi,
                                    int cells_per_axis);

/// Triangle soup of the zero set of f inside a box, via marching tetrahedra
/// (six tetrahedra per cube). Used for non-cone surfaces in R^3.
struct TriangleSample {
  std::vector<Vec> centroids;
  std::vector<double> areas;
};
TriangleSample marching_tetrahedra(const Field& f, const Vec& lo, const Vec& hi,
                                   int cells_per_axis);

}  // namespace fb
