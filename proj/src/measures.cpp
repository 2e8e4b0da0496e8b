#include "fb/measures.hpp"

#include <cmath>

#include "fb/io.hpp"
#include "fb/sphere_rule.hpp"

namespace fb {

namespace {

// Integral of g over [a,b] with a fixed Gauss rule; g smooth on the panel.
template <typename F>
double panel_gauss(const F& g, double a, double b, const Vec& t, const Vec& w) {
  double s = 0.0;
  for (int i = 0; i < t.size(); ++i) s += w[i] * g(0.5 * (a + b) + 0.5 * (b - a) * t[i]);
  return 0.5 * (b - a) * s;
}

// Integral of |trig-polynomial-like| over the circle parameter range by
// splitting at sign changes.
double integrate_abs_on_arcs(const std::function<double(double)>& g, double lo, double hi,
                             const std::vector<double>& cuts, const Vec& t, const Vec& w) {
  std::vector<double> knots{lo};
  for (double c : cuts)
    if (c > lo + 1e-14 && c < hi - 1e-14) knots.push_back(c);
  knots.push_back(hi);
  std::sort(knots.begin(), knots.end());
  double acc = 0.0;
  for (size_t k = 0; k + 1 < knots.size(); ++k)
    acc += std::abs(panel_gauss(g, knots[k], knots[k + 1], t, w));
  return acc;
}

// Azimuthal roots of phi -> p(ring(theta, phi)) on [0, 2pi).
std::vector<double> ring_roots(const Polynomial& p, double theta, int scan = 512) {
  auto eval = [&](double phi) {
    Vec x(3);
    const double st = std::sin(theta);
    x << st * std::cos(phi), st * std::sin(phi), std::cos(theta);
    return p(x);
  };
  std::vector<double> roots;
  const double step = 2.0 * M_PI / scan;
  double pt = 0.217 * step, pv = eval(pt);
  for (int k = 1; k <= scan; ++k) {
    const double ct = (k + 0.217) * step;
    const double cv = eval(ct);
    if ((pv < 0) != (cv < 0)) {
      double a = pt, b = ct, fa = pv;
      for (int it = 0; it < 60; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = eval(m);
        if ((fa < 0) == (fm < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    pt = ct;
    pv = cv;
  }
  return roots;
}

double l1_circle(const Polynomial& p) {
  auto eval = [&](double th) {
    Vec x(2);
    x << std::cos(th), std::sin(th);
    return p(x);
  };
  auto [t, w] = gauss_legendre(24);
  return integrate_abs_on_arcs(eval, 0.0, 2.0 * M_PI, circle_roots(p), t, w);
}

double l1_sphere3(const Polynomial& p) {
  auto [t24, w24] = gauss_legendre(24);
  // F(theta): ring integral of |p| at colatitude theta, split at sign changes.
  auto ring_integral = [&](double theta) {
    auto eval = [&](double phi) {
      Vec x(3);
      const double st = std::sin(theta);
      x << st * std::cos(phi), st * std::sin(phi), std::cos(theta);
      return p(x);
    };
    return integrate_abs_on_arcs(eval, 0.0, 2.0 * M_PI, ring_roots(p, theta), t24, w24)
           * std::sin(theta);
  };
  auto [t15, w15] = gauss_legendre(15);
  auto [t30, w30] = gauss_legendre(30);
  // Adaptive bisection in theta; the integrand is piecewise smooth with
  // isolated kinks where ring roots merge.
  double total = 0.0;
  struct Panel {
    double a, b;
    int depth;
  };
  std::vector<Panel> stack{{0.0, M_PI, 0}};
  while (!stack.empty()) {
    Panel pn = stack.back();
    stack.pop_back();
    const double coarse = panel_gauss(ring_integral, pn.a, pn.b, t15, w15);
    const double fine = panel_gauss(ring_integral, pn.a, pn.b, t30, w30);
    if (std::abs(fine - coarse) < 1e-10 * std::max(1.0, std::abs(fine)) || pn.depth >= 28) {
      total += fine;
    } else {
      const double m = 0.5 * (pn.a + pn.b);
      stack.push_back({pn.a, m, pn.depth + 1});
      stack.push_back({m, pn.b, pn.depth + 1});
    }
  }
  return total;
}

}  // namespace

double l1_norm_sphere(const Polynomial& p) {
  if (p.dim() == 2) return l1_circle(p);
  if (p.dim() == 3) return l1_sphere3(p);
  // Higher dimensions: plain rule quadrature (|p| is not polynomial, so this
  // is resolution-limited; unused by the n<=3 measure fixtures).
  auto rule = build_sphere_rule(p.dim(), std::max(2 * p.degree() + 16, 20));
  double s = 0.0;
  for (int i = 0; i < rule->size(); ++i) s += rule->weights[i] * std::abs(p(rule->node(i)));
  return s;
}

PolynomialMeasure PolynomialMeasure::make(const HarmonicPolynomial& p) {
  if (!p.is_homogeneous() || p.degree() < 1)
    throw std::invalid_argument("PolynomialMeasure: p must be nonconstant homogeneous");
  PolynomialMeasure pm{p, l1_norm_sphere(p.poly()), p.degree()};
  if (!(pm.l1_norm > 0)) throw std::runtime_error("PolynomialMeasure: vanishing L1 norm");
  return pm;
}

double ball_measure(const PolynomialMeasure& pm, double r) {
  if (r <= 0) throw std::invalid_argument("ball_measure: r must be positive");
  const int n = pm.p.dim();
  return 0.5 * pm.degree * std::pow(r, n - 2 + pm.degree) * pm.l1_norm;
}

double SurfaceSample::measure_in_ball(const Vec& center, double r) const {
  double acc = 0.0;
  if (cone && center.norm() < 1e-14) {
    // Cumulative radial mass of a cone patch scales as t^{n-2+degree}; split
    // the patch that straddles r exactly along that profile.
    const double e = n - 2 + degree;
    for (int i = 0; i < size(); ++i) {
      const double lo = radial_lo[i], hi = radial_hi[i];
      if (lo >= r) continue;
      double frac = 1.0;
      if (hi > r)
        frac = (std::pow(r, e) - std::pow(lo, e)) / (std::pow(hi, e) - std::pow(lo, e));
      acc += frac * weights[i] * grad_norms[i];
    }
    return acc;
  }
  for (int i = 0; i < size(); ++i)
    if ((points.row(i).transpose() - center).norm() <= r) acc += weights[i] * grad_norms[i];
  return acc;
}

std::string SurfaceSample::to_csv() const {
  CsvWriter w;
  std::vector<std::string> header;
  for (int i = 0; i < n; ++i) header.push_back("x" + std::to_string(i));
  header.push_back("weight");
  header.push_back("grad_norm");
  w.row(header);
  for (int r = 0; r < size(); ++r) {
    std::vector<std::string> row;
    for (int i = 0; i < n; ++i) row.push_back(format_double(points(r, i)));
    row.push_back(format_double(weights[r]));
    row.push_back(format_double(grad_norms[r]));
    w.row(row);
  }
  return w.str();
}

SurfaceResolution SurfaceResolution::defaults(int n) {
  if (n == 2) return {4096, 0, 0};
  return {512, 256, 512};
}

SurfaceResolution SurfaceResolution::scaled(double factor) const {
  auto s = [&](int v) { return std::max(8, static_cast<int>(std::lround(v * factor))); };
  return {s(radial), grid_theta ? s(grid_theta) : 0, grid_phi ? s(grid_phi) : 0};
}

namespace {

struct ArcPatch {
  Vec direction;  // unit vector on the curve/ray
  double length;  // H^1 measure of the spherical arc (1 for n=2 rays)
};

SurfaceSample assemble_cone_sample(const HarmonicPolynomial& p, double R,
                                   const std::vector<ArcPatch>& arcs, int radial,
                                   std::vector<Vec> branch_points) {
  const int n = p.dim();
  const int total = static_cast<int>(arcs.size()) * radial;
  SurfaceSample s;
  s.n = n;
  s.degree = p.degree();
  s.radius = R;
  s.cone = true;
  s.points.resize(total, n);
  s.weights.resize(total);
  s.grad_norms.resize(total);
  s.radial_lo.resize(total);
  s.radial_hi.resize(total);
  s.branch_points = std::move(branch_points);
  int row = 0;
  const double dr = R / radial;
  for (const auto& arc : arcs) {
    const double gdir = p.gradient_at(arc.direction).norm();
    for (int k = 0; k < radial; ++k, ++row) {
      const double lo = k * dr, hi = (k + 1) * dr, mid = 0.5 * (lo + hi);
      s.points.row(row) = (mid * arc.direction).transpose();
      // n=2: patch is a radial segment of the ray; n=3: cone patch area
      // over the arc element, exactly l*(hi^2-lo^2)/2.
      s.weights[row] = (n == 2) ? arc.length * dr : arc.length * 0.5 * (hi * hi - lo * lo);
      s.grad_norms[row] = gdir * std::pow(mid, p.degree() - 1);
      s.radial_lo[row] = lo;
      s.radial_hi[row] = hi;
    }
  }
  return s;
}

}  // namespace

SurfaceSample surface_sample(const HarmonicPolynomial& p, double R, SurfaceResolution res) {
  if (!p.is_homogeneous() || p.degree() < 1)
    throw std::invalid_argument("surface_sample: p must be nonconstant homogeneous");
  const int n = p.dim();
  if (n != 2 && n != 3)
    throw std::invalid_argument("surface_sample: supported dimensions are 2 and 3");
  if (R <= 0) throw std::invalid_argument("surface_sample: R must be positive");
  if (res.radial == 0) res = SurfaceResolution::defaults(n);

  std::vector<ArcPatch> arcs;
  std::vector<Vec> branches;
  if (n == 2) {
    for (double th : circle_roots(p.poly())) {
      Vec dir(2);
      dir << std::cos(th), std::sin(th);
      arcs.push_back({dir, 1.0});
    }
    if (arcs.empty()) throw std::runtime_error("surface_sample: no zero rays found");
  } else {
    const auto curve = trace_spherical_zero_set(p.poly(), res.grid_theta, res.grid_phi);
    branches = curve.branch_points;
    for (const auto& line : curve.polylines) {
      // Per-segment patches; segments whose midpoint falls inside the branch
      // exclusion radius are merged into their neighbor.
      double carry = 0.0;
      for (size_t i = 0; i + 1 < line.size(); ++i) {
        const Vec mid = (line[i] + line[i + 1]).normalized();
        const double len = (line[i + 1] - line[i]).norm() + carry;
        bool excluded = false;
        for (const Vec& b : curve.branch_points)
          if ((mid - b).norm() < 1e-3) {
            excluded = true;
            break;
          }
        if (excluded) {
          carry = len;  // absorbed by the next patch
          continue;
        }
        carry = 0.0;
        arcs.push_back({mid, len});
      }
      if (carry > 0 && !arcs.empty()) arcs.back().length += carry;
    }
    if (arcs.empty()) throw std::runtime_error("surface_sample: empty spherical zero curve");
  }
  return assemble_cone_sample(p, R, arcs, res.radial, std::move(branches));
}

SurfaceSample surface_sample_nonhomogeneous(const HarmonicPolynomial& p, double R,
                                            int cells_per_axis) {
  if (p.dim() != 3)
    throw std::invalid_argument("surface_sample_nonhomogeneous: implemented for R^3");
  PolynomialField f(p);
  Vec lo = Vec::Constant(3, -R), hi = Vec::Constant(3, R);
  auto tris = marching_tetrahedra(f, lo, hi, cells_per_axis);
  std::vector<int> keep;
  for (size_t i = 0; i < tris.centroids.size(); ++i)
    if (tris.centroids[i].norm() <= R) keep.push_back(static_cast<int>(i));
  SurfaceSample s;
  s.n = 3;
  s.degree = p.degree();
  s.radius = R;
  s.cone = false;
  s.points.resize(keep.size(), 3);
  s.weights.resize(keep.size());
  s.grad_norms.resize(keep.size());
  for (size_t r = 0; r < keep.size(); ++r) {
    Vec x = tris.centroids[keep[r]];
    // project the centroid onto the surface along the gradient
    for (int it = 0; it < 4; ++it) {
      const double v = p(x);
      const Vec g = p.gradient_at(x);
      const double g2 = g.squaredNorm();
      if (g2 < 1e-14) break;
      x -= (v / g2) * g;
    }
    s.points.row(r) = x.transpose();
    s.weights[r] = tris.areas[keep[r]];
    s.grad_norms[r] = p.gradient_at(x).norm();
  }
  return s;
}

nlohmann::ordered_json MeasureValidation::to_json() const {
  nlohmann::ordered_json j;
  j["radii"] = radii;
  j["surface_mass"] = surface_mass;
  j["closed_form"] = closed_form;
  j["rel_error"] = rel_error;
  j["max_rel_error"] = max_rel_error;
  return j;
}

MeasureValidation surface_measure_validate(const SurfaceSample& sample,
                                           const PolynomialMeasure& pm,
                                           const std::vector<double>& r_list) {
  MeasureValidation v;
  const Vec origin = Vec::Zero(sample.n);
  for (double r : r_list) {
    if (r > sample.radius + 1e-12)
      throw std::invalid_argument("surface_measure_validate: radius beyond the sample");
    const double got = sample.measure_in_ball(origin, r);
    const double want = ball_measure(pm, r);
    v.radii.push_back(r);
    v.surface_mass.push_back(got);
    v.closed_form.push_back(want);
    v.rel_error.push_back(std::abs(got - want) / want);
    v.max_rel_error = std::max(v.max_rel_error, v.rel_error.back());
  }
  return v;
}

DistributionalResult distributional_measure(const Polynomial& p, const TestFunction& phi,
                                            int points_per_axis, double route_tol) {
  const int n = p.dim();
  if (phi.dim() != n) throw std::invalid_argument("distributional_measure: dimension mismatch");
  const Vec c = phi.support_center();
  const double half = phi.support_radius() * 1.05;

  // Support containment check on the box boundary.
  auto [t, w] = gauss_legendre(points_per_axis);
  const double scale_probe = std::abs(phi.value(c)) + 1e-30;
  for (int axis = 0; axis < n; ++axis) {
    for (double side : {-1.0, 1.0}) {
      for (int k = 0; k < 16; ++k) {
        Vec x = c;
        x[axis] += side * half;
        for (int j = 0; j < n; ++j)
          if (j != axis) x[j] += half * std::cos(1.7 * k + 0.3 * j);
        if (std::abs(phi.value(x)) > 1e-10 * scale_probe)
          throw std::runtime_error("distributional_measure: support truncation detected");
      }
    }
  }

  double plus = 0.0, minus = 0.0;
  std::vector<int> idx(n, 0);
  std::vector<double> node(n), weight(n);
  // tensor-product Gauss over the box
  const int total = static_cast<int>(std::pow(points_per_axis, n));
  for (int flat = 0; flat < total; ++flat) {
    int rem = flat;
    double wprod = 1.0;
    Vec x(n);
    for (int j = 0; j < n; ++j) {
      const int i = rem % points_per_axis;
      rem /= points_per_axis;
      x[j] = c[j] + half * t[i];
      wprod *= half * w[i];
    }
    const double lap = phi.laplacian(x);
    if (lap == 0.0) continue;
    const double pv = p(x);
    if (pv > 0)
      plus += wprod * pv * lap;
    else
      minus += wprod * (-pv) * lap;
  }
  DistributionalResult res;
  res.plus_route = plus;
  res.minus_route = minus;
  const double scale = std::max({std::abs(plus), std::abs(minus), 1e-30});
  res.rel_gap = std::abs(plus - minus) / scale;
  if (res.rel_gap > route_tol)
    throw std::runtime_error("distributional_measure: p+ and p- routes disagree (rel gap " +
                             std::to_string(res.rel_gap) + ")");
  return res;
}

std::string DensityScan::to_csv() const {
  CsvWriter w;
  w.row({"r", "quotient"});
  for (size_t i = 0; i < radii.size(); ++i)
    w.row({format_double(radii[i]), format_double(quotient[i])});
  return w.str();
}

nlohmann::ordered_json DensityScan::to_json() const {
  nlohmann::ordered_json j;
  j["min_quotient"] = min_quotient;
  j["max_quotient"] = max_quotient;
  j["fitted_log_slope"] = fitted_log_slope;
  j["points"] = radii.size();
  return j;
}

DensityScan density_scan(const BallMassOracle& mass, const Vec& Q, int n, double d,
                         const std::vector<double>& r_grid) {
  if (r_grid.empty()) throw std::invalid_argument("density_scan: empty grid");
  for (size_t i = 0; i + 1 < r_grid.size(); ++i)
    if (!(r_grid[i] > r_grid[i + 1]) || r_grid[i + 1] <= 0)
      throw std::invalid_argument("density_scan: grid must be positive decreasing");
  DensityScan out;
  double slx = 0, sly = 0, slxx = 0, slxy = 0;
  for (double r : r_grid) {
    const double q = mass(Q, r) / std::pow(r, n - 2 + d);
    out.radii.push_back(r);
    out.quotient.push_back(q);
    const double lx = std::log(r), ly = std::log(std::max(q, 1e-300));
    slx += lx;
    sly += ly;
    slxx += lx * lx;
    slxy += lx * ly;
  }
  out.min_quotient = *std::min_element(out.quotient.begin(), out.quotient.end());
  out.max_quotient = *std::max_element(out.quotient.begin(), out.quotient.end());
  const double m = static_cast<double>(r_grid.size());
  const double denom = m * slxx - slx * slx;
  out.fitted_log_slope = denom != 0 ? (m * slxy - slx * sly) / denom : 0.0;
  return out;
}

DensityScan density_scan(const PolynomialMeasure& pm, const std::vector<double>& r_grid) {
  return density_scan(exact_mass_oracle(pm), Vec::Zero(pm.p.dim()), pm.p.dim(), pm.degree,
                      r_grid);
}

BallMassOracle sample_mass_oracle(const SurfaceSample& sample) {
  return [sample](const Vec& c, double r) { return sample.measure_in_ball(c, r); };
}

BallMassOracle exact_mass_oracle(const PolynomialMeasure& pm) {
  return [pm](const Vec& c, double r) {
    if (c.norm() > 1e-14)
      throw std::invalid_argument("exact_mass_oracle: closed form is about the origin");
    return ball_measure(pm, r);
  };
}

}  // namespace fb
