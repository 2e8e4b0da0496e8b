#include "fb/jumpsynth.hpp"

#include <cmath>

#include "fb/rng.hpp"

namespace fb {

HolderWeight HolderWeight::constant(int n) {
  HolderWeight w;
  w.alpha = 1.0;
  w.seminorm = 0.0;
  w.log_density = [](const Vec&) { return 0.0; };
  w.spec["type"] = "constant";
  w.spot_check(n, 4.0);
  return w;
}

HolderWeight HolderWeight::directional_power(int n, double alpha, double coeff, int axis,
                                             const Vec& anchor) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("HolderWeight: alpha must lie in (0,1]");
  if (axis < 0 || axis >= n) throw std::invalid_argument("HolderWeight: bad axis");
  HolderWeight w;
  w.alpha = alpha;
  w.seminorm = std::abs(coeff);
  w.log_density = [alpha, coeff, axis, anchor](const Vec& x) {
    return coeff * std::pow(std::abs(x[axis] - anchor[axis]), alpha);
  };
  w.spec["type"] = "directional-power";
  w.spec["alpha"] = alpha;
  w.spec["coeff"] = coeff;
  w.spec["axis"] = axis;
  w.spec["anchor"] = std::vector<double>(anchor.data(), anchor.data() + anchor.size());
  w.spot_check(n, 4.0);
  return w;
}

HolderWeight HolderWeight::from_json(int n, const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "constant") return constant(n);
  if (type == "directional-power") {
    const auto av = j.at("anchor").get<std::vector<double>>();
    Vec anchor = Vec::Zero(n);
    for (size_t i = 0; i < av.size() && i < static_cast<size_t>(n); ++i) anchor[i] = av[i];
    return directional_power(n, j.at("alpha").get<double>(), j.at("coeff").get<double>(),
                             j.at("axis").get<int>(), anchor);
  }
  throw std::invalid_argument("HolderWeight: unknown spec type " + type);
}

void HolderWeight::spot_check(int n, double box_radius) const {
  Rng rng(0x48574b21);
  for (int k = 0; k < 100; ++k) {
    Vec x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x[i] = rng.uniform(-box_radius, box_radius);
      y[i] = rng.uniform(-box_radius, box_radius);
    }
    const double lhs = std::abs(log_density(x) - log_density(y));
    const double rhs = seminorm * std::pow((x - y).norm(), alpha);
    if (lhs > rhs * (1.0 + 1e-9) + 1e-12)
      throw std::runtime_error("HolderWeight: seminorm spot-check failed");
  }
}

namespace {

constexpr double kNearSingular = 1e-9;

double kernel_value(int n, double dist) {
  return n == 2 ? std::log(dist) / (2.0 * M_PI) : -1.0 / (4.0 * M_PI * dist);
}

}  // namespace

double newtonian_potential(const SurfaceSample& sample, const Vec& density, const Vec& x) {
  if (density.size() != sample.size())
    throw std::invalid_argument("newtonian_potential: density size mismatch");
  const int n = sample.n;
  double acc = 0.0;
  for (int i = 0; i < sample.size(); ++i) {
    if (density[i] == 0.0) continue;
    const double dist = (x - sample.points.row(i).transpose()).norm();
    if (dist < kNearSingular)
      throw std::runtime_error("newtonian_potential: near-singular evaluation");
    acc += sample.weights[i] * density[i] * kernel_value(n, dist);
  }
  return acc;
}

Vec newtonian_potential_gradient(const SurfaceSample& sample, const Vec& density, const Vec& x) {
  if (density.size() != sample.size())
    throw std::invalid_argument("newtonian_potential: density size mismatch");
  const int n = sample.n;
  Vec g = Vec::Zero(n);
  for (int i = 0; i < sample.size(); ++i) {
    if (density[i] == 0.0) continue;
    const Vec r = x - sample.points.row(i).transpose();
    const double d2 = r.squaredNorm();
    if (d2 < kNearSingular * kNearSingular)
      throw std::runtime_error("newtonian_potential: near-singular evaluation");
    // grad Phi: n=2: r/(2 pi |r|^2); n=3: r/(4 pi |r|^3)
    const double f = n == 2 ? 1.0 / (2.0 * M_PI * d2) : 1.0 / (4.0 * M_PI * d2 * std::sqrt(d2));
    g += sample.weights[i] * density[i] * f * r;
  }
  return g;
}

nlohmann::ordered_json JumpBuildReport::to_json() const {
  nlohmann::ordered_json j;
  j["sub_degree_rel"] = sub_degree_rel;
  j["fd_laplacian_rel"] = fd_laplacian_rel;
  return j;
}

double JumpFunctionModel::potential(const Vec& x) const {
  const int n = dim();
  const long count = active_mass_.size();
  const double* mass = active_mass_.data();
  const double* px = active_coord_[0].data();
  const double* py = active_coord_[1].data();
  const double* pz = n == 3 ? active_coord_[2].data() : nullptr;
  const double eps2 = kNearSingular * kNearSingular;
  Vec q = x;
  for (int attempt = 0; attempt < 2; ++attempt) {
    double acc = 0.0;
    bool collided = false;
    if (n == 2) {
      for (long i = 0; i < count; ++i) {
        const double dx = q[0] - px[i], dy = q[1] - py[i];
        const double d2 = dx * dx + dy * dy;
        if (d2 < eps2) {
          collided = true;
          break;
        }
        acc += mass[i] * std::log(d2);
      }
      if (!collided) return acc / (4.0 * M_PI);
    } else {
      for (long i = 0; i < count; ++i) {
        const double dx = q[0] - px[i], dy = q[1] - py[i], dz = q[2] - pz[i];
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < eps2) {
          collided = true;
          break;
        }
        acc -= mass[i] / std::sqrt(d2);
      }
      if (!collided) return acc / (4.0 * M_PI);
    }
    // Quadrature nodes that collide with the layer are nudged off it.
    q[n - 1] += 2.0 * kNearSingular;
  }
  throw std::runtime_error("jump model: evaluation pinned to the layer");
}

Vec JumpFunctionModel::potential_gradient(const Vec& x) const {
  const int n = dim();
  const long count = active_mass_.size();
  const double* mass = active_mass_.data();
  const double* px = active_coord_[0].data();
  const double* py = active_coord_[1].data();
  const double* pz = n == 3 ? active_coord_[2].data() : nullptr;
  const double eps2 = kNearSingular * kNearSingular;
  Vec q = x;
  for (int attempt = 0; attempt < 2; ++attempt) {
    double gx = 0.0, gy = 0.0, gz = 0.0;
    bool collided = false;
    if (n == 2) {
      for (long i = 0; i < count; ++i) {
        const double dx = q[0] - px[i], dy = q[1] - py[i];
        const double d2 = dx * dx + dy * dy;
        if (d2 < eps2) {
          collided = true;
          break;
        }
        const double f = mass[i] / d2;
        gx += f * dx;
        gy += f * dy;
      }
      if (!collided) {
        Vec g(2);
        g << gx / (2.0 * M_PI), gy / (2.0 * M_PI);
        return g;
      }
    } else {
      for (long i = 0; i < count; ++i) {
        const double dx = q[0] - px[i], dy = q[1] - py[i], dz = q[2] - pz[i];
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < eps2) {
          collided = true;
          break;
        }
        const double f = mass[i] / (d2 * std::sqrt(d2));
        gx += f * dx;
        gy += f * dy;
        gz += f * dz;
      }
      if (!collided) {
        Vec g(3);
        g << gx / (4.0 * M_PI), gy / (4.0 * M_PI), gz / (4.0 * M_PI);
        return g;
      }
    }
    q[n - 1] += 2.0 * kNearSingular;
  }
  throw std::runtime_error("jump model: evaluation pinned to the layer");
}

double JumpFunctionModel::value(const Vec& x) const {
  if (trivial_) return base_(x);
  double acc = base_(x) + potential(x);
  for (const auto& [c, hp] : taylor_) acc -= c * hp(x - anchor_);
  return acc;
}

Vec JumpFunctionModel::gradient(const Vec& x) const {
  if (trivial_) return base_.gradient_at(x);
  Vec g = base_.gradient_at(x) + potential_gradient(x);
  for (const auto& [c, hp] : taylor_) g -= c * hp.gradient_at(x - anchor_);
  return g;
}

nlohmann::ordered_json JumpFunctionModel::manifest(const std::string& fixture_id) const {
  nlohmann::ordered_json j;
  j["fixture"] = fixture_id;
  j["weight"] = weight_.spec;
  j["alpha"] = weight_.alpha;
  j["seminorm"] = weight_.seminorm;
  j["anchor"] = std::vector<double>(anchor_.data(), anchor_.data() + anchor_.size());
  j["delta"] = delta_;
  j["R"] = layer_.radius;
  j["vanish_order"] = vanish_order_;
  j["layer_points"] = layer_.size();
  j["checks"] = report_.to_json();
  return j;
}

JumpFunctionModel build_jump_function(const HarmonicPolynomial& p, const HolderWeight& weight,
                                      const Vec& Q, double R, double delta, SurfaceResolution res,
                                      std::optional<int> vanish_order) {
  const int n = p.dim();
  if (delta <= 0) throw std::invalid_argument("build_jump_function: delta must be positive");
  const double pscale = std::max(p.poly().max_abs_coeff(), 1e-30) * std::pow(std::max(Q.norm(), 1.0), p.degree());
  if (std::abs(p(Q)) > 1e-10 * pscale)
    throw std::invalid_argument("build_jump_function: anchor is not on Sigma_p");

  JumpFunctionModel m(p);
  m.weight_ = weight;
  m.anchor_ = Q;
  m.delta_ = delta;
  // Default vanishing order: the full degree at the cone vertex, the local
  // (regular-point) order 1 elsewhere.
  m.vanish_order_ = vanish_order.value_or(Q.norm() < 1e-14 ? p.degree() : 1);

  if (res.radial == 0) {
    res = SurfaceResolution::defaults(n);
    res.radial = n == 2 ? 1000 : 192;
  }
  m.layer_ = surface_sample(p, R, res);
  const double hQ = weight.h(Q);
  m.ratio_.resize(m.layer_.size());
  m.rho_.resize(m.layer_.size());
  for (int i = 0; i < m.layer_.size(); ++i) {
    const Vec y = m.layer_.points.row(i).transpose();
    double ratio = hQ / weight.h(y) - 1.0;
    if ((y - Q).norm() < delta) ratio = 0.0;
    m.ratio_[i] = ratio;
    m.rho_[i] = ratio * m.layer_.grad_norms[i];
  }
  m.trivial_ = (m.rho_.cwiseAbs().maxCoeff() == 0.0);

  if (!m.trivial_) {
    int active = 0;
    for (int i = 0; i < m.layer_.size(); ++i) active += m.rho_[i] != 0.0 ? 1 : 0;
    m.active_coord_.assign(n, Eigen::ArrayXd(active));
    m.active_mass_.resize(active);
    for (int i = 0, at = 0; i < m.layer_.size(); ++i) {
      if (m.rho_[i] == 0.0) continue;
      for (int c = 0; c < n; ++c) m.active_coord_[c][at] = m.layer_.points(i, c);
      m.active_mass_[at] = m.layer_.weights[i] * m.rho_[i];
      ++at;
    }
  }

  if (!m.trivial_) {
    // Taylor truncation of w at Q from its trace on dB(Q, delta/2); w is
    // harmonic in B(Q, delta), so the expansion converges at ratio 1/2 and a
    // generously exact rule keeps sub-degree aliasing far below tolerance.
    const int L = m.vanish_order_ + 6;
    auto rule = build_sphere_rule(n, std::max(2 * L, 40));
    auto basis = SphericalBasis::get(rule, L);
    BoundaryTrace tr;
    tr.rule = rule;
    tr.center = Q;
    tr.radius = 0.5 * delta;
    tr.values.resize(rule->size());
    for (int i = 0; i < rule->size(); ++i)
      tr.values[i] = m.potential(Q + 0.5 * delta * rule->node(i));
    auto coeffs = analyze(tr, L);
    for (const auto& e : coeffs.entries) {
      if (e.degree > m.vanish_order_ - 1) continue;
      const double solid = e.c / std::pow(0.5 * delta, e.degree);
      if (solid == 0.0) continue;
      m.taylor_.emplace_back(solid, basis->poly(e.j));
    }

    // Build-time invariants.
    // (a) order-vanish_order vanishing at Q, spectrally on dB(Q, delta/2).
    BoundaryTrace vt;
    vt.rule = rule;
    vt.center = Q;
    vt.radius = 0.5 * delta;
    vt.values.resize(rule->size());
    for (int i = 0; i < rule->size(); ++i) vt.values[i] = m.value(Q + 0.5 * delta * rule->node(i));
    auto vc = analyze(vt, L);
    double lead = std::sqrt(vc.energy_at_degree(m.vanish_order_));
    double sub = 0.0;
    for (const auto& e : vc.entries)
      if (e.degree < m.vanish_order_) sub = std::max(sub, std::abs(e.c));
    m.report_.sub_degree_rel = lead > 0 ? sub / lead : sub;
    if (m.report_.sub_degree_rel > 1e-6)
      throw std::runtime_error("build_jump_function: vanishing-order invariant failed (rel " +
                               std::to_string(m.report_.sub_degree_rel) + ")");

    // (b) harmonic off the layer: 5-point FD Laplacian at 50 seeded points.
    Rng rng(0x4a4d5053);
    double worst = 0.0;
    int found = 0;
    while (found < 50) {
      Vec x = rng.unit_vec(n) * rng.uniform(0.2, 0.9);
      double clearance = 1e300;
      for (int i = 0; i < m.layer_.size(); ++i)
        clearance = std::min(clearance, (x - m.layer_.points.row(i).transpose()).norm());
      if (clearance < 0.05) continue;
      ++found;
      const double h = 1e-3 * std::min(0.5 * clearance, 1.0);
      double lap = -2.0 * n * m.value(x);
      for (int i = 0; i < n; ++i) {
        Vec e = x;
        e[i] = x[i] + h;
        lap += m.value(e);
        e[i] = x[i] - h;
        lap += m.value(e);
      }
      lap /= h * h;
      const double scale = std::max(m.gradient(x).norm(), 1e-12);
      worst = std::max(worst, std::abs(lap) / scale);
    }
    m.report_.fd_laplacian_rel = worst;
    if (worst > 1e-3)
      throw std::runtime_error("build_jump_function: off-surface harmonicity invariant failed");
  }
  return m;
}

DistributionalLaplacianReport distributional_laplacian_check(const JumpFunctionModel& model,
                                                             const TestFunction& phi,
                                                             int points_per_axis) {
  const int n = model.dim();
  if (phi.dim() != n)
    throw std::invalid_argument("distributional_laplacian_check: dimension mismatch");
  const Vec c = phi.support_center();
  const double half = phi.support_radius() * 1.05;
  if (c.norm() + phi.support_radius() > 0.9 * model.outer_radius())
    throw std::runtime_error(
        "distributional_laplacian_check: support reaches the layer truncation shell");

  auto [t, w] = gauss_legendre(points_per_axis);
  double volume_route = 0.0;
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
    volume_route += wprod * model.value(x) * lap;
  }

  double layer_route = 0.0;
  const auto& layer = model.layer();
  const auto& rho = model.layer_density();
  for (int i = 0; i < layer.size(); ++i) {
    if (rho[i] == 0.0) continue;
    layer_route += layer.weights[i] * rho[i] * phi.value(layer.points.row(i).transpose());
  }

  DistributionalLaplacianReport rep;
  rep.volume_route = volume_route;
  rep.layer_route = layer_route;
  const double scale = std::max({std::abs(volume_route), std::abs(layer_route), 1e-14});
  rep.rel_error = std::abs(volume_route - layer_route) / scale;
  return rep;
}

nlohmann::ordered_json DistributionalLaplacianReport::to_json() const {
  nlohmann::ordered_json j;
  j["volume_route"] = volume_route;
  j["layer_route"] = layer_route;
  j["rel_error"] = rel_error;
  return j;
}

HolderBoundReport holder_laplacian_bound_check(const JumpFunctionModel& model) {
  HolderBoundReport rep;
  const auto& layer = model.layer();
  const auto& ratio = model.weight_ratio();
  const double alpha = model.weight().alpha;
  for (int i = 0; i < layer.size(); ++i) {
    if (ratio[i] == 0.0) continue;
    const double dist = (layer.points.row(i).transpose() - model.anchor()).norm();
    if (dist < 1e-14) continue;
    rep.max_ratio = std::max(rep.max_ratio, std::abs(ratio[i]) / std::pow(dist, alpha));
  }
  const double s = model.weight().seminorm;
  const double reach = 2.0 * model.outer_radius();
  rep.predicted_bound = std::exp(s * std::pow(reach, alpha)) * s;
  rep.pass = rep.max_ratio <= rep.predicted_bound * (1.0 + 1e-9);
  return rep;
}

double n_drop_constant(const FunctionalScan& scan, double alpha) {
  double c = 0.0;
  // rows are radius-descending; "smaller radii" live at larger indices
  for (size_t i = 0; i < scan.rows.size(); ++i) {
    if (scan.rows[i].degenerate) continue;
    double min_after = 1e300;
    for (size_t j = i + 1; j < scan.rows.size(); ++j)
      if (!scan.rows[j].degenerate) min_after = std::min(min_after, scan.rows[j].N);
    if (min_after == 1e300) continue;
    const double defect = min_after - scan.rows[i].N;  // positive == violation
    if (defect > 0) c = std::max(c, defect / std::pow(scan.rows[i].r, alpha));
  }
  return c;
}

}  // namespace fb
