#include "fb/levelset.hpp"

#include <array>
#include <cmath>
#include <map>

namespace fb {

namespace {

Vec sph(double theta, double phi) {
  Vec v(3);
  const double st = std::sin(theta);
  v << st * std::cos(phi), st * std::sin(phi), std::cos(theta);
  return v;
}

}  // namespace

std::vector<double> circle_roots(const Polynomial& p, int scan_points) {
  if (p.dim() != 2) throw std::invalid_argument("circle_roots: polynomial must live on R^2");
  auto eval = [&](double th) {
    Vec x(2);
    x << std::cos(th), std::sin(th);
    return p(x);
  };
  // Offset grid so axis-aligned roots never coincide with scan nodes.
  std::vector<double> roots;
  const double step = 2.0 * M_PI / scan_points;
  double prev_t = 0.3 * step;
  double prev_v = eval(prev_t);
  for (int k = 1; k <= scan_points; ++k) {
    const double t = (k + 0.3) * step;
    const double v = eval(t);
    if ((prev_v < 0 && v > 0) || (prev_v > 0 && v < 0)) {
      double a = prev_t, b = t, fa = prev_v;
      for (int it = 0; it < 64; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = eval(m);
        if ((fa < 0) == (fm < 0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(std::fmod(0.5 * (a + b), 2.0 * M_PI));
    } else if (v == 0.0) {
      roots.push_back(std::fmod(t, 2.0 * M_PI));
    }
    prev_t = t;
    prev_v = v;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

double SphericalCurve::total_length() const {
  double s = 0.0;
  for (const auto& line : polylines)
    for (size_t i = 1; i < line.size(); ++i) s += (line[i] - line[i - 1]).norm();
  return s;
}

namespace {

struct EdgeKey {
  int i, j, dir;  // cell corner (i,j), dir 0 = theta edge, 1 = phi edge
  auto operator<=>(const EdgeKey&) const = default;
};

// Bisection along a grid edge of F(theta,phi) = p(sph(theta,phi)).
Vec edge_crossing(const Polynomial& p, double t0, double p0, double t1, double p1) {
  auto eval = [&](double s) { return p(sph(t0 + s * (t1 - t0), p0 + s * (p1 - p0))); };
  double a = 0.0, b = 1.0, fa = eval(a);
  if (fa == 0.0) return sph(t0, p0);
  for (int it = 0; it < 64; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = eval(m);
    if (fm == 0.0) {
      a = b = m;
      break;
    }
    if ((fa < 0) == (fm < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  const double s = 0.5 * (a + b);
  return sph(t0 + s * (t1 - t0), p0 + s * (p1 - p0));
}

// Newton projection of a near-curve unit vector onto {p = 0} on the sphere.
Vec project_to_curve(const Polynomial& p, Vec x) {
  for (int it = 0; it < 4; ++it) {
    const double v = p(x);
    Vec g = p.gradient_at(x);
    g -= g.dot(x) * x;  // tangential part
    const double g2 = g.squaredNorm();
    if (g2 < 1e-12) break;
    x -= (v / g2) * g;
    x.normalize();
  }
  return x;
}

// Locate a zero of the spherical gradient inside a (theta,phi) cell by
// recursive subdivision on |grad_S p|^2.
Vec locate_branch(const Polynomial& p, double t0, double t1, double p0, double p1) {
  auto grad2 = [&](double th, double ph) {
    const Vec x = sph(th, ph);
    Vec g = p.gradient_at(x);
    g -= g.dot(x) * x;
    return g.squaredNorm();
  };
  double a = t0, b = t1, c = p0, d = p1;
  for (int it = 0; it < 48; ++it) {
    const double tm = 0.5 * (a + b), pm = 0.5 * (c + d);
    // pick the quadrant with the smallest |grad|^2 at its center
    double best = 1e300;
    int bq = 0;
    const double tq[2] = {0.5 * (a + tm), 0.5 * (tm + b)};
    const double pq[2] = {0.5 * (c + pm), 0.5 * (pm + d)};
    for (int q = 0; q < 4; ++q) {
      const double v = grad2(tq[q & 1], pq[q >> 1]);
      if (v < best) {
        best = v;
        bq = q;
      }
    }
    if (bq & 1)
      a = tm;
    else
      b = tm;
    if (bq >> 1)
      c = pm;
    else
      d = pm;
  }
  return sph(0.5 * (a + b), 0.5 * (c + d)).normalized();
}

}  // namespace

SphericalCurve trace_spherical_zero_set(const Polynomial& p, int n_theta, int n_phi) {
  if (p.dim() != 3) throw std::invalid_argument("trace_spherical_zero_set: need R^3");
  SphericalCurve out;
  const double coeff_scale = std::max(p.max_abs_coeff(), 1e-30);

  // Vertex values on the offset grid (offsets keep poles and axis-aligned
  // curves off the grid nodes).
  Mat vals(n_theta + 1, n_phi);
  std::vector<double> thetas(n_theta + 1), phis(n_phi);
  for (int i = 0; i <= n_theta; ++i) thetas[i] = M_PI * (i + 0.271) / (n_theta + 1);
  for (int j = 0; j < n_phi; ++j) phis[j] = 2.0 * M_PI * (j + 0.377) / n_phi;
  for (int i = 0; i <= n_theta; ++i)
    for (int j = 0; j < n_phi; ++j) vals(i, j) = p(sph(thetas[i], phis[j]));

  // Crossing points per edge; segments per cell.
  std::map<EdgeKey, int> point_of_edge;
  std::vector<Vec> pts;
  std::vector<std::pair<int, int>> segments;
  std::vector<int> branch_ids;

  auto edge_point = [&](int i, int j, int dir) -> int {
    EdgeKey k{i, j, dir};
    auto it = point_of_edge.find(k);
    if (it != point_of_edge.end()) return it->second;
    Vec x;
    if (dir == 0)
      x = edge_crossing(p, thetas[i], phis[j], thetas[i + 1], phis[j]);
    else
      x = edge_crossing(p, thetas[i], phis[j], thetas[i], phis[(j + 1) % n_phi]);
    x = project_to_curve(p, x);
    pts.push_back(x);
    point_of_edge.emplace(k, static_cast<int>(pts.size()) - 1);
    return static_cast<int>(pts.size()) - 1;
  };

  for (int i = 0; i < n_theta; ++i) {
    for (int j = 0; j < n_phi; ++j) {
      const int jn = (j + 1) % n_phi;
      const double v00 = vals(i, j), v10 = vals(i + 1, j);
      const double v01 = vals(i, jn), v11 = vals(i + 1, jn);
      auto differs = [](double a, double b) { return (a < 0) != (b < 0); };
      // edges: left (theta, phi_j), right (theta, phi_jn), top (phi at i), bottom (phi at i+1)
      std::vector<int> ids;
      if (differs(v00, v10)) ids.push_back(edge_point(i, j, 0));
      if (differs(v01, v11)) ids.push_back(edge_point(i, jn, 0));
      if (differs(v00, v01)) ids.push_back(edge_point(i, j, 1));
      if (differs(v10, v11)) ids.push_back(edge_point(i + 1, j, 1));
      if (ids.empty()) {
        // Edge signs agree; probe the interior so a branch pair crossing the
        // cell (two sign changes per edge) cannot slip through silently.
        const double p1 = phis[j];
        const double p2 = p1 + (jn > j ? phis[jn] - p1 : 2.0 * M_PI / n_phi);
        for (int a = 1; a <= 2 && ids.empty(); ++a) {
          for (int b = 1; b <= 2; ++b) {
            const double th = thetas[i] + (thetas[i + 1] - thetas[i]) * a / 3.0;
            const double ph = p1 + (p2 - p1) * b / 3.0;
            if (differs(vals(i, j), p(sph(th, ph)))) {
              throw BranchAmbiguityError(
                  "curve structure inside a cell with no edge crossings near theta=" +
                  std::to_string(th) + ", phi=" + std::to_string(ph) +
                  "; increase the trace resolution");
            }
          }
        }
        continue;
      }
      if (ids.size() == 2) {
        segments.emplace_back(ids[0], ids[1]);
      } else if (ids.size() == 4) {
        // Saddle cell: either a genuine branch point of the curve or a grid
        // too coarse to separate two branches.
        const Vec bp = locate_branch(p, thetas[i], thetas[i + 1], phis[j],
                                     phis[j] + (phis[jn] > phis[j] ? phis[jn] - phis[j]
                                                                   : 2.0 * M_PI / n_phi));
        Vec g = p.gradient_at(bp);
        g -= g.dot(bp) * bp;
        const double gnorm = g.norm() / coeff_scale;
        const double pval = std::abs(p(bp)) / coeff_scale;
        if (gnorm > 1e-5 || pval > 1e-6) {
          throw BranchAmbiguityError(
              "cannot separate curve branches near theta=" + std::to_string(thetas[i]) +
              ", phi=" + std::to_string(phis[j]) +
              " (|grad|=" + std::to_string(gnorm) + "); increase the trace resolution");
        }
        pts.push_back(bp);
        const int bid = static_cast<int>(pts.size()) - 1;
        branch_ids.push_back(bid);
        out.branch_points.push_back(bp);
        for (int id : ids) segments.emplace_back(id, bid);
      } else {
        // 1 or 3 crossings happen only if a vertex value is exactly zero,
        // which the grid offsets preclude for the supported fixtures.
        throw BranchAmbiguityError("odd crossing count in a trace cell; perturb the grid");
      }
    }
  }

  // Chain segments into polylines. Branch points terminate lines; walks start
  // at free ends and branch points first (lowest segment index), leftover
  // closed loops afterwards.
  std::multimap<int, int> adj;
  for (size_t s = 0; s < segments.size(); ++s) {
    adj.emplace(segments[s].first, static_cast<int>(s));
    adj.emplace(segments[s].second, static_cast<int>(s));
  }
  std::vector<bool> used(segments.size(), false);
  std::vector<bool> is_branch(pts.size(), false);
  for (int b : branch_ids) is_branch[b] = true;

  std::vector<std::vector<int>> lines;  // point-id chains
  auto walk = [&](int seg, int start) {
    std::vector<int> line{start};
    int cur = start, s = seg;
    while (true) {
      used[s] = true;
      cur = (segments[s].first == cur) ? segments[s].second : segments[s].first;
      line.push_back(cur);
      if (is_branch[cur]) break;
      int next = -1;
      auto [lo, hi] = adj.equal_range(cur);
      for (auto it = lo; it != hi; ++it)
        if (!used[it->second]) {
          next = it->second;
          break;
        }
      if (next < 0) break;
      s = next;
    }
    return line;
  };

  std::vector<int> node_degree(pts.size(), 0);
  for (const auto& [a, b] : segments) {
    node_degree[a]++;
    node_degree[b]++;
  }
  for (size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    const int a = segments[s].first, b = segments[s].second;
    int start = -1;
    if (is_branch[a] || node_degree[a] == 1)
      start = a;
    else if (is_branch[b] || node_degree[b] == 1)
      start = b;
    if (start >= 0) lines.push_back(walk(static_cast<int>(s), start));
  }
  for (size_t s = 0; s < segments.size(); ++s)
    if (!used[s]) lines.push_back(walk(static_cast<int>(s), segments[s].first));

  // Polar caps are outside the scan grid. When a pole lies on the curve,
  // reconnect dangling line ends inside the caps to the pole point.
  const double cap = 2.5 * M_PI / (n_theta + 1);
  for (int pole = 0; pole < 2; ++pole) {
    Vec pp = Vec::Zero(3);
    pp[2] = pole == 0 ? 1.0 : -1.0;
    if (std::abs(p(pp)) > 1e-9 * coeff_scale) continue;
    bool touched = false;
    for (auto& line : lines) {
      for (int end = 0; end < 2; ++end) {
        const int id = end == 0 ? line.front() : line.back();
        if (is_branch[id] || node_degree[id] != 1) continue;
        const double ang = std::acos(std::clamp(pts[id].dot(pp), -1.0, 1.0));
        if (ang < cap) {
          pts.push_back(pp);
          is_branch.push_back(false);
          node_degree.push_back(2);
          if (end == 0)
            line.insert(line.begin(), static_cast<int>(pts.size()) - 1);
          else
            line.push_back(static_cast<int>(pts.size()) - 1);
          touched = true;
        }
      }
    }
    if (touched) {
      Vec g = p.gradient_at(pp);
      g -= g.dot(pp) * pp;
      if (g.norm() < 1e-6 * coeff_scale) out.branch_points.push_back(pp);
    }
  }

  for (const auto& line : lines) {
    std::vector<Vec> pv;
    pv.reserve(line.size());
    for (int id : line) pv.push_back(pts[id]);
    out.polylines.push_back(std::move(pv));
  }
  return out;
}

std::vector<Vec> zero_crossings_box(const Field& f, const Vec& lo, const Vec& hi,
                                    int cells_per_axis) {
  const int n = f.dim();
  if (n != 2 && n != 3) throw std::invalid_argument("zero_crossings_box: n must be 2 or 3");
  if (cells_per_axis < 1) throw std::invalid_argument("zero_crossings_box: bad resolution");
  const int m = cells_per_axis;
  std::vector<Vec> out;

  auto bisect_edge = [&](Vec a, Vec b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    for (int it = 0; it < 60; ++it) {
      Vec c = 0.5 * (a + b);
      const double fc = f.value(c);
      if (fc == 0.0) return c;
      if ((fa < 0) == (fc < 0)) {
        a = c;
        fa = fc;
      } else {
        b = c;
      }
    }
    return Vec(0.5 * (a + b));
  };

  auto coord = [&](int axis, int idx, int cells) {
    return lo[axis] + (hi[axis] - lo[axis]) * idx / cells;
  };

  if (n == 2) {
    Mat vals(m + 1, m + 1);
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) {
        Vec x(2);
        x << coord(0, i, m), coord(1, j, m);
        vals(i, j) = f.value(x);
      }
    for (int i = 0; i <= m; ++i)
      for (int j = 0; j <= m; ++j) {
        Vec x(2);
        x << coord(0, i, m), coord(1, j, m);
        if (i < m) {
          Vec y(2);
          y << coord(0, i + 1, m), coord(1, j, m);
          if ((vals(i, j) < 0) != (vals(i + 1, j) < 0))
            out.push_back(bisect_edge(x, y, vals(i, j), vals(i + 1, j)));
        }
        if (j < m) {
          Vec y(2);
          y << coord(0, i, m), coord(1, j + 1, m);
          if ((vals(i, j) < 0) != (vals(i, j + 1) < 0))
            out.push_back(bisect_edge(x, y, vals(i, j), vals(i, j + 1)));
        }
      }
    return out;
  }

  // n == 3: axis-aligned grid edges.
  std::vector<double> vals(static_cast<size_t>(m + 1) * (m + 1) * (m + 1));
  auto at = [&](int i, int j, int k) -> double& {
    return vals[(static_cast<size_t>(i) * (m + 1) + j) * (m + 1) + k];
  };
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      for (int k = 0; k <= m; ++k) {
        Vec x(3);
        x << coord(0, i, m), coord(1, j, m), coord(2, k, m);
        at(i, j, k) = f.value(x);
      }
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j)
      for (int k = 0; k <= m; ++k) {
        Vec x(3);
        x << coord(0, i, m), coord(1, j, m), coord(2, k, m);
        const double v = at(i, j, k);
        for (int axis = 0; axis < 3; ++axis) {
          int ii = i + (axis == 0), jj = j + (axis == 1), kk = k + (axis == 2);
          if (ii > m || jj > m || kk > m) continue;
          const double w = at(ii, jj, kk);
          if ((v < 0) != (w < 0)) {
            Vec y(3);
            y << coord(0, ii, m), coord(1, jj, m), coord(2, kk, m);
            out.push_back(bisect_edge(x, y, v, w));
          }
        }
      }
  return out;
}

TriangleSample marching_tetrahedra(const Field& f, const Vec& lo, const Vec& hi,
                                   int cells_per_axis) {
  if (f.dim() != 3) throw std::invalid_argument("marching_tetrahedra: need R^3");
  const int m = cells_per_axis;
  TriangleSample out;

  auto corner = [&](int i, int j, int k) {
    Vec x(3);
    x << lo[0] + (hi[0] - lo[0]) * i / m, lo[1] + (hi[1] - lo[1]) * j / m,
        lo[2] + (hi[2] - lo[2]) * k / m;
    return x;
  };

  // Six tetrahedra per cube, all sharing the main diagonal 0-7.
  static const std::array<std::array<int, 4>, 6> tets = {
      {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}}};

  auto interp = [&](const Vec& a, const Vec& b, double fa, double fb) {
    const double t = fa / (fa - fb);
    return Vec(a + t * (b - a));
  };

  auto emit_triangle = [&](const Vec& a, const Vec& b, const Vec& c) {
    const double area = 0.5 * (b - a).head<3>().cross((c - a).head<3>()).norm();
    if (area <= 0) return;
    out.centroids.push_back((a + b + c) / 3.0);
    out.areas.push_back(area);
  };

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        std::array<Vec, 8> X;
        std::array<double, 8> F;
        for (int c = 0; c < 8; ++c) {
          X[c] = corner(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          F[c] = f.value(X[c]);
        }
        for (const auto& t : tets) {
          std::array<int, 4> pos{}, neg{};
          int np = 0, nn = 0;
          for (int v = 0; v < 4; ++v) {
            if (F[t[v]] >= 0)
              pos[np++] = t[v];
            else
              neg[nn++] = t[v];
          }
          if (np == 0 || nn == 0) continue;
          if (np == 1 || nn == 1) {
            const int apex = (np == 1) ? pos[0] : neg[0];
            const auto& base = (np == 1) ? neg : pos;
            const int nb = (np == 1) ? nn : np;
            std::array<Vec, 3> tri;
            for (int v = 0; v < nb; ++v) tri[v] = interp(X[apex], X[base[v]], F[apex], F[base[v]]);
            emit_triangle(tri[0], tri[1], tri[2]);
          } else {
            // 2/2 split: quad cut, two triangles.
            Vec q0 = interp(X[pos[0]], X[neg[0]], F[pos[0]], F[neg[0]]);
            Vec q1 = interp(X[pos[0]], X[neg[1]], F[pos[0]], F[neg[1]]);
            Vec q2 = interp(X[pos[1]], X[neg[1]], F[pos[1]], F[neg[1]]);
            Vec q3 = interp(X[pos[1]], X[neg[0]], F[pos[1]], F[neg[0]]);
            emit_triangle(q0, q1, q2);
            emit_triangle(q0, q2, q3);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace fb
