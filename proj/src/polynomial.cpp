#include "fb/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fb/sphere_rule.hpp"

namespace fb {

namespace {

// Coordinate powers x_i^k for k <= kmax, used by evaluation loops.
void fill_pow_table(const Vec& x, int kmax, std::vector<std::vector<double>>& pw) {
  const int n = static_cast<int>(x.size());
  pw.assign(n, {});
  for (int i = 0; i < n; ++i) {
    pw[i].resize(kmax + 1);
    pw[i][0] = 1.0;
    for (int k = 1; k <= kmax; ++k) pw[i][k] = pw[i][k - 1] * x[i];
  }
}

long long binom(int a, int b) {
  if (b < 0 || b > a) return 0;
  long long r = 1;
  for (int i = 0; i < b; ++i) r = r * (a - i) / (i + 1);
  return r;
}

}  // namespace

int MultiIndex::degree() const { return std::accumulate(exp.begin(), exp.end(), 0); }

std::vector<MultiIndex> monomials_of_degree(int n, int d) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(n, 0);
  // Lexicographic enumeration of compositions of d into n parts.
  auto rec = [&](auto&& self, int pos, int rem) -> void {
    if (pos == n - 1) {
      cur[pos] = rem;
      out.emplace_back(cur);
      return;
    }
    for (int k = rem; k >= 0; --k) {
      cur[pos] = k;
      self(self, pos + 1, rem - k);
    }
  };
  if (n >= 1 && d >= 0) rec(rec, 0, d);
  return out;
}

Polynomial Polynomial::monomial(int n, const MultiIndex& a, double c) {
  Polynomial p(n);
  p.add_term(a, c);
  return p;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [a, c] : terms_) d = std::max(d, a.degree());
  return d;
}

bool Polynomial::is_homogeneous() const {
  if (terms_.empty()) return true;
  const int d = terms_.begin()->first.degree();
  for (const auto& [a, c] : terms_)
    if (a.degree() != d) return false;
  return true;
}

double Polynomial::coeff(const MultiIndex& a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const MultiIndex& a, double c) {
  if (static_cast<int>(a.exp.size()) != n_) throw std::invalid_argument("multi-index dimension mismatch");
  for (int e : a.exp)
    if (e < 0) throw std::invalid_argument("negative exponent");
  auto it = terms_.find(a);
  if (it == terms_.end()) {
    if (c != 0.0) terms_.emplace(a, c);
  } else {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(const Vec& x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("point dimension mismatch");
  if (terms_.empty()) return 0.0;
  int kmax = 0;
  for (const auto& [a, c] : terms_)
    for (int e : a.exp) kmax = std::max(kmax, e);
  std::vector<std::vector<double>> pw;
  fill_pow_table(x, kmax, pw);
  double acc = 0.0;
  for (const auto& [a, c] : terms_) {
    double t = c;
    for (int i = 0; i < n_; ++i) t *= pw[i][a.exp[i]];
    acc += t;
  }
  return acc;
}

Vec Polynomial::gradient_at(const Vec& x) const {
  if (static_cast<int>(x.size()) != n_) throw std::invalid_argument("point dimension mismatch");
  Vec g = Vec::Zero(n_);
  if (terms_.empty()) return g;
  int kmax = 0;
  for (const auto& [a, c] : terms_)
    for (int e : a.exp) kmax = std::max(kmax, e);
  std::vector<std::vector<double>> pw;
  fill_pow_table(x, kmax, pw);
  for (const auto& [a, c] : terms_) {
    for (int i = 0; i < n_; ++i) {
      if (a.exp[i] == 0) continue;
      double t = c * a.exp[i] * pw[i][a.exp[i] - 1];
      for (int j = 0; j < n_; ++j)
        if (j != i) t *= pw[j][a.exp[j]];
      g[i] += t;
    }
  }
  return g;
}

Polynomial Polynomial::partial(int i) const {
  Polynomial q(n_);
  for (const auto& [a, c] : terms_) {
    if (a.exp[i] == 0) continue;
    MultiIndex b = a;
    b.exp[i] -= 1;
    q.add_term(b, c * a.exp[i]);
  }
  return q;
}

std::vector<Polynomial> Polynomial::gradient() const {
  std::vector<Polynomial> g;
  g.reserve(n_);
  for (int i = 0; i < n_; ++i) g.push_back(partial(i));
  return g;
}

Polynomial Polynomial::directional_derivative(const Vec& zeta) const {
  if (static_cast<int>(zeta.size()) != n_) throw std::invalid_argument("direction dimension mismatch");
  Polynomial q(n_);
  for (int i = 0; i < n_; ++i) {
    if (zeta[i] == 0.0) continue;
    q = q + partial(i) * zeta[i];
  }
  return q;
}

Polynomial Polynomial::derivative(const MultiIndex& alpha) const {
  if (static_cast<int>(alpha.exp.size()) != n_) throw std::invalid_argument("multi-index dimension mismatch");
  Polynomial q = *this;
  for (int i = 0; i < n_; ++i)
    for (int k = 0; k < alpha.exp[i]; ++k) q = q.partial(i);
  return q;
}

Polynomial Polynomial::laplacian() const {
  Polynomial q(n_);
  for (const auto& [a, c] : terms_) {
    for (int i = 0; i < n_; ++i) {
      if (a.exp[i] < 2) continue;
      MultiIndex b = a;
      b.exp[i] -= 2;
      q.add_term(b, c * a.exp[i] * (a.exp[i] - 1));
    }
  }
  return q;
}

Polynomial Polynomial::shifted(const Vec& a) const {
  if (static_cast<int>(a.size()) != n_) throw std::invalid_argument("shift dimension mismatch");
  Polynomial out(n_);
  for (const auto& [al, c] : terms_) {
    // Expand c * prod_i (x_i - a_i)^{al_i} one coordinate at a time.
    std::vector<std::pair<MultiIndex, double>> acc{{MultiIndex(std::vector<int>(n_, 0)), c}};
    for (int i = 0; i < n_; ++i) {
      const int k = al.exp[i];
      if (k == 0) continue;
      std::vector<std::pair<MultiIndex, double>> next;
      for (const auto& [mi, cv] : acc) {
        for (int j = 0; j <= k; ++j) {
          MultiIndex m2 = mi;
          m2.exp[i] += j;
          next.emplace_back(m2, cv * static_cast<double>(binom(k, j)) * std::pow(-a[i], k - j));
        }
      }
      acc.swap(next);
    }
    for (const auto& [mi, cv] : acc) out.add_term(mi, cv);
  }
  return out;
}

Polynomial Polynomial::embedded(int m) const {
  if (m < n_) throw std::invalid_argument("embedding must not lower dimension");
  Polynomial out(m);
  for (const auto& [a, c] : terms_) {
    MultiIndex b = a;
    b.exp.resize(m, 0);
    out.add_term(b, c);
  }
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
  if (q.n_ != n_) throw std::invalid_argument("polynomial dimension mismatch");
  Polynomial out = *this;
  for (const auto& [a, c] : q.terms_) out.add_term(a, c);
  return out;
}

Polynomial Polynomial::operator-(const Polynomial& q) const { return *this + q * (-1.0); }

Polynomial Polynomial::operator*(double s) const {
  Polynomial out(n_);
  if (s == 0.0) return out;
  for (const auto& [a, c] : terms_) out.add_term(a, c * s);
  return out;
}

Polynomial Polynomial::times_coordinate(int i) const {
  Polynomial out(n_);
  for (const auto& [a, c] : terms_) {
    MultiIndex b = a;
    b.exp[i] += 1;
    out.add_term(b, c);
  }
  return out;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [a, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::sup_ball(int samples_per_dim) const {
  // Homogeneous terms peak on the boundary, mixed ones may not; scan radial
  // shells of a deterministic spherical lattice.
  double best = std::abs((*this)(Vec::Zero(n_)));
  const int m = samples_per_dim;
  std::vector<Vec> dirs;
  for (int i = 0; i < n_; ++i) {
    Vec e = Vec::Zero(n_);
    e[i] = 1.0;
    dirs.push_back(e);
    dirs.push_back(-e);
  }
  if (n_ == 1) {
    dirs.push_back(Vec::Constant(1, 1.0));
    dirs.push_back(Vec::Constant(1, -1.0));
  } else if (n_ == 2) {
    for (int k = 0; k < 4 * m; ++k) {
      double th = 2.0 * M_PI * (k + 0.5) / (4 * m);
      Vec v(2);
      v << std::cos(th), std::sin(th);
      dirs.push_back(v);
    }
  } else {
    // Lat-long style lattice in the leading two angles, recursive for the rest
    // is overkill; a Fibonacci-type lattice is adequate for a sup estimate.
    const int total = 2 * m * m;
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < total; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / total;
      double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      double th = ga * k;
      Vec v = Vec::Zero(n_);
      v[0] = rho * std::cos(th);
      v[1] = rho * std::sin(th);
      v[2] = z;
      if (n_ > 3) {
        // Sweep remaining coordinates through a coarse set of tilts.
        dirs.push_back(v);
        for (int j = 3; j < n_; ++j) {
          Vec w = v * std::sqrt(0.5);
          w[j] = std::sqrt(0.5);
          dirs.push_back(w);
          w[j] = -std::sqrt(0.5);
          dirs.push_back(w);
        }
        continue;
      }
      dirs.push_back(v);
    }
  }
  for (const Vec& v : dirs) {
    for (int s = 1; s <= 8; ++s) {
      double r = s / 8.0;
      best = std::max(best, std::abs((*this)(Vec(r * v))));
    }
  }
  return best;
}

nlohmann::ordered_json Polynomial::to_json() const {
  nlohmann::ordered_json j;
  j["n"] = n_;
  j["terms"] = nlohmann::ordered_json::array();
  for (const auto& [a, c] : terms_) {
    nlohmann::ordered_json t;
    t["exp"] = a.exp;
    t["c"] = c;
    j["terms"].push_back(t);
  }
  return j;
}

Polynomial Polynomial::from_json(const nlohmann::json& j) {
  Polynomial p(j.at("n").get<int>());
  for (const auto& t : j.at("terms")) {
    MultiIndex a(t.at("exp").get<std::vector<int>>());
    p.add_term(a, t.at("c").get<double>());
  }
  return p;
}

double laplacian_residual(const Polynomial& p) {
  const double scale = p.max_abs_coeff();
  if (scale == 0.0) return 0.0;
  return p.laplacian().max_abs_coeff() / scale;
}

HarmonicPolynomial::HarmonicPolynomial(Polynomial p) : p_(std::move(p)) {
  if (laplacian_residual(p_) > 1e-12)
    throw std::invalid_argument("polynomial is not harmonic (Laplacian residual above 1e-12)");
}

int harmonic_space_dim(int n, int d) {
  if (n < 2) throw std::invalid_argument("ambient dimension must be >= 2");
  if (d < 0) throw std::invalid_argument("degree must be >= 0");
  auto full = [&](int k) { return k < 0 ? 0LL : binom(n + k - 1, n - 1); };
  return static_cast<int>(full(d) - full(d - 2));
}

namespace {

// Closed-form integral of the monomial x^alpha over S^{n-1}; zero unless all
// exponents are even, else 2 * prod Gamma(b_i) / Gamma(sum b_i), b_i=(a_i+1)/2.
double monomial_sphere_integral_impl(const std::vector<int>& a) {
  double lg_num = 0.0, bsum = 0.0;
  for (int e : a) {
    if (e % 2 != 0) return 0.0;
    double b = 0.5 * (e + 1);
    lg_num += std::lgamma(b);
    bsum += b;
  }
  return 2.0 * std::exp(lg_num - std::lgamma(bsum));
}

}  // namespace

std::vector<HarmonicPolynomial> harmonic_basis(int n, int d) {
  if (n < 2) throw std::invalid_argument("harmonic_basis: ambient dimension must be >= 2");
  if (d < 0) throw std::invalid_argument("harmonic_basis: degree must be >= 0");

  const std::vector<MultiIndex> mons = monomials_of_degree(n, d);
  const int M = static_cast<int>(mons.size());
  Mat kernel;
  if (d < 2) {
    kernel = Mat::Identity(M, M);
  } else {
    const std::vector<MultiIndex> rows = monomials_of_degree(n, d - 2);
    std::map<MultiIndex, int> row_of;
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) row_of[rows[r]] = r;
    Mat L = Mat::Zero(static_cast<int>(rows.size()), M);
    for (int c = 0; c < M; ++c) {
      for (int i = 0; i < n; ++i) {
        int e = mons[c].exp[i];
        if (e < 2) continue;
        MultiIndex b = mons[c];
        b.exp[i] -= 2;
        L(row_of.at(b), c) += e * (e - 1);
      }
    }
    Eigen::FullPivLU<Mat> lu(L);
    lu.setThreshold(1e-12);
    kernel = lu.kernel();
  }
  const int h = static_cast<int>(kernel.cols());
  if (h != harmonic_space_dim(n, d))
    throw std::runtime_error("harmonic_basis: kernel dimension does not match the dimension formula");

  // Gram matrix of the kernel vectors under the exact L^2(S^{n-1}) pairing of
  // monomials, then a Cholesky-based orthonormalization.
  Mat Gm(M, M);
  for (int i = 0; i < M; ++i) {
    for (int j = i; j < M; ++j) {
      std::vector<int> s(n);
      for (int k = 0; k < n; ++k) s[k] = mons[i].exp[k] + mons[j].exp[k];
      Gm(i, j) = Gm(j, i) = monomial_sphere_integral_impl(s);
    }
  }
  Mat B = kernel.transpose() * Gm * kernel;
  Eigen::LLT<Mat> llt(B);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("harmonic_basis: Gram matrix not positive definite");
  Mat coeffs = llt.matrixL().solve(kernel.transpose()).transpose();  // kernel * L^{-T}

  std::vector<HarmonicPolynomial> out;
  out.reserve(h);
  for (int c = 0; c < h; ++c) {
    Polynomial p(n);
    const double scale = coeffs.col(c).cwiseAbs().maxCoeff();
    for (int m = 0; m < M; ++m) {
      double v = coeffs(m, c);
      if (std::abs(v) > 1e-14 * scale) p.add_term(mons[m], v);
    }
    out.emplace_back(std::move(p));
  }
  return out;
}

double sphere_lp_norm(const Polynomial& p, const SphereRule& rule, int exponent) {
  if (p.dim() != rule.n) throw std::invalid_argument("sphere_lp_norm: dimension mismatch");
  if (exponent != 1 && exponent != 2)
    throw std::invalid_argument("sphere_lp_norm: exponent must be 1 or 2");
  double acc = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    const double v = std::abs(p(rule.node(i)));
    acc += rule.weights[i] * (exponent == 2 ? v * v : v);
  }
  return exponent == 2 ? std::sqrt(acc) : acc;
}

int poly_dimension(const Polynomial& p) {
  if (p.is_zero() || p.degree() == 0)
    throw std::invalid_argument("poly_dimension: polynomial must be nonconstant");
  const int n = p.dim();
  // Rows are coefficient vectors of the partial derivatives over the union of
  // their monomials.
  std::map<MultiIndex, int> col_of;
  std::vector<Polynomial> parts;
  for (int i = 0; i < n; ++i) {
    parts.push_back(p.partial(i));
    for (const auto& [a, c] : parts.back().terms())
      if (!col_of.count(a)) col_of.emplace(a, static_cast<int>(col_of.size()));
  }
  Mat A = Mat::Zero(n, std::max<int>(1, static_cast<int>(col_of.size())));
  for (int i = 0; i < n; ++i)
    for (const auto& [a, c] : parts[i].terms()) A(i, col_of.at(a)) = c;
  const double scale = A.cwiseAbs().maxCoeff();
  if (scale > 0) A /= scale;
  Eigen::FullPivLU<Mat> lu(A);
  lu.setThreshold(1e-10);
  return n - static_cast<int>(lu.rank());
}

}  // namespace fb
