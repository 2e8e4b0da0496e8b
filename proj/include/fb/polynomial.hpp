#pragma once

#include <Eigen/Dense>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace fb {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Exponent vector of a monomial in R^n.
struct MultiIndex {
  std::vector<int> exp;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exp(std::move(e)) {}

  int dim() const { return static_cast<int>(exp.size()); }
  int degree() const;

  bool operator==(const MultiIndex&) const = default;
  auto operator<=>(const MultiIndex&) const = default;
};

/// All multi-indices in R^n of total degree exactly d, lexicographic order.
std::vector<MultiIndex> monomials_of_degree(int n, int d);

/// Sparse real polynomial on R^n keyed by multi-index.
/// Deterministic term order (lexicographic map); no explicit zero terms are kept.
class Polynomial {
 public:
  explicit Polynomial(int n) : n_(n) {}

  static Polynomial monomial(int n, const MultiIndex& a, double c);

  int dim() const { return n_; }
  /// Max total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_homogeneous() const;
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  int term_count() const { return static_cast<int>(terms_.size()); }

  double coeff(const MultiIndex& a) const;
  void add_term(const MultiIndex& a, double c);

  double operator()(const Vec& x) const;
  Vec gradient_at(const Vec& x) const;

  Polynomial partial(int i) const;
  std::vector<Polynomial> gradient() const;
  Polynomial directional_derivative(const Vec& zeta) const;
  /// Iterated formal derivative D^alpha.
  Polynomial derivative(const MultiIndex& alpha) const;
  Polynomial laplacian() const;

  /// x -> p(x - a).
  Polynomial shifted(const Vec& a) const;
  /// Same terms viewed in R^m, m >= n (trailing exponents zero).
  Polynomial embedded(int m) const;

  Polynomial operator+(const Polynomial& q) const;
  Polynomial operator-(const Polynomial& q) const;
  Polynomial operator*(double s) const;
  /// Multiply by the coordinate monomial x_i.
  Polynomial times_coordinate(int i) const;

  double max_abs_coeff() const;
  /// Sup of |p| over the closed unit ball, via dense deterministic sampling.
  double sup_ball(int samples_per_dim = 48) const;

  nlohmann::ordered_json to_json() const;
  static Polynomial from_json(const nlohmann::json& j);

 private:
  int n_;
  std::map<MultiIndex, double> terms_;
};

/// Max |coefficient of Delta p| relative to max |coefficient of p| (0 for constants).
double laplacian_residual(const Polynomial& p);

/// Polynomial with a harmonicity certificate checked at construction
/// (Laplacian coefficient recurrence yields zero below 1e-12 relative).
class HarmonicPolynomial {
 public:
  explicit HarmonicPolynomial(Polynomial p);

  const Polynomial& poly() const { return p_; }
  int dim() const { return p_.dim(); }
  int degree() const { return p_.degree(); }
  bool is_homogeneous() const { return p_.is_homogeneous(); }
  double operator()(const Vec& x) const { return p_(x); }
  Vec gradient_at(const Vec& x) const { return p_.gradient_at(x); }

  HarmonicPolynomial shifted(const Vec& a) const { return HarmonicPolynomial(p_.shifted(a)); }
  HarmonicPolynomial embedded(int m) const { return HarmonicPolynomial(p_.embedded(m)); }

 private:
  Polynomial p_;
};

/// Orthonormal (in L^2(S^{n-1})) basis of degree-d homogeneous harmonic polynomials.
/// Size is C(n+d-1,n-1) - C(n+d-3,n-1), the second term read as zero when d < 2.
std::vector<HarmonicPolynomial> harmonic_basis(int n, int d);

/// Dimension of the space of degree-d homogeneous harmonic polynomials on R^n.
int harmonic_space_dim(int n, int d);

/// dim{zeta in R^n : zeta . grad p == 0}, computed as n minus the rank of the
/// matrix of partial-derivative coefficient rows (pre-scaled, tolerance 1e-10).
int poly_dimension(const Polynomial& p);

struct SphereRule;

/// (int_{S^{n-1}} |p|^e dsigma)^{1/e} by rule quadrature, e in {1,2}. Exact to
/// the rule's declared degree for e = 2; |.|-limited for e = 1.
double sphere_lp_norm(const Polynomial& p, const SphereRule& rule, int exponent);

}  // namespace fb
