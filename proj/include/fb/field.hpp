#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fb/polynomial.hpp"

namespace fb {

/// Evaluable scalar field on R^n with a value oracle and a gradient oracle.
/// The default gradient is a central finite difference with step
/// 1e-5 * max(|x|, 1e-4); overrides report has_analytic_gradient().
class Field {
 public:
  virtual ~Field() = default;
  virtual int dim() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const;
  virtual bool has_analytic_gradient() const { return false; }
};

using FieldPtr = std::shared_ptr<const Field>;

class PolynomialField : public Field {
 public:
  explicit PolynomialField(Polynomial p) : p_(std::move(p)) {}
  explicit PolynomialField(const HarmonicPolynomial& p) : p_(p.poly()) {}
  int dim() const override { return p_.dim(); }
  double value(const Vec& x) const override { return p_(x); }
  Vec gradient(const Vec& x) const override { return p_.gradient_at(x); }
  bool has_analytic_gradient() const override { return true; }
  const Polynomial& poly() const { return p_; }

 private:
  Polynomial p_;
};

/// Linear combination sum_i c_i f_i.
class SumField : public Field {
 public:
  SumField(std::vector<FieldPtr> fields, std::vector<double> coeffs);
  int dim() const override { return fields_.front()->dim(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  bool has_analytic_gradient() const override;

 private:
  std::vector<FieldPtr> fields_;
  std::vector<double> coeffs_;
};

class LambdaField : public Field {
 public:
  using ValueFn = std::function<double(const Vec&)>;
  using GradFn = std::function<Vec(const Vec&)>;
  LambdaField(int n, ValueFn v) : n_(n), v_(std::move(v)) {}
  LambdaField(int n, ValueFn v, GradFn g) : n_(n), v_(std::move(v)), g_(std::move(g)) {}
  int dim() const override { return n_; }
  double value(const Vec& x) const override { return v_(x); }
  Vec gradient(const Vec& x) const override { return g_ ? g_(x) : Field::gradient(x); }
  bool has_analytic_gradient() const override { return static_cast<bool>(g_); }

 private:
  int n_;
  ValueFn v_;
  GradFn g_;
};

/// Compactly supported smooth field with an exact Laplacian oracle.
class TestFunction : public Field {
 public:
  virtual double laplacian(const Vec& x) const = 0;
  virtual double support_radius() const = 0;
  virtual Vec support_center() const = 0;
};

/// Radial C^inf bump supported in B(center, radius):
/// amp * exp(1 - 1/(1 - (rho/radius)^2)). Supplies an exact Laplacian oracle.
class RadialBump : public TestFunction {
 public:
  RadialBump(Vec center, double radius, double amp = 1.0);
  int dim() const override { return static_cast<int>(center_.size()); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  bool has_analytic_gradient() const override { return true; }
  double laplacian(const Vec& x) const override;
  double support_radius() const override { return radius_; }
  Vec support_center() const override { return center_; }

 private:
  // profile and first/second radial derivatives at rho
  void profile(double rho, double& f, double& df, double& ddf) const;
  Vec center_;
  double radius_, amp_;
};

/// Smooth approximation of the indicator of B(0, r): C^inf transition from 1
/// to 0 across [r - w, r + w], with an exact Laplacian oracle.
class SmoothBallIndicator : public TestFunction {
 public:
  SmoothBallIndicator(int n, double r, double w);
  int dim() const override { return n_; }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  bool has_analytic_gradient() const override { return true; }
  double laplacian(const Vec& x) const override;
  double support_radius() const override { return r_ + w_; }
  Vec support_center() const override { return Vec::Zero(n_); }

 private:
  void profile(double rho, double& f, double& df, double& ddf) const;
  int n_;
  double r_, w_;
};

}  // namespace fb
