#include "fb/field.hpp"

#include <cmath>
#include <stdexcept>

namespace fb {

Vec Field::gradient(const Vec& x) const {
  const int n = dim();
  const double h = 1e-5 * std::max(x.norm(), 1e-4);
  Vec g(n), e = x;
  for (int i = 0; i < n; ++i) {
    e[i] = x[i] + h;
    double fp = value(e);
    e[i] = x[i] - h;
    double fm = value(e);
    e[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

SumField::SumField(std::vector<FieldPtr> fields, std::vector<double> coeffs)
    : fields_(std::move(fields)), coeffs_(std::move(coeffs)) {
  if (fields_.empty() || fields_.size() != coeffs_.size())
    throw std::invalid_argument("SumField: mismatched fields/coefficients");
  for (const auto& f : fields_)
    if (f->dim() != fields_.front()->dim())
      throw std::invalid_argument("SumField: mixed dimensions");
}

double SumField::value(const Vec& x) const {
  double s = 0.0;
  for (size_t i = 0; i < fields_.size(); ++i) s += coeffs_[i] * fields_[i]->value(x);
  return s;
}

Vec SumField::gradient(const Vec& x) const {
  Vec g = Vec::Zero(dim());
  for (size_t i = 0; i < fields_.size(); ++i) g += coeffs_[i] * fields_[i]->gradient(x);
  return g;
}

bool SumField::has_analytic_gradient() const {
  for (const auto& f : fields_)
    if (!f->has_analytic_gradient()) return false;
  return true;
}

RadialBump::RadialBump(Vec center, double radius, double amp)
    : center_(std::move(center)), radius_(radius), amp_(amp) {
  if (radius_ <= 0) throw std::invalid_argument("RadialBump: radius must be positive");
}

void RadialBump::profile(double rho, double& f, double& df, double& ddf) const {
  const double u = rho / radius_;
  if (u >= 1.0) {
    f = df = ddf = 0.0;
    return;
  }
  const double s = 1.0 - u * u;
  const double g = std::exp(1.0 - 1.0 / s);
  const double gu = g * (-2.0 * u / (s * s));
  const double guu = g * (4.0 * u * u / (s * s * s * s) - 2.0 / (s * s) - 8.0 * u * u / (s * s * s));
  f = amp_ * g;
  df = amp_ * gu / radius_;
  ddf = amp_ * guu / (radius_ * radius_);
}

double RadialBump::value(const Vec& x) const {
  double f, df, ddf;
  profile((x - center_).norm(), f, df, ddf);
  return f;
}

Vec RadialBump::gradient(const Vec& x) const {
  const Vec r = x - center_;
  const double rho = r.norm();
  if (rho < 1e-14) return Vec::Zero(dim());
  double f, df, ddf;
  profile(rho, f, df, ddf);
  return (df / rho) * r;
}

double RadialBump::laplacian(const Vec& x) const {
  const double rho = (x - center_).norm();
  double f, df, ddf;
  if (rho < 1e-12) {
    profile(1e-12, f, df, ddf);
    return dim() * ddf;
  }
  profile(rho, f, df, ddf);
  return ddf + (dim() - 1) * df / rho;
}

namespace {

// C^inf step S(t): 0 for t<=0, 1 for t>=1, with S', S''.
void smooth_step(double t, double& S, double& dS, double& ddS) {
  if (t <= 0.0) {
    S = dS = ddS = 0.0;
    return;
  }
  if (t >= 1.0) {
    S = 1.0;
    dS = ddS = 0.0;
    return;
  }
  auto h = [](double u) { return std::exp(-1.0 / u); };
  auto h1 = [&](double u) { return h(u) / (u * u); };
  auto h2 = [&](double u) { return h(u) * (1.0 / (u * u * u * u) - 2.0 / (u * u * u)); };
  const double A = h(t), B = h(1.0 - t);
  const double A1 = h1(t), B1 = -h1(1.0 - t);
  const double A2 = h2(t), B2 = h2(1.0 - t);
  const double den = A + B;
  S = A / den;
  dS = (A1 * B - A * B1) / (den * den);
  ddS = (A2 * B - A * B2) / (den * den) - 2.0 * (A1 * B - A * B1) * (A1 + B1) / (den * den * den);
}

}  // namespace

SmoothBallIndicator::SmoothBallIndicator(int n, double r, double w) : n_(n), r_(r), w_(w) {
  if (r <= 0 || w <= 0 || w >= r)
    throw std::invalid_argument("SmoothBallIndicator: need 0 < w < r");
}

void SmoothBallIndicator::profile(double rho, double& f, double& df, double& ddf) const {
  const double t = (r_ + w_ - rho) / (2.0 * w_);
  double S, dS, ddS;
  smooth_step(t, S, dS, ddS);
  f = S;
  df = -dS / (2.0 * w_);
  ddf = ddS / (4.0 * w_ * w_);
}

double SmoothBallIndicator::value(const Vec& x) const {
  double f, df, ddf;
  profile(x.norm(), f, df, ddf);
  return f;
}

Vec SmoothBallIndicator::gradient(const Vec& x) const {
  const double rho = x.norm();
  if (rho < 1e-14) return Vec::Zero(n_);
  double f, df, ddf;
  profile(rho, f, df, ddf);
  return (df / rho) * x;
}

double SmoothBallIndicator::laplacian(const Vec& x) const {
  const double rho = x.norm();
  double f, df, ddf;
  profile(std::max(rho, 1e-12), f, df, ddf);
  if (rho < 1e-12) return n_ * ddf;
  return ddf + (n_ - 1) * df / rho;
}

}  // namespace fb
