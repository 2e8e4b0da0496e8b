#include <cmath>

#include "doctest.h"
#include "fb/fixtures.hpp"
#include "fb/rng.hpp"
#include "fb/spectral.hpp"
#include "fb/sphere_rule.hpp"

using namespace fb;

TEST_CASE("sphere rule invariants") {
  for (int n = 2; n <= 5; ++n) {
    auto rule = build_sphere_rule(n, 8);
    for (int i = 0; i < rule->size(); ++i)
      CHECK(std::abs(rule->nodes.row(i).norm() - 1.0) <= 1e-14);
    CHECK(rule->weights.minCoeff() > 0.0);
    CHECK(std::abs(rule->weights.sum() - sphere_area(n)) < 1e-10);
    // monomial exactness against the closed form
    for (int d = 0; d <= 8; ++d) {
      for (const auto& a : monomials_of_degree(n, d)) {
        double got = 0.0;
        for (int i = 0; i < rule->size(); ++i) {
          double t = rule->weights[i];
          for (int c = 0; c < n; ++c) t *= std::pow(rule->nodes(i, c), a.exp[c]);
          got += t;
        }
        CHECK(std::abs(got - monomial_sphere_integral(a)) < 1e-10);
      }
    }
  }
  CHECK_THROWS(build_sphere_rule(7, 8));
  CHECK_THROWS(build_sphere_rule(3, 1));
}

TEST_CASE("rule spot values") {
  auto r2 = build_sphere_rule(2, 8);
  CHECK(r2->weights.sum() == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  auto r3 = build_sphere_rule(3, 8);
  double i_w1sq = 0.0, i_w1w2 = 0.0;
  for (int i = 0; i < r3->size(); ++i) {
    i_w1sq += r3->weights[i] * r3->nodes(i, 0) * r3->nodes(i, 0);
    i_w1w2 += r3->weights[i] * r3->nodes(i, 0) * r3->nodes(i, 1);
  }
  CHECK(i_w1sq == doctest::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
  CHECK(std::abs(i_w1w2) < 1e-12);
}

TEST_CASE("gauss rules") {
  auto [t, w] = gauss_legendre(16);
  double s2 = 0.0;
  for (int i = 0; i < 16; ++i) s2 += w[i] * t[i] * t[i];
  CHECK(w.sum() == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(s2 == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  // Chebyshev-2nd-kind case: weight (1-t^2)^{1/2}, mu0 = pi/2
  auto [tc, wc] = gauss_gegenbauer(8, 0.5);
  CHECK(wc.sum() == doctest::Approx(M_PI / 2.0).epsilon(1e-13));
}

TEST_CASE("analyze: orthonormal trace extraction") {
  auto rule = build_sphere_rule(3, 16);
  auto basis = SphericalBasis::get(rule, 4);
  // trace = phi_k -> delta coefficients
  for (int k : {0, 2, 7}) {
    auto trace = synthesize_trace(basis, {{k, 1.0}});
    auto c = analyze(trace, 4);
    for (const auto& e : c.entries)
      CHECK(std::abs(e.c - (e.j == k ? 1.0 : 0.0)) < 1e-10);
    CHECK(std::abs(c.parseval_defect) < 1e-10);
  }
}

TEST_CASE("analyze: eigenspace separation and the x1 + x1 x2 example") {
  auto rule = build_sphere_rule(3, 16);
  // restriction of a degree-3 homogeneous harmonic: only degree-3 coefficients
  Rng rng(3);
  Polynomial p(3);
  for (const auto& b : harmonic_basis(3, 3)) p = p + b.poly() * rng.normal();
  PolynomialField f(p);
  auto tr = trace_of_field(f, rule, Vec::Zero(3), 1.0, 3);
  for (const auto& e : analyze(tr, 5).entries)
    if (e.degree != 3) CHECK(std::abs(e.c) < 1e-10);

  Polynomial q(3);
  q.add_term(MultiIndex(std::vector<int>{1, 0, 0}), 1.0);
  q.add_term(MultiIndex(std::vector<int>{1, 1, 0}), 1.0);
  PolynomialField fq(q);
  auto trq = trace_of_field(fq, rule, Vec::Zero(3), 1.0, 2);
  auto cq = analyze(trq, 4);
  int nonzero = 0;
  std::vector<int> degs;
  for (const auto& e : cq.entries)
    if (std::abs(e.c) > 1e-9) {
      ++nonzero;
      degs.push_back(e.degree);
    }
  CHECK(nonzero == 2);
  REQUIRE(degs.size() == 2);
  CHECK(((degs[0] == 1 && degs[1] == 2) || (degs[0] == 2 && degs[1] == 1)));
  CHECK(std::abs(cq.parseval_defect) < 1e-10);
}

TEST_CASE("analyze refuses insufficient exactness") {
  auto rule = build_sphere_rule(3, 8);
  BoundaryTrace tr;
  tr.rule = rule;
  tr.center = Vec::Zero(3);
  tr.values = Vec::Zero(rule->size());
  CHECK_THROWS(analyze(tr, 5));  // needs 2L = 10 > 8
  tr.poly_degree = 2;
  CHECK_NOTHROW(analyze(tr, 5));  // needs 2 + 5 = 7 <= 8
  CHECK_THROWS(analyze(tr, 7));
}

TEST_CASE("extend: boundary agreement, harmonic scaling, homogeneous scaling") {
  auto rule = build_sphere_rule(3, 16);
  auto basis = SphericalBasis::get(rule, 3);
  // coefficients on degrees 1 and 2
  int j1 = -1, j2 = -1;
  for (int j = 0; j < basis->size(); ++j) {
    if (basis->degree_of(j) == 1 && j1 < 0) j1 = j;
    if (basis->degree_of(j) == 2 && j2 < 0) j2 = j;
  }
  auto trace = synthesize_trace(basis, {{j1, 0.8}, {j2, -0.6}});
  auto coeffs = analyze(trace, 3);

  auto harm = extend(coeffs, ExtensionMode::Harmonic);
  auto hom = extend(coeffs, ExtensionMode::Homogeneous, 2.0);
  for (int i = 0; i < rule->size(); i += 37) {
    const Vec node = rule->node(i);
    CHECK(harm->value(node) == doctest::Approx(trace.values[i]).epsilon(1e-10));
    CHECK(hom->value(node) == doctest::Approx(trace.values[i]).epsilon(1e-10));
    // harmonic mode scales each component by r^{d_j}
    const double vh = harm->value(0.5 * node);
    const double want =
        0.8 * 0.5 * basis->poly(j1)(node) + (-0.6) * 0.25 * basis->poly(j2)(node);
    CHECK(vh == doctest::Approx(want).epsilon(1e-10));
    // homogeneous(2) mode scales everything by r^2
    const double v1 = hom->value(0.5 * node);
    const double v2 = hom->value(0.25 * node);
    CHECK(v1 == doctest::Approx(0.25 * trace.values[i]).epsilon(1e-9));
    CHECK(v2 == doctest::Approx(0.0625 * trace.values[i]).epsilon(1e-9));
  }

  // analyze(extend(., harmonic)) restricted to r=1 is the identity
  auto tr2 = trace_of_field(*harm, rule, Vec::Zero(3), 1.0, 2);
  auto back = analyze(tr2, 3);
  for (size_t k = 0; k < back.entries.size(); ++k)
    CHECK(std::abs(back.entries[k].c - coeffs.entries[k].c) < 1e-10);

  // degree-1 coefficient, harmonic mode, r = 0.5 halves the value
  auto trace1 = synthesize_trace(basis, {{j1, 1.0}});
  auto h1 = extend(analyze(trace1, 3), ExtensionMode::Harmonic);
  const Vec node = rule->node(11);
  CHECK(h1->value(0.5 * node) == doctest::Approx(0.5 * basis->poly(j1)(node)).epsilon(1e-10));
}

TEST_CASE("weiss_spectral single-coefficient examples") {
  SpectralCoefficients c;
  c.n = 3;
  c.max_degree = 3;
  const double amp = 1.7;
  c.entries = {{0, 1, amp}};
  // degree matches d: both modes vanish
  SpectralCoefficients cd;
  cd.n = 3;
  cd.entries = {{0, 2, amp}};
  CHECK(weiss_spectral(cd, 2.0, ExtensionMode::Harmonic) == doctest::Approx(0.0));
  CHECK(weiss_spectral(cd, 2.0, ExtensionMode::Homogeneous) == doctest::Approx(0.0));
  // n=3, d=2, d_j=1
  CHECK(weiss_spectral(c, 2.0, ExtensionMode::Harmonic) ==
        doctest::Approx(-amp * amp).epsilon(1e-14));
  CHECK(weiss_spectral(c, 2.0, ExtensionMode::Homogeneous) ==
        doctest::Approx(-0.8 * amp * amp).epsilon(1e-14));
  // n=3, d=2, d_j=3
  SpectralCoefficients c3;
  c3.n = 3;
  c3.entries = {{0, 3, amp}};
  CHECK(weiss_spectral(c3, 2.0, ExtensionMode::Harmonic) ==
        doctest::Approx(amp * amp).epsilon(1e-14));
  CHECK(weiss_spectral(c3, 2.0, ExtensionMode::Homogeneous) ==
        doctest::Approx(1.2 * amp * amp).epsilon(1e-14));
  CHECK_THROWS(weiss_spectral(c, 0.0, ExtensionMode::Harmonic));
}

TEST_CASE("kappa") {
  CHECK(kappa(3, 2.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));  // 1/(n+2d-1)
  CHECK(kappa(2, 1.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(kappa(3, 1.5) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(kappa(4, 3.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-15));
  for (int n = 2; n <= 5; ++n)
    for (int d = 1; d <= 3; ++d)
      CHECK(kappa(n, d) == doctest::Approx(1.0 / (n + 2.0 * d - 1.0)).epsilon(1e-15));
  CHECK_THROWS(kappa(3, 0.0));
  CHECK_THROWS(kappa(1, 1.0));
}

TEST_CASE("term-by-term epiperimetric inequality, exhaustive") {
  // (j - d) <= (1 - kappa) (j - d)(n + j + d - 2)/(n + 2d - 2)
  for (int n = 2; n <= 5; ++n) {
    std::vector<double> ds;
    for (int d = 1; d <= 10; ++d) ds.push_back(d);
    for (double d : {0.5, 1.5, 2.5, 7.25, 9.75}) ds.push_back(d);
    for (double d : ds) {
      const double k = kappa(n, d);
      CHECK(k > 0.0);
      CHECK(k < 1.0);
      for (int j = 0; j <= 50; ++j) {
        const double lhs = j - d;
        const double rhs = (1.0 - k) * (j - d) * (n + j + d - 2.0) / (n + 2.0 * d - 2.0);
        CHECK(lhs <= rhs + 1e-12);
      }
    }
  }
}

TEST_CASE("epiperimetric_check") {
  auto rule = build_sphere_rule(3, 16);
  auto basis = SphericalBasis::get(rule, 8);

  SUBCASE("degree-d harmonic trace: both Weiss values vanish") {
    int jd = -1;
    for (int j = 0; j < basis->size(); ++j)
      if (basis->degree_of(j) == 2) {
        jd = j;
        break;
      }
    auto trace = synthesize_trace(basis, {{jd, 1.3}});
    auto rep = epiperimetric_check(trace, 2.0, 8);
    CHECK(std::abs(rep.w_harmonic) < 1e-12);
    CHECK(std::abs(rep.w_homogeneous) < 1e-12);
    CHECK(rep.pass);
    CHECK(std::abs(rep.margin) < 1e-12);
  }

  SUBCASE("degree-1 trace at d=2: margin 1/3") {
    int j1 = -1;
    for (int j = 0; j < basis->size(); ++j)
      if (basis->degree_of(j) == 1) {
        j1 = j;
        break;
      }
    auto trace = synthesize_trace(basis, {{j1, 1.0}});
    auto rep = epiperimetric_check(trace, 2.0, 8);
    CHECK(rep.w_harmonic == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(rep.w_homogeneous == doctest::Approx(-0.8).epsilon(1e-10));
    CHECK(rep.kappa == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    // (1 - 1/6)(-4/5) = -2/3, margin = -2/3 + 1 = 1/3
    CHECK(rep.margin == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(rep.pass);
  }

  SUBCASE("50 random traces pass, n in {2,3}, d in {1,2}") {
    for (int n : {2, 3}) {
      auto r = build_sphere_rule(n, 16);
      auto b = SphericalBasis::get(r, 8);
      Rng rng(77);
      for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::pair<int, double>> coeffs;
        for (int j = 0; j < b->size(); ++j)
          if (rng.uniform() < 0.5) coeffs.emplace_back(j, rng.normal());
        auto trace = synthesize_trace(b, coeffs);
        for (double d : {1.0, 2.0}) {
          auto rep = epiperimetric_check(trace, d, 8);
          CHECK(rep.pass);
        }
      }
    }
  }
}

TEST_CASE("spectral report serialization") {
  auto rule = build_sphere_rule(2, 12);
  auto basis = SphericalBasis::get(rule, 3);
  auto trace = synthesize_trace(basis, {{1, 2.0}});
  auto j = analyze(trace, 3).to_json();
  CHECK(j.contains("coeffs"));
  CHECK(j.contains("parseval_defect"));
  CHECK(j["normalization"] == "unit-l2-sphere");
  for (const auto& e : j["coeffs"]) {
    CHECK(e.contains("degree"));
    CHECK(e.contains("c"));
  }
}

TEST_CASE("rule CSV serialization") {
  auto rule = build_sphere_rule(2, 4);
  auto csv = rule_to_csv(*rule);
  CHECK(csv.find("x0,x1,weight\r\n") == 0);
  size_t lines = 0;
  for (size_t p = 0; (p = csv.find("\r\n", p)) != std::string::npos; p += 2) ++lines;
  CHECK(lines == static_cast<size_t>(rule->size()) + 1);
}
