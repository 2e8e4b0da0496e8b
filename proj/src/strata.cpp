#include "fb/strata.hpp"

#include <cmath>
#include <limits>

#include "fb/io.hpp"

namespace fb {

WhitneyJet make_jet(const Vec& a, const HarmonicPolynomial& tangent, int k) {
  if (tangent.degree() > k)
    throw std::invalid_argument("make_jet: tangent degree exceeds the jet bound");
  return WhitneyJet{a, tangent.shifted(a), k};
}

WhitneyJet jet_from_record(const BlowupRecord& rec, int k) {
  return make_jet(rec.center, rec.tangent_poly(), k);
}

Classification classify_point(const FunctionalScan& scan, const WhitneyJet& jet) {
  Classification c;
  const auto& fine = scan.finest();
  if (fine.r > 1e-2 + 1e-12)
    throw std::invalid_argument("classify_point: scan must reach r <= 1e-2");
  c.d = static_cast<int>(std::lround(fine.N));
  c.residual = std::abs(fine.N - c.d);
  if (c.residual > 0.2) {
    c.classifiable = false;
    c.note = "frequency residual above 0.2; unclassifiable";
    return c;
  }
  c.classifiable = true;
  c.j = poly_dimension(jet.poly.poly());
  const int n = jet.poly.dim();
  if (n == 2) {
    c.admissibility = Admissibility::CheckSkipped;
    c.note = "n-3 bound not checked in the plane";
  } else if (c.d < 2) {
    c.admissibility = Admissibility::CheckSkipped;
    c.note = "regular point (d < 2)";
  } else if (c.j <= n - 3) {
    c.admissibility = Admissibility::Admissible;
  } else {
    c.admissibility = Admissibility::NonAdmissible;
    c.note = "dimension " + std::to_string(c.j) + " exceeds n-3 = " + std::to_string(n - 3);
  }
  return c;
}

double rho_alpha(const std::vector<WhitneyJet>& jets, const MultiIndex& alpha, int k, double r) {
  if (jets.size() < 1) throw std::invalid_argument("rho_alpha: need jets");
  const int order = alpha.degree();
  if (order > k) throw std::invalid_argument("rho_alpha: |alpha| exceeds k");
  double sup = 0.0;
  for (size_t ia = 0; ia < jets.size(); ++ia) {
    const Polynomial da = jets[ia].poly.poly().derivative(alpha);
    for (size_t ib = 0; ib < jets.size(); ++ib) {
      if (ia == ib) continue;
      const double dist = (jets[ia].point - jets[ib].point).norm();
      if (dist > r) continue;
      const Polynomial db = jets[ib].poly.poly().derivative(alpha);
      const double num = std::abs(db(jets[ib].point) - da(jets[ib].point));
      if (dist < 1e-15) {
        if (num > 1e-15) return std::numeric_limits<double>::infinity();
        continue;
      }
      sup = std::max(sup, num / std::pow(dist, k - order));
    }
  }
  return sup;
}

nlohmann::ordered_json WhitneyReport::to_json() const {
  nlohmann::ordered_json j;
  j["r_grid"] = r_grid;
  j["pass"] = pass;
  j["entries"] = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    nlohmann::ordered_json t;
    t["alpha"] = e.alpha.exp;
    t["rho"] = e.rho;
    t["identically_zero"] = e.identically_zero;
    if (!e.identically_zero) {
      t["fitted_exponent"] = e.fitted_exponent;
      t["fitted_amplitude"] = e.fitted_amplitude;
    }
    t["pass"] = e.pass;
    j["entries"].push_back(t);
  }
  return j;
}

WhitneyReport whitney_report(const std::vector<WhitneyJet>& jets, int k, double beta,
                             const std::vector<double>& r_grid) {
  if (jets.size() < 2) throw std::invalid_argument("whitney_report: need at least two jets");
  WhitneyReport rep;
  rep.r_grid = r_grid;
  rep.pass = true;
  const int n = jets.front().poly.dim();
  for (int deg = 0; deg <= k; ++deg) {
    for (const MultiIndex& alpha : monomials_of_degree(n, deg)) {
      WhitneyEntry e;
      e.alpha = alpha;
      for (double r : r_grid) e.rho.push_back(rho_alpha(jets, alpha, k, r));
      const double peak = *std::max_element(e.rho.begin(), e.rho.end());
      if (peak < 1e-10) {
        e.identically_zero = true;
        e.pass = true;
      } else {
        auto fit = rate_fit(r_grid, e.rho, 3);
        e.fitted_exponent = fit.exponent;
        e.fitted_amplitude = fit.amplitude;
        e.pass = fit.exponent >= beta - 0.05;
      }
      rep.pass = rep.pass && e.pass;
      rep.entries.push_back(std::move(e));
    }
  }
  return rep;
}

std::string strata_table_csv(const std::vector<StratumRow>& rows) {
  CsvWriter w;
  const int n = rows.empty() ? 0 : static_cast<int>(rows.front().point.size());
  std::vector<std::string> header;
  for (int i = 0; i < n; ++i) header.push_back("x" + std::to_string(i));
  header.insert(header.end(), {"d", "j", "admissible"});
  w.row(header);
  auto flag = [](const Classification& c) -> std::string {
    if (!c.classifiable) return "unclassifiable";
    switch (c.admissibility) {
      case Admissibility::Admissible: return "admissible";
      case Admissibility::NonAdmissible: return "non-admissible";
      case Admissibility::CheckSkipped: return "skipped";
    }
    return "unknown";
  };
  for (const auto& row : rows) {
    std::vector<std::string> fields;
    for (int i = 0; i < n; ++i) fields.push_back(format_double(row.point[i]));
    fields.push_back(std::to_string(row.cls.d));
    fields.push_back(std::to_string(row.cls.j));
    fields.push_back(flag(row.cls));
    w.row(fields);
  }
  return w.str();
}

bool K_dm_membership(const Field& f, const Vec& Q, double d, double m,
                     const std::vector<double>& rho_grid, const SphereRulePtr& rule) {
  if (m <= 0) throw std::invalid_argument("K_dm_membership: m must be positive");
  for (double rho : rho_grid) {
    if (rho <= 0) throw std::invalid_argument("K_dm_membership: grid must be positive");
    double sup = 0.0;
    for (int i = 0; i < rule->size(); ++i)
      sup = std::max(sup, std::abs(f.value(Q + rho * rule->node(i))));
    const double bound = std::pow(rho, d);
    if (sup < bound / m || sup > m * bound) return false;
  }
  return true;
}

}  // namespace fb
