#pragma once

#include <vector>

#include "fb/blowup.hpp"
#include "fb/functionals.hpp"
#include "fb/polynomial.hpp"

namespace fb {

/// Jet at a point: the blowup polynomial recentred there, P_a(x) = ptilde(x-a).
struct WhitneyJet {
  Vec point;
  HarmonicPolynomial poly;  // P_a, degree <= k
  int k = 0;
};

WhitneyJet make_jet(const Vec& a, const HarmonicPolynomial& tangent, int k);
WhitneyJet jet_from_record(const BlowupRecord& rec, int k);

enum class Admissibility { Admissible, NonAdmissible, CheckSkipped };

struct Classification {
  bool classifiable = false;
  int d = 0;
  double residual = 0.0;  // |N(finest) - d|
  int j = 0;              // poly_dimension of the jet polynomial
  Admissibility admissibility = Admissibility::CheckSkipped;
  std::string note;
};

/// d = nearest integer to the finest-scale frequency (residual reported,
/// unclassifiable beyond 0.2); j = dim of the jet's translation-invariance
/// space; the j <= n-3 bound is flagged for d >= 2 in ambient dimension >= 3.
Classification classify_point(const FunctionalScan& scan, const WhitneyJet& jet);

/// rho_alpha over ordered jet pairs with |a-b| <= r:
/// sup |D^alpha P_b(b) - D^alpha P_a(b)| / |a-b|^{k-|alpha|}.
/// Empty sup -> 0; coincident points with differing jets -> +infinity.
double rho_alpha(const std::vector<WhitneyJet>& jets, const MultiIndex& alpha, int k, double r);

struct WhitneyEntry {
  MultiIndex alpha;
  std::vector<double> rho;  // per grid radius
  bool identically_zero = false;
  double fitted_exponent = 0.0;
  double fitted_amplitude = 0.0;
  bool pass = false;
};

struct WhitneyReport {
  std::vector<double> r_grid;
  std::vector<WhitneyEntry> entries;
  bool pass = false;
  nlohmann::ordered_json to_json() const;
};

/// Fits rho_alpha(r) ~ C r^beta for every |alpha| <= k; an entry passes when
/// rho is identically below 1e-10 or the fitted exponent is >= beta - 0.05.
WhitneyReport whitney_report(const std::vector<WhitneyJet>& jets, int k, double beta,
                             const std::vector<double>& r_grid);

/// Two-sided growth bound (1/m) rho^d <= sup_{dB(Q,rho)} |f| <= m rho^d
/// checked on the grid with sups over sphere-rule nodes.
bool K_dm_membership(const Field& f, const Vec& Q, double d, double m,
                     const std::vector<double>& rho_grid, const SphereRulePtr& rule);

struct StratumRow {
  Vec point;
  Classification cls;
};

/// CSV table: point coordinates, d, j, admissibility flag.
std::string strata_table_csv(const std::vector<StratumRow>& rows);

}  // namespace fb
