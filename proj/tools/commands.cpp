#include "commands.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fb/blowup.hpp"
#include "fb/fixtures.hpp"
#include "fb/functionals.hpp"
#include "fb/io.hpp"
#include "fb/jumpsynth.hpp"
#include "fb/measures.hpp"
#include "fb/rng.hpp"
#include "fb/spectral.hpp"
#include "fb/strata.hpp"

namespace fb::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct MathCheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Collects outputs for one run; files are written together with the manifest
// so the manifest always lists exactly what was produced.
class Run {
 public:
  Run(std::string command, ordered_json config, fs::path out_dir)
      : command_(std::move(command)), config_(std::move(config)), out_dir_(std::move(out_dir)) {
    ordered_json key = config_;
    key["command"] = command_;
    id_ = hex64(fnv1a64(key.dump()));
    start_ = std::chrono::steady_clock::now();
  }

  const std::string& id() const { return id_; }

  void emit_json(const std::string& stem, ordered_json j) {
    j["manifest"] = id_;
    write(stem + "-" + id_ + ".json", j.dump(2) + "\n");
  }

  void emit_csv(const std::string& stem, const std::string& csv) {
    const std::string name = stem + "-" + id_ + ".csv";
    write(name, csv);
    ordered_json side;
    side["manifest"] = id_;
    side["csv_fnv1a64"] = hex64(fnv1a64(csv));
    write(stem + "-" + id_ + ".meta.json", side.dump(2) + "\n");
  }

  void check(const std::string& name, bool ok) {
    checks_[name] = ok;
    all_ok_ = all_ok_ && ok;
  }
  bool all_ok() const { return all_ok_; }

  // The manifest carries the wall clock; every other output is byte-stable
  // under reruns with the same config and seed.
  void finish() {
    ordered_json m;
    m["schema"] = 1;
    m["run_id"] = id_;
    m["command"] = command_;
    m["config"] = config_;
    m["files"] = ordered_json::object();
    for (const auto& [name, sum] : files_) m["files"][name] = sum;
    m["checks"] = ordered_json::object();
    for (const auto& [name, ok] : checks_) m["checks"][name] = ok;
    m["pass"] = all_ok_;
    m["wallclock_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start_)
                            .count();
    write_text_file(out_dir_ / ("manifest-" + id_ + ".json"), m.dump(2) + "\n");
  }

 private:
  void write(const std::string& name, const std::string& contents) {
    write_text_file(out_dir_ / name, contents);
    files_[name] = hex64(fnv1a64(contents));
  }

  std::string command_;
  ordered_json config_;
  fs::path out_dir_;
  std::string id_;
  std::map<std::string, std::string> files_;
  std::map<std::string, bool> checks_;
  bool all_ok_ = true;
  std::chrono::steady_clock::time_point start_;
};

fs::path default_out_dir() {
  if (const char* env = std::getenv("FB_OUTPUT_DIR")) return fs::path(env);
  return fs::path(".");
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  size_t at = 0;
  while (at < s.size()) {
    size_t next = s.find(',', at);
    if (next == std::string::npos) next = s.size();
    out.push_back(std::stod(s.substr(at, next - at)));
    at = next + 1;
  }
  return out;
}

Vec parse_point(const std::string& s, int n) {
  auto vals = parse_list(s);
  if (static_cast<int>(vals.size()) != n)
    throw CLI::ValidationError("point", "expected " + std::to_string(n) + " coordinates");
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = vals[i];
  return v;
}

std::vector<double> geometric(double top, double ratio, int count) {
  std::vector<double> s;
  for (int i = 0; i < count; ++i) s.push_back(top * std::pow(ratio, i));
  return s;
}

// Config document + flag overrides; flags win.
class ConfigLayer {
 public:
  explicit ConfigLayer(const std::string& config_path) : doc_(nlohmann::json::object()) {
    if (!config_path.empty()) {
      doc_ = nlohmann::json::parse(read_text_file(config_path));
      if (doc_.value("schema", 1) != 1)
        throw CLI::ValidationError("config", "unsupported schema version");
    }
  }

  template <typename T>
  T pick(const CLI::Option* flag, const std::string& key, T flag_value, T fallback) const {
    if (flag->count() > 0) return flag_value;
    if (doc_.contains(key)) return doc_.at(key).get<T>();
    return fallback;
  }

  const nlohmann::json& doc() const { return doc_; }

 private:
  nlohmann::json doc_;
};

ordered_json snapshot(std::initializer_list<std::pair<std::string, ordered_json>> kv) {
  ordered_json j;
  j["schema"] = 1;
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

// ---- epi ------------------------------------------------------------------

int cmd_epi(int n, double d, int trials, int degree_max, uint64_t seed, const fs::path& out) {
  Run run("epi", snapshot({{"n", n},
                           {"d", d},
                           {"trials", trials},
                           {"degree_max", degree_max},
                           {"seed", seed}}),
          out);
  const int L = degree_max;
  auto rule = build_sphere_rule(n, degree_max + L);
  auto basis = SphericalBasis::get(rule, L);
  Rng rng(seed);
  int passes = 0;
  double min_margin = 1e300;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::pair<int, double>> coeffs;
    for (int j = 0; j < basis->size(); ++j)
      if (rng.uniform() < 0.5) coeffs.emplace_back(j, rng.normal());
    if (coeffs.empty()) coeffs.emplace_back(0, rng.normal());
    auto rep = epiperimetric_check(synthesize_trace(basis, coeffs), d, L);
    passes += rep.pass ? 1 : 0;
    min_margin = std::min(min_margin, rep.margin);
  }
  // exhaustive term-by-term inequality for this (n, d)
  bool term_ok = true;
  const double k = kappa(n, d);
  for (int j = 0; j <= 50; ++j)
    term_ok = term_ok &&
              (j - d <= (1.0 - k) * (j - d) * (n + j + d - 2.0) / (n + 2.0 * d - 2.0) + 1e-12);

  run.check("all_traces_pass", passes == trials);
  run.check("term_by_term", term_ok);
  ordered_json rep;
  rep["n"] = n;
  rep["d"] = d;
  rep["kappa"] = k;
  rep["trials"] = trials;
  rep["passes"] = passes;
  rep["min_margin"] = min_margin;
  rep["term_by_term"] = term_ok;
  run.emit_json("epi", rep);
  run.finish();
  std::cout << passes << "/" << trials << " pass, kappa = " << format_double(k) << "\n";
  return run.all_ok() ? 0 : 1;
}

// ---- scan -----------------------------------------------------------------

int cmd_scan(const std::string& fixture_id, double d, double rmin, double rmax, int ppd,
             const std::string& center, int exactness, int radial_order, uint64_t seed,
             const fs::path& out) {
  auto p = fixture(fixture_id);
  Run run("scan", snapshot({{"fixture", fixture_id},
                            {"d", d},
                            {"rmin", rmin},
                            {"rmax", rmax},
                            {"points_per_decade", ppd},
                            {"center", center},
                            {"rule_exactness", exactness},
                            {"radial_order", radial_order},
                            {"seed", seed}}),
          out);
  const Vec Q = center.empty() ? Vec(Vec::Zero(p.dim())) : parse_point(center, p.dim());
  auto rule = build_sphere_rule(p.dim(), exactness);
  PolynomialField f(p);
  auto sc = scan_functionals(f, Q, d, rmax, rmin, ppd, rule, radial_order);
  run.emit_csv("scan", sc.to_csv());
  ordered_json meta = sc.metadata_json();
  meta["fixture"] = fixture_id;
  try {
    meta["w_fit"] = rate_fit_scan(sc, ScanQuantity::W).to_json();
    meta["n_drop_fit"] = rate_fit_scan(sc, ScanQuantity::NDrop).to_json();
  } catch (const std::exception&) {
    // too few usable rows for a fit; the CSV still stands on its own
  }
  run.emit_json("scan-meta", meta);
  bool any_ok = false;
  for (const auto& row : sc.rows) any_ok = any_ok || !row.degenerate;
  run.check("has_nondegenerate_rows", any_ok);
  run.finish();
  std::cout << "scan " << fixture_id << ": " << sc.rows.size() << " radii, run " << run.id()
            << "\n";
  return run.all_ok() ? 0 : 1;
}

// ---- measure --------------------------------------------------------------

int cmd_measure(const std::string& fixture_id, bool validate, const std::string& radii_arg,
                double scale_factor, uint64_t seed, const fs::path& out) {
  auto p = fixture(fixture_id);
  Run run("measure", snapshot({{"fixture", fixture_id},
                               {"validate", validate},
                               {"radii", radii_arg},
                               {"resolution_scale", scale_factor},
                               {"seed", seed}}),
          out);
  const std::vector<double> radii = radii_arg.empty()
                                        ? std::vector<double>{0.37, 0.5, 1.0}
                                        : parse_list(radii_arg);

  if (!p.is_homogeneous()) {
    // szulkin-style fixture: triangulated sampling, no closed-form thresholds
    auto s = surface_sample_nonhomogeneous(p, 1.2, 72);
    run.emit_csv("sample", s.to_csv());
    ordered_json rep;
    rep["fixture"] = fixture_id;
    rep["homogeneous"] = false;
    rep["points"] = s.size();
    rep["note"] = "no closed-form ball measure for a non-homogeneous polynomial";
    run.emit_json("measure", rep);
    run.finish();
    std::cout << "measure " << fixture_id << ": " << s.size() << " surface points\n";
    return 0;
  }

  auto pm = PolynomialMeasure::make(p);
  auto res = SurfaceResolution::defaults(p.dim()).scaled(scale_factor);
  auto sample = surface_sample(p, 1.0, res);

  std::vector<double> grid;
  for (int i = 0; i < 13; ++i) grid.push_back(std::pow(10.0, -i / 6.0));
  auto ds = density_scan(sample_mass_oracle(sample), Vec::Zero(p.dim()), p.dim(), p.degree(),
                         grid);
  run.emit_csv("density", ds.to_csv());

  ordered_json rep;
  rep["fixture"] = fixture_id;
  rep["l1_norm"] = pm.l1_norm;
  rep["ball_measure_r1"] = ball_measure(pm, 1.0);
  rep["density"] = ds.to_json();
  if (validate) {
    auto v = surface_measure_validate(sample, pm, radii);
    rep["validation"] = v.to_json();
    const double tol = p.dim() == 2 ? 1e-4 : 1e-3;
    run.check("surface_vs_closed_form", v.max_rel_error < tol);
  }
  run.emit_json("measure", rep);
  run.finish();
  std::cout << "measure " << fixture_id << ": om_p(B(0,1)) = "
            << format_double(ball_measure(pm, 1.0)) << "\n";
  return run.all_ok() ? 0 : 1;
}

// ---- synth / model persistence ---------------------------------------------

ordered_json model_config_json(const std::string& fixture_id, const HolderWeight& w,
                               const Vec& anchor, double R, double delta, int radial,
                               uint64_t seed) {
  return snapshot({{"fixture", fixture_id},
                   {"weight", w.spec},
                   {"anchor", std::vector<double>(anchor.data(), anchor.data() + anchor.size())},
                   {"R", R},
                   {"delta", delta},
                   {"radial", radial},
                   {"seed", seed}});
}

JumpFunctionModel model_from_config(const nlohmann::json& cfg) {
  auto p = fixture(cfg.at("fixture").get<std::string>());
  auto w = HolderWeight::from_json(p.dim(), cfg.at("weight"));
  const auto av = cfg.at("anchor").get<std::vector<double>>();
  Vec anchor(p.dim());
  for (int i = 0; i < p.dim(); ++i) anchor[i] = av[i];
  SurfaceResolution res{};
  res.radial = cfg.at("radial").get<int>();
  if (p.dim() == 3) {
    auto d3 = SurfaceResolution::defaults(3);
    res.grid_theta = d3.grid_theta;
    res.grid_phi = d3.grid_phi;
  }
  return build_jump_function(p, w, anchor, cfg.at("R").get<double>(),
                             cfg.at("delta").get<double>(), res);
}

int cmd_synth(const std::string& fixture_id, double alpha, double seminorm, int axis,
              const std::string& anchor_arg, double R, double delta, int radial, uint64_t seed,
              const fs::path& out) {
  auto p = fixture(fixture_id);
  const Vec anchor =
      anchor_arg.empty() ? Vec(Vec::Zero(p.dim())) : parse_point(anchor_arg, p.dim());
  HolderWeight w = seminorm == 0.0
                       ? HolderWeight::constant(p.dim())
                       : HolderWeight::directional_power(p.dim(), alpha, seminorm, axis, anchor);
  auto cfg = model_config_json(fixture_id, w, anchor, R, delta, radial, seed);
  Run run("synth", cfg, out);

  JumpFunctionModel model = model_from_config(cfg);
  auto bound = holder_laplacian_bound_check(model);
  run.check("vanishing_order", model.trivial() || model.build_report().sub_degree_rel < 1e-6);
  run.check("harmonic_off_surface",
            model.trivial() || model.build_report().fd_laplacian_rel < 1e-3);
  run.check("holder_bound", bound.pass);

  ordered_json rep = model.manifest(fixture_id);
  rep["model_config"] = cfg;
  rep["holder_bound"] = ordered_json{{"max_ratio", bound.max_ratio},
                                     {"predicted_bound", bound.predicted_bound},
                                     {"pass", bound.pass}};
  run.emit_json("model", rep);
  run.finish();
  std::cout << "model " << run.id() << " built (" << model.layer().size()
            << " layer points)\n";
  return run.all_ok() ? 0 : 1;
}

nlohmann::json load_model_config(const fs::path& out, const std::string& id) {
  const fs::path path = out / ("model-" + id + ".json");
  if (!fs::exists(path))
    throw CLI::ValidationError("model", "no model manifest " + path.string());
  return nlohmann::json::parse(read_text_file(path)).at("model_config");
}

// ---- blowup -----------------------------------------------------------------

int cmd_blowup(const std::string& model_id, const std::string& fixture_id, int d, int scales,
               double smax, double sratio, const std::string& mode, const std::string& center,
               int exactness, uint64_t seed, const fs::path& out) {
  ordered_json cfg = snapshot({{"model", model_id},
                               {"fixture", fixture_id},
                               {"d", d},
                               {"scales", scales},
                               {"smax", smax},
                               {"sratio", sratio},
                               {"mode", mode},
                               {"center", center},
                               {"rule_exactness", exactness},
                               {"seed", seed}});
  Run run("blowup", cfg, out);

  std::shared_ptr<Field> field;
  BallMassOracle oracle;
  int n = 0;
  Vec Q;
  if (!model_id.empty()) {
    auto mcfg = load_model_config(out, model_id);
    auto model = std::make_shared<JumpFunctionModel>(model_from_config(mcfg));
    n = model->dim();
    Q = center.empty() ? model->anchor() : parse_point(center, n);
    oracle = [model](const Vec& c, double r) { return model->surface_mass(c, r); };
    field = model;
  } else {
    auto p = fixture(fixture_id);
    n = p.dim();
    Q = center.empty() ? Vec(Vec::Zero(n)) : parse_point(center, n);
    if (p.is_homogeneous()) oracle = exact_mass_oracle(PolynomialMeasure::make(p));
    field = std::make_shared<PolynomialField>(p);
  }
  auto rule = build_sphere_rule(n, exactness);
  const auto scale_list = geometric(smax, sratio, scales);
  const RescaleMode rm = mode == "measure" ? RescaleMode::Measure : RescaleMode::Power;
  if (rm == RescaleMode::Measure && !oracle)
    throw CLI::ValidationError("mode", "measure mode needs a ball-mass oracle");
  auto rec = blowup_sequence(*field, Q, d, scale_list, rule, rm, oracle ? &oracle : nullptr);
  run.emit_json("blowup", rec.to_json());
  run.emit_csv("distances", rec.distances_csv());
  if (oracle) {
    auto lim = density_limit(oracle, Q, n, d, scale_list);
    ordered_json dj;
    dj["value"] = lim.value;
    dj["variation"] = lim.variation;
    dj["exists"] = lim.exists;
    run.emit_json("density-limit", dj);
    run.check("density_limit_exists", lim.exists);
  }
  run.check("tangent_extracted", rec.tangent.has_value());
  run.finish();
  std::cout << "blowup run " << run.id() << ": rate "
            << (rec.rate.identically_zero ? std::string("0 (exact)")
                                          : format_double(rec.rate.exponent))
            << "\n";
  return run.all_ok() ? 0 : 1;
}

// ---- whitney ----------------------------------------------------------------

int cmd_whitney(const std::string& model_id, const std::string& anchors_arg, int k, double beta,
                const std::string& rgrid_arg, int exactness, uint64_t seed,
                const fs::path& out) {
  ordered_json cfg = snapshot({{"model", model_id},
                               {"anchors", anchors_arg},
                               {"k", k},
                               {"beta", beta},
                               {"r_grid", rgrid_arg},
                               {"rule_exactness", exactness},
                               {"seed", seed}});
  Run run("whitney", cfg, out);
  auto mcfg = load_model_config(out, model_id);
  auto p = fixture(mcfg.at("fixture").get<std::string>());
  const int n = p.dim();
  auto rule = build_sphere_rule(n, exactness);

  // anchors: semicolon-separated points on Sigma_p
  std::vector<Vec> anchors;
  size_t at = 0;
  while (at < anchors_arg.size()) {
    size_t next = anchors_arg.find(';', at);
    if (next == std::string::npos) next = anchors_arg.size();
    anchors.push_back(parse_point(anchors_arg.substr(at, next - at), n));
    at = next + 1;
  }
  if (anchors.size() < 2) throw CLI::ValidationError("anchors", "need at least two anchors");

  std::vector<WhitneyJet> jets;
  std::vector<StratumRow> strata;
  for (const Vec& a : anchors) {
    nlohmann::json acfg = mcfg;
    acfg["anchor"] = std::vector<double>(a.data(), a.data() + a.size());
    auto model = model_from_config(acfg);
    auto rec = blowup_sequence(model, a, k, geometric(0.05, 0.5, 6), rule);
    jets.push_back(jet_from_record(rec, k));
    auto sc = scan_functionals(model, a, k, 0.05, 5e-3, 5, rule);
    strata.push_back({a, classify_point(sc, jets.back())});
  }
  const std::vector<double> r_grid =
      rgrid_arg.empty() ? std::vector<double>{0.11, 0.26, 0.5, 0.9} : parse_list(rgrid_arg);
  auto rep = whitney_report(jets, k, beta, r_grid);
  run.check("whitney_pass", rep.pass);
  run.emit_json("whitney", rep.to_json());
  run.emit_csv("strata", strata_table_csv(strata));
  run.finish();
  std::cout << "whitney run " << run.id() << ": " << (rep.pass ? "pass" : "fail") << "\n";
  return run.all_ok() ? 0 : 1;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"numerical laboratory for harmonic-measure monotonicity diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();  // --config/--out may follow the subcommand

  std::string config_path, out_arg;
  app.add_option("--config", config_path, "JSON config document (flags override it)")
      ->configurable(false);
  app.add_option("--out", out_arg, "output directory (default FB_OUTPUT_DIR or .)");

  // epi
  auto* epi = app.add_subcommand("epi", "spectral epiperimetric inequality over random traces");
  int e_n = 3, e_trials = 50, e_degmax = 8;
  double e_d = 2.0;
  uint64_t e_seed = 0;
  auto* e_n_opt = epi->add_option("--n", e_n, "ambient dimension (2..5)");
  auto* e_d_opt = epi->add_option("--d", e_d, "homogeneity degree");
  auto* e_t_opt = epi->add_option("--trials", e_trials, "number of random traces");
  auto* e_g_opt = epi->add_option("--degree-max", e_degmax, "max trace degree");
  auto* e_s_opt = epi->add_option("--seed", e_seed, "RNG seed");

  // scan
  auto* scan = app.add_subcommand("scan", "H, D, N, W radial scan of a fixture");
  std::string s_fixture = "xy", s_center;
  double s_d = 2.0, s_rmin = 1e-3, s_rmax = 1.0;
  int s_ppd = 5, s_exact = 16, s_radial = kDefaultRadialOrder;
  uint64_t s_seed = 0;
  auto* s_f_opt = scan->add_option("--fixture", s_fixture, "fixture id");
  auto* s_d_opt = scan->add_option("--d", s_d, "Weiss homogeneity parameter");
  auto* s_rmin_opt = scan->add_option("--rmin", s_rmin, "smallest radius");
  auto* s_rmax_opt = scan->add_option("--rmax", s_rmax, "largest radius");
  auto* s_ppd_opt = scan->add_option("--ppd", s_ppd, "points per decade");
  auto* s_c_opt = scan->add_option("--center", s_center, "scan center, comma separated");
  auto* s_e_opt = scan->add_option("--rule-exactness", s_exact, "sphere rule exactness");
  auto* s_o_opt = scan->add_option("--radial-order", s_radial, "radial Gauss order");
  auto* s_s_opt = scan->add_option("--seed", s_seed, "RNG seed");

  // measure
  auto* measure = app.add_subcommand("measure", "polynomial harmonic measure diagnostics");
  std::string m_fixture = "xy", m_radii;
  bool m_validate = false;
  double m_scale = 1.0;
  uint64_t m_seed = 0;
  auto* m_f_opt = measure->add_option("--fixture", m_fixture, "fixture id");
  auto* m_v_opt = measure->add_flag("--validate", m_validate, "surface vs closed form");
  auto* m_r_opt = measure->add_option("--radii", m_radii, "validation radii, comma separated");
  auto* m_s_opt = measure->add_option("--resolution-scale", m_scale, "sampling resolution factor");
  auto* m_seed_opt = measure->add_option("--seed", m_seed, "RNG seed");

  // synth
  auto* synth = app.add_subcommand("synth", "build an almost-harmonic jump model");
  std::string y_fixture = "xy", y_anchor;
  double y_alpha = 0.5, y_seminorm = 0.3, y_R = 4.0, y_delta = 0.05;
  int y_axis = 0, y_radial = 1000;
  uint64_t y_seed = 0;
  auto* y_f_opt = synth->add_option("--fixture", y_fixture, "base fixture id");
  auto* y_a_opt = synth->add_option("--alpha", y_alpha, "Holder exponent of log h");
  auto* y_s_opt = synth->add_option("--seminorm", y_seminorm, "Holder seminorm (0 = constant h)");
  auto* y_x_opt = synth->add_option("--axis", y_axis, "weight direction axis");
  auto* y_q_opt = synth->add_option("--anchor", y_anchor, "anchor point on Sigma_p");
  auto* y_R_opt = synth->add_option("--R", y_R, "layer truncation radius");
  auto* y_d_opt = synth->add_option("--delta", y_delta, "anchor exclusion radius");
  auto* y_r_opt = synth->add_option("--resolution", y_radial, "radial layer resolution");
  auto* y_seed_opt = synth->add_option("--seed", y_seed, "RNG seed");

  // blowup
  auto* blow = app.add_subcommand("blowup", "rescaling traces and tangent extraction");
  std::string b_model, b_fixture = "xy", b_mode = "power", b_center;
  int b_d = 2, b_scales = 8, b_exact = 24;
  double b_smax = 1.0, b_sratio = 0.5;
  uint64_t b_seed = 0;
  auto* b_m_opt = blow->add_option("--model", b_model, "synth model id");
  auto* b_f_opt = blow->add_option("--fixture", b_fixture, "fixture id (when no model)");
  auto* b_d_opt = blow->add_option("--d", b_d, "blowup degree");
  auto* b_s_opt = blow->add_option("--scales", b_scales, "number of scales");
  auto* b_x_opt = blow->add_option("--smax", b_smax, "largest scale");
  auto* b_r_opt = blow->add_option("--sratio", b_sratio, "scale ratio");
  auto* b_o_opt = blow->add_option("--mode", b_mode, "power | measure");
  auto* b_c_opt = blow->add_option("--center", b_center, "blowup center");
  auto* b_e_opt = blow->add_option("--rule-exactness", b_exact, "sphere rule exactness");
  auto* b_seed_opt = blow->add_option("--seed", b_seed, "RNG seed");

  // whitney
  auto* whit = app.add_subcommand("whitney", "Whitney-jet compatibility over anchors");
  std::string w_model, w_anchors, w_rgrid;
  int w_k = 1, w_exact = 24;
  double w_beta = 0.2;
  uint64_t w_seed = 0;
  auto* w_m_opt = whit->add_option("--model", w_model, "synth model id")->required();
  auto* w_a_opt = whit->add_option("--anchors", w_anchors,
                                   "semicolon-separated anchor points")->required();
  auto* w_k_opt = whit->add_option("--k", w_k, "jet degree bound");
  auto* w_b_opt = whit->add_option("--beta", w_beta, "target Holder exponent");
  auto* w_g_opt = whit->add_option("--rgrid", w_rgrid, "pair-distance grid");
  auto* w_e_opt = whit->add_option("--rule-exactness", w_exact, "sphere rule exactness");
  auto* w_seed_opt = whit->add_option("--seed", w_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ConfigLayer cfg(config_path);
    fs::path out = out_arg.empty()
                       ? (cfg.doc().contains("out")
                              ? fs::path(cfg.doc().at("out").get<std::string>())
                              : default_out_dir())
                       : fs::path(out_arg);
    fs::create_directories(out);

    if (epi->parsed()) {
      const int n = cfg.pick(e_n_opt, "n", e_n, 3);
      const double d = cfg.pick(e_d_opt, "d", e_d, 2.0);
      const int trials = cfg.pick(e_t_opt, "trials", e_trials, 50);
      const int degmax = cfg.pick(e_g_opt, "degree_max", e_degmax, 8);
      const uint64_t seed = cfg.pick(e_s_opt, "seed", e_seed, uint64_t{0});
      if (n < 2 || n > 5) throw CLI::ValidationError("--n", "supported dimensions are 2..5");
      if (d <= 0) throw CLI::ValidationError("--d", "d must be positive");
      if (trials < 1 || degmax < 1) throw CLI::ValidationError("epi", "bad trial parameters");
      return cmd_epi(n, d, trials, degmax, seed, out);
    }
    if (scan->parsed()) {
      const double rmin = cfg.pick(s_rmin_opt, "rmin", s_rmin, 1e-3);
      const double rmax = cfg.pick(s_rmax_opt, "rmax", s_rmax, 1.0);
      if (!(0 < rmin && rmin < rmax))
        throw CLI::ValidationError("scan", "need 0 < rmin < rmax");
      return cmd_scan(cfg.pick(s_f_opt, "fixture", s_fixture, std::string("xy")),
                      cfg.pick(s_d_opt, "d", s_d, 2.0), rmin, rmax,
                      cfg.pick(s_ppd_opt, "points_per_decade", s_ppd, 5),
                      cfg.pick(s_c_opt, "center", s_center, std::string()),
                      cfg.pick(s_e_opt, "rule_exactness", s_exact, 16),
                      cfg.pick(s_o_opt, "radial_order", s_radial, kDefaultRadialOrder),
                      cfg.pick(s_s_opt, "seed", s_seed, uint64_t{0}), out);
    }
    if (measure->parsed()) {
      return cmd_measure(cfg.pick(m_f_opt, "fixture", m_fixture, std::string("xy")),
                         m_v_opt->count() > 0 || cfg.doc().value("validate", false),
                         cfg.pick(m_r_opt, "radii", m_radii, std::string()),
                         cfg.pick(m_s_opt, "resolution_scale", m_scale, 1.0),
                         cfg.pick(m_seed_opt, "seed", m_seed, uint64_t{0}), out);
    }
    if (synth->parsed()) {
      const double alpha = cfg.pick(y_a_opt, "alpha", y_alpha, 0.5);
      if (!(alpha > 0 && alpha <= 1))
        throw CLI::ValidationError("--alpha", "alpha must lie in (0,1]");
      return cmd_synth(cfg.pick(y_f_opt, "fixture", y_fixture, std::string("xy")), alpha,
                       cfg.pick(y_s_opt, "seminorm", y_seminorm, 0.3),
                       cfg.pick(y_x_opt, "axis", y_axis, 0),
                       cfg.pick(y_q_opt, "anchor", y_anchor, std::string()),
                       cfg.pick(y_R_opt, "R", y_R, 4.0),
                       cfg.pick(y_d_opt, "delta", y_delta, 0.05),
                       cfg.pick(y_r_opt, "resolution", y_radial, 1000),
                       cfg.pick(y_seed_opt, "seed", y_seed, uint64_t{0}), out);
    }
    if (blow->parsed()) {
      const std::string mode = cfg.pick(b_o_opt, "mode", b_mode, std::string("power"));
      if (mode != "power" && mode != "measure")
        throw CLI::ValidationError("--mode", "mode is power or measure");
      return cmd_blowup(cfg.pick(b_m_opt, "model", b_model, std::string()),
                        cfg.pick(b_f_opt, "fixture", b_fixture, std::string("xy")),
                        cfg.pick(b_d_opt, "d", b_d, 2),
                        cfg.pick(b_s_opt, "scales", b_scales, 8),
                        cfg.pick(b_x_opt, "smax", b_smax, 1.0),
                        cfg.pick(b_r_opt, "sratio", b_sratio, 0.5), mode,
                        cfg.pick(b_c_opt, "center", b_center, std::string()),
                        cfg.pick(b_e_opt, "rule_exactness", b_exact, 24),
                        cfg.pick(b_seed_opt, "seed", b_seed, uint64_t{0}), out);
    }
    if (whit->parsed()) {
      return cmd_whitney(cfg.pick(w_m_opt, "model", w_model, std::string()),
                         cfg.pick(w_a_opt, "anchors", w_anchors, std::string()),
                         cfg.pick(w_k_opt, "k", w_k, 1),
                         cfg.pick(w_b_opt, "beta", w_beta, 0.2),
                         cfg.pick(w_g_opt, "r_grid", w_rgrid, std::string()),
                         cfg.pick(w_e_opt, "rule_exactness", w_exact, 24),
                         cfg.pick(w_seed_opt, "seed", w_seed, uint64_t{0}), out);
    }
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace fb::cli
