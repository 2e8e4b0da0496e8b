#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string fb_bin() {
  const char* env = std::getenv("FB_BIN");
  REQUIRE(env != nullptr);
  return env;
}

int run_cli(const std::string& args) {
  const std::string cmd = fb_bin() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("fb-cli-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json manifest_of(const fs::path& dir) {
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("manifest-", 0) == 0) return nlohmann::json::parse(slurp(e.path()));
  }
  REQUIRE(false);
  return {};
}

}  // namespace

TEST_CASE("exit codes") {
  auto dir = fresh_dir("exit");
  CHECK(run_cli("epi --n 3 --d 2 --trials 3 --seed 7 --out " + dir.string()) == 0);
  CHECK(run_cli("epi --n 7 --d 2 --trials 3 --out " + dir.string()) == 2);  // n cap
  CHECK(run_cli("scan --fixture nosuch --out " + dir.string()) == 2);
  CHECK(run_cli("scan --fixture xy --rmin 2 --rmax 1 --out " + dir.string()) == 2);
  CHECK(run_cli("blowup --model nosuchid --out " + dir.string()) == 2);
  CHECK(run_cli("nosuchcommand") == 2);
}

TEST_CASE("scan output and manifest bookkeeping") {
  auto dir = fresh_dir("scan");
  REQUIRE(run_cli("scan --fixture xy --d 2 --rmin 1e-3 --rmax 1 --ppd 5 --out " + dir.string()) ==
          0);
  auto manifest = manifest_of(dir);
  CHECK(manifest["schema"] == 1);
  CHECK(manifest["pass"] == true);
  CHECK(manifest["config"]["fixture"] == "xy");

  // every listed file exists; no orphans besides the manifest
  std::set<std::string> listed;
  for (auto it = manifest["files"].begin(); it != manifest["files"].end(); ++it)
    listed.insert(it.key());
  std::set<std::string> present;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("manifest-", 0) == 0) continue;
    present.insert(name);
  }
  CHECK(listed == present);

  // the N column of the xy scan is identically 2
  std::string csv;
  for (const auto& name : present)
    if (name.rfind("scan-", 0) == 0 && name.find(".csv") != std::string::npos &&
        name.find(".meta") == std::string::npos)
      csv = slurp(dir / name);
  REQUIRE(!csv.empty());
  size_t line_start = csv.find("\r\n") + 2;
  while (line_start < csv.size()) {
    size_t line_end = csv.find("\r\n", line_start);
    if (line_end == std::string::npos) break;
    const std::string line = csv.substr(line_start, line_end - line_start);
    // r,H,D,N,W,flags
    size_t p1 = line.find(',');
    size_t p2 = line.find(',', p1 + 1);
    size_t p3 = line.find(',', p2 + 1);
    size_t p4 = line.find(',', p3 + 1);
    const double N = std::stod(line.substr(p3 + 1, p4 - p3 - 1));
    CHECK(std::abs(N - 2.0) < 1e-6);
    line_start = line_end + 2;
  }
}

TEST_CASE("determinism: identical config and seed give byte-identical outputs") {
  auto dir1 = fresh_dir("det1");
  auto dir2 = fresh_dir("det2");
  const std::string args =
      "scan --fixture re-z3 --d 3 --rmin 1e-2 --rmax 1 --ppd 6 --seed 42 --out ";
  REQUIRE(run_cli(args + dir1.string()) == 0);
  REQUIRE(run_cli(args + dir2.string()) == 0);
  REQUIRE(run_cli("epi --n 2 --d 1 --trials 10 --seed 42 --out " + dir1.string()) == 0);
  REQUIRE(run_cli("epi --n 2 --d 1 --trials 10 --seed 42 --out " + dir2.string()) == 0);

  for (const auto& e : fs::directory_iterator(dir1)) {
    const std::string name = e.path().filename().string();
    CHECK(fs::exists(dir2 / name));
    if (name.rfind("manifest-", 0) == 0) {
      auto m1 = nlohmann::json::parse(slurp(e.path()));
      auto m2 = nlohmann::json::parse(slurp(dir2 / name));
      m1.erase("wallclock_ms");
      m2.erase("wallclock_ms");
      CHECK(m1 == m2);
    } else {
      CHECK(slurp(e.path()) == slurp(dir2 / name));
    }
  }
}

TEST_CASE("config document with flag overrides") {
  auto dir = fresh_dir("config");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"schema":1,"n":2,"d":1,"trials":4,"seed":9})";
  REQUIRE(run_cli("epi --config " + cfg.string() + " --out " + dir.string()) == 0);
  auto m1 = manifest_of(dir);
  CHECK(m1["config"]["n"] == 2);
  CHECK(m1["config"]["trials"] == 4);

  auto dir2 = fresh_dir("config2");
  REQUIRE(run_cli("epi --config " + cfg.string() + " --n 3 --out " + dir2.string()) == 0);
  auto m2 = manifest_of(dir2);
  CHECK(m2["config"]["n"] == 3);  // flag wins
  CHECK(m2["config"]["trials"] == 4);
}

TEST_CASE("epi command math report") {
  auto dir = fresh_dir("epi");
  REQUIRE(run_cli("epi --n 3 --d 2 --trials 50 --seed 7 --out " + dir.string()) == 0);
  nlohmann::json rep;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("epi-", 0) == 0) rep = nlohmann::json::parse(slurp(e.path()));
  }
  CHECK(rep["passes"] == 50);
  CHECK(rep["trials"] == 50);
  CHECK(std::abs(rep["kappa"].get<double>() - 1.0 / 6.0) < 1e-15);
  CHECK(rep["term_by_term"] == true);
}

TEST_CASE("measure command with validation") {
  auto dir = fresh_dir("measure");
  REQUIRE(run_cli("measure --fixture xy --validate --out " + dir.string()) == 0);
  auto manifest = manifest_of(dir);
  CHECK(manifest["checks"]["surface_vs_closed_form"] == true);
  // density CSV exists
  bool has_density = false;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().rfind("density-", 0) == 0) has_density = true;
  CHECK(has_density);
  // szulkin goes through the triangulated path without thresholds
  REQUIRE(run_cli("measure --fixture szulkin --out " + dir.string()) == 0);
}

TEST_CASE("synth, blowup and whitney pipeline") {
  auto dir = fresh_dir("pipeline");
  REQUIRE(run_cli("synth --fixture xy --alpha 0.5 --seminorm 0.3 --axis 1 --resolution 600 "
                  "--out " + dir.string()) == 0);
  std::string model_id;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("model-", 0) == 0)
      model_id = name.substr(6, name.size() - 6 - 5);  // strip model- and .json
  }
  REQUIRE(!model_id.empty());

  REQUIRE(run_cli("blowup --model " + model_id + " --d 2 --scales 8 --out " + dir.string()) == 0);
  bool has_blowup = false, has_distances = false;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("blowup-", 0) == 0) {
      auto j = nlohmann::json::parse(slurp(e.path()));
      CHECK(j.contains("tangent"));
      CHECK(j.contains("rate"));
      has_blowup = true;
    }
    if (name.rfind("distances-", 0) == 0 && name.find(".meta") == std::string::npos)
      has_distances = true;
  }
  CHECK(has_blowup);
  CHECK(has_distances);

  REQUIRE(run_cli("whitney --model " + model_id +
                  " --anchors '0.15,0;0.25,0;0.4,0;0.65,0' --k 1 --beta 0.2 --out " +
                  dir.string()) == 0);
  bool has_whitney = false, has_strata = false;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("whitney-", 0) == 0) {
      auto j = nlohmann::json::parse(slurp(e.path()));
      CHECK(j["pass"] == true);
      has_whitney = true;
    }
    if (name.rfind("strata-", 0) == 0 && name.find(".meta") == std::string::npos) {
      CHECK(slurp(e.path()).rfind("x0,x1,d,j,admissible\r\n", 0) == 0);
      has_strata = true;
    }
  }
  CHECK(has_whitney);
  CHECK(has_strata);
}

TEST_CASE("FB_OUTPUT_DIR supplies the default output root") {
  auto dir = fresh_dir("envout");
  const std::string cmd = "FB_OUTPUT_DIR=" + dir.string() + " " + fb_bin() +
                          " epi --n 2 --d 1 --trials 2 --seed 1 >/dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  bool has_manifest = false;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().rfind("manifest-", 0) == 0) has_manifest = true;
  CHECK(has_manifest);
}

TEST_CASE("blowup on an exact fixture with the measure normalization") {
  auto dir = fresh_dir("blowup-measure");
  REQUIRE(run_cli("blowup --fixture xy --d 2 --scales 6 --mode measure --out " + dir.string()) ==
          0);
  auto manifest = manifest_of(dir);
  CHECK(manifest["checks"]["density_limit_exists"] == true);
}
