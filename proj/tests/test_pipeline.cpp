#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pblab/pipeline.hpp"

using namespace pblab;
using nlohmann::json;

namespace {

RunConfig small_n1(double eps) {
  std::ostringstream os;
  os << "system.name = decoupled-pendulum\n"
     << "system.n = 1\n"
     << "system.epsilon = " << eps << "\n"
     << "sphere.radius = 1.0\n"
     << "rays.n_boundary = 16\n"
     << "rays.n_angles = 4\n"
     << "rays.n_interior = 8\n"
     << "search.fourier_cutoff = 4\n"
     << "search.reduced_cutoff = 2\n"
     << "search.budget = 30\n"
     << "oracle.grid_per_dim = 6\n"
     << "oracle.refine_top = 10\n"
     << "degree.resolution = 32\n";
  return parse_config_text(os.str());
}

RunConfig small_n2() {
  return parse_config_text(
      "system.name = decoupled-pendulum\n"
      "system.n = 2\n"
      "system.epsilon = 0.1\n"
      "rays.n_boundary = 12\n"
      "rays.n_angles = 4\n"
      "rays.n_interior = 6\n"
      "search.fourier_cutoff = 3\n"
      "search.reduced_cutoff = 2\n"
      "search.budget = 40\n"
      "oracle.grid_per_dim = 5\n"
      "oracle.refine_top = 24\n"
      "degree.resolution = 64\n");
}

json strip_timestamp(json j) {
  j.erase("timestamp");
  return j;
}

}  // namespace

TEST_CASE("check-rays passes inward and fails outward") {
  auto cfg = small_n1(0.1);
  const auto res = run_check_rays(cfg);
  CHECK(res.exit_code == 0);
  CHECK(res.report["verdict"] == true);
  CHECK(res.report["command"] == "check-rays");
  CHECK(res.report["rays"]["min_margin"].get<double>() > 0.1);

  cfg.rays_side = "outward";
  const auto bad = run_check_rays(cfg);
  CHECK(bad.exit_code == 1);
  CHECK(bad.report["verdict"] == false);
  CHECK(bad.report["rays"]["verifiable"] == true);
}

TEST_CASE("find-orbits recovers both pendulum classes") {
  const auto res = run_find_orbits(small_n1(0.1));
  CHECK(res.exit_code == 0);
  CHECK(res.report["census"]["n_interior"].get<int>() == 2);
  CHECK(res.report["census"]["meets_cuplength"] == true);
  CHECK(res.report["census"]["meets_betti"] == true);
  CHECK(res.report["classes"].size() == 2);
  for (const auto& cls : res.report["classes"]) {
    CHECK(cls["source"] == "variational");
    CHECK(cls["residual"].get<double>() < 1e-8);
  }
  REQUIRE(!res.tables.empty());
  CHECK(res.tables.front().first == "orbits.tsv");
  CHECK(res.tables.front().second.find("winding") != std::string::npos);
}

TEST_CASE("a degenerate family is flagged by find-orbits") {
  const auto res = run_find_orbits(small_n1(0.0));
  CHECK(res.report["census"]["degenerate_family"] == true);
  CHECK(res.report["census"]["meets_betti"] == false);
}

TEST_CASE("certify produces a full verdict on the product fixture") {
  const auto res = run_certify(small_n2());
  CHECK(res.exit_code == 0);
  CHECK(res.report["verdict"] == true);
  CHECK(res.report["admissibility"]["pass"] == true);
  CHECK(res.report["rays"]["verdict"] == true);
  CHECK(res.report["degree"]["consistent"] == true);
  CHECK(res.report["census"]["meets_cuplength"] == true);
  CHECK(res.report["census"]["n_interior"].get<int>() >= 3);
  CHECK(res.report["oracle"]["agree"] == true);
}

TEST_CASE("certify is deterministic modulo the timestamp") {
  const auto cfg = small_n2();
  const auto a = run_certify(cfg);
  const auto b = run_certify(cfg);
  CHECK(strip_timestamp(a.report).dump() == strip_timestamp(b.report).dump());
  REQUIRE(a.tables.size() == b.tables.size());
  for (size_t i = 0; i < a.tables.size(); ++i) {
    CHECK(a.tables[i].first == b.tables[i].first);
    CHECK(a.tables[i].second == b.tables[i].second);
  }
}

TEST_CASE("results do not depend on the worker count") {
  const auto cfg = small_n1(0.1);
  char* old = std::getenv("PBLAB_WORKERS");
  const std::string saved = old ? old : "";

  setenv("PBLAB_WORKERS", "1", 1);
  const auto a = run_certify(cfg);
  setenv("PBLAB_WORKERS", "3", 1);
  const auto b = run_certify(cfg);
  if (old)
    setenv("PBLAB_WORKERS", saved.c_str(), 1);
  else
    unsetenv("PBLAB_WORKERS");

  CHECK(strip_timestamp(a.report).dump() == strip_timestamp(b.report).dump());
  REQUIRE(a.tables.size() == b.tables.size());
  for (size_t i = 0; i < a.tables.size(); ++i) CHECK(a.tables[i].second == b.tables[i].second);
}

TEST_CASE("basket command reports axioms and writes plot tables") {
  auto cfg = parse_config_text(
      "sphere.name = star-3-lobe\n"
      "sphere.base_radius = 1.0\n"
      "sphere.lobe_amplitude = 0.3\n"
      "sphere.lobes = 3\n"
      "basket.levels = 24\n"
      "basket.directions = 32\n");
  const auto res = run_basket(cfg);
  CHECK(res.exit_code == 0);
  CHECK(res.report["verdict"] == true);
  CHECK(res.report["axioms"]["vanish_inside"]["pass"] == true);
  CHECK(res.report["axioms"]["saturates"]["pass"] == true);
  CHECK(res.report["time_profile"]["pass"] == true);
  CHECK(res.report["time_profile"]["support_defect"].get<double>() == 0.0);

  REQUIRE(res.tables.size() == 2);
  CHECK(res.tables[0].first == "basket_grid.tsv");
  CHECK(res.tables[1].first == "basket_field.tsv");
  CHECK(res.tables[1].second.find("y0\ty1\th") == 0);
}

TEST_CASE("outputs land in the configured directory") {
  namespace fs = std::filesystem;
  auto cfg = small_n1(0.1);
  const fs::path dir = fs::temp_directory_path() / "pblab_pipeline_test";
  fs::remove_all(dir);
  cfg.output_dir = dir.string();

  const auto res = run_check_rays(cfg);
  const auto paths = write_outputs(res, cfg, "check-rays");
  REQUIRE(!paths.empty());
  CHECK(fs::exists(dir / "check-rays_report.json"));

  std::ifstream in(paths.front());
  json parsed;
  in >> parsed;
  CHECK(parsed["command"] == "check-rays");
  CHECK(parsed["verdict"] == res.report["verdict"]);
  fs::remove_all(dir);
}

TEST_CASE("unknown system names surface as configuration errors") {
  auto cfg = small_n1(0.1);
  cfg.system_name = "not-a-system";
  CHECK_THROWS_AS(run_check_rays(cfg), ConfigError);

  auto cfg2 = small_n1(0.1);
  cfg2.sphere_name = "not-a-sphere";
  CHECK_THROWS_AS(run_check_rays(cfg2), ConfigError);
}
