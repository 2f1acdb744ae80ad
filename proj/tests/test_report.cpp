#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "nlsmode/report.hpp"

using namespace nlsmode;
namespace fs = std::filesystem;

TEST_CASE("config parsing: keys, comments, errors with line numbers") {
  const auto path = fs::temp_directory_path() / "nlsmode_cfg_test.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "pipeline = ground-state\n"
        << "d = 2\n"
        << "p = 3.0   # trailing comment\n"
        << "h = 0.004\n"
        << "seed = 99\n"
        << "d_list = 1,2,5..7\n";
  }
  auto cfg = parse_config_file(path.string());
  CHECK(cfg.pipeline == "ground-state");
  CHECK(cfg.d == 2);
  CHECK(cfg.p == 3.0);
  CHECK(cfg.h == 0.004);
  CHECK(cfg.seed == 99);
  REQUIRE(cfg.d_list.size() == 5);
  CHECK(cfg.d_list[2] == 5);
  CHECK(cfg.d_list[4] == 7);

  {
    std::ofstream out(path);
    out << "d = 1\n";  // pipeline key missing
  }
  CHECK_THROWS_WITH_AS(parse_config_file(path.string()),
                       "config: missing key 'pipeline'", std::invalid_argument);
  {
    std::ofstream out(path);
    out << "pipeline = all\nnot_a_key = 3\n";
  }
  CHECK_THROWS(parse_config_file(path.string()));
  {
    std::ofstream out(path);
    out << "pipeline all\n";  // missing '='
  }
  try {
    parse_config_file(path.string());
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("format_g17 round trips") {
  for (double v : {1.0 / 3.0, 2.2062, 1e-300, 0.0, 3.9974496108778}) {
    const std::string s = format_g17(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("pipeline rejects unknown names") {
  RunConfig cfg;
  cfg.pipeline = "does-not-exist";
  cfg.out_dir = (fs::temp_directory_path() / "nlsmode_badpipe").string();
  CHECK_THROWS(run_pipeline(cfg));
}

TEST_CASE("diff: identical runs pass, perturbation fails naming the field") {
  const auto base = fs::temp_directory_path() / "nlsmode_diff_test";
  fs::remove_all(base);
  fs::create_directories(base / "a");
  fs::create_directories(base / "b");
  fs::create_directories(base / "c");
  const char* manifest = R"({
    "schema": "nlsmode.manifest.v1",
    "pipeline": "ground-state",
    "seed": 7,
    "checks": [
      {"name": "alpha", "module": "m", "pass": true, "value": "1.5", "tolerance": "0", "seeded": false, "note": ""},
      {"name": "beta", "module": "m", "pass": true, "value": "0.6812907", "tolerance": "0", "seeded": false, "note": ""}
    ]
  })";
  std::ofstream(base / "a" / "manifest.json") << manifest;
  std::ofstream(base / "b" / "manifest.json") << manifest;
  std::string div;
  CHECK(diff_reports((base / "a").string(), (base / "b").string(), 0.0, &div) == 0);

  std::string perturbed(manifest);
  auto pos = perturbed.find("0.6812907");
  perturbed.replace(pos, 9, "0.7494197");  // 10% perturbation
  std::ofstream(base / "c" / "manifest.json") << perturbed;
  CHECK(diff_reports((base / "a").string(), (base / "c").string(), 0.0, &div) == 1);
  CHECK(div == "beta");
  // a 20% relative tolerance accepts it
  CHECK(diff_reports((base / "a").string(), (base / "c").string(), 0.2, &div) == 0);
  fs::remove_all(base);
}
