#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <regex>

#include "json.hpp"
#include "kgprop/config.hpp"
#include "kgprop/io.hpp"

using namespace kgprop;
namespace fs = std::filesystem;

namespace {

std::string drop_line(const std::string& text, const std::string& key) {
  return std::regex_replace(text, std::regex("(^|\n)" + std::regex_replace(key, std::regex("\\."), "\\.") +
                                             " *=[^\n]*"),
                            "$1");
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("kgprop_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("config text round trip is exact") {
  RunConfig c;
  c.grid_L = 0.1 + 0.2;
  c.time_dt = 1.0 / 3.0;
  c.metric_family = "bump";
  c.analysis_eps_list = {0.3, 0.15, 0.075};
  const RunConfig back = RunConfig::parse(c.to_text());
  CHECK(back.to_map() == c.to_map());
  CHECK(back.grid_L == c.grid_L);
  CHECK(back.time_dt == c.time_dt);
}

TEST_CASE("missing and unknown keys are named") {
  const std::string text = RunConfig{}.to_text();
  try {
    RunConfig::parse(drop_line(text, "mass"));
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "mass");
  }
  try {
    RunConfig::parse(text + "bogus.key = 3\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "bogus.key");
  }
  try {
    RunConfig::parse(text, {"grid.N=abc"});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "grid.N");
  }
}

TEST_CASE("overrides and validation") {
  const std::string text = RunConfig{}.to_text();
  const RunConfig c = RunConfig::parse(text, {"mass=2.5", "metric.family=bump"});
  CHECK(c.mass == 2.5);
  CHECK(c.metric().family_name() == "bump");
  RunConfig bad = c;
  bad.grid_N = 7;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("field files round trip bit for bit") {
  const fs::path dir = scratch("io");
  const SpatialGrid g(8, 4.0);
  const TimeGrid tg(1.0, 4);
  CRowMat v(tg.nodes(), g.size());
  for (int i = 0; i < v.rows(); ++i)
    for (int j = 0; j < v.cols(); ++j) v(i, j) = cplx(1.0 / (i + 3), -j * 0.1);
  write_field(dir.string(), "u", g, tg, v);
  CHECK(read_field(dir.string(), "u") == v);
  CHECK(fs::file_size(dir / "u.bin") == static_cast<std::uintmax_t>(16 * v.size()));
  std::ifstream in(dir / "u.json");
  const nlohmann::json meta = nlohmann::json::parse(in);
  CHECK(meta["shape"][0] == 5);
  CHECK(meta["shape"][1] == 8);
  CHECK(meta["dt"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("csv has a header and full precision") {
  const fs::path dir = scratch("csv");
  write_csv((dir / "a.csv").string(), "t", "value", {0.1, 2.0}, {1.0 / 3.0, -4.0});
  std::ifstream in(dir / "a.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "t,value");
  CHECK(std::stod(row.substr(row.find(',') + 1)) == 1.0 / 3.0);
}
