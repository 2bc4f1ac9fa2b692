#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "kgprop/cli.hpp"
#include "kgprop/config.hpp"
#include "kgprop/io.hpp"

using namespace kgprop;
namespace fs = std::filesystem;

namespace {

fs::path write_config(const std::string& name, const RunConfig& c, const std::string& drop = "") {
  const fs::path dir = fs::temp_directory_path() / ("kgprop_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::istringstream in(c.to_text());
  std::ofstream out(dir / "run.cfg");
  for (std::string line; std::getline(in, line);)
    if (drop.empty() || line.rfind(drop + " ", 0) != 0) out << line << "\n";
  return dir;
}

RunConfig small_bump() {
  RunConfig c;
  c.grid_N = 16;
  c.grid_L = 16.0;
  c.time_Tmax = 16.0;
  c.time_dt = 0.05;
  c.metric_family = "bump";
  c.metric_A = 0.3;
  c.metric_B = 0.2;
  c.metric_delta = 1.5;
  return c;
}

}  // namespace

TEST_CASE("missing mass exits with code 2 and names the key") {
  const fs::path dir = write_config("nomass", RunConfig{}, "mass");
  std::ostringstream log;
  const int code = run({"retarded", (dir / "run.cfg").string(), (dir / "out").string(), {}}, log);
  CHECK(code == 2);
  CHECK(log.str().find("mass") != std::string::npos);
}

TEST_CASE("feynman subcommand on the bump writes fields and a boundary report") {
  const RunConfig c = small_bump();
  const fs::path dir = write_config("feyn", c);
  const fs::path out = dir / "out";
  std::ostringstream log;
  const int code = run({"feynman", (dir / "run.cfg").string(), out.string(), {}}, log);
  CHECK(code == 0);
  const CRowMat u = read_field(out.string(), "u");
  CHECK(u.rows() == c.time().nodes());
  CHECK(u.cols() == c.grid_N);
  std::ifstream in(out / "report.json");
  const nlohmann::json rep = nlohmann::json::parse(in);
  CHECK(rep["schema_version"] == kReportSchemaVersion);
  CHECK(rep["subcommand"] == "feynman");
  CHECK(rep["results"].contains("bc_report"));
  CHECK(rep["results"]["residual_P"].get<double>() < 1e-4);
  CHECK(fs::exists(out / "bc_plus.csv"));
  CHECK(fs::exists(out / "bc_minus.csv"));
}

TEST_CASE("overrides reach the run and unknown override keys are rejected") {
  const fs::path dir = write_config("override", small_bump());
  std::ostringstream log;
  const int code =
      run({"retarded", (dir / "run.cfg").string(), (dir / "out").string(), {"nonsense=1"}}, log);
  CHECK(code == 2);
  CHECK(log.str().find("nonsense") != std::string::npos);
}
