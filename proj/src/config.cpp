#include "kgprop/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "kgprop/evolve.hpp"

namespace kgprop {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key, key + ": expected a number, got '" + v + "'");
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError(key, key + ": expected an integer, got '" + v + "'");
  return out;
}

struct Field {
  std::string key;
  bool required;
  std::function<void(RunConfig&, const std::string&)> read;
  std::function<std::string(const RunConfig&)> write;
};

Field real(std::string key, double RunConfig::*m, bool required = true) {
  return {key, required, [m, key](RunConfig& c, const std::string& v) { c.*m = to_double(key, v); },
          [m](const RunConfig& c) { return fmt_double(c.*m); }};
}

Field text(std::string key, std::string RunConfig::*m, bool required = true) {
  return {key, required, [m](RunConfig& c, const std::string& v) { c.*m = v; },
          [m](const RunConfig& c) { return c.*m; }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back({"grid.N", true,
                 [](RunConfig& c, const std::string& v) {
                   c.grid_N = static_cast<int>(to_long("grid.N", v));
                 },
                 [](const RunConfig& c) { return std::to_string(c.grid_N); }});
    f.push_back(real("grid.L", &RunConfig::grid_L));
    f.push_back(real("time.Tmax", &RunConfig::time_Tmax));
    f.push_back(real("time.dt", &RunConfig::time_dt));
    f.push_back(text("metric.family", &RunConfig::metric_family));
    f.push_back(real("metric.A", &RunConfig::metric_A));
    f.push_back(real("metric.B", &RunConfig::metric_B));
    f.push_back(real("metric.delta", &RunConfig::metric_delta));
    f.push_back(real("mass", &RunConfig::mass));
    f.push_back(real("gamma", &RunConfig::gamma));
    f.push_back(real("sobolev.m", &RunConfig::sobolev_m));
    f.push_back(text("evolve.integrator", &RunConfig::evolve_integrator));
    f.push_back(real("oracle.epsilon", &RunConfig::oracle_epsilon));
    f.push_back({"oracle.dense.maxN", true,
                 [](RunConfig& c, const std::string& v) {
                   c.oracle_dense_maxN = static_cast<int>(to_long("oracle.dense.maxN", v));
                 },
                 [](const RunConfig& c) { return std::to_string(c.oracle_dense_maxN); }});
    f.push_back(real("analysis.r", &RunConfig::analysis_r));
    f.push_back({"analysis.eps_list", true,
                 [](RunConfig& c, const std::string& v) {
                   c.analysis_eps_list.clear();
                   std::stringstream ss(v);
                   std::string item;
                   while (std::getline(ss, item, ','))
                     c.analysis_eps_list.push_back(to_double("analysis.eps_list", trim(item)));
                 },
                 [](const RunConfig& c) {
                   std::string s;
                   for (std::size_t i = 0; i < c.analysis_eps_list.size(); ++i)
                     s += (i ? "," : "") + fmt_double(c.analysis_eps_list[i]);
                   return s;
                 }});
    f.push_back(real("probe.window", &RunConfig::probe_window));
    f.push_back(real("probe.threshold", &RunConfig::probe_threshold));
    f.push_back(text("output.dir", &RunConfig::output_dir));
    f.push_back({"seed", true,
                 [](RunConfig& c, const std::string& v) {
                   const long s = to_long("seed", v);
                   if (s < 0) throw ConfigError("seed", "seed must be non-negative");
                   c.seed = static_cast<unsigned>(s);
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    f.push_back(text("source.kind", &RunConfig::source_kind, false));
    f.push_back(real("source.tau", &RunConfig::source_tau, false));
    f.push_back(real("source.sigma", &RunConfig::source_sigma, false));
    f.push_back(real("source.omega", &RunConfig::source_omega, false));
    return f;
  }();
  return table;
}

std::pair<std::string, std::string> split_assignment(const std::string& line,
                                                     const std::string& where) {
  const auto eq = line.find('=');
  if (eq == std::string::npos)
    throw ConfigError(trim(line), where + ": expected key = value, got '" + trim(line) + "'");
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace

const std::vector<std::string>& RunConfig::required_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const Field& f : fields())
      if (f.required) k.push_back(f.key);
    return k;
  }();
  return keys;
}

RunConfig RunConfig::parse(const std::string& text, const std::vector<std::string>& overrides) {
  std::map<std::string, std::string> values;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    auto [k, v] = split_assignment(line, "line " + std::to_string(lineno));
    values[k] = v;
  }
  for (const std::string& o : overrides) {
    auto [k, v] = split_assignment(o, "--override");
    values[k] = v;
  }
  std::set<std::string> known;
  RunConfig c;
  for (const Field& f : fields()) {
    known.insert(f.key);
    const auto it = values.find(f.key);
    if (it == values.end()) {
      if (f.required) throw ConfigError(f.key, "missing required key '" + f.key + "'");
      continue;
    }
    f.read(c, it->second);
  }
  for (const auto& [k, v] : values)
    if (!known.count(k)) throw ConfigError(k, "unknown key '" + k + "'");
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), overrides);
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> m;
  for (const Field& f : fields()) m[f.key] = f.write(*this);
  return m;
}

std::string RunConfig::to_text() const {
  std::string s;
  for (const Field& f : fields()) s += f.key + " = " + f.write(*this) + "\n";
  return s;
}

void RunConfig::validate() const {
  if (grid_N < 4 || grid_N % 2) throw ConfigError("grid.N", "grid.N must be even and >= 4");
  if (!(grid_L > 0.0)) throw ConfigError("grid.L", "grid.L must be positive");
  if (!(time_Tmax > 0.0)) throw ConfigError("time.Tmax", "time.Tmax must be positive");
  if (!(time_dt > 0.0) || time_dt > time_Tmax)
    throw ConfigError("time.dt", "time.dt must lie in (0, time.Tmax]");
  if (metric_family != "flat" && metric_family != "bump")
    throw ConfigError("metric.family", "metric.family must be 'flat' or 'bump'");
  if (!(mass > 0.0)) throw ConfigError("mass", "mass must be positive");
  if (!(metric_delta > 1.0)) throw ConfigError("metric.delta", "metric.delta must exceed 1");
  if (!(gamma > 0.5 && gamma < 0.5 + metric_delta))
    throw ConfigError("gamma", "gamma must lie in (1/2, 1/2 + delta)");
  if (sobolev_m < 0.0) throw ConfigError("sobolev.m", "sobolev.m must be non-negative");
  parse_integrator(evolve_integrator);
  if (!(oracle_epsilon > 0.0)) throw ConfigError("oracle.epsilon", "oracle.epsilon must be positive");
  if (oracle_dense_maxN < 1) throw ConfigError("oracle.dense.maxN", "oracle.dense.maxN must be positive");
  if (!(analysis_r > 0.0 && analysis_r < 1.0))
    throw ConfigError("analysis.r", "analysis.r must lie in (0, 1)");
  if (analysis_eps_list.size() < 3)
    throw ConfigError("analysis.eps_list", "analysis.eps_list needs at least three values");
  for (double e : analysis_eps_list)
    if (!(e > 0.0)) throw ConfigError("analysis.eps_list", "cutoff scales must be positive");
  if (!(probe_window > 0.0)) throw ConfigError("probe.window", "probe.window must be positive");
  if (!(probe_threshold > 0.0 && probe_threshold < 1.0))
    throw ConfigError("probe.threshold", "probe.threshold must lie in (0, 1)");
  if (output_dir.empty()) throw ConfigError("output.dir", "output.dir must not be empty");
  if (source_kind != "gaussian" && source_kind != "charged" && source_kind != "narrow")
    throw ConfigError("source.kind", "source.kind must be gaussian, charged or narrow");
  if (!(source_tau > 0.0)) throw ConfigError("source.tau", "source.tau must be positive");
  if (!(source_sigma > 0.0)) throw ConfigError("source.sigma", "source.sigma must be positive");
}

ModelMetric RunConfig::metric() const {
  if (metric_family == "flat") return ModelMetric::flat(mass, metric_delta);
  return ModelMetric::bump(mass, metric_A, metric_B, metric_delta);
}

}  // namespace kgprop
