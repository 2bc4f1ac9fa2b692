#pragma once

#include <map>
#include <string>
#include <vector>

#include "kgprop/model.hpp"

namespace kgprop {

/// Flat key=value run configuration. Lines are `key = value`; '#' starts a
/// comment. Every key in required_keys() must be present; source.* keys are
/// optional.
struct RunConfig {
  int grid_N = 64;
  double grid_L = 32.0;
  double time_Tmax = 16.0;
  double time_dt = 0.05;
  std::string metric_family = "flat";
  double metric_A = 0.0;
  double metric_B = 0.0;
  double metric_delta = 2.0;
  double mass = 1.0;
  double gamma = 0.75;
  double sobolev_m = 0.0;
  std::string evolve_integrator = "magnus2";
  double oracle_epsilon = 4e-3;
  int oracle_dense_maxN = 6000;
  double analysis_r = 0.5;
  std::vector<double> analysis_eps_list = {0.25, 0.125, 0.0625, 0.03125};
  double probe_window = 1.5;
  double probe_threshold = 0.05;
  std::string output_dir = "out";
  unsigned seed = 1;

  std::string source_kind = "gaussian";
  double source_tau = 3.0;
  double source_sigma = 1.0;
  double source_omega = 1.0;

  static const std::vector<std::string>& required_keys();

  /// Throws ConfigError naming the first missing or malformed key.
  static RunConfig parse(const std::string& text,
                         const std::vector<std::string>& overrides = {});
  static RunConfig load(const std::string& path, const std::vector<std::string>& overrides = {});

  /// Canonical text; parse(to_text()) reproduces every field exactly.
  std::string to_text() const;
  std::map<std::string, std::string> to_map() const;

  /// Range checks of the owning modules.
  void validate() const;

  SpatialGrid grid() const { return {grid_N, grid_L}; }
  TimeGrid time() const { return TimeGrid::with_step(time_Tmax, time_dt); }
  ModelMetric metric() const;
};

}  // namespace kgprop
