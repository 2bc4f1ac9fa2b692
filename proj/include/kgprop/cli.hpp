#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kgprop {

inline constexpr int kReportSchemaVersion = 1;

const std::vector<std::string>& subcommands();

struct CliArgs {
  std::string subcommand;
  std::string config_path;
  /// Empty: output.dir from the config.
  std::string out_dir;
  std::vector<std::string> overrides;
};

/// Runs one subcommand and writes report.json plus its fields and CSVs.
/// Returns 0 if every PASS flag is true, 1 on any FAIL or numerical failure,
/// 2 on a configuration error (the message names the key).
int run(const CliArgs& args, std::ostream& log);

}  // namespace kgprop
