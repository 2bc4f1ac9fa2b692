#include <iostream>

#include <CLI11.hpp>

#include "kgprop/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kgprop: Klein-Gordon propagators on 1+1-D asymptotically Minkowski spacetimes"};
  kgprop::CliArgs args;
  app.add_option("subcommand", args.subcommand, "flat-check | retarded | advanced | causal | "
                                                "feynman | isozaki | wavefront | decay-check | all")
      ->required()
      ->check(CLI::IsMember(kgprop::subcommands()));
  app.add_option("--config", args.config_path, "key = value configuration file")->required();
  app.add_option("--out", args.out_dir, "output directory (default: output.dir)");
  app.add_option("--override", args.overrides, "key=value, repeatable")->take_all();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return kgprop::run(args, std::cerr);
}
