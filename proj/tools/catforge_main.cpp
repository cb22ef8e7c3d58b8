#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "catforge/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"catforge: photon-subtracted squeezed-state generator and analysis"};
  app.require_subcommand(1);

  catforge::CommandOptions options;
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int cutoff = 0;

  for (const char* name : {"generate", "wigner", "sweep", "tomo"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "run configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "overrides [tomo] seed");
    sub->add_option("--cutoff", cutoff, "overrides [scheme] cutoff");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : catforge::kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  options.config_path = config;
  options.out_dir = out_dir;
  if (sub->count("--seed") > 0) options.seed = seed;
  if (sub->count("--cutoff") > 0) options.cutoff = cutoff;
  return catforge::run_command(sub->get_name(), options, std::cout, std::cerr);
}
