// nlkg <subcommand> --scenario path [--out dir]

#include <CLI11.hpp>

#include "nlkg/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Birkhoff normal form toolkit for the nonlinear Klein-Gordon equation"};
  app.require_subcommand(1);
  std::string scenario, out_dir = ".";
  for (const auto& name : nlkg::subcommand_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario, "scenario JSON file")->required();
    sub->add_option("--out", out_dir, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return nlkg::run_cli(app.get_subcommands().front()->get_name(), scenario, out_dir);
}
