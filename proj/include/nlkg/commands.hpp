// Subcommands of the nlkg tool. Each reads a parsed scenario, writes its
// artifacts into out_dir and returns the JSON summary it wrote.

#pragma once

#include <string>
#include <vector>

#include "nlkg/scenario.hpp"

namespace nlkg {

const std::vector<std::string>& subcommand_names();

json cmd_freq(const Scenario& sc, const std::string& out_dir);
json cmd_certify(const Scenario& sc, const std::string& out_dir);
json cmd_measure(const Scenario& sc, const std::string& out_dir);
json cmd_normalform(const Scenario& sc, const std::string& out_dir);
json cmd_simulate(const Scenario& sc, const std::string& out_dir);
json cmd_scaling(const Scenario& sc, const std::string& out_dir);
json cmd_corollary(const Scenario& sc, const std::string& out_dir);

json dispatch(const std::string& subcommand, const Scenario& sc, const std::string& out_dir);

// Loads the scenario, runs the subcommand and maps failures to exit codes:
// 0 ok, 2 configuration error, 3 numerical failure, 1 anything else.
int run_cli(const std::string& subcommand, const std::string& scenario_path,
            const std::string& out_dir);

}  // namespace nlkg
