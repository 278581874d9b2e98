//==============================================================================
// runner.hpp
// Config-driven orchestration of the experiments: each subcommand runs its
// pipeline, writes CSV/JSON artifacts under the output directory, prints one
// line per check, and reports an exit status (0 = all checks pass, 1 = a
// check failed; configuration errors surface as ConfigError and exit 2 at
// the CLI).
//==============================================================================
#pragma once

#include <iosfwd>
#include <string>

#include "beam/config.hpp"

namespace beam {

int run_simulate(const RunConfig& cfg, std::ostream& log);
int run_virial_check(const RunConfig& cfg, std::ostream& log);
int run_scatter_test(const RunConfig& cfg, std::ostream& log);
int run_small_data(const RunConfig& cfg, std::ostream& log);
int run_perturb(const RunConfig& cfg, std::ostream& log);
int run_profiles(const RunConfig& cfg, std::ostream& log);
int run_lp_test(const RunConfig& cfg, std::ostream& log);

// Dispatch by subcommand name; throws ConfigError for unknown names.
int run_subcommand(const std::string& name, const RunConfig& cfg, std::ostream& log);

}  // namespace beam
