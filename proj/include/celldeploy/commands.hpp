#pragma once

// Subcommands behind the command-line tool. Each returns a process exit code:
// 0 success, 1 configuration error, 2 numerical failure, 3 tolerance failure.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "celldeploy/gradients.hpp"
#include "celldeploy/scenario.hpp"

namespace celldeploy {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitNumerical = 2, kExitTolerance = 3 };

struct CliOptions {
    std::optional<std::string> scenario_path;
    std::optional<std::string> preset;  // "case-study"
    std::optional<double> r_mix;
    std::optional<std::string> gue;  // uniform | gmm
    std::optional<std::string> app;  // tune | deploy
    std::optional<int> algorithm;
    std::optional<std::uint64_t> seed;
    std::optional<double> res_ground_m;
    std::optional<double> res_corridor_m;
    std::optional<std::string> out;
    int restarts = 1;
    double tolerance = 1e-4;        // verify-grads
    std::optional<double> fd_step;  // verify-grads: one step for every family
    bool quiet = false;             // suppress per-iteration log lines
};

/// Loads or builds the scenario named by the options and applies overrides.
Scenario resolve_scenario(const CliOptions& opt);

int cmd_run(const CliOptions& opt, std::ostream& out, std::ostream& log);
int cmd_eval(const CliOptions& opt, std::ostream& out, std::ostream& log);
int cmd_verify_grads(const CliOptions& opt, std::ostream& out, std::ostream& log);
int cmd_preset_dump(const CliOptions& opt, std::ostream& out, std::ostream& log);

/// Runs a subcommand and maps exceptions to exit codes with a diagnostic on `log`.
int run_command(const std::string& name, const CliOptions& opt, std::ostream& out, std::ostream& log);

struct GradCheckRow {
    std::string step_label;  // "default" or the uniform step
    FamilyCheck check;
};

/// Frozen-partition gradient check at the family default steps (or opt.fd_step)
/// plus a sweep over uniform steps 1e-2, 1e-3, 1e-4.
std::vector<GradCheckRow> gradient_check_table(const Scenario& s, const SampleGrid& grid,
                                               std::optional<double> fd_step);

}  // namespace celldeploy
