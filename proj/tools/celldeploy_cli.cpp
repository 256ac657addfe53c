// Command-line front end: run, eval, verify-grads, preset-dump.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "celldeploy/commands.hpp"

namespace {

void add_scenario_flags(CLI::App* cmd, celldeploy::CliOptions& o) {
    cmd->add_option("--scenario", o.scenario_path, "scenario file (JSON)");
    cmd->add_option("--preset", o.preset, "built-in scenario: case-study");
    cmd->add_option("--r", o.r_mix, "preset ground-user share r in [0, 1]");
    cmd->add_option("--gue", o.gue, "preset ground distribution: uniform | gmm");
    cmd->add_option("--app", o.app, "preset application: tune | deploy");
    cmd->add_option("--seed", o.seed, "initialization seed");
    cmd->add_option("--res-ground", o.res_ground_m, "ground grid step, m");
    cmd->add_option("--res-corridor", o.res_corridor_m, "corridor step along the long axis, m");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coverage and capacity optimization of cellular deployments for ground and aerial users"};
    app.require_subcommand(1);
    celldeploy::CliOptions opt;

    CLI::App* run = app.add_subcommand("run", "optimize with algorithm 1-4 and write a report");
    add_scenario_flags(run, opt);
    run->add_option("--algorithm", opt.algorithm, "1: tilt/power, coverage-capacity; 2: +sites; "
                                                  "3: tilt/power, capacity per region; 4: +sites")
        ->required();
    run->add_option("--out", opt.out, "output directory")->required();
    run->add_option("--restarts", opt.restarts, "best of k seeds starting at --seed");
    run->add_flag("--quiet", opt.quiet, "no per-iteration log lines");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a configuration as given");
    add_scenario_flags(eval, opt);
    eval->add_option("--out", opt.out, "output directory")->required();

    CLI::App* grads = app.add_subcommand("verify-grads", "compare analytic and finite-difference gradients");
    add_scenario_flags(grads, opt);
    grads->add_option("--algorithm", opt.algorithm, "pick the objective of this algorithm");
    grads->add_option("--tolerance", opt.tolerance, "max relative error per family");
    grads->add_option("--fd-step", opt.fd_step, "finite-difference step for every family");
    grads->add_option("--out", opt.out, "directory for grad_check.csv");

    CLI::App* dump = app.add_subcommand("preset-dump", "print or save a preset scenario");
    add_scenario_flags(dump, opt);
    dump->add_option("--out", opt.out, "scenario file to write (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return celldeploy::kExitConfig;
    }
    const std::string name = app.get_subcommands().front()->get_name();
    return celldeploy::run_command(name, opt, std::cout, std::cerr);
}
