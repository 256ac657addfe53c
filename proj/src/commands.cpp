#include "celldeploy/commands.hpp"

#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "celldeploy/errors.hpp"
#include "celldeploy/link_table.hpp"
#include "celldeploy/partition.hpp"
#include "celldeploy/report.hpp"

namespace celldeploy {

namespace {

GroundKind parse_gue(const std::string& s) {
    if (s == "uniform") return GroundKind::Uniform;
    if (s == "gmm") return GroundKind::GaussianMixture;
    throw ConfigError("--gue: expected uniform or gmm, got '" + s + "'");
}

Application parse_app(const std::string& s) {
    if (s == "tune") return Application::TuneOnly;
    if (s == "deploy") return Application::Deploy;
    throw ConfigError("--app: expected tune or deploy, got '" + s + "'");
}

std::filesystem::path out_dir(const CliOptions& opt) {
    if (!opt.out) throw ConfigError("--out is required");
    return *opt.out;
}

void check_mode(Algorithm a, const Scenario& s) {
    const bool deploy = s.application == Application::Deploy;
    if (moves_sites(a) && !deploy) {
        throw ConfigError("algorithm " + std::to_string(static_cast<int>(a)) +
                          " optimizes site locations and needs a deploy scenario (use --app deploy)");
    }
    if (!moves_sites(a) && deploy) {
        throw ConfigError("algorithm " + std::to_string(static_cast<int>(a)) +
                          " keeps sites fixed and needs a tune scenario (use --app tune)");
    }
}

std::string step_text(const StepRecord& s) {
    std::ostringstream os;
    os << family_name(s.family) << '=' << s.step << '/' << s.tries;
    return os.str();
}

void print_kpi(std::ostream& out, const ReportBundle& b) {
    out << std::setprecision(10);
    out << "objective " << objective_name(b.objective) << " = " << b.kpi.total << "\n";
    out << "  per class: gue " << b.kpi.per_class[0] << ", uav " << b.kpi.per_class[1] << "\n";
    out << "  coverage fraction " << b.kpi.coverage_fraction << " (sigmoid surrogate "
        << b.kpi.coverage_surrogate << ")\n";
    out << "  mean spectral efficiency " << b.kpi.mean_spectral_efficiency << " bps/Hz\n";
    out << "  median SINR dB: gue " << b.median_sinr_db(UserClass::Gue) << ", uav "
        << b.median_sinr_db(UserClass::Uav) << "\n";
}

}  // namespace

Scenario resolve_scenario(const CliOptions& opt) {
    Scenario s;
    if (opt.scenario_path && opt.preset) throw ConfigError("--scenario and --preset are mutually exclusive");
    if (opt.scenario_path) {
        if (opt.r_mix || opt.gue || opt.app) throw ConfigError("--r, --gue and --app apply to --preset only");
        s = load_scenario(*opt.scenario_path);
    } else if (opt.preset) {
        if (*opt.preset != "case-study") throw ConfigError("--preset: unknown preset '" + *opt.preset + "'");
        s = preset_case_study(opt.r_mix.value_or(0.5), parse_gue(opt.gue.value_or("uniform")),
                              parse_app(opt.app.value_or("tune")));
    } else {
        throw ConfigError("one of --scenario or --preset is required");
    }
    if (opt.seed) s.optimizer.seed = *opt.seed;
    if (opt.res_ground_m) s.resolution.ground_m = *opt.res_ground_m;
    if (opt.res_corridor_m) s.resolution.corridor_m = *opt.res_corridor_m;
    s.validate();
    return s;
}

int cmd_run(const CliOptions& opt, std::ostream& out, std::ostream& log) {
    if (!opt.algorithm) throw ConfigError("run: --algorithm is required");
    const Algorithm alg = algorithm_from_int(*opt.algorithm);
    Scenario s = resolve_scenario(opt);
    check_mode(alg, s);
    s.objective = objective_of(alg);
    const std::filesystem::path dir = out_dir(opt);
    const SampleGrid grid = build_grid(s.density, s.resolution);

    IterationCallback on_iter;
    if (!opt.quiet) {
        on_iter = [&log](const IterationRecord& rec) {
            log << "iter=" << rec.iteration << " objective=" << format_double(rec.objective)
                << " partition_changed=" << (rec.partition_changed ? 1 : 0);
            for (const StepRecord& st : rec.steps) log << ' ' << step_text(st);
            log << '\n';
        };
    }
    RunTrace trace = run_with_restarts(alg, make_problem(s, grid), opt.restarts, on_iter);
    const Network final_net = trace.final_network;
    if (opt.restarts > 1) s.optimizer.seed = trace.seed;
    const ReportBundle b = make_report("run", s, final_net, objective_of(alg), grid, std::move(trace));
    const auto files = write_report(b, dir);

    const RunTrace& t = *b.trace;
    out << "algorithm " << static_cast<int>(alg) << ", seed " << t.seed << ", " << grid.size() << " samples\n";
    out << std::setprecision(10);
    out << "iterations " << t.iterations.size() << (t.converged ? " (converged)" : " (iteration cap)")
        << ", objective " << t.objectives.front() << " -> " << t.final_objective << "\n";
    print_kpi(out, b);
    out << "wrote " << files.size() << " files to " << dir.string() << "\n";
    return kExitOk;
}

int cmd_eval(const CliOptions& opt, std::ostream& out, std::ostream&) {
    const Scenario s = resolve_scenario(opt);
    const std::filesystem::path dir = out_dir(opt);
    const SampleGrid grid = build_grid(s.density, s.resolution);
    const ReportBundle b = make_report("eval", s, s.network, s.objective, grid, std::nullopt);
    const auto files = write_report(b, dir);
    print_kpi(out, b);
    out << "wrote " << files.size() << " files to " << dir.string() << "\n";
    return kExitOk;
}

std::vector<GradCheckRow> gradient_check_table(const Scenario& s, const SampleGrid& grid,
                                               std::optional<double> fd_step) {
    Network net = s.network;
    initialize_network(net, s.optimizer, s.density.ground);
    const Partition part = max_rss_partition(grid, net);
    const FamilySet which =
        s.application == Application::Deploy ? FamilySet::all() : FamilySet::tune_only();

    std::vector<GradCheckRow> rows;
    const auto add = [&](const std::string& label, const FdSteps& h) {
        for (const FamilyCheck& c : check_gradients(s.objective, grid, part, net, s.kpi, which, h)) {
            rows.push_back({label, c});
        }
    };
    if (fd_step) {
        add(format_double(*fd_step), FdSteps::uniform(*fd_step));
    } else {
        add("default", FdSteps{});
    }
    for (double h : {1e-2, 1e-3, 1e-4}) add(format_double(h), FdSteps::uniform(h));
    return rows;
}

int cmd_verify_grads(const CliOptions& opt, std::ostream& out, std::ostream&) {
    Scenario s = resolve_scenario(opt);
    if (opt.algorithm) s.objective = objective_of(algorithm_from_int(*opt.algorithm));
    if (!(opt.tolerance > 0.0)) throw ConfigError("--tolerance must be > 0");
    const SampleGrid grid = build_grid(s.density, s.resolution);
    const std::vector<GradCheckRow> rows = gradient_check_table(s, grid, opt.fd_step);

    const std::string gate = opt.fd_step ? format_double(*opt.fd_step) : "default";
    bool pass = true;
    std::ostringstream csv;
    csv << "# celldeploy verify-grads scenario_hash=" << scenario_hash(s) << " seed=" << s.optimizer.seed << "\n";
    csv << "step,family,coordinates,max_abs_error,scale,max_rel_error,gated,pass\n";
    out << "objective " << objective_name(s.objective) << ", " << grid.size() << " samples, tolerance "
        << format_double(opt.tolerance) << "\n";
    out << std::left << std::setw(9) << "step" << std::setw(15) << "family" << std::setw(8) << "coords"
        << std::setw(14) << "max_rel_err" << "status\n";
    for (const GradCheckRow& r : rows) {
        const FamilyCheck& c = r.check;
        if (!std::isfinite(c.max_abs_error)) {
            throw NonFiniteGradient("non-finite " + family_name(c.family) + " gradient at coordinate " +
                                    std::to_string(c.worst));
        }
        const bool gated = r.step_label == gate;
        const bool ok = c.max_rel_error <= opt.tolerance;
        if (gated && !ok) pass = false;
        std::ostringstream rel;
        rel << std::scientific << std::setprecision(3) << c.max_rel_error;
        out << std::setw(9) << r.step_label << std::setw(15) << family_name(c.family) << std::setw(8)
            << c.coordinates << std::setw(14) << rel.str()
            << (gated ? (ok ? "PASS" : "FAIL") : (ok ? "(ok)" : "(above tol)")) << "\n";
        csv << r.step_label << ',' << family_name(c.family) << ',' << c.coordinates << ','
            << format_double(c.max_abs_error) << ',' << format_double(c.scale) << ','
            << format_double(c.max_rel_error) << ',' << (gated ? 1 : 0) << ',' << (ok ? 1 : 0) << '\n';
    }
    if (opt.out) {
        const std::filesystem::path dir = *opt.out;
        std::filesystem::create_directories(dir);
        std::ofstream f(dir / "grad_check.csv", std::ios::binary);
        if (!f) throw ConfigError("cannot write " + (dir / "grad_check.csv").string());
        f << csv.str();
    }
    out << (pass ? "gradient check PASSED\n" : "gradient check FAILED\n");
    return pass ? kExitOk : kExitTolerance;
}

int cmd_preset_dump(const CliOptions& opt, std::ostream& out, std::ostream&) {
    CliOptions o = opt;
    if (!o.preset) o.preset = "case-study";
    if (o.scenario_path) throw ConfigError("preset-dump takes --preset, not --scenario");
    Scenario s = resolve_scenario(o);
    s.comment = "case-study preset; scenario_hash=" + scenario_hash(s) + " seed=" + std::to_string(s.optimizer.seed);
    if (opt.out) {
        save_scenario(s, *opt.out);
    } else {
        out << serialize_scenario(s);
    }
    return kExitOk;
}

int run_command(const std::string& name, const CliOptions& opt, std::ostream& out, std::ostream& log) {
    try {
        if (name == "run") return cmd_run(opt, out, log);
        if (name == "eval") return cmd_eval(opt, out, log);
        if (name == "verify-grads") return cmd_verify_grads(opt, out, log);
        if (name == "preset-dump") return cmd_preset_dump(opt, out, log);
        throw ConfigError("unknown subcommand '" + name + "'");
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NonFiniteGradient& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const DegenerateGeometry& e) {
        log << "numerical failure (degenerate geometry): " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::filesystem::filesystem_error& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
}

}  // namespace celldeploy
