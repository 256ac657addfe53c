#include "celldeploy/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "celldeploy/errors.hpp"
#include "celldeploy/link_table.hpp"
#include "celldeploy/partition.hpp"

namespace celldeploy {

using Json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ClassCdf class_cdf(const SampleGrid& grid, std::span<const double> values, UserClass c) {
    ClassCdf cdf;
    cdf.user_class = c;
    std::vector<std::size_t> idx;
    for (std::size_t q = 0; q < grid.size(); ++q) {
        const Sample& s = grid.samples[q];
        if (s.loc.user_class == c && s.class_weight > 0.0) idx.push_back(q);
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    double cum = 0.0;
    double cum_class = 0.0;
    for (std::size_t q : idx) {
        cum += grid.samples[q].weight;
        cum_class += grid.samples[q].class_weight;
        cdf.points.push_back({values[q], cum, cum_class});
    }
    cdf.class_mass = cum;
    return cdf;
}

double weighted_median(const ClassCdf& cdf) {
    if (cdf.points.empty()) return std::nan("");
    const double total = cdf.points.back().cum_class_fraction;
    for (const CdfPoint& p : cdf.points) {
        if (p.cum_class_fraction >= 0.5 * total) return p.value;
    }
    return cdf.points.back().value;
}

ReportBundle make_report(const std::string& command, const Scenario& input, const Network& final_net,
                         Objective objective, const SampleGrid& grid, std::optional<RunTrace> trace) {
    ReportBundle b;
    b.command = command;
    b.scenario_hash = scenario_hash(input);
    b.seed = input.optimizer.seed;
    b.input = input;
    b.objective = objective;
    b.grid = &grid;

    const LinkTable table(grid, final_net);
    b.partition = max_rss_partition(table);
    b.kpi = evaluate(objective, table, b.partition, input.kpi);
    b.sinr = serving_sinrs(table, b.partition);

    std::vector<double> sinr_db(b.sinr.size());
    std::vector<double> rate(b.sinr.size());
    for (std::size_t q = 0; q < b.sinr.size(); ++q) {
        sinr_db[q] = b.sinr[q].db;
        rate[q] = spectral_efficiency(b.sinr[q].lin);
    }
    for (UserClass c : {UserClass::Gue, UserClass::Uav}) {
        b.sinr_cdf[static_cast<int>(c)] = class_cdf(grid, sinr_db, c);
        b.rate_cdf[static_cast<int>(c)] = class_cdf(grid, rate, c);
    }

    b.final_scenario = input;
    b.final_scenario.network = final_net;
    b.final_scenario.objective = objective;
    b.final_scenario.optimizer.init = InitMode::Given;
    b.final_scenario.optimizer.site_init = InitMode::Given;
    b.final_scenario.defaults_applied.clear();
    b.trace = std::move(trace);
    b.final_scenario.comment = "final configuration; " + std::string("scenario_hash=") + b.scenario_hash +
                               " seed=" + std::to_string(b.seed);
    return b;
}

std::string provenance_line(const ReportBundle& b) {
    return "# celldeploy " + b.command + " scenario_hash=" + b.scenario_hash + " seed=" + std::to_string(b.seed);
}

namespace {

const char* class_name(UserClass c) { return c == UserClass::Uav ? "uav" : "gue"; }

Json kpi_json(const KpiReport& k) {
    Json j;
    j["total"] = k.total;
    j["per_class"] = {{"gue", k.per_class[0]}, {"uav", k.per_class[1]}};
    j["coverage_fraction"] = k.coverage_fraction;
    j["coverage_surrogate"] = k.coverage_surrogate;
    j["sum_log_rate"] = k.sum_log_rate;
    j["mean_spectral_efficiency"] = k.mean_spectral_efficiency;
    j["per_cell"] = k.per_cell;
    return j;
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::string summary_text(const ReportBundle& b) {
    Json j;
    j["header"] = provenance_line(b).substr(2);
    j["command"] = b.command;
    j["scenario_hash"] = b.scenario_hash;
    j["seed"] = b.seed;
    j["application"] = application_name(b.input.application);
    j["objective"] = objective_name(b.objective);
    j["samples"] = b.grid->size();
    j["stations"] = b.final_scenario.network.size();
    if (b.trace) {
        const RunTrace& t = *b.trace;
        Json r;
        r["algorithm"] = static_cast<int>(t.algorithm);
        r["seed"] = t.seed;
        r["iterations"] = t.iterations.size();
        r["converged"] = t.converged;
        r["initial_objective"] = t.objectives.front();
        r["last_iteration_objective"] = t.objectives.back();
        r["final_objective"] = t.final_objective;
        j["run"] = std::move(r);
    }
    j["kpi"] = kpi_json(b.kpi);
    Json med;
    for (UserClass c : {UserClass::Gue, UserClass::Uav}) {
        med["sinr_db"][class_name(c)] = nullable(b.median_sinr_db(c));
        med["spectral_efficiency"][class_name(c)] = nullable(b.median_rate(c));
    }
    j["medians"] = std::move(med);
    j["defaults_applied"] = b.input.defaults_applied;
    return j.dump(2) + "\n";
}

std::string config_echo_text(const ReportBundle& b) {
    Json j;
    j["header"] = provenance_line(b).substr(2);
    j["defaults_applied"] = b.input.defaults_applied;
    j["scenario"] = Json::parse(serialize_scenario(b.input));
    return j.dump(2) + "\n";
}

std::string cdf_text(const ReportBundle& b, const std::array<ClassCdf, 2>& cdfs, const char* value_name) {
    std::ostringstream os;
    os << provenance_line(b) << "\n";
    os << "class," << value_name << ",cum_weight,cum_class_fraction\n";
    for (const ClassCdf& cdf : cdfs) {
        for (const CdfPoint& p : cdf.points) {
            os << class_name(cdf.user_class) << ',' << format_double(p.value) << ','
               << format_double(p.cum_weight) << ',' << format_double(p.cum_class_fraction) << '\n';
        }
    }
    return os.str();
}

std::string partition_text(const ReportBundle& b) {
    std::ostringstream os;
    os << provenance_line(b) << "\n";
    os << "sample,x_m,y_m,z_m,class,weight,cell,site_id,sinr_db\n";
    const Network& net = b.final_scenario.network;
    for (std::size_t q = 0; q < b.grid->size(); ++q) {
        const Sample& s = b.grid->samples[q];
        const std::size_t cell = b.partition.assignment[q];
        const int site = net.stations[cell].site_id;
        os << q << ',' << format_double(s.loc.x_m) << ',' << format_double(s.loc.y_m) << ','
           << format_double(s.loc.z_m) << ',' << class_name(s.loc.user_class) << ','
           << format_double(s.weight) << ',' << cell << ','
           << (site >= 0 ? net.sites[site].id : -1) << ',' << format_double(b.sinr[q].db) << '\n';
    }
    return os.str();
}

std::string stations_text(const ReportBundle& b) {
    std::ostringstream os;
    os << provenance_line(b) << "\n";
    os << "station,site_id,deployable,x_m,y_m,height_m,bearing_deg,tilt_deg,power_dbm,power_max_dbm,cell_mass,"
          "kpi\n";
    const Network& net = b.final_scenario.network;
    const std::vector<double> mass = cell_masses(*b.grid, b.partition, net.size());
    for (std::size_t n = 0; n < net.size(); ++n) {
        const BaseStation& bs = net.stations[n];
        const Site* site = bs.site_id >= 0 ? &net.sites[bs.site_id] : nullptr;
        os << n << ',' << (site ? site->id : -1) << ',' << (site && site->deployable ? 1 : 0) << ','
           << format_double(bs.pos.x) << ',' << format_double(bs.pos.y) << ',' << format_double(bs.height_m)
           << ',' << format_double(bs.bearing_deg) << ',' << format_double(bs.tilt_deg) << ','
           << format_double(bs.power_dbm) << ',' << format_double(bs.power_max_dbm) << ','
           << format_double(mass[n]) << ',' << format_double(b.kpi.per_cell[n]) << '\n';
    }
    return os.str();
}

std::string trace_text(const ReportBundle& b) {
    std::ostringstream os;
    os << provenance_line(b) << "\n";
    os << "iteration,objective,partition_changed,tilt_step,power_step,site_position_step,site_bearing_step\n";
    const RunTrace& t = *b.trace;
    os << 0 << ',' << format_double(t.objectives.front()) << ",0,,,,\n";
    for (const IterationRecord& rec : t.iterations) {
        std::array<std::string, 4> steps;
        for (const StepRecord& s : rec.steps) steps[static_cast<int>(s.family)] = format_double(s.step);
        os << rec.iteration << ',' << format_double(rec.objective) << ',' << (rec.partition_changed ? 1 : 0);
        for (const std::string& s : steps) os << ',' << s;
        os << '\n';
    }
    return os.str();
}

std::string snapshots_text(const ReportBundle& b) {
    std::ostringstream os;
    os << provenance_line(b) << "\n";
    os << "iteration,kind,index,tilt_deg,power_dbm,x_m,y_m,bearing_deg\n";
    for (const Snapshot& s : b.trace->snapshots) {
        for (std::size_t n = 0; n < s.tilt_deg.size(); ++n) {
            os << s.iteration << ",station," << n << ',' << format_double(s.tilt_deg[n]) << ','
               << format_double(s.power_dbm[n]) << ",,,\n";
        }
        for (std::size_t m = 0; m < s.site_pos.size(); ++m) {
            os << s.iteration << ",site," << m << ",,," << format_double(s.site_pos[m].x) << ','
               << format_double(s.site_pos[m].y) << ',' << format_double(s.site_bearing_deg[m]) << '\n';
        }
    }
    return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("write failed for " + path.string());
}

}  // namespace

std::vector<std::string> write_report(const ReportBundle& b, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + out_dir.string() + ": " + ec.message());

    std::vector<std::pair<std::string, std::string>> files;
    files.emplace_back("summary.json", summary_text(b));
    files.emplace_back("config_echo.json", config_echo_text(b));
    files.emplace_back("final_scenario.json", serialize_scenario(b.final_scenario));
    files.emplace_back("sinr_cdf.csv", cdf_text(b, b.sinr_cdf, "sinr_db"));
    files.emplace_back("rate_cdf.csv", cdf_text(b, b.rate_cdf, "spectral_efficiency_bps_hz"));
    files.emplace_back("partition.csv", partition_text(b));
    files.emplace_back("stations.csv", stations_text(b));
    if (b.trace) {
        files.emplace_back("trace.csv", trace_text(b));
        files.emplace_back("snapshots.csv", snapshots_text(b));
    }

    std::ostringstream manifest;
    manifest << provenance_line(b) << "\n";
    manifest << "file,bytes\n";
    std::vector<std::string> names;
    for (const auto& [name, text] : files) {
        write_file(out_dir / name, text);
        manifest << name << ',' << text.size() << '\n';
        names.push_back(name);
    }
    write_file(out_dir / "manifest.txt", manifest.str());
    names.push_back("manifest.txt");
    return names;
}

}  // namespace celldeploy
