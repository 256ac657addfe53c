#include "celldeploy/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "celldeploy/errors.hpp"

namespace celldeploy {

using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormatTag = "celldeploy-scenario/1";

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

/// Collects field-path diagnostics so one pass reports every problem.
class Reader {
public:
    std::vector<std::string> errors;
    std::vector<std::string> defaults;

    void error(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

    bool expect_object(const Json& j, const std::string& path) {
        if (j.is_object()) return true;
        error(path, "expected an object");
        return false;
    }

    void check_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            const bool known = std::any_of(allowed.begin(), allowed.end(),
                                           [&](const char* k) { return it.key() == k; });
            if (!known) error(join(path, it.key()), "unknown field");
        }
    }

    static std::string join(const std::string& path, const std::string& key) {
        return path.empty() ? key : path + "." + key;
    }

    double number(const Json& obj, const char* key, const std::string& path,
                  std::optional<double> fallback) {
        const std::string p = join(path, key);
        if (!obj.contains(key)) {
            if (fallback) {
                defaults.push_back(p);
                return *fallback;
            }
            error(p, "required field is missing");
            return 0.0;
        }
        const Json& v = obj.at(key);
        if (!v.is_number()) {
            error(p, "expected a number");
            return fallback.value_or(0.0);
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) error(p, "must be finite");
        return d;
    }

    std::int64_t integer(const Json& obj, const char* key, const std::string& path,
                         std::optional<std::int64_t> fallback) {
        const std::string p = join(path, key);
        if (!obj.contains(key)) {
            if (fallback) {
                defaults.push_back(p);
                return *fallback;
            }
            error(p, "required field is missing");
            return 0;
        }
        const Json& v = obj.at(key);
        if (!v.is_number_integer()) {
            error(p, "expected an integer");
            return fallback.value_or(0);
        }
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_integer(const Json& obj, const char* key, const std::string& path,
                                   std::uint64_t fallback) {
        const std::string p = join(path, key);
        if (!obj.contains(key)) {
            defaults.push_back(p);
            return fallback;
        }
        const Json& v = obj.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            error(p, "expected a non-negative integer");
            return fallback;
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const Json& obj, const char* key, const std::string& path, std::optional<bool> fallback) {
        const std::string p = join(path, key);
        if (!obj.contains(key)) {
            if (fallback) {
                defaults.push_back(p);
                return *fallback;
            }
            error(p, "required field is missing");
            return false;
        }
        const Json& v = obj.at(key);
        if (!v.is_boolean()) {
            error(p, "expected true or false");
            return fallback.value_or(false);
        }
        return v.get<bool>();
    }

    std::string choice(const Json& obj, const char* key, const std::string& path,
                       std::initializer_list<const char*> options, std::optional<std::string> fallback) {
        const std::string p = join(path, key);
        if (!obj.contains(key)) {
            if (fallback) {
                defaults.push_back(p);
                return *fallback;
            }
            error(p, "required field is missing");
            return *options.begin();
        }
        const Json& v = obj.at(key);
        std::string list;
        for (const char* o : options) list += std::string(list.empty() ? "" : "|") + o;
        if (v.is_string()) {
            const std::string s = v.get<std::string>();
            for (const char* o : options) {
                if (s == o) return s;
            }
        }
        error(p, "expected one of " + list);
        return fallback.value_or(*options.begin());
    }
};

Json box2_json(const Box2& b) {
    Json j;
    j["x0"] = b.x0;
    j["x1"] = b.x1;
    j["y0"] = b.y0;
    j["y1"] = b.y1;
    return j;
}

std::string init_name(InitMode m) { return m == InitMode::Random ? "random" : "given"; }

Json to_json(const Scenario& s) {
    Json j;
    j["format"] = kFormatTag;
    if (!s.comment.empty()) j["comment"] = s.comment;
    j["application"] = application_name(s.application);
    j["objective"] = objective_name(s.objective);

    Json& pat = j["pattern"];
    pat["a_max_dbi"] = s.network.pattern.a_max_dbi;
    pat["theta_3db_deg"] = s.network.pattern.theta_3db_deg;
    pat["phi_3db_deg"] = s.network.pattern.phi_3db_deg;

    Json& ch = j["channel"];
    ch["a_gue_db"] = s.network.channel.a_gue_db;
    ch["b_gue"] = s.network.channel.b_gue;
    ch["a_uav_db"] = s.network.channel.a_uav_db;
    ch["b_uav"] = s.network.channel.b_uav;
    ch["noise_dbm"] = s.network.channel.noise_dbm;

    Json sites = Json::array();
    for (const Site& site : s.network.sites) {
        Json js;
        js["id"] = site.id;
        js["x_m"] = site.pos.x;
        js["y_m"] = site.pos.y;
        js["ref_bearing_deg"] = site.ref_bearing_deg;
        js["deployable"] = site.deployable;
        Json sectors = Json::array();
        for (std::size_t idx : site.sectors) {
            const BaseStation& bs = s.network.stations[idx];
            Json sec;
            sec["bearing_deg"] = bs.bearing_deg;
            sec["height_m"] = bs.height_m;
            sec["tilt_deg"] = bs.tilt_deg;
            sec["power_dbm"] = bs.power_dbm;
            sec["power_max_dbm"] = bs.power_max_dbm;
            sec["tilt_optimizable"] = bs.tilt_optimizable;
            sec["power_optimizable"] = bs.power_optimizable;
            sectors.push_back(std::move(sec));
        }
        js["sectors"] = std::move(sectors);
        sites.push_back(std::move(js));
    }
    j["sites"] = std::move(sites);

    Json& den = j["density"];
    den["r_mix"] = s.density.r_mix;
    Json ground = box2_json(s.density.ground);
    ground["height_m"] = s.density.ground_height_m;
    ground["kind"] = s.density.ground_kind == GroundKind::Uniform ? "uniform" : "gmm";
    if (!s.density.gmm.empty()) {
        Json comps = Json::array();
        for (const GaussianComponent& g : s.density.gmm) {
            Json c;
            c["weight"] = g.weight;
            c["mean_x_m"] = g.mean.x;
            c["mean_y_m"] = g.mean.y;
            c["cov_xx"] = g.cov_xx;
            c["cov_xy"] = g.cov_xy;
            c["cov_yy"] = g.cov_yy;
            comps.push_back(std::move(c));
        }
        ground["gmm"] = std::move(comps);
    }
    den["ground"] = std::move(ground);
    Json corridors = Json::array();
    for (const Box3& b : s.density.corridors) {
        Json c;
        c["x0"] = b.x0;
        c["x1"] = b.x1;
        c["y0"] = b.y0;
        c["y1"] = b.y1;
        c["z0"] = b.z0;
        c["z1"] = b.z1;
        corridors.push_back(std::move(c));
    }
    den["corridors"] = std::move(corridors);

    Json& grid = j["grid"];
    grid["ground_m"] = s.resolution.ground_m;
    grid["corridor_m"] = s.resolution.corridor_m;
    grid["corridor_cross"] = s.resolution.corridor_cross;

    Json& kpi = j["kpi"];
    kpi["beta"] = s.kpi.beta;
    kpi["threshold_db"] = s.kpi.threshold_db;
    kpi["kappa"] = s.kpi.kappa;
    kpi["offset"] = s.kpi.offset;
    if (!s.kpi.offsets.empty()) kpi["offsets"] = s.kpi.offsets;
    kpi["sinr_floor_lin"] = s.kpi.sinr_floor_lin;

    const OptimizerConfig& o = s.optimizer;
    Json& opt = j["optimizer"];
    opt["max_outer_iters"] = o.max_outer_iters;
    opt["step_tilt_deg"] = o.step_tilt_deg;
    opt["step_power_db"] = o.step_power_db;
    opt["step_pos_m"] = o.step_pos_m;
    opt["step_bearing_deg"] = o.step_bearing_deg;
    opt["backtrack_factor"] = o.backtrack_factor;
    opt["backtrack_max"] = o.backtrack_max;
    opt["step_growth"] = o.step_growth;
    opt["step_cap_factor"] = o.step_cap_factor;
    opt["conv_tol"] = o.conv_tol;
    opt["seed"] = o.seed;
    opt["snapshot_every"] = o.snapshot_every;
    opt["init"] = init_name(o.init);
    opt["site_init"] = init_name(o.site_init);
    return j;
}

void read_sites(Reader& rd, const Json& arr, Scenario& s) {
    if (!arr.is_array()) {
        rd.error("sites", "expected an array");
        return;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "sites[" + std::to_string(i) + "]";
        const Json& js = arr[i];
        if (!rd.expect_object(js, path)) continue;
        rd.check_keys(js, path, {"id", "x_m", "y_m", "ref_bearing_deg", "deployable", "sectors"});
        const int id = static_cast<int>(rd.integer(js, "id", path, static_cast<std::int64_t>(i + 1)));
        const Vec2 pos{rd.number(js, "x_m", path, std::nullopt), rd.number(js, "y_m", path, std::nullopt)};
        const double ref = rd.number(js, "ref_bearing_deg", path, std::nullopt);
        if (ref <= -180.0 || ref > 180.0) {
            rd.error(path + ".ref_bearing_deg", fmt(ref) + " outside (-180, 180]");
        }
        const bool deployable = rd.boolean(js, "deployable", path, false);

        const std::size_t m = s.network.add_site(id, pos, ref, deployable, BaseStation{});
        const Site& site = s.network.sites[m];
        if (!js.contains("sectors")) {
            rd.defaults.push_back(path + ".sectors");
            continue;
        }
        const Json& secs = js.at("sectors");
        if (!secs.is_array() || secs.size() != 3) {
            rd.error(path + ".sectors", "expected an array of exactly 3 sectors");
            continue;
        }
        for (std::size_t k = 0; k < 3; ++k) {
            const std::string sp = path + ".sectors[" + std::to_string(k) + "]";
            const Json& sec = secs[k];
            if (!rd.expect_object(sec, sp)) continue;
            rd.check_keys(sec, sp, {"bearing_deg", "height_m", "tilt_deg", "power_dbm", "power_max_dbm",
                                    "tilt_optimizable", "power_optimizable"});
            BaseStation& bs = s.network.stations[site.sectors[k]];
            const BaseStation dflt;
            bs.height_m = rd.number(sec, "height_m", sp, dflt.height_m);
            bs.tilt_deg = rd.number(sec, "tilt_deg", sp, dflt.tilt_deg);
            bs.power_max_dbm = rd.number(sec, "power_max_dbm", sp, dflt.power_max_dbm);
            bs.power_dbm = rd.number(sec, "power_dbm", sp, bs.power_max_dbm);
            bs.tilt_optimizable = rd.boolean(sec, "tilt_optimizable", sp, true);
            bs.power_optimizable = rd.boolean(sec, "power_optimizable", sp, true);
            // A stated sector bearing is a claim about the constraint; check it, never repair it.
            if (sec.contains("bearing_deg")) {
                const double stated = rd.number(sec, "bearing_deg", sp, std::nullopt);
                const double expected = bs.bearing_deg;
                if (std::abs(wrap_bearing_deg(stated - expected)) > 1e-9) {
                    rd.error(sp + ".bearing_deg",
                             fmt(stated) + " breaks the 120-degree sector spacing (reference " +
                                 fmt(site.ref_bearing_deg) + " implies " + fmt(expected) + ")");
                }
            }
        }
    }
}

void read_density(Reader& rd, const Json& j, Scenario& s) {
    const std::string path = "density";
    if (!rd.expect_object(j, path)) return;
    rd.check_keys(j, path, {"r_mix", "ground", "corridors"});
    DensitySpec& d = s.density;
    d.r_mix = rd.number(j, "r_mix", path, std::nullopt);
    if (j.contains("ground")) {
        const Json& g = j.at("ground");
        const std::string gp = "density.ground";
        if (rd.expect_object(g, gp)) {
            rd.check_keys(g, gp, {"x0", "x1", "y0", "y1", "height_m", "kind", "gmm"});
            d.ground = {rd.number(g, "x0", gp, std::nullopt), rd.number(g, "x1", gp, std::nullopt),
                        rd.number(g, "y0", gp, std::nullopt), rd.number(g, "y1", gp, std::nullopt)};
            d.ground_height_m = rd.number(g, "height_m", gp, 1.5);
            const std::string kind = rd.choice(g, "kind", gp, {"uniform", "gmm"}, std::string("uniform"));
            d.ground_kind = kind == "gmm" ? GroundKind::GaussianMixture : GroundKind::Uniform;
            if (g.contains("gmm")) {
                const Json& comps = g.at("gmm");
                if (!comps.is_array()) {
                    rd.error(gp + ".gmm", "expected an array");
                } else {
                    for (std::size_t i = 0; i < comps.size(); ++i) {
                        const std::string cp = gp + ".gmm[" + std::to_string(i) + "]";
                        if (!rd.expect_object(comps[i], cp)) continue;
                        rd.check_keys(comps[i], cp,
                                      {"weight", "mean_x_m", "mean_y_m", "cov_xx", "cov_xy", "cov_yy"});
                        GaussianComponent c;
                        c.weight = rd.number(comps[i], "weight", cp, std::nullopt);
                        c.mean = {rd.number(comps[i], "mean_x_m", cp, std::nullopt),
                                  rd.number(comps[i], "mean_y_m", cp, std::nullopt)};
                        c.cov_xx = rd.number(comps[i], "cov_xx", cp, std::nullopt);
                        c.cov_xy = rd.number(comps[i], "cov_xy", cp, 0.0);
                        c.cov_yy = rd.number(comps[i], "cov_yy", cp, std::nullopt);
                        d.gmm.push_back(c);
                    }
                }
            }
        }
    } else {
        rd.error("density.ground", "required field is missing");
    }
    if (j.contains("corridors")) {
        const Json& cs = j.at("corridors");
        if (!cs.is_array()) {
            rd.error("density.corridors", "expected an array");
        } else {
            for (std::size_t i = 0; i < cs.size(); ++i) {
                const std::string cp = "density.corridors[" + std::to_string(i) + "]";
                if (!rd.expect_object(cs[i], cp)) continue;
                rd.check_keys(cs[i], cp, {"x0", "x1", "y0", "y1", "z0", "z1"});
                d.corridors.push_back({rd.number(cs[i], "x0", cp, std::nullopt),
                                       rd.number(cs[i], "x1", cp, std::nullopt),
                                       rd.number(cs[i], "y0", cp, std::nullopt),
                                       rd.number(cs[i], "y1", cp, std::nullopt),
                                       rd.number(cs[i], "z0", cp, std::nullopt),
                                       rd.number(cs[i], "z1", cp, std::nullopt)});
            }
        }
    } else {
        rd.defaults.push_back("density.corridors");
    }
}

InitMode read_init(Reader& rd, const Json& j, const char* key) {
    return rd.choice(j, key, "optimizer", {"random", "given"}, std::string("random")) == "given"
               ? InitMode::Given
               : InitMode::Random;
}

const Json& section(Reader& rd, const Json& root, const char* key, const Json& empty) {
    if (!root.contains(key)) {
        rd.defaults.push_back(key);
        return empty;
    }
    const Json& j = root.at(key);
    if (!rd.expect_object(j, key)) return empty;
    return j;
}

Scenario from_json(const Json& root) {
    Reader rd;
    Scenario s;
    if (!root.is_object()) throw ConfigError("scenario: top level must be an object");
    rd.check_keys(root, "", {"format", "comment", "application", "objective", "pattern", "channel", "sites",
                             "density", "grid", "kpi", "optimizer"});
    if (root.contains("format") &&
        !(root.at("format").is_string() && root.at("format").get<std::string>() == kFormatTag)) {
        rd.error("format", std::string("expected \"") + kFormatTag + "\"");
    }
    if (root.contains("comment")) {
        if (root.at("comment").is_string()) {
            s.comment = root.at("comment").get<std::string>();
        } else {
            rd.error("comment", "expected a string");
        }
    }
    s.application = rd.choice(root, "application", "", {"tune", "deploy"}, std::nullopt) == "deploy"
                        ? Application::Deploy
                        : Application::TuneOnly;
    s.objective = rd.choice(root, "objective", "", {"coverage_capacity", "capacity_per_region"},
                            std::string("coverage_capacity")) == "capacity_per_region"
                      ? Objective::CapacityPerRegion
                      : Objective::CoverageCapacity;

    const Json empty = Json::object();
    const AntennaPattern dp;
    const Json& pat = section(rd, root, "pattern", empty);
    rd.check_keys(pat, "pattern", {"a_max_dbi", "theta_3db_deg", "phi_3db_deg"});
    s.network.pattern = {rd.number(pat, "a_max_dbi", "pattern", dp.a_max_dbi),
                         rd.number(pat, "theta_3db_deg", "pattern", dp.theta_3db_deg),
                         rd.number(pat, "phi_3db_deg", "pattern", dp.phi_3db_deg)};

    const PathlossConstants dc;
    const Json& ch = section(rd, root, "channel", empty);
    rd.check_keys(ch, "channel", {"a_gue_db", "b_gue", "a_uav_db", "b_uav", "noise_dbm"});
    s.network.channel = {rd.number(ch, "a_gue_db", "channel", dc.a_gue_db),
                         rd.number(ch, "b_gue", "channel", dc.b_gue),
                         rd.number(ch, "a_uav_db", "channel", dc.a_uav_db),
                         rd.number(ch, "b_uav", "channel", dc.b_uav),
                         rd.number(ch, "noise_dbm", "channel", dc.noise_dbm)};

    if (root.contains("sites")) {
        read_sites(rd, root.at("sites"), s);
    } else {
        rd.error("sites", "required field is missing");
    }
    if (root.contains("density")) {
        read_density(rd, root.at("density"), s);
    } else {
        rd.error("density", "required field is missing");
    }

    const GridResolution dg;
    const Json& grid = section(rd, root, "grid", empty);
    rd.check_keys(grid, "grid", {"ground_m", "corridor_m", "corridor_cross"});
    s.resolution.ground_m = rd.number(grid, "ground_m", "grid", dg.ground_m);
    s.resolution.corridor_m = rd.number(grid, "corridor_m", "grid", dg.corridor_m);
    s.resolution.corridor_cross = static_cast<int>(rd.integer(grid, "corridor_cross", "grid", dg.corridor_cross));

    const KpiConfig dk;
    const Json& kpi = section(rd, root, "kpi", empty);
    rd.check_keys(kpi, "kpi", {"beta", "threshold_db", "kappa", "offset", "offsets", "sinr_floor_lin"});
    s.kpi.beta = rd.number(kpi, "beta", "kpi", dk.beta);
    s.kpi.threshold_db = rd.number(kpi, "threshold_db", "kpi", dk.threshold_db);
    s.kpi.kappa = rd.number(kpi, "kappa", "kpi", dk.kappa);
    s.kpi.offset = rd.number(kpi, "offset", "kpi", dk.offset);
    if (kpi.contains("offsets")) {
        const Json& offs = kpi.at("offsets");
        if (!offs.is_array()) {
            rd.error("kpi.offsets", "expected an array of numbers");
        } else {
            for (std::size_t i = 0; i < offs.size(); ++i) {
                if (!offs[i].is_number()) {
                    rd.error("kpi.offsets[" + std::to_string(i) + "]", "expected a number");
                    continue;
                }
                s.kpi.offsets.push_back(offs[i].get<double>());
            }
        }
    }
    s.kpi.sinr_floor_lin = rd.number(kpi, "sinr_floor_lin", "kpi", dk.sinr_floor_lin);

    const OptimizerConfig dop;
    const Json& opt = section(rd, root, "optimizer", empty);
    rd.check_keys(opt, "optimizer",
                  {"max_outer_iters", "step_tilt_deg", "step_power_db", "step_pos_m", "step_bearing_deg",
                   "backtrack_factor", "backtrack_max", "step_growth", "step_cap_factor", "conv_tol", "seed",
                   "snapshot_every", "init", "site_init"});
    OptimizerConfig& o = s.optimizer;
    o.max_outer_iters = static_cast<int>(rd.integer(opt, "max_outer_iters", "optimizer", dop.max_outer_iters));
    o.step_tilt_deg = rd.number(opt, "step_tilt_deg", "optimizer", dop.step_tilt_deg);
    o.step_power_db = rd.number(opt, "step_power_db", "optimizer", dop.step_power_db);
    o.step_pos_m = rd.number(opt, "step_pos_m", "optimizer", dop.step_pos_m);
    o.step_bearing_deg = rd.number(opt, "step_bearing_deg", "optimizer", dop.step_bearing_deg);
    o.backtrack_factor = rd.number(opt, "backtrack_factor", "optimizer", dop.backtrack_factor);
    o.backtrack_max = static_cast<int>(rd.integer(opt, "backtrack_max", "optimizer", dop.backtrack_max));
    o.step_growth = rd.number(opt, "step_growth", "optimizer", dop.step_growth);
    o.step_cap_factor = rd.number(opt, "step_cap_factor", "optimizer", dop.step_cap_factor);
    o.conv_tol = rd.number(opt, "conv_tol", "optimizer", dop.conv_tol);
    o.seed = rd.unsigned_integer(opt, "seed", "optimizer", dop.seed);
    o.snapshot_every = static_cast<int>(rd.integer(opt, "snapshot_every", "optimizer", dop.snapshot_every));
    o.init = read_init(rd, opt, "init");
    o.site_init = read_init(rd, opt, "site_init");

    if (rd.errors.empty()) {
        for (std::string& e : s.problems()) rd.errors.push_back(std::move(e));
    }
    if (!rd.errors.empty()) {
        std::string msg = "invalid scenario (" + std::to_string(rd.errors.size()) + " problem" +
                          (rd.errors.size() == 1 ? "" : "s") + "):";
        for (const std::string& e : rd.errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    s.defaults_applied = std::move(rd.defaults);
    return s;
}

}  // namespace

std::string application_name(Application a) { return a == Application::Deploy ? "deploy" : "tune"; }

std::string objective_name(Objective o) {
    return o == Objective::CapacityPerRegion ? "capacity_per_region" : "coverage_capacity";
}

std::vector<std::string> Scenario::problems() const {
    std::vector<std::string> errs;
    const auto guard = [&](auto&& fn) {
        try {
            fn();
        } catch (const ConfigError& e) {
            errs.push_back(e.what());
        }
    };
    guard([&] { network.pattern.validate(); });
    guard([&] { network.channel.validate(); });
    guard([&] { density.validate(); });
    guard([&] { kpi.validate(network.size()); });
    guard([&] { optimizer.validate(); });
    if (!(resolution.ground_m > 0.0)) errs.push_back("grid.ground_m: must be > 0");
    if (!(resolution.corridor_m > 0.0)) errs.push_back("grid.corridor_m: must be > 0");
    if (resolution.corridor_cross < 1) errs.push_back("grid.corridor_cross: must be >= 1");

    if (network.sites.empty()) errs.push_back("sites: at least one site is required");
    if (network.size() != 3 * network.sites.size()) {
        errs.push_back("sites: every site must carry exactly three sectors");
    }
    std::set<int> ids;
    std::size_t deployable = 0;
    for (std::size_t i = 0; i < network.sites.size(); ++i) {
        const Site& site = network.sites[i];
        const std::string path = "sites[" + std::to_string(i) + "]";
        if (!ids.insert(site.id).second) errs.push_back(path + ".id: duplicate site id " + std::to_string(site.id));
        deployable += site.deployable ? 1 : 0;
        for (std::size_t k = 0; k < 3; ++k) {
            const std::string sp = path + ".sectors[" + std::to_string(k) + "]";
            const BaseStation& bs = network.stations[site.sectors[k]];
            if (!(bs.tilt_deg >= -90.0 && bs.tilt_deg <= 90.0)) {
                errs.push_back(sp + ".tilt_deg: " + fmt(bs.tilt_deg) + " outside [-90, 90]");
            }
            if (!(bs.height_m > 0.0)) errs.push_back(sp + ".height_m: must be > 0");
            if (!(bs.power_dbm <= bs.power_max_dbm)) {
                errs.push_back(sp + ".power_dbm: " + fmt(bs.power_dbm) + " exceeds power_max_dbm " +
                               fmt(bs.power_max_dbm));
            }
            if (bs.pos != site.pos) errs.push_back(sp + ": position differs from its site");
            const double expected = wrap_bearing_deg(site.ref_bearing_deg + kSectorOffsetsDeg[k]);
            if (std::abs(wrap_bearing_deg(bs.bearing_deg - expected)) > 1e-9) {
                errs.push_back(sp + ".bearing_deg: breaks the 120-degree sector spacing");
            }
        }
    }
    if (application == Application::Deploy && deployable == 0) {
        errs.push_back("application: deploy requires at least one deployable site");
    }
    if (application == Application::TuneOnly && deployable > 0) {
        errs.push_back("application: tune forbids deployable sites (" + std::to_string(deployable) +
                       " marked)");
    }
    return errs;
}

void Scenario::validate() const {
    const std::vector<std::string> errs = problems();
    if (!errs.empty()) {
        std::string msg = errs.front();
        for (std::size_t i = 1; i < errs.size(); ++i) msg += "\n  " + errs[i];
        throw ConfigError(msg);
    }
}

std::vector<Vec2> hex_layout(int n_rings, double isd_m) {
    if (n_rings < 0) throw ConfigError("hex_layout: n_rings must be >= 0");
    const auto snap = [](double v) { return std::abs(v) < 1e-9 ? 0.0 : v; };
    std::vector<Vec2> out{{0.0, 0.0}};
    for (int k = 1; k <= n_rings; ++k) {
        std::vector<std::pair<double, Vec2>> ring;
        for (int j = 0; j < 6; ++j) {
            const double a0 = (30.0 + 60.0 * j) * kDegToRad;
            const double a1 = (30.0 + 60.0 * (j + 1)) * kDegToRad;
            const Vec2 c0{k * isd_m * std::cos(a0), k * isd_m * std::sin(a0)};
            const Vec2 c1{k * isd_m * std::cos(a1), k * isd_m * std::sin(a1)};
            for (int i = 0; i < k; ++i) {
                const double t = static_cast<double>(i) / k;
                const Vec2 p{snap(c0.x + t * (c1.x - c0.x)), snap(c0.y + t * (c1.y - c0.y))};
                double ang = std::atan2(p.y, p.x) * kRadToDeg;
                if (ang < 0.0) ang += 360.0;
                // Sort key rounded so that 359.99999 from rounding noise does not jump the order.
                ring.emplace_back(std::round(ang * 1e6) / 1e6, p);
            }
        }
        std::sort(ring.begin(), ring.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [ang, p] : ring) out.push_back(p);
    }
    return out;
}

Scenario preset_case_study(double r_mix, GroundKind gue_kind, Application app) {
    if (!(r_mix >= 0.0 && r_mix <= 1.0)) throw ConfigError("preset: r must lie in [0, 1]");
    Scenario s;
    s.application = app;
    s.objective = Objective::CoverageCapacity;
    s.network.pattern = {14.0, 10.0, 65.0};
    s.network.channel = {38.42, 30.0, 34.02, 22.0, -95.0};

    BaseStation proto;
    proto.height_m = 25.0;
    proto.tilt_deg = 0.0;
    proto.power_dbm = 43.0;
    proto.power_max_dbm = 43.0;
    const std::vector<Vec2> pos = hex_layout(2, 500.0);
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        const bool fixed = std::find(std::begin(kCaseStudyFixedSites), std::end(kCaseStudyFixedSites), id) !=
                           std::end(kCaseStudyFixedSites);
        s.network.add_site(id, pos[i], 30.0, app == Application::Deploy && !fixed, proto);
    }

    DensitySpec& d = s.density;
    d.r_mix = r_mix;
    d.ground = {-750.0, 750.0, -750.0, 750.0};
    d.ground_height_m = 1.5;
    d.ground_kind = gue_kind;
    if (gue_kind == GroundKind::GaussianMixture) {
        d.gmm = {{0.35, {-375.0, -225.0}, 5e4, 0.0, 5e4},
                 {0.25, {150.0, 375.0}, 4.2e4, 0.0, 4.2e4},
                 {0.25, {375.0, -375.0}, 3.2e4, 0.0, 3.2e4},
                 {0.15, {-300.0, 300.0}, 3.8e4, 0.0, 3.8e4}};
    }
    d.corridors = {{-770.0, -730.0, -1000.0, 1000.0, 135.0, 150.0},
                   {-1000.0, 1000.0, -770.0, -730.0, 105.0, 120.0},
                   {-1000.0, 1000.0, 730.0, 770.0, 105.0, 120.0},
                   {730.0, 770.0, -1000.0, 1000.0, 135.0, 150.0}};

    s.kpi.beta = 0.5;
    s.kpi.threshold_db = -5.0;
    s.kpi.kappa = 2.0;
    s.kpi.offset = 0.002;
    s.validate();
    return s;
}

Scenario parse_scenario(const std::string& text) {
    Json root;
    try {
        root = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return from_json(root);
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_scenario(text);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string serialize_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write scenario file " + path.string());
    out << serialize_scenario(s);
}

std::string scenario_hash(const Scenario& s) {
    Scenario bare = s;
    bare.comment.clear();
    const std::string text = serialize_scenario(bare);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

OptimizationProblem make_problem(const Scenario& s, const SampleGrid& grid) {
    OptimizationProblem p;
    p.grid = &grid;
    p.network = s.network;
    p.kpi = s.kpi;
    p.optimizer = s.optimizer;
    p.site_region = s.density.ground;
    return p;
}

}  // namespace celldeploy
