// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if all pass.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "celldeploy/commands.hpp"
#include "celldeploy/errors.hpp"
#include "celldeploy/gradients.hpp"
#include "celldeploy/optimizer.hpp"
#include "celldeploy/partition.hpp"
#include "celldeploy/report.hpp"
#include "celldeploy/scenario.hpp"
#include "oracle.hpp"

using namespace celldeploy;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

std::string fmt(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

double rel_err(double a, double b, double floor = 1e-3) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// ---- shared runs for criteria 2, 4 and 5 -----------------------------------------

struct RunKey {
    GroundKind gue;
    double r;
    int alg;
    std::uint64_t seed;
    auto operator<=>(const RunKey&) const = default;
};

struct RunResult {
    RunTrace trace;
    double median_sinr_db[2] = {0, 0};
    double median_rate[2] = {0, 0};
};

class RunCache {
public:
    const RunResult& get(const RunKey& k) {
        auto it = runs_.find(k);
        if (it != runs_.end()) return it->second;
        const Application app = moves_sites(algorithm_from_int(k.alg)) ? Application::Deploy : Application::TuneOnly;
        Scenario s = preset_case_study(k.r, k.gue, app);
        s.resolution = {50.0, 20.0, 2};
        s.optimizer.seed = k.seed;
        s.objective = objective_of(algorithm_from_int(k.alg));
        const SampleGrid& grid = grid_for(k.gue, k.r, s);
        RunResult res;
        res.trace = run_algorithm(algorithm_from_int(k.alg), make_problem(s, grid));
        const ReportBundle b = make_report("run", s, res.trace.final_network, s.objective, grid, std::nullopt);
        for (int c = 0; c < 2; ++c) {
            res.median_sinr_db[c] = b.median_sinr_db(static_cast<UserClass>(c));
            res.median_rate[c] = b.median_rate(static_cast<UserClass>(c));
        }
        return runs_.emplace(k, std::move(res)).first->second;
    }

private:
    const SampleGrid& grid_for(GroundKind g, double r, const Scenario& s) {
        const auto key = std::make_pair(static_cast<int>(g), r);
        auto it = grids_.find(key);
        if (it == grids_.end()) it = grids_.emplace(key, build_grid(s.density, s.resolution)).first;
        return it->second;
    }
    std::map<RunKey, RunResult> runs_;
    std::map<std::pair<int, double>, SampleGrid> grids_;
};

RunCache& cache() {
    static RunCache c;
    return c;
}

const char* gue_name(GroundKind g) { return g == GroundKind::Uniform ? "uniform" : "gmm"; }

// ---- criterion 1: gradients -------------------------------------------------

double sinr_db_oracle(const Network& net, std::size_t m, const Location3D& q) {
    std::vector<oracle::Link> links;
    for (const auto& bs : net.stations) links.push_back(oracle::link_of(bs));
    return 10.0 * std::log10(oracle::sinr_lin(oracle::model_of(net), links, m, oracle::point_of(q)));
}

template <class Mutate>
double central_sinr(const Network& net, std::size_t m, const Location3D& q, double h, Mutate mutate) {
    Network up = net, down = net;
    mutate(up, h);
    mutate(down, -h);
    return (sinr_db_oracle(up, m, q) - sinr_db_oracle(down, m, q)) / (2.0 * h);
}

Location3D random_point(std::mt19937_64& rng, double span = 500.0) {
    const bool uav = oracle::uniform(rng, 0, 1) < 0.4;
    return {oracle::uniform(rng, -span, span), oracle::uniform(rng, -span, span),
            uav ? oracle::uniform(rng, 100, 150) : 1.5, uav ? UserClass::Uav : UserClass::Gue};
}

Outcome criterion1() {
    Outcome out;
    double worst_functional = 0.0, worst_link = 0.0;
    std::string where;
    const auto note = [&](double err, const std::string& label) {
        if (err > worst_functional) {
            worst_functional = err;
            where = label;
        }
    };

    // Case-study preset, about 10k samples.
    Scenario s = preset_case_study(0.5, GroundKind::GaussianMixture, Application::Deploy);
    s.resolution = {16.0, 20.0, 2};
    const SampleGrid grid = build_grid(s.density, s.resolution);
    Network net = s.network;
    initialize_network(net, s.optimizer, s.density.ground);
    const Partition part = max_rss_partition(grid, net);
    for (Objective obj : {Objective::CoverageCapacity, Objective::CapacityPerRegion}) {
        const auto checks = check_gradients(obj, grid, part, net, s.kpi, FamilySet::all(), FdSteps{});
        if (checks.size() != 4) out.pass = false;
        for (const FamilyCheck& c : checks) {
            note(c.max_rel_error, "preset " + objective_name(obj) + " " + family_name(c.family));
        }
    }

    // Random 2-4 site instances.
    std::mt19937_64 rng(20240601);
    for (int t = 0; t < 20; ++t) {
        const int sites = 2 + t % 3;
        const Network rn = oracle::random_network(rng, sites, 1 + t % sites);
        const SampleGrid rg = oracle::random_grid(rng, 300);
        const Partition rp = max_rss_partition(rg, rn);
        for (Objective obj : {Objective::CoverageCapacity, Objective::CapacityPerRegion}) {
            const auto checks = check_gradients(obj, rg, rp, rn, KpiConfig{}, FamilySet::all(), FdSteps{});
            if (checks.size() != 4) out.pass = false;
            for (const FamilyCheck& c : checks) {
                note(c.max_rel_error, "random#" + std::to_string(t) + " " + objective_name(obj) + " " +
                                          family_name(c.family));
            }
        }
        // Single-link sub-derivatives at a few points.
        // 1e-3 balances truncation (~1e-9 relative) against roundoff, which at 1e-4
        // already reaches ~1e-6 for derivatives near the 1e-3 floor.
        const double h = 1e-3;
        for (int k = 0; k < 3; ++k) {
            const Location3D q = random_point(rng);
            for (std::size_t m = 0; m < rn.size(); ++m) {
                for (std::size_t n = 0; n < rn.size(); ++n) {
                    worst_link = std::max(worst_link, rel_err(dsinr_dtilt(rn, m, n, q),
                        central_sinr(rn, m, q, h, [n](Network& x, double d) { x.stations[n].tilt_deg += d; })));
                    worst_link = std::max(worst_link, rel_err(dsinr_dpower(rn, m, n, q),
                        central_sinr(rn, m, q, h, [n](Network& x, double d) { x.stations[n].power_dbm += d; })));
                }
                for (std::size_t site = 0; site < rn.sites.size(); ++site) {
                    const Vec2 g = grad_sinr_sitepos(rn, site, m, q);
                    worst_link = std::max(worst_link, rel_err(g.x, central_sinr(rn, m, q, h, [site](Network& x, double d) {
                        x.sites[site].pos.x += d;
                        x.apply_site(site);
                    })));
                    worst_link = std::max(worst_link, rel_err(g.y, central_sinr(rn, m, q, h, [site](Network& x, double d) {
                        x.sites[site].pos.y += d;
                        x.apply_site(site);
                    })));
                    worst_link = std::max(worst_link, rel_err(dsinr_dbearing(rn, site, m, q),
                        central_sinr(rn, m, q, h, [site](Network& x, double d) {
                            x.sites[site].ref_bearing_deg += d;
                            x.apply_site(site);
                        })));
                }
            }
        }
    }
    out.pass = out.pass && worst_functional <= 1e-4 && worst_link <= 1e-6;
    out.detail = std::to_string(grid.size()) + " preset samples + 20 random instances; max functional rel err " +
                 fmt(worst_functional, 3) + " (" + where + "), max single-link rel err " + fmt(worst_link, 3);
    return out;
}

// ---- criterion 2: monotone convergence --------------------------------------

Outcome criterion2() {
    Outcome out;
    int runs = 0, worst_iters = 0;
    double worst_drop = 0.0;
    std::vector<std::string> bad;
    for (GroundKind g : {GroundKind::Uniform, GroundKind::GaussianMixture}) {
        for (int alg = 1; alg <= 4; ++alg) {
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                const RunTrace& t = cache().get({g, 0.5, alg, seed}).trace;
                ++runs;
                worst_iters = std::max(worst_iters, static_cast<int>(t.iterations.size()));
                for (std::size_t i = 1; i < t.objectives.size(); ++i) {
                    const double drop = t.objectives[i - 1] - t.objectives[i];
                    worst_drop = std::max(worst_drop, drop);
                    if (drop > 1e-9) bad.push_back(std::string(gue_name(g)) + " alg" + std::to_string(alg) + " seed" +
                                                   std::to_string(seed) + " iter " + std::to_string(i));
                }
                if (!t.converged || t.iterations.size() > 300) {
                    bad.push_back(std::string(gue_name(g)) + " alg" + std::to_string(alg) + " seed" +
                                  std::to_string(seed) + " did not converge");
                }
            }
        }
    }
    out.pass = bad.empty();
    out.detail = std::to_string(runs) + " runs at 50 m; largest per-iteration decrease " + fmt(worst_drop, 3) +
                 ", most iterations " + std::to_string(worst_iters);
    if (!bad.empty()) out.detail += "; first problem: " + bad.front();
    return out;
}

// ---- criterion 3: partition optimality ---------------------------------------

Outcome criterion3() {
    Outcome out;
    std::mt19937_64 rng(777);
    std::size_t argmax_fail = 0, dominance_fail = 0, samples = 0;
    double min_margin = 1e300;
    const KpiConfig cfg;
    for (int t = 0; t < 50; ++t) {
        const int n = 2 + t % 4;
        const int q_count = 100 + 8 * t;
        const Network net = oracle::random_stations(rng, n);
        const SampleGrid g = oracle::random_grid(rng, q_count);
        const Partition p = max_rss_partition(g, net);
        const oracle::Model m = oracle::model_of(net);
        std::vector<oracle::Link> links;
        for (const auto& bs : net.stations) links.push_back(oracle::link_of(bs));
        for (std::size_t q = 0; q < g.size(); ++q) {
            const oracle::Point pt = oracle::point_of(g.samples[q].loc);
            std::size_t best = 0;
            double best_s = -1.0;
            for (std::size_t c = 0; c < links.size(); ++c) {
                const double s = oracle::sinr_lin(m, links, c, pt);
                if (s > best_s) {
                    best_s = s;
                    best = c;
                }
            }
            argmax_fail += p.assignment[q] != best;
            ++samples;
        }
        const double value = oracle::p1(g, p.assignment, net, cfg);
        for (int k = 0; k < 100; ++k) {
            const Partition r = oracle::random_partition(rng, g.size(), net.size());
            const double v = oracle::p1(g, r.assignment, net, cfg);
            min_margin = std::min(min_margin, value - v);
            dominance_fail += v > value;
        }
    }
    out.pass = argmax_fail == 0 && dominance_fail == 0;
    out.detail = "50 instances, " + std::to_string(samples) + " samples: " + std::to_string(argmax_fail) +
                 " argmax mismatches, " + std::to_string(dominance_fail) +
                 " random partitions beating max-RSS (smallest margin " + fmt(min_margin, 3) + ")";
    return out;
}

// ---- criterion 4: ordering of the algorithms ----------------------------------

Outcome criterion4() {
    Outcome out;
    std::ostringstream d;
    for (GroundKind g : {GroundKind::Uniform, GroundKind::GaussianMixture}) {
        double best[5] = {-1e300, -1e300, -1e300, -1e300, -1e300};
        for (int alg = 1; alg <= 4; ++alg) {
            for (std::uint64_t seed = 1; seed <= 3; ++seed) {
                best[alg] = std::max(best[alg], cache().get({g, 0.5, alg, seed}).trace.final_objective);
            }
        }
        const bool ok = best[2] > best[1] && best[4] > best[3];
        out.pass = out.pass && ok;
        d << gue_name(g) << ": alg1 " << fmt(best[1]) << " < alg2 " << fmt(best[2]) << ", alg3 " << fmt(best[3])
          << " < alg4 " << fmt(best[4]) << (ok ? "" : " [ORDER VIOLATED]") << "; ";
    }
    out.detail = d.str() + "best of seeds 1-3, r=0.5, 50 m/20 m grid";
    return out;
}

// ---- criterion 5: UAV gain vs GUE loss ----------------------------------------

Outcome criterion5() {
    Outcome out;
    std::ostringstream d;
    const int gue = static_cast<int>(UserClass::Gue), uav = static_cast<int>(UserClass::Uav);
    for (GroundKind g : {GroundKind::Uniform, GroundKind::GaussianMixture}) {
        const RunResult& a_mix = cache().get({g, 0.5, 2, 1});
        const RunResult& a_gue = cache().get({g, 1.0, 2, 1});
        const double uav_gain = a_mix.median_sinr_db[uav] - a_gue.median_sinr_db[uav];
        const double gue_loss = a_gue.median_sinr_db[gue] - a_mix.median_sinr_db[gue];
        const RunResult& b_mix = cache().get({g, 0.5, 4, 1});
        const RunResult& b_gue = cache().get({g, 1.0, 4, 1});
        const double uav_se_gain = b_mix.median_rate[uav] - b_gue.median_rate[uav];
        const double gue_se_loss = b_gue.median_rate[gue] - b_mix.median_rate[gue];
        const bool ok = uav_gain > gue_loss && uav_se_gain > gue_se_loss;
        out.pass = out.pass && ok;
        d << gue_name(g) << ": alg2 UAV median SINR +" << fmt(uav_gain, 4) << " dB vs GUE loss " << fmt(gue_loss, 4)
          << " dB; alg4 UAV median SE +" << fmt(uav_se_gain, 4) << " vs GUE loss " << fmt(gue_se_loss, 4)
          << " bps/Hz" << (ok ? "" : " [VIOLATED]") << "; ";
    }
    out.detail = d.str() + "r=0.5 vs r=1, seed 1";
    return out;
}

// ---- criterion 6: kernel examples -------------------------------------------

class Checklist {
public:
    void check(const std::string& name, bool ok) {
        ++total_;
        if (!ok) failed_.push_back(name);
    }
    void near(const std::string& name, double got, double want, double tol) {
        const bool ok = std::abs(got - want) <= tol;
        check(name + " (got " + fmt(got, 10) + ", want " + fmt(want, 10) + ")", ok);
    }
    Outcome outcome() const {
        Outcome o;
        o.pass = failed_.empty();
        o.detail = std::to_string(total_ - failed_.size()) + "/" + std::to_string(total_) + " kernel examples pass";
        for (const auto& f : failed_) o.detail += "\n    failed: " + f;
        return o;
    }

private:
    int total_ = 0;
    std::vector<std::string> failed_;
};

BaseStation station_at(double x, double y, double h, double bearing, double tilt, double power = 43.0) {
    BaseStation bs;
    bs.pos = {x, y};
    bs.height_m = h;
    bs.bearing_deg = bearing;
    bs.tilt_deg = tilt;
    bs.power_dbm = power;
    return bs;
}

void channel_examples(Checklist& c) {
    const AntennaPattern pat;
    const PathlossConstants pl;
    const BaseStation o = station_at(0, 0, 25, 0, 0);
    c.near("elevation, same height", elevation_angle_deg(o, {300, 40, 25, UserClass::Uav}), 0.0, 0.0);
    c.near("elevation, 45 degrees", elevation_angle_deg(o, {100, 0, 125, UserClass::Uav}), 45.0, 1e-12);
    c.near("elevation at (500,0,1.5), exact formula", elevation_angle_deg(o, {500, 0, 1.5, UserClass::Gue}),
           std::atan(-23.5 / 500.0) * 180.0 / kPi, 1e-12);
    c.near("elevation at (500,0,1.5) vs stated -2.6917", elevation_angle_deg(o, {500, 0, 1.5, UserClass::Gue}), -2.6917,
           1e-3);
    c.near("azimuth, boresight", azimuth_offset_deg(o, {200, 0, 1.5, UserClass::Gue}), 0.0, 0.0);
    c.near("azimuth, bearing 30, user north", azimuth_offset_deg(station_at(0, 0, 25, 30, 0), {0, 200, 1.5, UserClass::Gue}),
           60.0, 1e-12);
    const double raw = -170.0 * kPi / 180.0;
    c.near("azimuth wrap +20", azimuth_offset_deg(station_at(0, 0, 25, 170, 0),
                                                  {100 * std::cos(raw), 100 * std::sin(raw), 1.5, UserClass::Gue}),
           20.0, 1e-9);
    c.near("gain at half beamwidth", antenna_gain_from_offsets_db(pat, 5.0, 0.0), 11.0, 1e-12);
    c.near("gain at (10, 65)", antenna_gain_from_offsets_db(pat, 10.0, 65.0), -10.0, 1e-12);
    c.near("gain at boresight", antenna_gain_from_offsets_db(pat, 0.0, 0.0), 14.0, 0.0);
    c.near("GUE pathloss 100 m", pathloss_db({100, 0, 25, UserClass::Gue}, o, pl), 98.42, 1e-12);
    c.near("UAV pathloss 1 m", pathloss_db({1, 0, 25, UserClass::Uav}, o, pl), 34.02, 1e-12);
    c.near("UAV pathloss 1000 m", pathloss_db({1000, 0, 25, UserClass::Uav}, o, pl), 100.02, 1e-12);
    const Location3D bore{100, 0, 25, UserClass::Gue};
    c.near("boresight RSS", rss_dbm(o, pat, pl, bore), -41.42, 1e-12);
    std::mt19937_64 rng(6);
    bool identity = true;
    for (int i = 0; i < 100; ++i) {
        const Network n = oracle::random_stations(rng, 1);
        const Location3D q = random_point(rng);
        const BaseStation& b = n.stations[0];
        identity = identity && rss_dbm(b, pat, pl, q) ==
                                   b.power_dbm + antenna_gain_db(b, pat, q) - pathloss_db(q, b, pl);
    }
    c.check("RSS = power + gain - pathloss", identity);
    c.near("doubling GUE distance", rss_dbm(o, pat, pl, bore) - rss_dbm(o, pat, pl, {200, 0, 25, UserClass::Gue}),
           30.0 * std::log10(2.0), 1e-12);

    const std::vector<BaseStation> one{o};
    c.near("single-BS SINR", sinr(one, 0, pat, pl, bore).db, 53.58, 1e-9);
    PathlossConstants quiet = pl;
    quiet.noise_dbm = -300.0;
    const std::vector<BaseStation> two{station_at(-100, 0, 25, 0, 0), station_at(100, 0, 25, 180, 0)};
    c.near("two equal RSS -> 0 dB", sinr(two, 0, pat, quiet, {0, 0, 25, UserClass::Gue}).db, 0.0, 1e-9);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Network n = oracle::random_stations(rng, 3);
        const Location3D q = random_point(rng);
        std::vector<oracle::Link> links;
        for (const auto& b : n.stations) links.push_back(oracle::link_of(b));
        for (std::size_t m = 0; m < 3; ++m) {
            worst = std::max(worst, rel_err(sinr(n.stations, m, pat, pl, q).lin,
                                            oracle::sinr_lin(oracle::model_of(n), links, m, oracle::point_of(q)), 1e-300));
        }
    }
    c.check("3-BS SINR vs linear oracle to 1e-12 (worst " + fmt(worst, 3) + ")", worst <= 1e-12);
    c.near("spectral efficiency 0", spectral_efficiency(0.0), 0.0, 0.0);
    c.near("spectral efficiency 1", spectral_efficiency(1.0), 1.0, 0.0);
    c.near("spectral efficiency 3", spectral_efficiency(3.0), 2.0, 0.0);
}

void density_examples(Checklist& c) {
    const Scenario gmm = preset_case_study(0.5, GroundKind::GaussianMixture, Application::TuneOnly);
    const std::vector<GaussianComponent> first{gmm.density.gmm[0]};
    c.near("GMM component 1 peak", gmm_pdf(gmm.density.gmm[0].mean, first), 0.35 / (2.0 * kPi * 5e4), 1e-20);
    const Vec2 mu = gmm.density.gmm[0].mean;
    c.check("GMM symmetry", gmm_pdf(mu + Vec2{120, -45}, first) == gmm_pdf(mu - Vec2{120, -45}, first));
    double wsum = 0.0;
    for (const auto& g : gmm.density.gmm) wsum += g.weight;
    c.near("GMM weights sum to 1", wsum, 1.0, 1e-15);

    const GridResolution res{50.0, 20.0, 2};
    const SampleGrid uni = build_grid(preset_case_study(1.0, GroundKind::Uniform, Application::TuneOnly).density, res);
    std::size_t ground = 0;
    for (const Sample& s : uni.samples) ground += s.loc.user_class == UserClass::Gue;
    bool equal = ground > 0;
    for (const Sample& s : uni.samples) {
        if (s.loc.user_class == UserClass::Gue) equal = equal && std::abs(s.weight - 1.0 / ground) <= 1e-15;
    }
    c.check("uniform r=1 ground weights 1/#samples", equal);
    const SampleGrid air = build_grid(preset_case_study(0.0, GroundKind::Uniform, Application::TuneOnly).density, res);
    double ground_mass = 0.0, air_mass = 0.0;
    for (const Sample& s : air.samples) (s.loc.user_class == UserClass::Gue ? ground_mass : air_mass) += s.weight;
    c.check("r=0 puts all mass on corridors", ground_mass == 0.0 && std::abs(air_mass - 1.0) <= 1e-12);

    Partition all0;
    all0.assignment.assign(uni.size(), 0);
    c.near("cell mass, everything in one cell", cell_mass(uni, all0, 0), 1.0, 1e-12);
    c.near("cell mass, empty cell", cell_mass(uni, all0, 3), 0.0, 0.0);
    std::mt19937_64 rng(8);
    const Partition r = oracle::random_partition(rng, uni.size(), 9);
    double m = 0.0;
    for (double v : cell_masses(uni, r, 9)) m += v;
    c.near("random partition masses sum to 1", m, 1.0, 1e-9);
}

void kpi_examples(Checklist& c) {
    KpiConfig k;
    k.beta = 0.0;
    c.near("KPI1 at threshold, beta=0", kpi1_pointwise(k.threshold_db, db_to_lin(k.threshold_db), k), 0.5, 1e-15);
    k.beta = 1.0;
    // log2(log2(1+3)) = log2(2) = 1; the zero of the log-rate term sits at SINR 1.
    c.near("KPI1 sinr_lin=3, beta=1", kpi1_pointwise(lin_to_db(3.0), 3.0, k), 1.0, 1e-15);
    c.near("KPI1 sinr_lin=1, beta=1", kpi1_pointwise(0.0, 1.0, k), 0.0, 1e-15);
    KpiConfig h;
    h.beta = 0.5;
    h.threshold_db = -5.0;
    h.kappa = 1.0;
    c.near("KPI1 hand evaluation at 5 dB", kpi1_pointwise(5.0, db_to_lin(5.0), h),
           0.5 * std::log2(std::log2(1.0 + std::sqrt(10.0))) + 0.5 / (1.0 + std::exp(-10.0)), 1e-14);

    std::mt19937_64 rng(31);
    const KpiConfig cfg;
    {
        const Network n = oracle::random_stations(rng, 1);
        SampleGrid g;
        g.samples.push_back({{140, 60, 1.5, UserClass::Gue}, 1.0, 1.0});
        Partition p;
        p.assignment = {0};
        const Sinr s = sinr(n.stations, 0, n.pattern, n.channel, g.samples[0].loc);
        c.near("P1 single BS single sample", eval_P1_gamma1(g, p, n, cfg).total, kpi1_pointwise(s.db, s.lin, cfg), 1e-14);
        SampleGrid split = g;
        split.samples[0].weight = 0.5;
        split.samples.push_back(split.samples[0]);
        p.assignment = {0, 0};
        c.near("P1 split sample", eval_P1_gamma1(split, p, n, cfg).total, kpi1_pointwise(s.db, s.lin, cfg), 1e-14);
    }
    {
        const Network n = oracle::random_stations(rng, 3);
        const SampleGrid g = oracle::random_grid(rng, 100);
        const Partition p = oracle::random_partition(rng, g.size(), 3);
        const double a = eval_P1_gamma1(g, p, n, cfg).total, b = oracle::p1(g, p.assignment, n, cfg);
        c.check("P1 3-BS 100 samples vs oracle 1e-10", rel_err(a, b, 1e-300) <= 1e-10);
    }
    {
        const Network n = oracle::random_stations(rng, 1);
        const SampleGrid g = oracle::random_grid(rng, 80);
        KpiConfig z = cfg;
        z.offset = 0.0;
        Partition p;
        p.assignment.assign(g.size(), 0);
        const KpiReport r = eval_P_gamma2(g, p, n, z);
        c.near("P2 one cell, o=0, mass 1", r.total, r.mean_spectral_efficiency, 1e-13);
    }
    {
        const Network n = oracle::random_stations(rng, 2);
        SampleGrid g = oracle::random_grid(rng, 30);
        Sample dead = g.samples[0];
        dead.loc = {1e9, 1e9, 1.5, UserClass::Gue};
        dead.weight = 0.04;
        g.samples.push_back(dead);
        Partition p = oracle::random_partition(rng, g.size(), 2);
        bool ok = true;
        for (std::uint32_t cell : {0u, 1u}) {
            p.assignment.back() = cell;
            ok = ok && rel_err(eval_P_gamma2(g, p, n, cfg).total, oracle::p2(g, p.assignment, n, cfg), 1e-300) <= 1e-10;
        }
        c.check("P2 zero-rate sample moved between cells vs oracle", ok);
    }
    {
        const Network n = oracle::random_stations(rng, 3);
        const SampleGrid g = oracle::random_grid(rng, 120);
        const Partition p = max_rss_partition(g, n);
        c.near("coverage with T = -inf", coverage_fraction(g, p, n, -1e300), 1.0, 1e-12);
        c.near("coverage with T above max SINR", coverage_fraction(g, p, n, 1e6), 0.0, 0.0);
        KpiConfig sharp = cfg;
        sharp.kappa = 100.0;
        sharp.beta = 0.0;
        const LinkTable table(g, n);
        const std::vector<ServingSinr> s = serving_sinrs(table, p);
        double worst = 0.0;
        for (const ServingSinr& v : s) {
            if (std::abs(v.db - sharp.threshold_db) < 1.0) continue;
            worst = std::max(worst, std::abs(kpi1_pointwise(v.db, v.lin, sharp) - (v.db >= sharp.threshold_db ? 1.0 : 0.0)));
        }
        c.check("kappa=100 surrogate matches the indicator off the threshold (worst " + fmt(worst, 3) + ")",
                worst <= 1e-40);
    }
}

void partition_examples(Checklist& c) {
    Network mirrored;
    mirrored.stations = {station_at(-200, 0, 25, 90, 0), station_at(200, 0, 25, 90, 0)};
    SampleGrid g;
    for (double x : {30.0, 120.0, 199.0, 201.0, 350.0, 600.0}) g.samples.push_back({{x, 0, 25, UserClass::Uav}, 0.1, 0.1});
    g.samples.push_back({{0, 0, 25, UserClass::Uav}, 0.1, 0.1});
    const Partition p = max_rss_partition(g, mirrored);
    bool nearer = true;
    for (std::size_t q = 0; q + 1 < g.size(); ++q) nearer = nearer && p.assignment[q] == 1u;
    c.check("mirrored BSs, sample at x>0 -> nearer BS", nearer);
    c.check("equidistant sample -> lowest index", p.assignment.back() == 0u);

    std::mt19937_64 rng(44);
    const Network n4 = oracle::random_stations(rng, 4);
    const SampleGrid g4 = oracle::random_grid(rng, 200);
    const Partition p4 = max_rss_partition(g4, n4);
    bool argmax = true;
    for (std::size_t q = 0; q < g4.size(); ++q) {
        const Sinr mine = sinr(n4.stations, p4.assignment[q], n4.pattern, n4.channel, g4.samples[q].loc);
        for (std::size_t m = 0; m < 4; ++m) {
            argmax = argmax && sinr(n4.stations, m, n4.pattern, n4.channel, g4.samples[q].loc).lin <= mine.lin;
        }
    }
    c.check("4-BS 200 samples: assigned cell maximizes SINR", argmax);
    const KpiConfig cfg;
    c.check("KPI2 update keeps a max-RSS partition", conditional_partition_update_kpi2(g4, n4, p4, cfg) == p4);
    const Network n1 = oracle::random_stations(rng, 1);
    Partition single;
    single.assignment.assign(g4.size(), 0);
    c.check("KPI2 update with a single cell", conditional_partition_update_kpi2(g4, n1, single, cfg) == single);

    // Constructed instance: the max-RSS move would erase a small, well-served cell.
    Network two;
    two.stations = {station_at(0, 0, 25, 0, -5), station_at(600, 0, 25, 180, -5, 30.0)};
    SampleGrid line;
    for (int i = 0; i < 10; ++i) line.samples.push_back({{50.0 + 10.0 * i, 20.0, 1.5, UserClass::Gue}, 0.1, 0.1});
    Partition cur = max_rss_partition(line, two);
    cur.assignment[0] = 1;
    KpiConfig z = cfg;
    z.offset = 0.0;
    const bool lower = oracle::p2(line, max_rss_partition(line, two).assignment, two, z) <
                       oracle::p2(line, cur.assignment, two, z);
    c.check("constructed 2-cell instance: max-RSS lowers KPI2 and current is kept",
            lower && conditional_partition_update_kpi2(line, two, cur, z) == cur);
}

void gradient_examples(Checklist& c) {
    std::mt19937_64 rng(66);
    {
        Network n;
        n.stations = {station_at(0, 0, 25, 0, 0)};
        const Location3D q{300, 40, 1.5, UserClass::Gue};
        n.stations[0].tilt_deg = elevation_angle_deg(n.stations[0], q);
        c.near("own tilt derivative at the beam centre", dsinr_dtilt(n, 0, 0, q), 0.0, 1e-15);
        n.stations[0].tilt_deg = -3.0;
        const double fd = central_sinr(n, 0, q, 1e-4, [](Network& x, double d) { x.stations[0].tilt_deg += d; });
        c.check("single BS own-tilt branch vs FD", rel_err(dsinr_dtilt(n, 0, 0, q), fd) <= 1e-6);
    }
    {
        const Network n = oracle::random_stations(rng, 3);
        const Location3D q = random_point(rng);
        double worst = 0.0;
        for (std::size_t m = 0; m < 3; ++m) {
            for (std::size_t k = 0; k < 3; ++k) {
                worst = std::max(worst, rel_err(dsinr_dtilt(n, m, k, q),
                    central_sinr(n, m, q, 1e-4, [k](Network& x, double d) { x.stations[k].tilt_deg += d; })));
                worst = std::max(worst, rel_err(dsinr_dpower(n, m, k, q),
                    central_sinr(n, m, q, 1e-4, [k](Network& x, double d) { x.stations[k].power_dbm += d; })));
            }
        }
        c.check("3-BS tilt and power derivatives, all pairs (worst " + fmt(worst, 3) + ")", worst <= 1e-6);
        Network quiet = n;
        quiet.stations[1].power_dbm = -300.0;
        c.check("interference-free limit: cross term vanishes", std::abs(dsinr_dtilt(quiet, 0, 1, q)) <= 1e-12 &&
                                                              std::abs(dsinr_dpower(quiet, 0, 1, q)) <= 1e-12);
    }
    {
        const BaseStation b = station_at(0, 0, 25, 0, -4);
        const Location3D q{150, 0, 1.5, UserClass::Gue};
        const Vec2 g = grad_rss_position(b, AntennaPattern{}, PathlossConstants{}, q);
        c.check("boresight toy: position gradient along the BS-user axis", std::abs(g.y) <= 1e-12 * std::abs(g.x));
        const oracle::Model m;
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const Network r = oracle::random_stations(rng, 1);
            const Location3D p = random_point(rng);
            const Vec2 a = grad_rss_position(r.stations[0], r.pattern, r.channel, p);
            const auto at = [&](double dx, double dy) {
                oracle::Link l = oracle::link_of(r.stations[0]);
                l.x += dx;
                l.y += dy;
                return oracle::rss_dbm(m, l, oracle::point_of(p));
            };
            worst = std::max(worst, rel_err(a.x, (at(1e-3, 0) - at(-1e-3, 0)) / 2e-3));
            worst = std::max(worst, rel_err(a.y, (at(0, 1e-3) - at(0, -1e-3)) / 2e-3));
        }
        c.check("single-link RSS position gradient vs FD, h=1e-3 m (worst " + fmt(worst, 3) + ")", worst <= 1e-6);
    }
    {
        // One site alone, user 20 degrees off sector 0's boresight and far enough
        // out that the back sectors sit well under the noise floor.
        Network n;
        BaseStation proto;
        n.add_site(1, {0, 0}, 20.0, true, proto);
        const double a = 40.0 * kPi / 180.0;
        const double r = 10000.0;
        const Location3D q{r * std::cos(a), r * std::sin(a), 1.5, UserClass::Gue};
        const double total = dsinr_dbearing(n, 0, 0, q);
        const oracle::Model m;
        const auto own = [&](double d) {
            oracle::Link l = oracle::link_of(n.stations[0]);
            l.bearing += d;
            return oracle::rss_dbm(m, l, oracle::point_of(q));
        };
        const double own_term = (own(1e-4) - own(-1e-4)) / 2e-4;
        c.check("single site: bearing derivative is the own-sector term (rel diff " + fmt(rel_err(total, own_term), 3) + ")",
                rel_err(total, own_term) <= 1e-2);
        Network rot = n;
        rot.sites[0].ref_bearing_deg += 10.0;
        rot.apply_site(0);
        const double b = a + 10.0 * kPi / 180.0;
        const Location3D qr{r * std::cos(b), r * std::sin(b), 1.5, UserClass::Gue};
        c.near("rotating bearings and user together keeps SINR",
               sinr(rot.stations, 0, rot.pattern, rot.channel, qr).db, sinr(n.stations, 0, n.pattern, n.channel, q).db,
               1e-9);
        const auto user_at = [&](double deg) {
            const double t = a + deg * kPi / 180.0;
            return sinr(n.stations, 0, n.pattern, n.channel, {r * std::cos(t), r * std::sin(t), 1.5, UserClass::Gue}).db;
        };
        const double user_turn = (user_at(1e-4) - user_at(-1e-4)) / 2e-4;
        c.check("directional derivative of the joint rotation is zero", std::abs(total + user_turn) <= 1e-6 * std::abs(total));
        const Network rn = oracle::random_network(rng, 3, 3);
        const Location3D p = random_point(rng);
        double worst = 0.0;
        for (std::size_t s = 0; s < 3; ++s) {
            for (std::size_t k = 0; k < rn.size(); ++k) {
                worst = std::max(worst, rel_err(dsinr_dbearing(rn, s, k, p), central_sinr(rn, k, p, 1e-4, [s](Network& x, double d) {
                    x.sites[s].ref_bearing_deg += d;
                    x.apply_site(s);
                })));
            }
        }
        c.check("bearing derivative vs FD (worst " + fmt(worst, 3) + ")", worst <= 1e-6);
    }
    {
        // beta = 1, one sample, one station: closed-form chain rule.
        Network n;
        n.stations = {station_at(0, 0, 25, 0, -2)};
        SampleGrid g;
        g.samples.push_back({{220, 30, 1.5, UserClass::Gue}, 1.0, 1.0});
        Partition p;
        p.assignment = {0};
        KpiConfig k;
        k.beta = 1.0;
        const LinkTable t(g, n);
        const double grad = grad_P1_gamma1(t, p, n, k).d_tilt[0];
        const double s = std::pow(10.0, sinr_db_oracle(n, 0, g.samples[0].loc) / 10.0);
        const double dsdb = central_sinr(n, 0, g.samples[0].loc, 1e-4, [](Network& x, double d) { x.stations[0].tilt_deg += d; });
        const double ln2 = std::log(2.0);
        const double closed = 1.0 / (ln2 * std::log2(1.0 + s)) * 1.0 / ((1.0 + s) * ln2) * s * std::log(10.0) / 10.0 * dsdb;
        c.check("beta=1 single sample: closed-form chain rule", rel_err(grad, closed) <= 1e-6);
    }
    {
        Network n = oracle::random_network(rng, 2, 1);
        n.stations[2].tilt_optimizable = false;
        n.stations[3].power_optimizable = false;
        const SampleGrid g = oracle::random_grid(rng, 80);
        const LinkTable t(g, n);
        const Partition p = max_rss_partition(t);
        const GradientVector gv = grad_P2_gamma1(t, p, n, KpiConfig{});
        c.check("non-optimizable entries are zero", gv.d_tilt[2] == 0.0 && gv.d_power[3] == 0.0 &&
                                                       gv.d_site_pos[1] == Vec2{} && gv.d_site_bearing[1] == 0.0);
    }
    {
        // Case study, coarse grid, five random coordinates.
        Scenario s = preset_case_study(0.5, GroundKind::Uniform, Application::Deploy);
        const SampleGrid g = build_grid(s.density, {100.0, 50.0, 1});
        Network n = s.network;
        initialize_network(n, s.optimizer, s.density.ground);
        const Partition p = max_rss_partition(g, n);
        for (Objective obj : {Objective::CoverageCapacity, Objective::CapacityPerRegion}) {
            const GradientVector gv = gradient(obj, LinkTable(g, n), p, n, s.kpi, FamilySet::all());
            FrozenObjective frozen(obj, g, n, p, s.kpi);
            double worst = 0.0;
            std::uniform_int_distribution<int> fam(0, 3);
            for (int i = 0; i < 5; ++i) {
                const Family f = kAllFamilies[fam(rng)];
                const std::vector<char> mask = family_mask(n, f);
                std::vector<std::size_t> idx;
                for (std::size_t j = 0; j < mask.size(); ++j) if (mask[j]) idx.push_back(j);
                const std::size_t j = idx[std::uniform_int_distribution<std::size_t>(0, idx.size() - 1)(rng)];
                std::vector<double> x = family_params(n, f);
                const double h = FdSteps{}.for_family(f);
                x[j] += h;
                const double up = frozen.at(f, x);
                x[j] -= 2 * h;
                const double down = frozen.at(f, x);
                const double fd = (up - down) / (2 * h);
                const double scale = std::max(1e-12, [&] {
                    double m = 0.0;
                    for (double v : family_values(gv, f)) m = std::max(m, std::abs(v));
                    return m;
                }());
                worst = std::max(worst, std::abs(family_values(gv, f)[j] - fd) / scale);
            }
            c.check("19-site case study, 5 random coordinates, " + objective_name(obj) + " (worst " + fmt(worst, 3) + ")",
                    worst <= 1e-4);
        }
    }
    {
        Network n = oracle::random_stations(rng, 1);
        const SampleGrid g = oracle::random_grid(rng, 60);
        Partition p;
        p.assignment.assign(g.size(), 0);
        KpiConfig z;
        z.offset = 0.0;
        const auto checks = check_gradients(Objective::CapacityPerRegion, g, p, n, z, FamilySet::tune_only(), FdSteps{});
        double worst = 0.0;
        for (const auto& ch : checks) worst = std::max(worst, ch.max_rel_error);
        c.check("single cell, o=0: mean spectral efficiency gradient vs FD", worst <= 1e-5);
    }
    {
        Network n;
        n.stations = {station_at(-150, 0, 25, 0, -6), station_at(150, 0, 25, 180, -6)};
        SampleGrid g;
        for (int i = -10; i <= 10; ++i) {
            for (int j = -3; j <= 3; ++j) {
                if (i == 0) continue;
                g.samples.push_back({{i * 37.0, j * 41.0, 1.5, UserClass::Gue}, 1.0 / 140, 1.0 / 140});
            }
        }
        const LinkTable t(g, n);
        const Partition p = max_rss_partition(t);
        const GradientVector gv = grad_P_gamma2(t, p, n, KpiConfig{}, FamilySet::tune_only());
        c.check("symmetric 2-BS: equal tilt gradients", rel_err(gv.d_tilt[0], gv.d_tilt[1], 1e-300) <= 1e-9);
    }
    {
        const auto f = [](std::span<const double> x) { return 3.0 * x[0] * x[0] - 2.0 * x[0] + 1.0; };
        const std::vector<double> x{1.7};
        c.near("central differences exact on a quadratic", finite_difference_gradient(f, x, 0.1)[0], 6.0 * 1.7 - 2.0,
               1e-12);
        const Network n = oracle::random_network(rng, 2, 0);
        const Location3D q{260.0, -90.0, 1.5, UserClass::Gue};
        const double exact = dsinr_dtilt(n, 0, 1, q);
        const auto err = [&](double h) {
            return std::abs(central_sinr(n, 0, q, h, [](Network& x, double d) { x.stations[1].tilt_deg += d; }) - exact);
        };
        const double ratio = err(0.2) / err(0.1);
        c.check("halving h cuts the FD error about 4x (ratio " + fmt(ratio, 4) + ")", ratio > 3.5 && ratio < 4.5);
    }
}

void optimizer_examples(Checklist& c) {
    const std::vector<double> below{10.0, 42.9, -5.0};
    c.check("projection: all below max is identity", project_powers(below, 43.0) == below);
    const std::vector<double> above{50.0, 43.0, 44.0};
    const std::vector<double> pr = project_powers(above, 43.0);
    c.check("projection at 43 dBm", pr == std::vector<double>{43.0, 43.0, 43.0});
    c.check("projection is idempotent", project_powers(pr, 43.0) == pr);

    const auto f = [](std::span<const double> x) { return -(x[0] - 2.0) * (x[0] - 2.0); };
    const std::vector<double> at{2.0};
    c.check("zero gradient leaves params", ascent_step(f, at, 0.0, std::vector<double>{0.0}, 1.0, {}).params == at);
    std::vector<double> x{-6.0};
    double v = f(x);
    int steps = 0;
    while (steps < 60 && std::abs(x[0] - 2.0) > 1e-6) {
        const AscentResult r = ascent_step(f, x, v, std::vector<double>{-2.0 * (x[0] - 2.0)}, 0.3, {});
        x = r.params;
        v = r.objective;
        ++steps;
    }
    c.check("concave quadratic: vertex within 1e-6 in <= 60 steps (" + std::to_string(steps) + ")",
            std::abs(x[0] - 2.0) <= 1e-6 && steps <= 60);
    const std::vector<double> x0{0.0};
    const AscentResult big = ascent_step(f, x0, f(x0), std::vector<double>{4.0}, 1e3, {0.5, 20});
    c.check("step 1e3 backtracks to an increasing step", big.accepted_step > 0.0 && big.accepted_step < 1e3 &&
                                                          big.objective > f(x0));

    // Single station: optimized tilt beats a 181-point scan.
    Network one;
    BaseStation bs = station_at(0, 0, 25, 0, 0);
    bs.power_optimizable = false;
    one.stations = {bs};
    SampleGrid grid;
    for (int i = 0; i < 30; ++i) {
        for (int j = 0; j < 10; ++j) grid.samples.push_back({{40.0 + 20.0 * i, -100.0 + 20.0 * j, 1.5, UserClass::Gue}, 1.0 / 300, 1.0 / 300});
    }
    const KpiConfig cfg;
    double best = -1e300;
    for (int t = -90; t <= 90; ++t) {
        Network n = one;
        n.stations[0].tilt_deg = t;
        best = std::max(best, eval_P1_gamma1(grid, max_rss_partition(grid, n), n, cfg).total);
    }
    OptimizationProblem p;
    p.grid = &grid;
    p.network = one;
    p.kpi = cfg;
    c.check("N=1: optimized tilt >= every scanned tilt", run_algorithm(Algorithm::Alg1, p).final_objective >= best - 1e-12);

    // Coverage-only vs rate-only tuning on an asymmetric density.
    std::mt19937_64 rng(71);
    SampleGrid asym = oracle::random_grid(rng, 150, 450.0);
    for (Sample& s : asym.samples) {
        if (s.loc.x_m > 0) s.weight *= 3.0;
    }
    double total = 0.0;
    for (const Sample& s : asym.samples) total += s.weight;
    for (Sample& s : asym.samples) s.weight /= total;
    OptimizationProblem q;
    q.grid = &asym;
    q.network = oracle::random_network(rng, 3, 0, 300.0);
    q.kpi.beta = 1.0;
    const RunTrace rate = run_algorithm(Algorithm::Alg1, q);
    q.kpi.beta = 0.0;
    const RunTrace cover = run_algorithm(Algorithm::Alg1, q);
    double diff = 0.0;
    for (std::size_t n = 0; n < rate.final_network.size(); ++n) {
        diff = std::max(diff, std::abs(rate.final_network.stations[n].tilt_deg - cover.final_network.stations[n].tilt_deg));
    }
    c.check("beta=1 vs beta=0 tilt profiles differ by > 1 degree (" + fmt(diff, 4) + ")", diff > 1.0);

    // Fixed sites: Algorithms 2 and 4 collapse onto 1 and 3.
    q.kpi = cfg;
    for (int pair = 0; pair < 2; ++pair) {
        const RunTrace a = run_algorithm(pair == 0 ? Algorithm::Alg1 : Algorithm::Alg3, q);
        const RunTrace b = run_algorithm(pair == 0 ? Algorithm::Alg2 : Algorithm::Alg4, q);
        bool same = a.objectives.size() == b.objectives.size();
        for (std::size_t i = 0; same && i < a.objectives.size(); ++i) {
            same = std::abs(a.objectives[i] - b.objectives[i]) <= 1e-12 * std::max(1.0, std::abs(a.objectives[i]));
        }
        c.check(pair == 0 ? "all sites fixed: Algorithm 2 trace equals Algorithm 1"
                          : "all sites fixed: Algorithm 4 trace equals Algorithm 3",
                same);
    }
    // Sector offsets after every iteration, checked by stopping the run after k iterations.
    OptimizationProblem d = q;
    d.network = oracle::random_network(rng, 3, 2, 300.0);
    d.site_region = {-400, 400, -400, 400};
    bool sectors = true;
    for (int k = 1; k <= 8; ++k) {
        d.optimizer.max_outer_iters = k;
        sectors = sectors && run_algorithm(Algorithm::Alg2, d).final_network.sector_constraints_hold(1e-12);
        sectors = sectors && run_algorithm(Algorithm::Alg4, d).final_network.sector_constraints_hold(1e-12);
    }
    c.check("sector offsets stay {0,120,240} after every iteration", sectors);
}

void scenario_examples(Checklist& c) {
    const Scenario s = preset_case_study(0.5, GroundKind::GaussianMixture, Application::Deploy);
    const fs::path path = fs::temp_directory_path() / "celldeploy_acceptance_scenario.json";
    save_scenario(s, path);
    std::ifstream in(path, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    c.check("preset save -> load -> save is byte-identical", serialize_scenario(load_scenario(path)) == text);
    fs::remove(path);

    std::string bad = text;
    const std::string key = "\"tilt_deg\": 0.0";
    bad.replace(bad.find(key), key.size(), "\"tilt_deg\": 95.0");
    std::string msg;
    try {
        parse_scenario(bad);
    } catch (const ConfigError& e) {
        msg = e.what();
    }
    c.check("tilt 95 -> ConfigError naming the field", msg.find("sites[0].sectors[0].tilt_deg") != std::string::npos);

    std::string nok = text;
    const auto k0 = nok.find("\"kappa\"");
    nok.erase(k0, nok.find('\n', k0) - k0 + 1);
    const Scenario d = parse_scenario(nok);
    c.check("missing kappa -> default 2.0 recorded",
            d.kpi.kappa == 2.0 &&
                std::find(d.defaults_applied.begin(), d.defaults_applied.end(), "kpi.kappa") != d.defaults_applied.end());
    c.check("hex layout: 19 sites, 57 stations", s.network.sites.size() == 19 && s.network.size() == 57 &&
                                                  hex_layout(2, 500.0).size() == 19);
}

void report_examples(Checklist& c) {
    std::mt19937_64 rng(3);
    const SampleGrid g = oracle::random_grid(rng, 300);
    std::vector<double> v(g.size());
    for (double& x : v) x = oracle::uniform(rng, -20, 40);
    bool mono = true;
    for (UserClass cls : {UserClass::Gue, UserClass::Uav}) {
        const ClassCdf cdf = class_cdf(g, v, cls);
        for (std::size_t i = 1; i < cdf.points.size(); ++i) {
            mono = mono && cdf.points[i].value >= cdf.points[i - 1].value &&
                   cdf.points[i].cum_weight >= cdf.points[i - 1].cum_weight;
        }
        mono = mono && std::abs(cdf.points.back().cum_class_fraction - 1.0) <= 1e-12;
    }
    c.check("CDFs are monotone and end at 1", mono);
}

Outcome criterion6() {
    Checklist c;
    channel_examples(c);
    density_examples(c);
    kpi_examples(c);
    partition_examples(c);
    gradient_examples(c);
    optimizer_examples(c);
    scenario_examples(c);
    report_examples(c);
    return c.outcome();
}

// ---- criterion 7: determinism ------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Outcome criterion7() {
    Outcome out;
    const fs::path root = fs::temp_directory_path() / "celldeploy_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream sink;
    int compared = 0;
    std::vector<std::string> differing;
    for (int alg : {2, 4}) {
        CliOptions opt;
        opt.preset = "case-study";
        opt.app = "deploy";
        opt.gue = "gmm";
        opt.r_mix = 0.5;
        opt.algorithm = alg;
        opt.seed = 5;
        opt.res_ground_m = 50.0;
        opt.res_corridor_m = 20.0;
        opt.quiet = true;
        std::vector<fs::path> dirs;
        for (int rep = 0; rep < 2; ++rep) {
            dirs.push_back(root / ("alg" + std::to_string(alg) + "_" + std::to_string(rep)));
            opt.out = dirs.back().string();
            if (run_command("run", opt, sink, sink) != kExitOk) {
                out.pass = false;
                out.detail = "run failed: " + sink.str();
                return out;
            }
        }
        std::set<std::string> names;
        for (const auto& d : dirs) {
            for (const auto& e : fs::directory_iterator(d)) names.insert(e.path().filename().string());
        }
        for (const std::string& n : names) {
            ++compared;
            if (!fs::exists(dirs[0] / n) || !fs::exists(dirs[1] / n) || slurp(dirs[0] / n) != slurp(dirs[1] / n)) {
                differing.push_back("alg" + std::to_string(alg) + "/" + n);
            }
        }
    }
    fs::remove_all(root);
    out.pass = differing.empty() && compared > 0;
    out.detail = std::to_string(compared) + " report files compared across repeated Algorithm 2 and 4 runs, " +
                 std::to_string(differing.size()) + " differ";
    if (!differing.empty()) out.detail += " (first: " + differing.front() + ")";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> all{
        {1, "gradient oracle suite", criterion1},
        {2, "monotone convergence", criterion2},
        {3, "partition optimality", criterion3},
        {4, "algorithm ordering", criterion4},
        {5, "UAV gain exceeds GUE loss", criterion5},
        {6, "numerical kernel examples", criterion6},
        {7, "determinism", criterion7},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failed = 0;
    for (const Criterion& c : all) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.title << ", " << fmt(secs, 3)
                  << " s): " << o.detail << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criterion/criteria failed") << "\n";
    return failed == 0 ? 0 : 1;
}
