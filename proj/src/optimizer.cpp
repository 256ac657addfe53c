#include "celldeploy/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "celldeploy/errors.hpp"
#include "celldeploy/link_table.hpp"
#include "celldeploy/partition.hpp"

namespace celldeploy {

double OptimizerConfig::initial_step(Family f) const {
    switch (f) {
        case Family::Tilt: return step_tilt_deg;
        case Family::Power: return step_power_db;
        case Family::SitePosition: return step_pos_m;
        case Family::SiteBearing: return step_bearing_deg;
    }
    return step_tilt_deg;
}

void OptimizerConfig::validate() const {
    if (max_outer_iters < 1) throw ConfigError("optimizer.max_outer_iters: must be >= 1");
    const auto positive = [](double v, const char* field) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError(std::string("optimizer.") + field + ": must be > 0");
        }
    };
    positive(step_tilt_deg, "step_tilt_deg");
    positive(step_power_db, "step_power_db");
    positive(step_pos_m, "step_pos_m");
    positive(step_bearing_deg, "step_bearing_deg");
    positive(conv_tol, "conv_tol");
    if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
        throw ConfigError("optimizer.backtrack_factor: must lie in (0, 1)");
    }
    if (backtrack_max < 0) throw ConfigError("optimizer.backtrack_max: must be >= 0");
    if (!(step_growth >= 1.0)) throw ConfigError("optimizer.step_growth: must be >= 1");
    if (!(step_cap_factor >= 1.0)) throw ConfigError("optimizer.step_cap_factor: must be >= 1");
    if (snapshot_every < 0) throw ConfigError("optimizer.snapshot_every: must be >= 0");
}

Objective objective_of(Algorithm a) {
    return (a == Algorithm::Alg1 || a == Algorithm::Alg2) ? Objective::CoverageCapacity
                                                          : Objective::CapacityPerRegion;
}

bool moves_sites(Algorithm a) { return a == Algorithm::Alg2 || a == Algorithm::Alg4; }

Algorithm algorithm_from_int(int k) {
    if (k < 1 || k > 4) throw ConfigError("algorithm: must be 1, 2, 3 or 4");
    return static_cast<Algorithm>(k);
}

Snapshot take_snapshot(int iteration, const Network& net) {
    Snapshot s;
    s.iteration = iteration;
    for (const BaseStation& bs : net.stations) {
        s.tilt_deg.push_back(bs.tilt_deg);
        s.power_dbm.push_back(bs.power_dbm);
    }
    for (const Site& site : net.sites) {
        s.site_pos.push_back(site.pos);
        s.site_bearing_deg.push_back(site.ref_bearing_deg);
    }
    return s;
}

std::vector<double> project_powers(std::span<const double> powers_dbm, double p_max) {
    std::vector<double> out(powers_dbm.begin(), powers_dbm.end());
    for (double& p : out) p = std::min(p, p_max);
    return out;
}

std::vector<double> project_powers(std::span<const double> powers_dbm,
                                   std::span<const double> p_max) {
    std::vector<double> out(powers_dbm.begin(), powers_dbm.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(out[i], p_max[i]);
    return out;
}

AscentResult ascent_step(const std::function<double(std::span<const double>)>& functional,
                         std::span<const double> params, double current_objective,
                         std::span<const double> direction, double step, Backtracking bt,
                         const std::function<void(std::vector<double>&)>& project) {
    AscentResult res;
    res.params.assign(params.begin(), params.end());
    res.objective = current_objective;
    bool any = false;
    for (std::size_t i = 0; i < direction.size(); ++i) {
        if (!std::isfinite(direction[i])) {
            std::ostringstream msg;
            msg << "non-finite ascent direction at coordinate " << i << " (value " << direction[i]
                << ")";
            throw NonFiniteGradient(msg.str());
        }
        any = any || direction[i] != 0.0;
    }
    if (!any) return res;

    std::vector<double> cand(params.size());
    double s = step;
    for (int t = 0; t <= bt.max_halvings; ++t) {
        for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = params[i] + s * direction[i];
        if (project) project(cand);
        const double value = functional(cand);
        ++res.tries;
        if (std::isfinite(value) && value >= current_objective) {
            res.params = cand;
            res.objective = value;
            res.accepted_step = s;
            return res;
        }
        s *= bt.factor;
    }
    return res;
}

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

void initialize_network(Network& net, const OptimizerConfig& cfg, const Box2& region) {
    std::mt19937_64 rng(cfg.seed);
    if (cfg.init == InitMode::Random) {
        for (BaseStation& bs : net.stations) {
            const double t = -15.0 + 20.0 * uniform01(rng());
            if (bs.tilt_optimizable) bs.tilt_deg = t;
        }
        for (BaseStation& bs : net.stations) {
            if (bs.power_optimizable) bs.power_dbm = bs.power_max_dbm;
        }
    }
    if (cfg.site_init == InitMode::Random) {
        for (Site& site : net.sites) {
            if (!site.deployable) continue;
            const double ux = uniform01(rng());
            const double uy = uniform01(rng());
            site.pos = {region.x0 + (region.x1 - region.x0) * ux,
                        region.y0 + (region.y1 - region.y0) * uy};
        }
        for (Site& site : net.sites) {
            if (!site.deployable) continue;
            site.ref_bearing_deg = wrap_bearing_deg(180.0 - 360.0 * uniform01(rng()));
        }
    }
    net.apply_sites();
}

namespace {

class Runner {
public:
    Runner(Algorithm alg, const OptimizationProblem& problem)
        : alg_(alg),
          objective_(objective_of(alg)),
          grid_(*problem.grid),
          net_(problem.network),
          kpi_(problem.kpi),
          cfg_(problem.optimizer),
          region_(problem.site_region),
          table_(grid_, net_) {
        cfg_.validate();
        kpi_.validate(net_.size());
    }

    RunTrace run(const IterationCallback& on_iteration) {
        RunTrace trace;
        trace.algorithm = alg_;
        trace.seed = cfg_.seed;
        initialize_network(net_, cfg_, region_);
        trace.initial_network = net_;
        table_.sync(net_);
        partition_ = max_rss_partition(table_);
        value_ = evaluate_current();
        trace.objectives.push_back(value_);
        trace.snapshots.push_back(take_snapshot(0, net_));

        std::vector<Family> families{Family::Tilt, Family::Power};
        if (moves_sites(alg_)) {
            families.push_back(Family::SitePosition);
            families.push_back(Family::SiteBearing);
        }

        for (int it = 1; it <= cfg_.max_outer_iters; ++it) {
            const double previous = value_;
            IterationRecord rec;
            rec.iteration = it;
            rec.partition_changed = update_partition();
            for (Family f : families) rec.steps.push_back(family_step(f, it));
            rec.objective = value_;
            trace.objectives.push_back(value_);
            if (on_iteration) on_iteration(rec);
            trace.iterations.push_back(std::move(rec));
            if (cfg_.snapshot_every > 0 && it % cfg_.snapshot_every == 0) {
                trace.snapshots.push_back(take_snapshot(it, net_));
            }
            const double rel = (value_ - previous) / std::max(std::abs(previous), 1e-12);
            if (rel < cfg_.conv_tol) {
                trace.converged = true;
                break;
            }
        }

        update_partition();
        trace.final_objective = value_;
        const int last = static_cast<int>(trace.iterations.size());
        if (trace.snapshots.back().iteration != last) trace.snapshots.push_back(take_snapshot(last, net_));
        trace.final_network = net_;
        trace.final_partition = partition_;
        return trace;
    }

private:
    double evaluate_current() { return evaluate(objective_, table_, partition_, kpi_).total; }

    bool update_partition() {
        table_.sync(net_);
        Partition next = objective_ == Objective::CoverageCapacity
                             ? max_rss_partition(table_)
                             : conditional_partition_update_kpi2(table_, partition_, kpi_);
        const bool changed = !(next == partition_);
        partition_ = std::move(next);
        if (changed) value_ = evaluate_current();
        return changed;
    }

    /// Masked gradient of family f, with coordinates pinned at a bound and
    /// pointing outward zeroed.
    std::vector<double> masked_gradient(Family f, const GradientVector& g, int iteration) const {
        std::vector<double> d = family_values(g, f);
        const std::vector<char> mask = family_mask(net_, f);
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!std::isfinite(d[i])) {
                std::ostringstream msg;
                msg << "non-finite " << family_name(f) << " gradient at coordinate " << i
                    << " in outer iteration " << iteration << " (value " << d[i] << ")";
                throw NonFiniteGradient(msg.str());
            }
            if (!mask[i]) d[i] = 0.0;
        }
        if (f == Family::Power) {
            for (std::size_t n = 0; n < d.size(); ++n) {
                const BaseStation& bs = net_.stations[n];
                if (bs.power_dbm >= bs.power_max_dbm && d[n] > 0.0) d[n] = 0.0;
            }
        } else if (f == Family::Tilt) {
            for (std::size_t n = 0; n < d.size(); ++n) {
                const double t = net_.stations[n].tilt_deg;
                if ((t >= 90.0 && d[n] > 0.0) || (t <= -90.0 && d[n] < 0.0)) d[n] = 0.0;
            }
        }
        return d;
    }

    // Each block (one coordinate, or one site's xy pair) keeps its own step
    // length. It grows while successive gradients agree and shrinks when they
    // disagree; the joint move is then backtracked as a whole, so acceptance
    // still guarantees a non-decreasing objective.
    StepRecord family_step(Family f, int iteration) {
        StepRecord rec;
        rec.family = f;
        table_.sync(net_);
        const GradientVector grad = gradient(objective_, table_, partition_, net_, kpi_, FamilySet::only(f));
        const std::vector<double> g = masked_gradient(f, grad, iteration);
        const std::vector<double> x = family_params(net_, f);
        const std::size_t width = f == Family::SitePosition ? 2 : 1;
        const std::size_t blocks = g.size() / width;
        const int fi = static_cast<int>(f);
        std::vector<double>& delta = delta_[fi];
        std::vector<double>& prev = prev_grad_[fi];
        if (delta.size() != blocks) delta.assign(blocks, cfg_.initial_step(f));
        const double cap = cfg_.initial_step(f) * cfg_.step_cap_factor;

        std::vector<double> dir(g.size(), 0.0);
        for (std::size_t b = 0; b < blocks; ++b) {
            double norm = 0.0;
            double agree = 0.0;
            for (std::size_t k = 0; k < width; ++k) {
                const std::size_t i = b * width + k;
                norm += g[i] * g[i];
                if (!prev.empty()) agree += g[i] * prev[i];
            }
            norm = std::sqrt(norm);
            if (norm == 0.0) continue;
            if (agree > 0.0) {
                delta[b] = std::min(delta[b] * cfg_.step_growth, cap);
            } else if (agree < 0.0) {
                delta[b] *= cfg_.backtrack_factor;
            }
            for (std::size_t k = 0; k < width; ++k) {
                const std::size_t i = b * width + k;
                dir[i] = delta[b] * g[i] / norm;
            }
        }
        prev = g;

        const auto functional = [&](std::span<const double> p) {
            Network trial = net_;
            set_family_params(trial, f, p);
            table_.sync(trial);
            try {
                return evaluate(objective_, table_, partition_, kpi_).total;
            } catch (const DegenerateGeometry&) {
                return -std::numeric_limits<double>::infinity();
            }
        };
        std::function<void(std::vector<double>&)> project;
        if (f == Family::Power) {
            project = [this](std::vector<double>& p) {
                for (std::size_t n = 0; n < p.size(); ++n) {
                    p[n] = std::min(p[n], net_.stations[n].power_max_dbm);
                }
            };
        } else if (f == Family::Tilt) {
            project = [](std::vector<double>& p) {
                for (double& t : p) t = std::clamp(t, -90.0, 90.0);
            };
        } else if (f == Family::SiteBearing) {
            project = [](std::vector<double>& p) {
                for (double& b : p) b = wrap_bearing_deg(b);
            };
        }

        const AscentResult res =
            ascent_step(functional, x, value_, dir, 1.0, {cfg_.backtrack_factor, cfg_.backtrack_max}, project);
        rec.tries = res.tries;
        if (res.accepted_step > 0.0) {
            set_family_params(net_, f, res.params);
            value_ = res.objective;
            double moved = 0.0;
            for (std::size_t b = 0; b < blocks; ++b) {
                delta[b] = std::max(delta[b] * res.accepted_step, kMinStep);
                for (std::size_t k = 0; k < width; ++k) moved = std::max(moved, std::abs(dir[b * width + k]));
            }
            rec.step = moved * res.accepted_step;
        } else if (res.tries > 0) {
            const double shrink = std::pow(cfg_.backtrack_factor, cfg_.backtrack_max + 1);
            for (double& d : delta) d = std::max(d * shrink, kMinStep);
        }
        table_.sync(net_);
        rec.objective = value_;
        return rec;
    }

    static constexpr double kMinStep = 1e-12;

    Algorithm alg_;
    Objective objective_;
    const SampleGrid& grid_;
    Network net_;
    KpiConfig kpi_;
    OptimizerConfig cfg_;
    Box2 region_;
    LinkTable table_;
    Partition partition_;
    double value_ = 0.0;
    std::vector<double> delta_[4];
    std::vector<double> prev_grad_[4];
};

}  // namespace

RunTrace run_algorithm(Algorithm a, const OptimizationProblem& problem,
                       const IterationCallback& on_iteration) {
    if (problem.grid == nullptr) throw ConfigError("optimization problem has no sample grid");
    Runner runner(a, problem);
    return runner.run(on_iteration);
}

RunTrace run_algorithm1(const OptimizationProblem& problem, const IterationCallback& cb) {
    return run_algorithm(Algorithm::Alg1, problem, cb);
}
RunTrace run_algorithm2(const OptimizationProblem& problem, const IterationCallback& cb) {
    return run_algorithm(Algorithm::Alg2, problem, cb);
}
RunTrace run_algorithm3(const OptimizationProblem& problem, const IterationCallback& cb) {
    return run_algorithm(Algorithm::Alg3, problem, cb);
}
RunTrace run_algorithm4(const OptimizationProblem& problem, const IterationCallback& cb) {
    return run_algorithm(Algorithm::Alg4, problem, cb);
}

RunTrace run_with_restarts(Algorithm a, const OptimizationProblem& problem, int restarts,
                           const IterationCallback& on_iteration) {
    if (restarts < 1) throw ConfigError("restarts: must be >= 1");
    RunTrace best;
    for (int k = 0; k < restarts; ++k) {
        OptimizationProblem p = problem;
        p.optimizer.seed = problem.optimizer.seed + static_cast<std::uint64_t>(k);
        RunTrace t = run_algorithm(a, p, on_iteration);
        if (k == 0 || t.final_objective > best.final_objective) best = std::move(t);
    }
    return best;
}

}  // namespace celldeploy
