#pragma once

// Alternating optimization. One outer iteration updates the partition and then
// each parameter family in turn (tilts, powers, site positions, site bearings),
// holding the partition fixed during the parameter steps. Every step is
// accepted only if the objective does not drop, so traces are monotone.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "celldeploy/density.hpp"
#include "celldeploy/gradients.hpp"
#include "celldeploy/kpi.hpp"
#include "celldeploy/network.hpp"

namespace celldeploy {

enum class InitMode { Random, Given };

struct OptimizerConfig {
    int max_outer_iters = 300;
    double step_tilt_deg = 1.0;
    double step_power_db = 1.0;
    double step_pos_m = 10.0;
    double step_bearing_deg = 2.0;
    double backtrack_factor = 0.5;
    int backtrack_max = 12;
    double step_growth = 1.5;    // applied after an accepted step
    double step_cap_factor = 8.0;  // steps never exceed this multiple of their initial value
    double conv_tol = 1e-6;
    std::uint64_t seed = 1;
    int snapshot_every = 0;  // 0 keeps only the initial and final states
    InitMode init = InitMode::Random;       // tilts and powers
    InitMode site_init = InitMode::Random;  // deployable site positions and bearings

    double initial_step(Family f) const;
    void validate() const;
};

enum class Algorithm { Alg1 = 1, Alg2 = 2, Alg3 = 3, Alg4 = 4 };

Objective objective_of(Algorithm a);
bool moves_sites(Algorithm a);
Algorithm algorithm_from_int(int k);

struct StepRecord {
    Family family = Family::Tilt;
    double step = 0.0;  // accepted step size, 0 for a no-op
    int tries = 0;
    double objective = 0.0;
};

struct IterationRecord {
    int iteration = 0;
    double objective = 0.0;
    bool partition_changed = false;
    std::vector<StepRecord> steps;
};

struct Snapshot {
    int iteration = 0;
    std::vector<double> tilt_deg;
    std::vector<double> power_dbm;
    std::vector<Vec2> site_pos;
    std::vector<double> site_bearing_deg;
};

Snapshot take_snapshot(int iteration, const Network& net);

struct RunTrace {
    Algorithm algorithm = Algorithm::Alg1;
    std::uint64_t seed = 0;
    std::vector<double> objectives;  // [0] at the initial state, then one per outer iteration
    std::vector<IterationRecord> iterations;
    std::vector<Snapshot> snapshots;
    bool converged = false;
    double final_objective = 0.0;  // after the closing partition update
    Network initial_network;
    Network final_network;
    Partition final_partition;
};

struct OptimizationProblem {
    const SampleGrid* grid = nullptr;
    Network network;
    KpiConfig kpi;
    OptimizerConfig optimizer;
    Box2 site_region;  // where random site initialization draws positions
};

// ---- building blocks ------------------------------------------------------

/// Componentwise min(rho_n, rho_max).
std::vector<double> project_powers(std::span<const double> powers_dbm, double p_max);
std::vector<double> project_powers(std::span<const double> powers_dbm,
                                   std::span<const double> p_max);

struct AscentResult {
    std::vector<double> params;
    double objective = 0.0;
    double accepted_step = 0.0;  // 0 when every trial lowered the objective
    int tries = 0;
};

struct Backtracking {
    double factor = 0.5;
    int max_halvings = 12;
};

/// Tries params + step * direction (then `project`), shrinking the step until
/// the objective does not decrease. Returns the input unchanged if no trial
/// succeeds. Throws NonFiniteGradient if `direction` holds NaN or Inf.
AscentResult ascent_step(const std::function<double(std::span<const double>)>& functional,
                         std::span<const double> params, double current_objective,
                         std::span<const double> direction, double step, Backtracking bt,
                         const std::function<void(std::vector<double>&)>& project = {});

/// Seeded initialization: tilts ~ U[-15, 5] deg and powers at their maximum
/// (InitMode::Random), then deployable site positions ~ U(region) and bearings
/// ~ U(-180, 180] (site_init Random). Draw order is fixed.
void initialize_network(Network& net, const OptimizerConfig& cfg, const Box2& region);

/// Uniform draw in [0, 1) with 53 random bits.
double uniform01(std::uint64_t bits);

// ---- algorithms -----------------------------------------------------------

using IterationCallback = std::function<void(const IterationRecord&)>;

RunTrace run_algorithm(Algorithm a, const OptimizationProblem& problem,
                       const IterationCallback& on_iteration = {});

RunTrace run_algorithm1(const OptimizationProblem& problem, const IterationCallback& cb = {});
RunTrace run_algorithm2(const OptimizationProblem& problem, const IterationCallback& cb = {});
RunTrace run_algorithm3(const OptimizationProblem& problem, const IterationCallback& cb = {});
RunTrace run_algorithm4(const OptimizationProblem& problem, const IterationCallback& cb = {});

/// Best final objective over seeds seed, seed+1, ..., seed+k-1 (first wins ties).
RunTrace run_with_restarts(Algorithm a, const OptimizationProblem& problem, int restarts,
                           const IterationCallback& on_iteration = {});

}  // namespace celldeploy
