#pragma once

// Problem instances: the scenario file (JSON with a fixed key order), the
// hexagonal case-study preset and the glue that turns a scenario into an
// optimization problem.
//
// A canonical file is what save_scenario() writes; load followed by save
// reproduces it byte for byte.

#include <filesystem>
#include <string>
#include <vector>

#include "celldeploy/density.hpp"
#include "celldeploy/kpi.hpp"
#include "celldeploy/network.hpp"
#include "celldeploy/optimizer.hpp"

namespace celldeploy {

enum class Application { TuneOnly, Deploy };

struct Scenario {
    Application application = Application::TuneOnly;
    Objective objective = Objective::CoverageCapacity;
    Network network;
    DensitySpec density;
    GridResolution resolution;
    KpiConfig kpi;
    OptimizerConfig optimizer;
    /// Free text kept verbatim (reports store provenance here).
    std::string comment;
    /// Field paths that were absent from the file and received defaults.
    std::vector<std::string> defaults_applied;

    /// Throws ConfigError listing every violated invariant.
    std::vector<std::string> problems() const;  // one entry per violated constraint
    void validate() const;
};

std::string application_name(Application a);
std::string objective_name(Objective o);

/// Site centers of a hexagonal layout: the center, then ring k = 1..n_rings,
/// each ring ordered by angle in [0, 360). Ring 1 sits at 30 + 60j degrees.
std::vector<Vec2> hex_layout(int n_rings, double isd_m);

/// 1-based ids of the sites kept fixed in the deploy variant of the case study.
inline constexpr int kCaseStudyFixedSites[] = {1, 8, 10, 12, 14, 16, 18};

/// The 19-site, 57-sector case study.
Scenario preset_case_study(double r_mix, GroundKind gue_kind, Application app);

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical serialization without the comment, as 16 hex digits.
std::string scenario_hash(const Scenario& s);

/// Problem for one of the algorithms; `grid` must outlive the result.
OptimizationProblem make_problem(const Scenario& s, const SampleGrid& grid);

}  // namespace celldeploy
