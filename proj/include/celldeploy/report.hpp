#pragma once

// Report artifacts: weighted per-class CDFs, KPI summary, partition map,
// station table and optimizer trace. Every file starts with a provenance
// header naming the scenario hash and the seed; nothing time-dependent is
// written, so identical inputs give identical bytes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "celldeploy/kpi.hpp"
#include "celldeploy/optimizer.hpp"
#include "celldeploy/scenario.hpp"

namespace celldeploy {

struct CdfPoint {
    double value = 0.0;
    double cum_weight = 0.0;          // mixture mass at or below value
    double cum_class_fraction = 0.0;  // same, conditional on the class (ends at 1)
};

struct ClassCdf {
    UserClass user_class = UserClass::Gue;
    double class_mass = 0.0;
    std::vector<CdfPoint> points;  // sorted by value
};

/// Weighted empirical CDF of `values` (one per sample) over the samples of class c.
ClassCdf class_cdf(const SampleGrid& grid, std::span<const double> values, UserClass c);

/// Smallest value whose conditional cumulative fraction reaches 1/2 (NaN if empty).
double weighted_median(const ClassCdf& cdf);

struct ReportBundle {
    std::string command;
    std::string scenario_hash;
    std::uint64_t seed = 0;
    Scenario input;           // effective scenario the command ran on
    Scenario final_scenario;  // final configuration, loadable by eval
    Objective objective = Objective::CoverageCapacity;
    Partition partition;      // max-RSS partition of the final configuration
    std::vector<ServingSinr> sinr;
    KpiReport kpi;
    std::array<ClassCdf, 2> sinr_cdf;
    std::array<ClassCdf, 2> rate_cdf;
    std::optional<RunTrace> trace;
    const SampleGrid* grid = nullptr;

    double median_sinr_db(UserClass c) const { return weighted_median(sinr_cdf[static_cast<int>(c)]); }
    double median_rate(UserClass c) const { return weighted_median(rate_cdf[static_cast<int>(c)]); }
};

/// Evaluates `final_net` with the max-RSS partition and assembles the bundle.
ReportBundle make_report(const std::string& command, const Scenario& input, const Network& final_net,
                         Objective objective, const SampleGrid& grid, std::optional<RunTrace> trace);

std::string provenance_line(const ReportBundle& b);

/// Writes every artifact plus manifest.txt into out_dir (created if needed).
/// Returns the file names in manifest order.
std::vector<std::string> write_report(const ReportBundle& b, const std::filesystem::path& out_dir);

/// Shortest text that parses back to exactly v.
std::string format_double(double v);

}  // namespace celldeploy
