#pragma once

// Performance functionals over a partitioned sample grid:
//   coverage-capacity   sum_q w_q [beta log2(log2(1+SINR)) + (1-beta) sigmoid(kappa (SINR_dB - T))]
//   capacity-per-region sum_n (o_n + mass_n)^-1 sum_{q in V_n} w_q log2(1+SINR)

#include <array>
#include <vector>

#include "celldeploy/density.hpp"
#include "celldeploy/link_table.hpp"
#include "celldeploy/network.hpp"
#include "celldeploy/partition_types.hpp"

namespace celldeploy {

enum class Objective { CoverageCapacity, CapacityPerRegion };

struct KpiConfig {
    double beta = 0.5;
    double threshold_db = -5.0;
    double kappa = 2.0;
    double offset = 0.002;          // broadcast o_n when `offsets` is empty
    std::vector<double> offsets;    // optional per-cell o_n
    double sinr_floor_lin = 1e-6;   // clamp inside log2(log2(1+x))

    double offset_for(std::size_t n) const { return offsets.empty() ? offset : offsets[n]; }
    void validate(std::size_t num_cells) const;
};

struct KpiReport {
    double total = 0.0;
    std::vector<double> per_cell;
    std::array<double, 2> per_class{0.0, 0.0};  // indexed by UserClass
    double coverage_fraction = 0.0;              // exact indicator SINR_dB >= T
    double coverage_surrogate = 0.0;             // sum w sigmoid(kappa (SINR_dB - T))
    double sum_log_rate = 0.0;                   // sum w log2(log2(1 + SINR))
    double mean_spectral_efficiency = 0.0;       // sum w log2(1 + SINR)
};

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// beta log2(log2(1 + max(sinr_lin, floor))) + (1 - beta) sigmoid(kappa (sinr_db - T)).
double kpi1_pointwise(double sinr_db, double sinr_lin, const KpiConfig& cfg);

/// d kpi1_pointwise / d SINR_dB. The sum-log-rate part is 0 below the floor.
double kpi1_dsinr_db(double sinr_db, double sinr_lin, const KpiConfig& cfg);

/// d log2(1 + SINR) / d SINR_dB.
inline double rate_dsinr_db(double sinr_lin) {
    return kLog2e * kLn10 * 0.1 * sinr_lin / (1.0 + sinr_lin);
}

KpiReport eval_P1_gamma1(const LinkTable& table, const Partition& partition, const KpiConfig& cfg);
KpiReport eval_P1_gamma1(const SampleGrid& grid, const Partition& partition, const Network& net,
                         const KpiConfig& cfg);

KpiReport eval_P_gamma2(const LinkTable& table, const Partition& partition, const KpiConfig& cfg);
KpiReport eval_P_gamma2(const SampleGrid& grid, const Partition& partition, const Network& net,
                        const KpiConfig& cfg);

KpiReport evaluate(Objective objective, const LinkTable& table, const Partition& partition,
                   const KpiConfig& cfg);

double coverage_fraction(const SampleGrid& grid, const Partition& partition, const Network& net,
                         double threshold_db);

/// Serving SINR of every sample under a partition.
std::vector<ServingSinr> serving_sinrs(const LinkTable& table, const Partition& partition);

}  // namespace celldeploy
