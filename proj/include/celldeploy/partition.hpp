#pragma once

#include "celldeploy/kpi.hpp"
#include "celldeploy/link_table.hpp"
#include "celldeploy/partition_types.hpp"

namespace celldeploy {

/// Each sample goes to the station with the largest RSS (lowest index on ties).
Partition max_rss_partition(const LinkTable& table);
Partition max_rss_partition(const SampleGrid& grid, const Network& net);

/// Replaces `current` by the max-RSS partition only if that strictly raises the
/// capacity-per-region functional; otherwise returns `current` unchanged.
Partition conditional_partition_update_kpi2(const LinkTable& table, const Partition& current,
                                            const KpiConfig& cfg);
Partition conditional_partition_update_kpi2(const SampleGrid& grid, const Network& net,
                                            const Partition& current, const KpiConfig& cfg);

}  // namespace celldeploy
