#include "celldeploy/partition.hpp"

#include <cstdint>

#include "celldeploy/parallel.hpp"

namespace celldeploy {

Partition max_rss_partition(const LinkTable& table) {
    Partition p;
    p.assignment.resize(table.num_samples());
    map_chunks<int>(table.num_samples(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t q = begin; q < end; ++q) {
            p.assignment[q] = static_cast<std::uint32_t>(table.strongest(q));
        }
        return 0;
    });
    return p;
}

Partition max_rss_partition(const SampleGrid& grid, const Network& net) {
    return max_rss_partition(LinkTable(grid, net));
}

Partition conditional_partition_update_kpi2(const LinkTable& table, const Partition& current,
                                            const KpiConfig& cfg) {
    Partition candidate = max_rss_partition(table);
    if (candidate == current) return current;
    const double before = eval_P_gamma2(table, current, cfg).total;
    const double after = eval_P_gamma2(table, candidate, cfg).total;
    if (after > before) {
        candidate.version = current.version + 1;
        return candidate;
    }
    return current;
}

Partition conditional_partition_update_kpi2(const SampleGrid& grid, const Network& net,
                                            const Partition& current, const KpiConfig& cfg) {
    return conditional_partition_update_kpi2(LinkTable(grid, net), current, cfg);
}

}  // namespace celldeploy
