#pragma once

#include <cstdint>
#include <vector>

namespace celldeploy {

/// Serving cell of every grid sample (the discrete form of the cells V_n).
struct Partition {
    std::vector<std::uint32_t> assignment;
    std::uint64_t version = 0;

    std::size_t size() const { return assignment.size(); }
    friend bool operator==(const Partition& a, const Partition& b) {
        return a.assignment == b.assignment;
    }
};

}  // namespace celldeploy
