#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "celldeploy/channel.hpp"

namespace celldeploy {

/// Three co-located sectors sharing a position, with bearings ref + {0, 120, 240}.
struct Site {
    int id = 0;  // user-facing label (1-based in presets)
    Vec2 pos;
    double ref_bearing_deg = 0.0;
    bool deployable = false;  // position and reference bearing are optimized
    std::array<std::size_t, 3> sectors{};
};

inline constexpr std::array<double, 3> kSectorOffsetsDeg{0.0, 120.0, 240.0};

struct Network {
    std::vector<BaseStation> stations;
    std::vector<Site> sites;
    AntennaPattern pattern;
    PathlossConstants channel;

    std::size_t size() const { return stations.size(); }

    /// Appends a site and its three sectors; sector parameters are taken from `proto`.
    std::size_t add_site(int id, Vec2 pos, double ref_bearing_deg, bool deployable,
                         const BaseStation& proto);

    /// Copies site m's position and bearings onto its sectors.
    void apply_site(std::size_t m);
    void apply_sites();

    /// True when every site's sectors share its position and the 120-degree spacing.
    bool sector_constraints_hold(double tol = 1e-9) const;

    std::size_t deployable_count() const;
};

}  // namespace celldeploy
