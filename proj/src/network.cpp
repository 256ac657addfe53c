#include "celldeploy/network.hpp"

#include <cmath>

namespace celldeploy {

std::size_t Network::add_site(int id, Vec2 pos, double ref_bearing_deg, bool deployable,
                              const BaseStation& proto) {
    Site site;
    site.id = id;
    site.pos = pos;
    site.ref_bearing_deg = wrap_bearing_deg(ref_bearing_deg);
    site.deployable = deployable;
    const std::size_t m = sites.size();
    for (std::size_t k = 0; k < 3; ++k) {
        BaseStation bs = proto;
        bs.id = static_cast<int>(stations.size());
        bs.site_id = static_cast<int>(m);
        site.sectors[k] = stations.size();
        stations.push_back(bs);
    }
    sites.push_back(site);
    apply_site(m);
    return m;
}

void Network::apply_site(std::size_t m) {
    Site& site = sites[m];
    site.ref_bearing_deg = wrap_bearing_deg(site.ref_bearing_deg);
    for (std::size_t k = 0; k < 3; ++k) {
        BaseStation& bs = stations[site.sectors[k]];
        bs.pos = site.pos;
        bs.bearing_deg = wrap_bearing_deg(site.ref_bearing_deg + kSectorOffsetsDeg[k]);
    }
}

void Network::apply_sites() {
    for (std::size_t m = 0; m < sites.size(); ++m) apply_site(m);
}

bool Network::sector_constraints_hold(double tol) const {
    for (const Site& site : sites) {
        for (std::size_t k = 0; k < 3; ++k) {
            const BaseStation& bs = stations[site.sectors[k]];
            if (std::abs(bs.pos.x - site.pos.x) > tol || std::abs(bs.pos.y - site.pos.y) > tol) {
                return false;
            }
            const double expected = site.ref_bearing_deg + kSectorOffsetsDeg[k];
            if (std::abs(wrap_bearing_deg(bs.bearing_deg - expected)) > tol) return false;
        }
    }
    return true;
}

std::size_t Network::deployable_count() const {
    std::size_t n = 0;
    for (const Site& s : sites) n += s.deployable ? 1 : 0;
    return n;
}

}  // namespace celldeploy
