#include "celldeploy/gradients.hpp"

#include <cmath>

#include "celldeploy/density.hpp"
#include "celldeploy/errors.hpp"
#include "celldeploy/parallel.hpp"

namespace celldeploy {

std::string family_name(Family f) {
    switch (f) {
        case Family::Tilt: return "tilt";
        case Family::Power: return "power";
        case Family::SitePosition: return "site_position";
        case Family::SiteBearing: return "site_bearing";
    }
    return "?";
}

FamilySet FamilySet::only(Family f) {
    FamilySet s{false, false, false, false};
    switch (f) {
        case Family::Tilt: s.tilt = true; break;
        case Family::Power: s.power = true; break;
        case Family::SitePosition: s.site_position = true; break;
        case Family::SiteBearing: s.site_bearing = true; break;
    }
    return s;
}

bool FamilySet::contains(Family f) const {
    switch (f) {
        case Family::Tilt: return tilt;
        case Family::Power: return power;
        case Family::SitePosition: return site_position;
        case Family::SiteBearing: return site_bearing;
    }
    return false;
}

namespace {

struct LinkPowers {
    std::vector<double> rss_lin;
    double noise_lin = 0.0;

    double interference_excluding(std::size_t n) const {
        double s = noise_lin;
        for (std::size_t j = 0; j < rss_lin.size(); ++j) {
            if (j != n) s += rss_lin[j];
        }
        return s;
    }
    double sinr_lin(std::size_t n) const { return rss_lin[n] / interference_excluding(n); }
};

LinkPowers link_powers(const Network& net, const Location3D& q) {
    LinkPowers lp;
    lp.noise_lin = db_to_lin(net.channel.noise_dbm);
    lp.rss_lin.reserve(net.size());
    for (const BaseStation& bs : net.stations) {
        lp.rss_lin.push_back(db_to_lin(rss_dbm(bs, net.pattern, net.channel, q)));
    }
    return lp;
}

double vertical_offset(const BaseStation& bs, const Location3D& q) {
    return elevation_angle_deg(bs, q) - bs.tilt_deg;
}

}  // namespace

double dsinr_dtilt(const Network& net, std::size_t m, std::size_t n, const Location3D& q) {
    const double own = net.pattern.tilt_slope() * vertical_offset(net.stations[n], q);
    if (m == n) return own;
    const LinkPowers lp = link_powers(net, q);
    return -own * lp.rss_lin[n] * lp.sinr_lin(m) / lp.rss_lin[m];
}

double dsinr_dpower(const Network& net, std::size_t m, std::size_t n, const Location3D& q) {
    if (m == n) return 1.0;
    const LinkPowers lp = link_powers(net, q);
    return -lp.rss_lin[n] * lp.sinr_lin(m) / lp.rss_lin[m];
}

Vec2 grad_rss_position(const BaseStation& bs, const AntennaPattern& pattern,
                       const PathlossConstants& consts, const Location3D& q) {
    const Vec2 d_vec{bs.pos.x - q.x_m, bs.pos.y - q.y_m};
    const double d2 = d_vec.x * d_vec.x + d_vec.y * d_vec.y;
    if (d2 == 0.0) {
        throw DegenerateGeometry("position gradient undefined for a user horizontally at the BS");
    }
    const double d = std::sqrt(d2);
    const double dh = bs.height_m - q.z_m;
    const double r2 = d2 + dh * dh;

    // Angles are in degrees, so their position derivatives carry 180/pi.
    const double v_off = vertical_offset(bs, q);
    const double h_off = azimuth_offset_deg(bs, q);
    const double elev_scale = kRadToDeg * dh / (d * r2);
    const Vec2 d_elev{elev_scale * d_vec.x, elev_scale * d_vec.y};
    const Vec2 d_azim{kRadToDeg * (q.y_m - bs.pos.y) / d2, kRadToDeg * (bs.pos.x - q.x_m) / d2};
    const double pl_scale = consts.slope(q.user_class) * kLog10e / r2;

    const double kv = pattern.tilt_slope() * v_off;
    const double kh = pattern.bearing_slope() * h_off;
    return {-kv * d_elev.x - kh * d_azim.x - pl_scale * d_vec.x,
            -kv * d_elev.y - kh * d_azim.y - pl_scale * d_vec.y};
}

Vec2 grad_sinr_sitepos(const Network& net, std::size_t site, std::size_t n, const Location3D& q) {
    const Site& s = net.sites.at(site);
    const LinkPowers lp = link_powers(net, q);
    const auto weighted = [&](std::size_t t) {
        return lp.rss_lin[t] *
               grad_rss_position(net.stations[t], net.pattern, net.channel, q);
    };
    bool own = false;
    for (std::size_t t : s.sectors) own = own || t == n;
    if (!own) {
        Vec2 sum;
        for (std::size_t t : s.sectors) sum += weighted(t);
        return (-lp.sinr_lin(n) / lp.rss_lin[n]) * sum;
    }
    Vec2 others;
    for (std::size_t t : s.sectors) {
        if (t != n) others += weighted(t);
    }
    return grad_rss_position(net.stations[n], net.pattern, net.channel, q) -
           (1.0 / lp.interference_excluding(n)) * others;
}

double dsinr_dbearing(const Network& net, std::size_t site, std::size_t n, const Location3D& q) {
    const Site& s = net.sites.at(site);
    const LinkPowers lp = link_powers(net, q);
    const double k = net.pattern.bearing_slope();
    bool own = false;
    for (std::size_t t : s.sectors) own = own || t == n;
    if (!own) {
        double sum = 0.0;
        for (std::size_t t : s.sectors) {
            sum += lp.rss_lin[t] * azimuth_offset_deg(net.stations[t], q);
        }
        return -lp.sinr_lin(n) / lp.rss_lin[n] * k * sum;
    }
    double others = 0.0;
    for (std::size_t t : s.sectors) {
        if (t != n) others += lp.rss_lin[t] * azimuth_offset_deg(net.stations[t], q);
    }
    return k * (azimuth_offset_deg(net.stations[n], q) - lp.sinr_lin(n) / lp.rss_lin[n] * others);
}

namespace {

struct GradChunk {
    std::vector<double> tilt;
    std::vector<double> power;
    std::vector<double> pos;  // 2 per site
    std::vector<double> bearing;
};

GradientVector accumulate_gradient(Objective objective, const LinkTable& table,
                                   const Partition& partition, const Network& net,
                                   const KpiConfig& cfg, FamilySet which) {
    const std::size_t n_st = net.size();
    const std::size_t n_sites = net.sites.size();
    const SampleGrid& grid = table.grid();
    if (table.num_stations() != n_st) throw ConfigError("link table does not match the network");

    std::vector<double> inv_denom;
    if (objective == Objective::CapacityPerRegion) {
        const std::vector<double> mass = cell_masses(grid, partition, n_st);
        inv_denom.resize(n_st);
        for (std::size_t n = 0; n < n_st; ++n) {
            const double d = cfg.offset_for(n) + mass[n];
            inv_denom[n] = d > 0.0 ? 1.0 / d : 0.0;
        }
    }
    std::vector<std::size_t> moving_sites;
    for (std::size_t s = 0; s < n_sites; ++s) {
        if (net.sites[s].deployable) moving_sites.push_back(s);
    }
    const bool want_sites = (which.site_position || which.site_bearing) && !moving_sites.empty();
    const double k_tilt = net.pattern.tilt_slope();
    const double k_bear = net.pattern.bearing_slope();

    const auto chunks = map_chunks<GradChunk>(table.num_samples(), [&](std::size_t begin,
                                                                       std::size_t end) {
        GradChunk acc;
        acc.tilt.assign(which.tilt ? n_st : 0, 0.0);
        acc.power.assign(which.power ? n_st : 0, 0.0);
        acc.pos.assign(which.site_position ? 2 * n_sites : 0, 0.0);
        acc.bearing.assign(which.site_bearing ? n_sites : 0, 0.0);
        std::vector<double> rss(n_st);
        for (std::size_t q = begin; q < end; ++q) {
            const Sample& smp = grid.samples[q];
            if (smp.weight == 0.0) continue;
            const std::size_t m = partition.assignment[q];
            table.rss_lin_row(q, rss);
            const ServingSinr sv = table.serving(q, m, rss);
            double c = objective == Objective::CoverageCapacity
                           ? kpi1_dsinr_db(sv.db, sv.lin, cfg)
                           : rate_dsinr_db(sv.lin) * inv_denom[m];
            c *= smp.weight;
            if (c == 0.0) continue;
            const double inv_i = 1.0 / sv.interference_lin;
            const auto coeff = [&](std::size_t t) { return t == m ? c : -c * rss[t] * inv_i; };

            if (which.tilt || which.power) {
                for (std::size_t n = 0; n < n_st; ++n) {
                    const double e = coeff(n);
                    if (which.tilt) {
                        acc.tilt[n] += e * k_tilt * (table.elevation_deg(q, n) - net.stations[n].tilt_deg);
                    }
                    if (which.power) acc.power[n] += e;
                }
            }
            if (!want_sites) continue;
            for (std::size_t s : moving_sites) {
                for (std::size_t t : net.sites[s].sectors) {
                    const double e = coeff(t);
                    const BaseStation& bs = net.stations[t];
                    if (which.site_position) {
                        const Vec2 g = grad_rss_position(bs, net.pattern, net.channel, smp.loc);
                        acc.pos[2 * s] += e * g.x;
                        acc.pos[2 * s + 1] += e * g.y;
                    }
                    if (which.site_bearing) {
                        acc.bearing[s] += e * k_bear * azimuth_offset_deg(bs, smp.loc);
                    }
                }
            }
        }
        return acc;
    });

    const auto reduce = [&](auto member, std::size_t size) {
        std::vector<double> out(size, 0.0);
        std::vector<double> parts(chunks.size());
        for (std::size_t i = 0; i < size; ++i) {
            for (std::size_t c = 0; c < chunks.size(); ++c) parts[c] = (chunks[c].*member)[i];
            out[i] = pairwise_sum(parts);
        }
        return out;
    };

    GradientVector g;
    g.d_tilt = which.tilt ? reduce(&GradChunk::tilt, n_st) : std::vector<double>(n_st, 0.0);
    g.d_power = which.power ? reduce(&GradChunk::power, n_st) : std::vector<double>(n_st, 0.0);
    const std::vector<double> pos =
        which.site_position ? reduce(&GradChunk::pos, 2 * n_sites) : std::vector<double>(2 * n_sites, 0.0);
    g.d_site_bearing = which.site_bearing ? reduce(&GradChunk::bearing, n_sites)
                                          : std::vector<double>(n_sites, 0.0);
    g.d_site_pos.resize(n_sites);
    for (std::size_t s = 0; s < n_sites; ++s) g.d_site_pos[s] = {pos[2 * s], pos[2 * s + 1]};

    for (std::size_t n = 0; n < n_st; ++n) {
        if (!net.stations[n].tilt_optimizable) g.d_tilt[n] = 0.0;
        if (!net.stations[n].power_optimizable) g.d_power[n] = 0.0;
    }
    for (std::size_t s = 0; s < n_sites; ++s) {
        if (!net.sites[s].deployable) {
            g.d_site_pos[s] = {};
            g.d_site_bearing[s] = 0.0;
        }
    }
    return g;
}

}  // namespace

GradientVector grad_P1_gamma1(const LinkTable& table, const Partition& partition, const Network& net,
                              const KpiConfig& cfg) {
    return accumulate_gradient(Objective::CoverageCapacity, table, partition, net, cfg,
                               FamilySet::tune_only());
}

GradientVector grad_P2_gamma1(const LinkTable& table, const Partition& partition, const Network& net,
                              const KpiConfig& cfg) {
    return accumulate_gradient(Objective::CoverageCapacity, table, partition, net, cfg,
                               FamilySet::all());
}

GradientVector grad_P_gamma2(const LinkTable& table, const Partition& partition, const Network& net,
                             const KpiConfig& cfg, FamilySet which) {
    return accumulate_gradient(Objective::CapacityPerRegion, table, partition, net, cfg, which);
}

GradientVector gradient(Objective objective, const LinkTable& table, const Partition& partition,
                        const Network& net, const KpiConfig& cfg, FamilySet which) {
    return accumulate_gradient(objective, table, partition, net, cfg, which);
}

std::vector<double> family_params(const Network& net, Family f) {
    std::vector<double> v;
    switch (f) {
        case Family::Tilt:
            for (const BaseStation& bs : net.stations) v.push_back(bs.tilt_deg);
            break;
        case Family::Power:
            for (const BaseStation& bs : net.stations) v.push_back(bs.power_dbm);
            break;
        case Family::SitePosition:
            for (const Site& s : net.sites) {
                v.push_back(s.pos.x);
                v.push_back(s.pos.y);
            }
            break;
        case Family::SiteBearing:
            for (const Site& s : net.sites) v.push_back(s.ref_bearing_deg);
            break;
    }
    return v;
}

void set_family_params(Network& net, Family f, std::span<const double> values) {
    switch (f) {
        case Family::Tilt:
            for (std::size_t n = 0; n < net.size(); ++n) net.stations[n].tilt_deg = values[n];
            break;
        case Family::Power:
            for (std::size_t n = 0; n < net.size(); ++n) net.stations[n].power_dbm = values[n];
            break;
        case Family::SitePosition:
            for (std::size_t s = 0; s < net.sites.size(); ++s) {
                net.sites[s].pos = {values[2 * s], values[2 * s + 1]};
                net.apply_site(s);
            }
            break;
        case Family::SiteBearing:
            for (std::size_t s = 0; s < net.sites.size(); ++s) {
                net.sites[s].ref_bearing_deg = values[s];
                net.apply_site(s);
            }
            break;
    }
}

std::vector<double> family_values(const GradientVector& g, Family f) {
    switch (f) {
        case Family::Tilt: return g.d_tilt;
        case Family::Power: return g.d_power;
        case Family::SitePosition: {
            std::vector<double> v;
            for (const Vec2& p : g.d_site_pos) {
                v.push_back(p.x);
                v.push_back(p.y);
            }
            return v;
        }
        case Family::SiteBearing: return g.d_site_bearing;
    }
    return {};
}

std::vector<char> family_mask(const Network& net, Family f) {
    std::vector<char> mask;
    switch (f) {
        case Family::Tilt:
            for (const BaseStation& bs : net.stations) mask.push_back(bs.tilt_optimizable ? 1 : 0);
            break;
        case Family::Power:
            for (const BaseStation& bs : net.stations) mask.push_back(bs.power_optimizable ? 1 : 0);
            break;
        case Family::SitePosition:
            for (const Site& s : net.sites) {
                mask.push_back(s.deployable ? 1 : 0);
                mask.push_back(s.deployable ? 1 : 0);
            }
            break;
        case Family::SiteBearing:
            for (const Site& s : net.sites) mask.push_back(s.deployable ? 1 : 0);
            break;
    }
    return mask;
}

std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& functional, std::span<const double> x,
    double h) {
    std::vector<double> work(x.begin(), x.end());
    std::vector<double> g(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        work[i] = x[i] + h;
        const double up = functional(work);
        work[i] = x[i] - h;
        const double down = functional(work);
        work[i] = x[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

FrozenObjective::FrozenObjective(Objective objective, const SampleGrid& grid, Network net,
                                 Partition partition, KpiConfig cfg)
    : objective_(objective),
      base_(net),
      work_(std::move(net)),
      partition_(std::move(partition)),
      cfg_(std::move(cfg)),
      table_(grid, work_) {}

double FrozenObjective::value() {
    work_ = base_;
    table_.sync(work_);
    return evaluate(objective_, table_, partition_, cfg_).total;
}

double FrozenObjective::at(Family f, std::span<const double> params) {
    work_ = base_;
    set_family_params(work_, f, params);
    table_.sync(work_);
    return evaluate(objective_, table_, partition_, cfg_).total;
}

FamilyCheck compare_family(Family f, std::span<const double> analytic, std::span<const double> fd,
                           std::span<const char> mask) {
    FamilyCheck c;
    c.family = f;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        if (!mask[i]) continue;
        ++c.coordinates;
        c.scale = std::max({c.scale, std::abs(analytic[i]), std::abs(fd[i])});
        const double err = std::abs(analytic[i] - fd[i]);
        if (!(err <= c.max_abs_error)) {
            c.max_abs_error = err;
            c.worst = i;
        }
    }
    if (!std::isfinite(c.max_abs_error)) {
        c.max_rel_error = c.max_abs_error;
    } else {
        c.max_rel_error = c.scale > 0.0 ? c.max_abs_error / c.scale : 0.0;
    }
    return c;
}

double FdSteps::for_family(Family f) const {
    switch (f) {
        case Family::Tilt: return tilt_deg;
        case Family::Power: return power_db;
        case Family::SitePosition: return pos_m;
        case Family::SiteBearing: return bearing_deg;
    }
    return tilt_deg;
}

std::vector<FamilyCheck> check_gradients(Objective objective, const SampleGrid& grid,
                                         const Partition& partition, const Network& net,
                                         const KpiConfig& cfg, FamilySet which, const FdSteps& h) {
    const LinkTable table(grid, net);
    const GradientVector g = gradient(objective, table, partition, net, cfg, which);
    FrozenObjective frozen(objective, grid, net, partition, cfg);
    std::vector<FamilyCheck> out;
    for (Family f : kAllFamilies) {
        if (!which.contains(f)) continue;
        const std::vector<char> mask = family_mask(net, f);
        bool any = false;
        for (char m : mask) any = any || m;
        if (!any) continue;

        const std::vector<double> x = family_params(net, f);
        std::vector<double> fd(x.size(), 0.0);
        std::vector<double> work = x;
        const double step = h.for_family(f);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!mask[i]) continue;
            work[i] = x[i] + step;
            const double up = frozen.at(f, work);
            work[i] = x[i] - step;
            const double down = frozen.at(f, work);
            work[i] = x[i];
            fd[i] = (up - down) / (2.0 * step);
        }
        const std::vector<double> a = family_values(g, f);
        out.push_back(compare_family(f, a, fd, mask));
    }
    return out;
}

}  // namespace celldeploy
