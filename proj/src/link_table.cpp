#include "celldeploy/link_table.hpp"

#include "celldeploy/errors.hpp"

namespace celldeploy {

namespace {

bool same_pattern(const AntennaPattern& a, const AntennaPattern& b) {
    return a.a_max_dbi == b.a_max_dbi && a.theta_3db_deg == b.theta_3db_deg &&
           a.phi_3db_deg == b.phi_3db_deg;
}

bool same_channel(const PathlossConstants& a, const PathlossConstants& b) {
    return a.a_gue_db == b.a_gue_db && a.b_gue == b.b_gue && a.a_uav_db == b.a_uav_db &&
           a.b_uav == b.b_uav && a.noise_dbm == b.noise_dbm;
}

}  // namespace

LinkTable::LinkTable(const SampleGrid& grid, const Network& net) : grid_(&grid) {
    num_samples_ = grid.size();
    num_stations_ = net.size();
    pattern_ = net.pattern;
    channel_ = net.channel;
    vertical_coeff_ = 12.0 / (pattern_.theta_3db_deg * pattern_.theta_3db_deg);
    noise_lin_ = db_to_lin(channel_.noise_dbm);
    keys_.resize(num_stations_);
    tilt_.resize(num_stations_);
    power_.resize(num_stations_);
    elevation_.resize(num_samples_ * num_stations_);
    static_db_.resize(num_samples_ * num_stations_);
    for (std::size_t n = 0; n < num_stations_; ++n) compute_column(net, n);
    sync(net);
}

void LinkTable::compute_column(const Network& net, std::size_t n) {
    const BaseStation& bs = net.stations[n];
    const double kh = 12.0 / (pattern_.phi_3db_deg * pattern_.phi_3db_deg);
    for (std::size_t q = 0; q < num_samples_; ++q) {
        const Location3D& loc = grid_->samples[q].loc;
        const double az = azimuth_offset_deg(bs, loc);
        const std::size_t k = q * num_stations_ + n;
        elevation_[k] = elevation_angle_deg(bs, loc);
        static_db_[k] = pattern_.a_max_dbi - kh * az * az - pathloss_db(loc, bs, channel_);
    }
    keys_[n] = {bs.pos, bs.height_m, bs.bearing_deg};
}

void LinkTable::sync(const Network& net) {
    if (net.size() != num_stations_) {
        throw ConfigError("LinkTable::sync: station count changed");
    }
    if (!same_pattern(net.pattern, pattern_) || !same_channel(net.channel, channel_)) {
        *this = LinkTable(*grid_, net);
        return;
    }
    for (std::size_t n = 0; n < num_stations_; ++n) {
        const BaseStation& bs = net.stations[n];
        if (!(keys_[n] == GeometryKey{bs.pos, bs.height_m, bs.bearing_deg})) compute_column(net, n);
        tilt_[n] = bs.tilt_deg;
        power_[n] = bs.power_dbm;
    }
}

void LinkTable::rss_lin_row(std::size_t q, std::span<double> out) const {
    for (std::size_t n = 0; n < num_stations_; ++n) out[n] = db_to_lin(rss_dbm(q, n));
}

std::size_t LinkTable::strongest(std::size_t q) const {
    std::size_t best = 0;
    double best_rss = rss_dbm(q, 0);
    for (std::size_t n = 1; n < num_stations_; ++n) {
        const double r = rss_dbm(q, n);
        if (r > best_rss) {
            best_rss = r;
            best = n;
        }
    }
    return best;
}

ServingSinr LinkTable::serving(std::size_t q, std::size_t m, std::span<const double> rss_lin) const {
    double interference = noise_lin_;
    for (std::size_t j = 0; j < num_stations_; ++j) {
        if (j != m) interference += rss_lin[j];
    }
    ServingSinr s;
    s.interference_lin = interference;
    s.lin = rss_lin[m] / interference;
    s.db = rss_dbm(q, m) - lin_to_db(interference);
    return s;
}

}  // namespace celldeploy
