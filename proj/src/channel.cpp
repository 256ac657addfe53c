#include "celldeploy/channel.hpp"

#include <sstream>

#include "celldeploy/errors.hpp"

namespace celldeploy {

void AntennaPattern::validate() const {
    if (!(theta_3db_deg > 0.0) || !(phi_3db_deg > 0.0)) {
        throw ConfigError("antenna beamwidths must be positive");
    }
    if (!std::isfinite(a_max_dbi)) throw ConfigError("antenna max gain must be finite");
}

void PathlossConstants::validate() const {
    if (!(b_gue > 0.0) || !(b_uav > 0.0)) throw ConfigError("pathloss slopes must be positive");
    if (!std::isfinite(a_gue_db) || !std::isfinite(a_uav_db) || !std::isfinite(noise_dbm)) {
        throw ConfigError("pathloss intercepts and noise power must be finite");
    }
}

double wrap_bearing_deg(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) w += 360.0;
    if (w > 180.0) w -= 360.0;
    return w;
}

namespace {

std::string describe(const BaseStation& bs, const Location3D& q) {
    std::ostringstream os;
    os << "BS " << bs.id << " at (" << bs.pos.x << ", " << bs.pos.y << ", " << bs.height_m
       << ") and user at (" << q.x_m << ", " << q.y_m << ", " << q.z_m << ")";
    return os.str();
}

}  // namespace

double elevation_angle_deg(const BaseStation& bs, const Location3D& q) {
    const double horizontal = std::hypot(q.x_m - bs.pos.x, q.y_m - bs.pos.y);
    const double dz = q.z_m - bs.height_m;
    if (horizontal == 0.0) {
        if (dz == 0.0) throw DegenerateGeometry("coincident " + describe(bs, q));
        return dz > 0.0 ? 90.0 : -90.0;
    }
    return std::atan(dz / horizontal) * kRadToDeg;
}

double azimuth_offset_deg(const BaseStation& bs, const Location3D& q) {
    const double dx = q.x_m - bs.pos.x;
    const double dy = q.y_m - bs.pos.y;
    if (dx == 0.0 && dy == 0.0) {
        throw DegenerateGeometry("azimuth undefined for horizontally coincident " + describe(bs, q));
    }
    // atan2 fixes the half-plane case split; the wrap chooses the integer turn count.
    double off = std::fmod(std::atan2(dy, dx) * kRadToDeg - bs.bearing_deg + 180.0, 360.0);
    if (off < 0.0) off += 360.0;
    return off - 180.0;
}

double azimuth_angle_deg(const BaseStation& bs, const Location3D& q) {
    return bs.bearing_deg + azimuth_offset_deg(bs, q);
}

double antenna_gain_from_offsets_db(const AntennaPattern& pattern, double vertical_offset_deg,
                                    double horizontal_offset_deg) {
    const double kv = 12.0 / (pattern.theta_3db_deg * pattern.theta_3db_deg);
    const double kh = 12.0 / (pattern.phi_3db_deg * pattern.phi_3db_deg);
    return pattern.a_max_dbi - kv * vertical_offset_deg * vertical_offset_deg -
           kh * horizontal_offset_deg * horizontal_offset_deg;
}

double antenna_gain_db(const BaseStation& bs, const AntennaPattern& pattern, const Location3D& q) {
    return antenna_gain_from_offsets_db(pattern, elevation_angle_deg(bs, q) - bs.tilt_deg,
                                        azimuth_offset_deg(bs, q));
}

double distance_3d_m(const BaseStation& bs, const Location3D& q) {
    const double d = std::sqrt((q.x_m - bs.pos.x) * (q.x_m - bs.pos.x) +
                               (q.y_m - bs.pos.y) * (q.y_m - bs.pos.y) +
                               (q.z_m - bs.height_m) * (q.z_m - bs.height_m));
    if (d == 0.0) throw DegenerateGeometry("zero distance between " + describe(bs, q));
    return d;
}

double pathloss_db(const Location3D& q, const BaseStation& bs, const PathlossConstants& consts) {
    return consts.intercept(q.user_class) +
           consts.slope(q.user_class) * std::log10(distance_3d_m(bs, q));
}

double rss_dbm(const BaseStation& bs, const AntennaPattern& pattern, const PathlossConstants& consts,
               const Location3D& q) {
    return bs.power_dbm + antenna_gain_db(bs, pattern, q) - pathloss_db(q, bs, consts);
}

Sinr sinr(std::span<const BaseStation> stations, std::size_t serving, const AntennaPattern& pattern,
          const PathlossConstants& consts, const Location3D& q) {
    double interference = db_to_lin(consts.noise_dbm);
    double own = 0.0;
    for (std::size_t j = 0; j < stations.size(); ++j) {
        const double p = db_to_lin(rss_dbm(stations[j], pattern, consts, q));
        if (j == serving) {
            own = p;
        } else {
            interference += p;
        }
    }
    Sinr s;
    s.lin = own / interference;
    s.db = rss_dbm(stations[serving], pattern, consts, q) - lin_to_db(interference);
    return s;
}

}  // namespace celldeploy
