#pragma once

// Per-link physical layer: angles, directional gain, pathloss, RSS and SINR
// between one sector antenna and one user location. All angles in degrees.

#include <cmath>
#include <cstdint>
#include <span>

namespace celldeploy {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kRadToDeg = 180.0 / kPi;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kLn10 = 2.30258509299404568402;
inline constexpr double kLog2e = 1.44269504088896340736;
inline constexpr double kLog10e = 0.43429448190325182765;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    friend bool operator==(Vec2, Vec2) = default;
    double norm() const { return std::hypot(x, y); }
};

enum class UserClass : std::uint8_t { Gue = 0, Uav = 1 };

struct Location3D {
    double x_m = 0.0;
    double y_m = 0.0;
    double z_m = 0.0;  // height above ground
    UserClass user_class = UserClass::Gue;
};

struct AntennaPattern {
    double a_max_dbi = 14.0;
    double theta_3db_deg = 10.0;  // vertical half-power beamwidth
    double phi_3db_deg = 65.0;    // horizontal half-power beamwidth

    /// 24 / theta_3dB^2: slope of the vertical gain derivative.
    double tilt_slope() const { return 24.0 / (theta_3db_deg * theta_3db_deg); }
    double bearing_slope() const { return 24.0 / (phi_3db_deg * phi_3db_deg); }
    void validate() const;
};

/// Log-distance pathloss L = a + b log10(d3D) per user class, plus thermal noise.
struct PathlossConstants {
    double a_gue_db = 38.42;
    double b_gue = 30.0;
    double a_uav_db = 34.02;
    double b_uav = 22.0;
    double noise_dbm = -95.0;

    double intercept(UserClass c) const { return c == UserClass::Uav ? a_uav_db : a_gue_db; }
    double slope(UserClass c) const { return c == UserClass::Uav ? b_uav : b_gue; }
    void validate() const;
};

struct BaseStation {
    int id = 0;
    int site_id = -1;  // -1: not part of a sectorized site
    Vec2 pos;
    double height_m = 25.0;
    double tilt_deg = 0.0;     // positive = uptilt
    double bearing_deg = 0.0;  // (-180, 180]
    double power_dbm = 43.0;
    double power_max_dbm = 43.0;
    bool tilt_optimizable = true;
    bool power_optimizable = true;
};

/// Wraps an angle into (-180, 180].
double wrap_bearing_deg(double deg);

inline double db_to_lin(double db) { return std::pow(10.0, 0.1 * db); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Elevation of q seen from the antenna, in (-90, 90); +-90 straight above/below.
/// Throws DegenerateGeometry when q coincides with the antenna in 3D.
double elevation_angle_deg(const BaseStation& bs, const Location3D& q);

/// Azimuth offset phi_{n,q} - phi_n wrapped into [-180, 180].
/// Throws DegenerateGeometry when q is horizontally coincident with the BS.
double azimuth_offset_deg(const BaseStation& bs, const Location3D& q);

/// Azimuth phi_{n,q} of q, unwrapped so that phi_{n,q} - bearing lies in [-180, 180].
double azimuth_angle_deg(const BaseStation& bs, const Location3D& q);

/// Gain from the angular offsets alone (vertical offset = elevation - tilt).
double antenna_gain_from_offsets_db(const AntennaPattern& pattern, double vertical_offset_deg,
                                    double horizontal_offset_deg);

double antenna_gain_db(const BaseStation& bs, const AntennaPattern& pattern, const Location3D& q);

/// 3D distance between antenna and q; throws DegenerateGeometry at zero.
double distance_3d_m(const BaseStation& bs, const Location3D& q);

double pathloss_db(const Location3D& q, const BaseStation& bs, const PathlossConstants& consts);

double rss_dbm(const BaseStation& bs, const AntennaPattern& pattern, const PathlossConstants& consts,
               const Location3D& q);

struct Sinr {
    double db = 0.0;
    double lin = 0.0;
};

/// Wideband SINR of station `serving` at q, all other stations interfering.
Sinr sinr(std::span<const BaseStation> stations, std::size_t serving, const AntennaPattern& pattern,
          const PathlossConstants& consts, const Location3D& q);

inline double sinr_db(std::span<const BaseStation> stations, std::size_t serving,
                      const AntennaPattern& pattern, const PathlossConstants& consts,
                      const Location3D& q) {
    return sinr(stations, serving, pattern, consts, q).db;
}

/// log2(1 + SINR) in bps/Hz.
inline double spectral_efficiency(double sinr_lin) { return std::log2(1.0 + sinr_lin); }

}  // namespace celldeploy
