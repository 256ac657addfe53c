#pragma once

#include <span>
#include <vector>

#include "celldeploy/density.hpp"
#include "celldeploy/network.hpp"

namespace celldeploy {

struct ServingSinr {
    double lin = 0.0;
    double db = 0.0;
    double interference_lin = 0.0;  // other stations plus noise, mW
};

/// Cached link geometry for every (sample, station) pair of a grid.
///
/// Elevation angles and the tilt-independent part of the RSS (max gain minus
/// horizontal pattern loss minus pathloss) only depend on station positions,
/// heights and bearings. sync() recomputes the columns of stations whose
/// geometry changed and copies the current tilts and powers, so tilt and power
/// steps never touch the trigonometry.
///
/// The grid must outlive the table.
class LinkTable {
public:
    LinkTable(const SampleGrid& grid, const Network& net);

    void sync(const Network& net);

    std::size_t num_samples() const { return num_samples_; }
    std::size_t num_stations() const { return num_stations_; }
    const SampleGrid& grid() const { return *grid_; }
    double noise_lin() const { return noise_lin_; }

    double elevation_deg(std::size_t q, std::size_t n) const { return elevation_[q * num_stations_ + n]; }

    double rss_dbm(std::size_t q, std::size_t n) const {
        const std::size_t k = q * num_stations_ + n;
        const double v = elevation_[k] - tilt_[n];
        return power_[n] + static_db_[k] - vertical_coeff_ * v * v;
    }

    /// RSS of every station at sample q, in mW.
    void rss_lin_row(std::size_t q, std::span<double> out) const;

    /// Station with the largest RSS at q; ties go to the lowest index.
    std::size_t strongest(std::size_t q) const;

    ServingSinr serving(std::size_t q, std::size_t m, std::span<const double> rss_lin) const;

private:
    struct GeometryKey {
        Vec2 pos;
        double height_m = 0.0;
        double bearing_deg = 0.0;
        friend bool operator==(const GeometryKey&, const GeometryKey&) = default;
    };

    void compute_column(const Network& net, std::size_t n);

    const SampleGrid* grid_;
    std::size_t num_samples_ = 0;
    std::size_t num_stations_ = 0;
    AntennaPattern pattern_;
    PathlossConstants channel_;
    double vertical_coeff_ = 0.0;
    double noise_lin_ = 0.0;
    std::vector<GeometryKey> keys_;
    std::vector<double> tilt_;
    std::vector<double> power_;
    std::vector<double> elevation_;
    std::vector<double> static_db_;
};

}  // namespace celldeploy
