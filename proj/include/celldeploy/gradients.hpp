#pragma once

// Analytic gradients of the performance functionals with the partition held
// fixed, plus the central-difference oracle used to check them.
//
// All angle derivatives are per degree. For the serving cell m of a sample,
//   d SINR_dB^(m) / dx = sum_t e_t d RSS_dBm^(t) / dx,
//   e_m = 1,  e_t = -RSS_lin^(t) / (sum_{j != m} RSS_lin^(j) + noise)  for t != m,
// which covers tilt, power, site position and site bearing uniformly.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "celldeploy/kpi.hpp"
#include "celldeploy/link_table.hpp"
#include "celldeploy/network.hpp"

namespace celldeploy {

enum class Family { Tilt, Power, SitePosition, SiteBearing };

inline constexpr Family kAllFamilies[] = {Family::Tilt, Family::Power, Family::SitePosition,
                                          Family::SiteBearing};

std::string family_name(Family f);

struct FamilySet {
    bool tilt = true;
    bool power = true;
    bool site_position = true;
    bool site_bearing = true;

    static FamilySet tune_only() { return {true, true, false, false}; }
    static FamilySet all() { return {}; }
    static FamilySet only(Family f);
    bool contains(Family f) const;
};

struct GradientVector {
    std::vector<double> d_tilt;          // per station, per degree
    std::vector<double> d_power;         // per station, per dB
    std::vector<Vec2> d_site_pos;        // per site, per meter
    std::vector<double> d_site_bearing;  // per site, per degree
};

// Single-link derivatives of SINR_dB of cell m at q.

double dsinr_dtilt(const Network& net, std::size_t m, std::size_t n, const Location3D& q);
double dsinr_dpower(const Network& net, std::size_t m, std::size_t n, const Location3D& q);

/// Gradient of RSS_dBm of `bs` at q with respect to the antenna's horizontal position.
Vec2 grad_rss_position(const BaseStation& bs, const AntennaPattern& pattern,
                       const PathlossConstants& consts, const Location3D& q);

Vec2 grad_sinr_sitepos(const Network& net, std::size_t site, std::size_t n, const Location3D& q);
double dsinr_dbearing(const Network& net, std::size_t site, std::size_t n, const Location3D& q);

// Functional gradients. Entries of non-optimizable stations and fixed sites are 0.

GradientVector grad_P1_gamma1(const LinkTable& table, const Partition& partition, const Network& net,
                              const KpiConfig& cfg);
GradientVector grad_P2_gamma1(const LinkTable& table, const Partition& partition, const Network& net,
                              const KpiConfig& cfg);
GradientVector grad_P_gamma2(const LinkTable& table, const Partition& partition, const Network& net,
                             const KpiConfig& cfg, FamilySet which);

GradientVector gradient(Objective objective, const LinkTable& table, const Partition& partition,
                        const Network& net, const KpiConfig& cfg, FamilySet which);

// Parameter vectors per family. Site positions flatten to (x0, y0, x1, y1, ...).

std::vector<double> family_params(const Network& net, Family f);
void set_family_params(Network& net, Family f, std::span<const double> values);
std::vector<double> family_values(const GradientVector& g, Family f);
/// 1 where the coordinate is optimizable.
std::vector<char> family_mask(const Network& net, Family f);

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h.
std::vector<double> finite_difference_gradient(
    const std::function<double(std::span<const double>)>& functional, std::span<const double> x,
    double h);

/// Objective with a frozen partition, re-evaluated as one family of parameters moves.
class FrozenObjective {
public:
    FrozenObjective(Objective objective, const SampleGrid& grid, Network net, Partition partition,
                    KpiConfig cfg);

    double value();
    double at(Family f, std::span<const double> params);
    const Network& network() const { return base_; }

private:
    Objective objective_;
    Network base_;
    Network work_;
    Partition partition_;
    KpiConfig cfg_;
    LinkTable table_;
};

struct FamilyCheck {
    Family family = Family::Tilt;
    std::size_t coordinates = 0;
    double max_abs_error = 0.0;
    double scale = 0.0;          // max |g| over the family
    double max_rel_error = 0.0;  // max_abs_error / scale
    std::size_t worst = 0;
};

/// Compares analytic and finite-difference values on the masked coordinates.
FamilyCheck compare_family(Family f, std::span<const double> analytic, std::span<const double> fd,
                           std::span<const char> mask);

struct FdSteps {
    double tilt_deg = 1e-3;
    double power_db = 1e-3;
    double pos_m = 1e-3;
    double bearing_deg = 1e-3;

    static FdSteps uniform(double h) { return {h, h, h, h}; }
    double for_family(Family f) const;
};

/// Analytic vs frozen-partition central differences for every requested family
/// that has at least one optimizable coordinate.
std::vector<FamilyCheck> check_gradients(Objective objective, const SampleGrid& grid,
                                         const Partition& partition, const Network& net,
                                         const KpiConfig& cfg, FamilySet which, const FdSteps& h);

}  // namespace celldeploy
