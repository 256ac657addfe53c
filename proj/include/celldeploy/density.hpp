#pragma once

// Mixed user density r * lambda_G + (1 - r) * lambda_U and its midpoint-rule
// discretization. Every integral over the target region becomes a weighted
// sum over the samples of a SampleGrid.

#include <array>
#include <span>
#include <vector>

#include "celldeploy/channel.hpp"
#include "celldeploy/partition_types.hpp"

namespace celldeploy {

struct Box2 {
    double x0 = 0.0, x1 = 0.0;
    double y0 = 0.0, y1 = 0.0;
    double area() const { return (x1 - x0) * (y1 - y0); }
};

struct Box3 {
    double x0 = 0.0, x1 = 0.0;
    double y0 = 0.0, y1 = 0.0;
    double z0 = 0.0, z1 = 0.0;
    double volume() const { return (x1 - x0) * (y1 - y0) * (z1 - z0); }
};

struct GaussianComponent {
    double weight = 1.0;
    Vec2 mean;
    double cov_xx = 1.0;
    double cov_xy = 0.0;
    double cov_yy = 1.0;
};

enum class GroundKind { Uniform, GaussianMixture };

struct DensitySpec {
    double r_mix = 1.0;  // ground share of the user mass
    Box2 ground{-750.0, 750.0, -750.0, 750.0};
    double ground_height_m = 1.5;
    GroundKind ground_kind = GroundKind::Uniform;
    std::vector<GaussianComponent> gmm;
    std::vector<Box3> corridors;

    void validate() const;
};

struct GridResolution {
    double ground_m = 25.0;
    double corridor_m = 20.0;   // along the corridor's long axis
    int corridor_cross = 2;     // samples across width and across height
};

struct Sample {
    Location3D loc;
    double weight = 0.0;        // probability mass under the mixture
    double class_weight = 0.0;  // mass conditional on the user class (sums to 1 per class)
};

struct SampleGrid {
    std::vector<Sample> samples;
    GridResolution resolution;

    std::size_t size() const { return samples.size(); }
    double total_weight() const;
    double class_mass(UserClass c) const;
};

/// Mixture pdf sum_i pi_i N(q; mu_i, Sigma_i) in 1/m^2. Throws ConfigError for a
/// covariance that is not positive definite.
double gmm_pdf(Vec2 q, std::span<const GaussianComponent> gmm);

/// Midpoint-rule grid. Ground weights follow lambda_G renormalized over the box
/// to sum to r; corridor weights are uniform per volume and sum to 1 - r.
SampleGrid build_grid(const DensitySpec& spec, const GridResolution& res);

double cell_mass(const SampleGrid& grid, const Partition& partition, std::size_t n);
std::vector<double> cell_masses(const SampleGrid& grid, const Partition& partition,
                                std::size_t num_cells);

}  // namespace celldeploy
