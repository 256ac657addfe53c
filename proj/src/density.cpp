#include "celldeploy/density.hpp"

#include <cmath>
#include <sstream>

#include "celldeploy/errors.hpp"

namespace celldeploy {

void DensitySpec::validate() const {
    if (!(r_mix >= 0.0 && r_mix <= 1.0)) throw ConfigError("density.r_mix must lie in [0, 1]");
    if (!(ground_height_m >= 0.0)) throw ConfigError("density.ground.height_m must be >= 0");
    if (r_mix > 0.0 && !(ground.area() > 0.0 && ground.x1 > ground.x0)) {
        throw ConfigError("density.ground: empty ground region with r_mix > 0");
    }
    if (r_mix < 1.0 && corridors.empty()) {
        throw ConfigError("density.corridors: no corridors with r_mix < 1");
    }
    for (std::size_t i = 0; i < corridors.size(); ++i) {
        const Box3& c = corridors[i];
        if (!(c.x1 > c.x0 && c.y1 > c.y0 && c.z1 > c.z0) || c.z0 < 0.0) {
            std::ostringstream os;
            os << "density.corridors[" << i << "]: box must have positive volume above ground";
            throw ConfigError(os.str());
        }
    }
    if (ground_kind == GroundKind::GaussianMixture) {
        if (gmm.empty()) throw ConfigError("density.ground.gmm: mixture has no components");
        double total = 0.0;
        for (std::size_t i = 0; i < gmm.size(); ++i) {
            const GaussianComponent& g = gmm[i];
            const double det = g.cov_xx * g.cov_yy - g.cov_xy * g.cov_xy;
            if (!(g.weight > 0.0) || !(g.cov_xx > 0.0) || !(det > 0.0)) {
                std::ostringstream os;
                os << "density.ground.gmm[" << i
                   << "]: weight must be positive and covariance positive definite";
                throw ConfigError(os.str());
            }
            total += g.weight;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw ConfigError("density.ground.gmm: component weights must sum to 1");
        }
    }
}

double SampleGrid::total_weight() const {
    double s = 0.0;
    for (const Sample& q : samples) s += q.weight;
    return s;
}

double SampleGrid::class_mass(UserClass c) const {
    double s = 0.0;
    for (const Sample& q : samples) {
        if (q.loc.user_class == c) s += q.weight;
    }
    return s;
}

double gmm_pdf(Vec2 q, std::span<const GaussianComponent> gmm) {
    double p = 0.0;
    for (const GaussianComponent& g : gmm) {
        const double det = g.cov_xx * g.cov_yy - g.cov_xy * g.cov_xy;
        if (!(g.cov_xx > 0.0) || !(det > 0.0)) {
            throw ConfigError("Gaussian component covariance is not positive definite");
        }
        const double dx = q.x - g.mean.x;
        const double dy = q.y - g.mean.y;
        // (d^T Sigma^-1 d) with the closed-form 2x2 inverse
        const double maha = (g.cov_yy * dx * dx - 2.0 * g.cov_xy * dx * dy + g.cov_xx * dy * dy) / det;
        p += g.weight * std::exp(-0.5 * maha) / (2.0 * kPi * std::sqrt(det));
    }
    return p;
}

namespace {

std::size_t steps_for(double extent, double res) {
    return static_cast<std::size_t>(std::ceil(extent / res - 1e-9));
}

// Ground cells come in even counts so no midpoint lies on the box's centre lines,
// where hexagonal layouts put their central sites. A sample directly below an
// antenna has no azimuth.
std::size_t even_steps_for(double extent, double res) {
    const std::size_t n = steps_for(extent, res);
    return n + (n % 2);
}

void check_resolution(double res, double extent, const char* what) {
    if (!(res > 0.0) || !(res < extent)) {
        std::ostringstream os;
        os << what << " resolution " << res << " must be positive and below the region extent "
           << extent;
        throw ConfigError(os.str());
    }
}

void append_ground(const DensitySpec& spec, const GridResolution& res, SampleGrid& grid) {
    const Box2& g = spec.ground;
    check_resolution(res.ground_m, std::min(g.x1 - g.x0, g.y1 - g.y0), "ground");
    const std::size_t nx = even_steps_for(g.x1 - g.x0, res.ground_m);
    const std::size_t ny = even_steps_for(g.y1 - g.y0, res.ground_m);
    const double dx = (g.x1 - g.x0) / static_cast<double>(nx);
    const double dy = (g.y1 - g.y0) / static_cast<double>(ny);

    const std::size_t first = grid.samples.size();
    double total = 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            Sample s;
            s.loc = {g.x0 + (static_cast<double>(ix) + 0.5) * dx,
                     g.y0 + (static_cast<double>(iy) + 0.5) * dy, spec.ground_height_m,
                     UserClass::Gue};
            const double density = spec.ground_kind == GroundKind::Uniform
                                       ? 1.0
                                       : gmm_pdf({s.loc.x_m, s.loc.y_m}, spec.gmm);
            s.class_weight = density * dx * dy;
            total += s.class_weight;
            grid.samples.push_back(s);
        }
    }
    if (!(total > 0.0)) throw ConfigError("ground density integrates to zero over the region");
    for (std::size_t i = first; i < grid.samples.size(); ++i) {
        grid.samples[i].class_weight /= total;
        grid.samples[i].weight = spec.r_mix * grid.samples[i].class_weight;
    }
}

void append_corridors(const DensitySpec& spec, const GridResolution& res, SampleGrid& grid) {
    if (res.corridor_cross < 1) throw ConfigError("corridor_cross must be >= 1");
    double total_volume = 0.0;
    for (const Box3& c : spec.corridors) total_volume += c.volume();

    for (const Box3& c : spec.corridors) {
        const bool along_x = (c.x1 - c.x0) >= (c.y1 - c.y0);
        const double length = along_x ? c.x1 - c.x0 : c.y1 - c.y0;
        check_resolution(res.corridor_m, length, "corridor");
        const std::size_t n_long = steps_for(length, res.corridor_m);
        const auto n_cross = static_cast<std::size_t>(res.corridor_cross);
        const std::size_t count = n_long * n_cross * n_cross;
        const double mass = c.volume() / total_volume / static_cast<double>(count);

        const auto mid = [](double lo, double hi, std::size_t i, std::size_t n) {
            return lo + (static_cast<double>(i) + 0.5) * (hi - lo) / static_cast<double>(n);
        };
        for (std::size_t il = 0; il < n_long; ++il) {
            for (std::size_t iz = 0; iz < n_cross; ++iz) {
                for (std::size_t iw = 0; iw < n_cross; ++iw) {
                    Sample s;
                    if (along_x) {
                        s.loc.x_m = mid(c.x0, c.x1, il, n_long);
                        s.loc.y_m = mid(c.y0, c.y1, iw, n_cross);
                    } else {
                        s.loc.x_m = mid(c.x0, c.x1, iw, n_cross);
                        s.loc.y_m = mid(c.y0, c.y1, il, n_long);
                    }
                    s.loc.z_m = mid(c.z0, c.z1, iz, n_cross);
                    s.loc.user_class = UserClass::Uav;
                    s.class_weight = mass;
                    s.weight = (1.0 - spec.r_mix) * mass;
                    grid.samples.push_back(s);
                }
            }
        }
    }
}

}  // namespace

SampleGrid build_grid(const DensitySpec& spec, const GridResolution& res) {
    spec.validate();
    SampleGrid grid;
    grid.resolution = res;
    if (spec.ground.area() > 0.0) append_ground(spec, res, grid);
    if (!spec.corridors.empty()) append_corridors(spec, res, grid);
    if (grid.samples.empty()) throw ConfigError("density has no samples");
    return grid;
}

double cell_mass(const SampleGrid& grid, const Partition& partition, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.samples.size(); ++i) {
        if (partition.assignment[i] == n) m += grid.samples[i].weight;
    }
    return m;
}

std::vector<double> cell_masses(const SampleGrid& grid, const Partition& partition,
                                std::size_t num_cells) {
    std::vector<double> mass(num_cells, 0.0);
    for (std::size_t i = 0; i < grid.samples.size(); ++i) {
        mass[partition.assignment[i]] += grid.samples[i].weight;
    }
    return mass;
}

}  // namespace celldeploy
