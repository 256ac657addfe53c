#include "celldeploy/kpi.hpp"

#include <cmath>
#include <sstream>

#include "celldeploy/errors.hpp"
#include "celldeploy/parallel.hpp"

namespace celldeploy {

void KpiConfig::validate(std::size_t num_cells) const {
    if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("kpi.beta must lie in [0, 1]");
    if (!(kappa > 0.0)) throw ConfigError("kpi.kappa must be positive");
    if (!(sinr_floor_lin > 0.0)) throw ConfigError("kpi.sinr_floor_lin must be positive");
    if (!std::isfinite(threshold_db)) throw ConfigError("kpi.threshold_db must be finite");
    if (!(offset >= 0.0)) throw ConfigError("kpi.offset must be >= 0");
    if (!offsets.empty()) {
        if (offsets.size() != num_cells) {
            std::ostringstream os;
            os << "kpi.offset: expected " << num_cells << " per-cell offsets, got " << offsets.size();
            throw ConfigError(os.str());
        }
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            if (!(offsets[i] >= 0.0)) {
                std::ostringstream os;
                os << "kpi.offset[" << i << "] must be >= 0";
                throw ConfigError(os.str());
            }
        }
    }
}

double kpi1_pointwise(double sinr_db, double sinr_lin, const KpiConfig& cfg) {
    const double x = std::max(sinr_lin, cfg.sinr_floor_lin);
    const double slr = std::log2(std::log2(1.0 + x));
    const double cov = sigmoid(cfg.kappa * (sinr_db - cfg.threshold_db));
    return cfg.beta * slr + (1.0 - cfg.beta) * cov;
}

double kpi1_dsinr_db(double sinr_db, double sinr_lin, const KpiConfig& cfg) {
    double d = 0.0;
    if (sinr_lin >= cfg.sinr_floor_lin && cfg.beta != 0.0) {
        d += cfg.beta * kLog2e * kLog2e * kLn10 * 0.1 * sinr_lin /
             ((1.0 + sinr_lin) * std::log2(1.0 + sinr_lin));
    }
    if (cfg.beta != 1.0) {
        const double s = sigmoid(cfg.kappa * (sinr_db - cfg.threshold_db));
        d += cfg.kappa * (1.0 - cfg.beta) * s * (1.0 - s);
    }
    return d;
}

namespace {

struct ChunkSums {
    std::vector<double> per_cell;  // KPI1: value; KPI2: sum w * rate
    std::array<double, 2> per_class{0.0, 0.0};
    std::vector<double> per_cell_class;  // KPI2: [cell * 2 + class] sum w * rate
    double coverage = 0.0;
    double surrogate = 0.0;
    double slr = 0.0;
    double rate = 0.0;
};

std::vector<ChunkSums> accumulate(const LinkTable& table, const Partition& partition,
                                  const KpiConfig& cfg, bool by_cell_class) {
    const std::size_t n_cells = table.num_stations();
    const SampleGrid& grid = table.grid();
    if (partition.size() != table.num_samples()) {
        throw ConfigError("partition size does not match the sample grid");
    }
    return map_chunks<ChunkSums>(table.num_samples(), [&](std::size_t begin, std::size_t end) {
        ChunkSums acc;
        acc.per_cell.assign(n_cells, 0.0);
        if (by_cell_class) acc.per_cell_class.assign(2 * n_cells, 0.0);
        std::vector<double> rss(n_cells);
        for (std::size_t q = begin; q < end; ++q) {
            const Sample& s = grid.samples[q];
            if (s.weight == 0.0) continue;
            const std::size_t m = partition.assignment[q];
            table.rss_lin_row(q, rss);
            const ServingSinr sv = table.serving(q, m, rss);
            const double w = s.weight;
            const double slr = std::log2(std::log2(1.0 + std::max(sv.lin, cfg.sinr_floor_lin)));
            const double sur = sigmoid(cfg.kappa * (sv.db - cfg.threshold_db));
            const double rate = spectral_efficiency(sv.lin);
            const auto cls = static_cast<std::size_t>(s.loc.user_class);
            if (by_cell_class) {
                acc.per_cell[m] += w * rate;
                acc.per_cell_class[2 * m + cls] += w * rate;
            } else {
                const double v = w * (cfg.beta * slr + (1.0 - cfg.beta) * sur);
                acc.per_cell[m] += v;
                acc.per_class[cls] += v;
            }
            acc.coverage += sv.db >= cfg.threshold_db ? w : 0.0;
            acc.surrogate += w * sur;
            acc.slr += w * slr;
            acc.rate += w * rate;
        }
        return acc;
    });
}

template <class Getter>
double reduce_chunks(const std::vector<ChunkSums>& chunks, Getter get) {
    std::vector<double> v;
    v.reserve(chunks.size());
    for (const ChunkSums& c : chunks) v.push_back(get(c));
    return pairwise_sum(v);
}

void fill_common(KpiReport& r, const std::vector<ChunkSums>& chunks) {
    r.coverage_fraction = reduce_chunks(chunks, [](const ChunkSums& c) { return c.coverage; });
    r.coverage_surrogate = reduce_chunks(chunks, [](const ChunkSums& c) { return c.surrogate; });
    r.sum_log_rate = reduce_chunks(chunks, [](const ChunkSums& c) { return c.slr; });
    r.mean_spectral_efficiency = reduce_chunks(chunks, [](const ChunkSums& c) { return c.rate; });
}

}  // namespace

KpiReport eval_P1_gamma1(const LinkTable& table, const Partition& partition, const KpiConfig& cfg) {
    const auto chunks = accumulate(table, partition, cfg, false);
    KpiReport r;
    const std::size_t n_cells = table.num_stations();
    r.per_cell.assign(n_cells, 0.0);
    for (std::size_t n = 0; n < n_cells; ++n) {
        r.per_cell[n] = reduce_chunks(chunks, [n](const ChunkSums& c) { return c.per_cell[n]; });
    }
    for (std::size_t k = 0; k < 2; ++k) {
        r.per_class[k] = reduce_chunks(chunks, [k](const ChunkSums& c) { return c.per_class[k]; });
    }
    r.total = pairwise_sum(r.per_cell);
    fill_common(r, chunks);
    return r;
}

KpiReport eval_P_gamma2(const LinkTable& table, const Partition& partition, const KpiConfig& cfg) {
    const auto chunks = accumulate(table, partition, cfg, true);
    const std::size_t n_cells = table.num_stations();
    const std::vector<double> mass = cell_masses(table.grid(), partition, n_cells);
    KpiReport r;
    r.per_cell.assign(n_cells, 0.0);
    std::vector<double> cls_terms[2];
    for (std::size_t n = 0; n < n_cells; ++n) {
        const double denom = cfg.offset_for(n) + mass[n];
        const double rate = reduce_chunks(chunks, [n](const ChunkSums& c) { return c.per_cell[n]; });
        r.per_cell[n] = denom > 0.0 ? rate / denom : 0.0;
        for (std::size_t k = 0; k < 2; ++k) {
            const double part = reduce_chunks(
                chunks, [n, k](const ChunkSums& c) { return c.per_cell_class[2 * n + k]; });
            cls_terms[k].push_back(denom > 0.0 ? part / denom : 0.0);
        }
    }
    r.per_class = {pairwise_sum(cls_terms[0]), pairwise_sum(cls_terms[1])};
    r.total = pairwise_sum(r.per_cell);
    fill_common(r, chunks);
    return r;
}

KpiReport eval_P1_gamma1(const SampleGrid& grid, const Partition& partition, const Network& net,
                         const KpiConfig& cfg) {
    return eval_P1_gamma1(LinkTable(grid, net), partition, cfg);
}

KpiReport eval_P_gamma2(const SampleGrid& grid, const Partition& partition, const Network& net,
                        const KpiConfig& cfg) {
    return eval_P_gamma2(LinkTable(grid, net), partition, cfg);
}

KpiReport evaluate(Objective objective, const LinkTable& table, const Partition& partition,
                   const KpiConfig& cfg) {
    return objective == Objective::CoverageCapacity ? eval_P1_gamma1(table, partition, cfg)
                                                    : eval_P_gamma2(table, partition, cfg);
}

double coverage_fraction(const SampleGrid& grid, const Partition& partition, const Network& net,
                         double threshold_db) {
    KpiConfig cfg;
    cfg.threshold_db = threshold_db;
    return eval_P1_gamma1(grid, partition, net, cfg).coverage_fraction;
}

std::vector<ServingSinr> serving_sinrs(const LinkTable& table, const Partition& partition) {
    std::vector<ServingSinr> out(table.num_samples());
    std::vector<double> rss(table.num_stations());
    for (std::size_t q = 0; q < table.num_samples(); ++q) {
        table.rss_lin_row(q, rss);
        out[q] = table.serving(q, partition.assignment[q], rss);
    }
    return out;
}

}  // namespace celldeploy
