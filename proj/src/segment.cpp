#include "distcell/segment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>

namespace distcell {

void SegmentationConfig::validate() const {
    if (!(rho_mask > 0.0 && rho_mask < 1.0))
        throw std::invalid_argument("SegmentationConfig: rho_mask must be in (0,1)");
    if (!(rho_seed > 0.0 && rho_seed < 1.0))
        throw std::invalid_argument("SegmentationConfig: rho_seed must be in (0,1)");
    if (min_seed_area < 1)
        throw std::invalid_argument("SegmentationConfig: min_seed_area must be >= 1");
    for (double sv : sigma)
        if (sv < 0.0) throw std::invalid_argument("SegmentationConfig: sigma must be >= 0");
}

namespace {

Mask threshold_above(const Grid<float>& g, double thr) {
    Mask m(g.shape(), 0);
    for (std::int64_t i = 0; i < g.size(); ++i) m[i] = g[i] > thr ? 1 : 0;
    return m;
}

// seed candidates from already-smoothed maps, optionally restricted to a
// footprint, with the small-seed filter applied
LabelImage seeds_from_smoothed(const Grid<float>& cell_s, const Grid<float>& neigh_s,
                               double rho_seed, const SegmentationConfig& cfg,
                               const Mask* restrict_to) {
    Mask cand(cell_s.shape(), 0);
    for (std::int64_t i = 0; i < cand.size(); ++i) {
        if (restrict_to && !(*restrict_to)[i]) continue;
        double v = static_cast<double>(cell_s[i]) -
                   std::pow(static_cast<double>(neigh_s[i]),
                            static_cast<double>(cfg.neighbor_power));
        cand[i] = v > rho_seed ? 1 : 0;
    }
    LabelImage comps = connected_components(cand, cfg.seed_connectivity);

    std::vector<std::int64_t> area;
    for (std::int64_t i = 0; i < comps.grid.size(); ++i) {
        std::int32_t id = comps.grid[i];
        if (id == 0) continue;
        if (id > static_cast<std::int32_t>(area.size())) area.resize(id, 0);
        ++area[id - 1];
    }
    // drop small components, compact the surviving IDs
    std::vector<std::int32_t> remap(area.size() + 1, 0);
    std::int32_t next = 1;
    for (std::size_t k = 0; k < area.size(); ++k)
        if (area[k] >= cfg.min_seed_area) remap[k + 1] = next++;
    for (std::int64_t i = 0; i < comps.grid.size(); ++i)
        comps.grid[i] = remap[comps.grid[i]];
    return comps;
}

} // namespace

Mask extract_mask(const DistanceMap& cell_pred, const SegmentationConfig& cfg) {
    cfg.validate();
    return threshold_above(gaussian_smooth(cell_pred, cfg.sigma), cfg.rho_mask);
}

LabelImage extract_seeds(const DistanceMap& cell_pred, const DistanceMap& neighbor_pred,
                         const SegmentationConfig& cfg) {
    cfg.validate();
    if (cell_pred.shape() != neighbor_pred.shape())
        throw std::invalid_argument("extract_seeds: maps must share shape");
    Grid<float> cell_s = gaussian_smooth(cell_pred, cfg.sigma);
    Grid<float> neigh_s = gaussian_smooth(neighbor_pred, cfg.sigma);
    return seeds_from_smoothed(cell_s, neigh_s, cfg.rho_seed, cfg, nullptr);
}

LabelImage watershed_assign(const Mask& mask, const LabelImage& seeds,
                            const DistanceMap& cell_pred_smoothed) {
    const Shape& s = mask.shape();
    if (seeds.shape() != s || cell_pred_smoothed.shape() != s)
        throw std::invalid_argument("watershed_assign: shape mismatch");

    LabelImage out(s);
    bool clipped = false;
    // max-heap on priority, ties resolved toward lower linear index
    struct Item {
        float prio;
        std::int64_t idx;
    };
    auto cmp = [](const Item& a, const Item& b) {
        if (a.prio != b.prio) return a.prio < b.prio;
        return a.idx > b.idx;
    };
    std::priority_queue<Item, std::vector<Item>, decltype(cmp)> heap(cmp);

    std::int64_t n_seed_px = 0;
    for (std::int64_t i = 0; i < s.size(); ++i) {
        if (seeds.grid[i] == 0) continue;
        if (!mask[i]) {
            clipped = true;
            continue;
        }
        out.grid[i] = seeds.grid[i];
        heap.push({cell_pred_smoothed[i], i});
        ++n_seed_px;
    }
    if (clipped)
        std::fprintf(stderr, "watershed_assign: seed pixels outside the mask were clipped\n");
    if (n_seed_px == 0) {
        std::fprintf(stderr, "watershed_assign: no seeds, returning no objects\n");
        return out;
    }

    const std::int64_t plane = static_cast<std::int64_t>(s.nx()) * s.ny();
    const bool two_d = s.nz() == 1;
    while (!heap.empty()) {
        Item it = heap.top();
        heap.pop();
        const std::int64_t i = it.idx;
        const std::int32_t label = out.grid[i];
        int z = static_cast<int>(i / plane);
        int rem = static_cast<int>(i % plane);
        int y = rem / s.nx();
        int x = rem % s.nx();
        auto grow = [&](int zz, int yy, int xx) {
            if (!s.contains(zz, yy, xx)) return;
            std::int64_t ni = s.index(zz, yy, xx);
            if (!mask[ni] || out.grid[ni] != 0) return;
            out.grid[ni] = label;
            heap.push({cell_pred_smoothed[ni], ni});
        };
        if (!two_d) {
            grow(z - 1, y, x);
            grow(z + 1, y, x);
        }
        grow(z, y - 1, x);
        grow(z, y + 1, x);
        grow(z, y, x - 1);
        grow(z, y, x + 1);
    }
    return out;
}

LabelImage split_merged(const LabelImage& labels, const RepresentationPair& preds,
                        const SegmentationConfig& cfg) {
    cfg.validate();
    const auto stats = object_stats(labels);
    if (stats.size() < 2) return labels;

    double mean_size = 0.0;
    for (const auto& st : stats) mean_size += static_cast<double>(st.size);
    mean_size /= static_cast<double>(stats.size());

    Grid<float> cell_s = gaussian_smooth(preds.cell, cfg.sigma);
    Grid<float> neigh_s = gaussian_smooth(preds.neighbor, cfg.sigma);

    LabelImage out = labels;
    std::int32_t next_label = 0;
    for (const auto& st : stats) next_label = std::max(next_label, st.id);
    ++next_label;

    for (const auto& st : stats) {
        if (static_cast<double>(st.size) <= cfg.split_factor * mean_size) continue;

        Mask footprint(labels.shape(), 0);
        for (std::int64_t i = 0; i < labels.grid.size(); ++i)
            footprint[i] = labels.grid[i] == st.id ? 1 : 0;

        double rho = cfg.rho_seed;
        for (int iter = 0; iter < cfg.split_max_iter; ++iter) {
            rho += cfg.split_rho_step;
            if (rho > cfg.split_rho_cap) break;
            LabelImage seeds = seeds_from_smoothed(cell_s, neigh_s, rho, cfg, &footprint);
            const auto seed_ids = seeds.labels();
            if (seed_ids.size() < 2) continue;

            LabelImage local = watershed_assign(footprint, seeds, cell_s);
            // replace the object: new labels in ascending local-label order
            std::vector<std::int32_t> remap(seed_ids.back() + 1, 0);
            for (std::int32_t sid : seed_ids) remap[sid] = next_label++;
            for (std::int64_t i = 0; i < out.grid.size(); ++i)
                if (footprint[i])
                    out.grid[i] = local.grid[i] ? remap[local.grid[i]] : 0;
            break;
        }
    }
    return out;
}

LabelImage segment_frame(const RepresentationPair& preds, const SegmentationConfig& cfg) {
    cfg.validate();
    if (preds.cell.shape() != preds.neighbor.shape())
        throw std::invalid_argument("segment_frame: maps must share shape");

    Grid<float> cell_s = gaussian_smooth(preds.cell, cfg.sigma);
    Grid<float> neigh_s = gaussian_smooth(preds.neighbor, cfg.sigma);

    Mask mask = threshold_above(cell_s, cfg.rho_mask);
    LabelImage seeds = seeds_from_smoothed(cell_s, neigh_s, cfg.rho_seed, cfg, nullptr);
    LabelImage labels = watershed_assign(mask, seeds, cell_s);

    if (cfg.split_enabled) labels = split_merged(labels, preds, cfg);
    return labels;
}

} // namespace distcell
