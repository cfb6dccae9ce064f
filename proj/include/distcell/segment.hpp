#ifndef DISTCELL_SEGMENT_HPP
#define DISTCELL_SEGMENT_HPP

#include "distcell/image_ops.hpp"
#include "distcell/labelgen.hpp"

namespace distcell {

struct SegmentationConfig {
    double rho_mask = 0.09;
    double rho_seed = 0.5;
    std::array<double, 3> sigma{0.0, 1.5, 1.5}; // (z,y,x); 3D default uses z=0.5
    int neighbor_power = 2;
    int min_seed_area = 3;                      // px in 2D, voxels in 3D
    Connectivity seed_connectivity = Connectivity::Face;
    bool split_enabled = true;
    double split_factor = 4.0 / 3.0;
    double split_rho_step = 0.05;
    double split_rho_cap = 0.95;
    int split_max_iter = 12;

    static SegmentationConfig defaults(int ndim) {
        SegmentationConfig c;
        c.sigma = ndim == 3 ? std::array<double, 3>{0.5, 1.5, 1.5}
                            : std::array<double, 3>{0.0, 1.5, 1.5};
        return c;
    }

    void validate() const;
};

// Region to flood: smoothed cell prediction strictly above rho_mask.
Mask extract_mask(const DistanceMap& cell_pred, const SegmentationConfig& cfg);

// Seeds: smoothed cell minus smoothed neighbor to the neighbor_power, strictly
// above rho_seed; connected components below min_seed_area are removed.
LabelImage extract_seeds(const DistanceMap& cell_pred, const DistanceMap& neighbor_pred,
                         const SegmentationConfig& cfg);

// Priority-flood watershed on the negated smoothed cell prediction restricted
// to the mask. Seed pixels outside the mask are clipped with a warning; no
// seeds yields an all-background result. Ties resolved in lexicographic pixel
// order.
LabelImage watershed_assign(const Mask& mask, const LabelImage& seeds,
                            const DistanceMap& cell_pred_smoothed);

// Objects larger than split_factor times the mean object size are re-seeded
// with an increasing rho_seed inside their own footprint and re-flooded
// locally when that yields at least two seeds.
LabelImage split_merged(const LabelImage& labels, const RepresentationPair& preds,
                        const SegmentationConfig& cfg);

// Full post-processing: mask, seeds, watershed, optional merged-cell split.
LabelImage segment_frame(const RepresentationPair& preds, const SegmentationConfig& cfg);

} // namespace distcell

#endif
