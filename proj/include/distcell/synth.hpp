#ifndef DISTCELL_SYNTH_HPP
#define DISTCELL_SYNTH_HPP

#include "distcell/lineage.hpp"

#include <cstdint>
#include <set>

namespace distcell {

struct SynthConfig {
    std::array<int, 3> extents{1, 256, 256}; // (z,y,x); nz=1 means 2D
    int frames = 1;
    int n_cells = 10;
    double radius_min = 6.0, radius_max = 14.0;
    double speed_min = 0.0, speed_max = 3.0; // px/frame
    double division_prob = 0.0;              // per cell per frame
    double min_gap = 2.0;                    // < 0 places cells as touching pairs
    double noise_std = 0.02;
    std::uint64_t seed = 1;

    void validate() const;
};

// Moving, touching and dividing disk/ball cells with rendered intensities.
// Labels are exact; lineage IDs are stable along tracks; output is fully
// determined by the config.
struct SyntheticSequence {
    std::vector<Grid<float>> raw;
    std::vector<LabelImage> labels;
    std::vector<TrackRecord> records;

    Lineage lineage() const { return {labels, records}; }
};

SyntheticSequence generate(const SynthConfig& cfg);

// Remove the listed (frame, id) masks, keeping the ground-truth lineage for
// scoring. Missing targets are an error.
SyntheticSequence corrupt(SyntheticSequence seq,
                          const std::set<std::pair<int, std::int32_t>>& drop);

} // namespace distcell

#endif
