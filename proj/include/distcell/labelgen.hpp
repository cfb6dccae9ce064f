#ifndef DISTCELL_LABELGEN_HPP
#define DISTCELL_LABELGEN_HPP

#include "distcell/grid.hpp"

namespace distcell {

struct LabelGenConfig {
    int closing_radius = 2;
    int scaling_exponent = 3;
};

// The two training representations derived from one label image. Both maps
// share the source shape, take values in [0,1] and are 0 on background.
struct RepresentationPair {
    DistanceMap cell;
    DistanceMap neighbor;

    const Shape& shape() const { return cell.shape(); }
};

// Per-cell Euclidean distance to the nearest non-cell element (adjacent cells
// count as background), normalized per cell to [0,1].
DistanceMap cell_distance(const LabelImage& labels);

// Per-cell inverse normalized distance to the nearest pixel of the closest
// neighboring cell: foreground conversion per cell, EDT, cut to the cell and
// normalized, inverted, composed over cells, grayscale-closed, raised to
// scaling_exponent, masked back to foreground. A cell with no other cell in
// the image maps to all zeros.
DistanceMap neighbor_distance(const LabelImage& labels, int closing_radius,
                              int scaling_exponent);

RepresentationPair make_representation_pair(const LabelImage& labels,
                                            const LabelGenConfig& cfg = {});

// boundary: cell pixels face-adjacent to a different label or background.
// border: boundary pixels face-adjacent to a different nonzero label.
// Test-fixture representations only (legacy comparison methods).
std::pair<Mask, Mask> boundary_and_border_labels(const LabelImage& labels);

} // namespace distcell

#endif
