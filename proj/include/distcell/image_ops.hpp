#ifndef DISTCELL_IMAGE_OPS_HPP
#define DISTCELL_IMAGE_OPS_HPP

#include "distcell/grid.hpp"

namespace distcell {

enum class Connectivity { Face, Full };

// Exact squared Euclidean distance to the nearest background (0) element,
// computed with the per-axis lower-envelope scheme. Background elements are 0.
// If the grid contains no background at all, every element is clamped to the
// squared image diagonal (the largest distance representable in the grid).
Grid<double> edt_squared(const Mask& mask);

// sqrt of edt_squared; same all-foreground clamp (image diagonal length).
Grid<double> euclidean_distance_transform(const Mask& mask);

// Separable Gaussian convolution, edge replication at borders.
// sigma is physical (z,y,x); a component of 0 is the identity along that axis.
Grid<float> gaussian_smooth(const Grid<float>& g, const std::array<double, 3>& sigma);

// Grayscale dilation followed by erosion with a discrete disk/ball of the
// given radius. Out-of-bounds elements are ignored in the max/min.
Grid<float> grayscale_closing(const Grid<float>& g, int radius);

// Maximal connected foreground regions, consecutive IDs starting at 1 in
// lexicographic first-element order.
LabelImage connected_components(const Mask& mask, Connectivity conn = Connectivity::Face);

// One record per distinct nonzero ID, ascending. Lower median for even counts.
std::vector<ObjectStats> object_stats(const LabelImage& labels);

} // namespace distcell

#endif
