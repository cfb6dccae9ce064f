#ifndef DISTCELL_PHASE_CORR_HPP
#define DISTCELL_PHASE_CORR_HPP

#include "distcell/grid.hpp"

namespace distcell {

// Translation between two equally-shaped crops via phase correlation:
// normalized cross-power spectrum, inverse transform, argmax. The returned
// shift (z,y,x) is the displacement moving content of `a` onto `b`, mapped to
// (-N/2, N/2] per axis. Zero-magnitude spectrum bins are regularized with
// eps = 1e-12. Crops must be at least 8 px along every used axis.
std::array<int, 3> estimate_shift(const Grid<float>& a, const Grid<float>& b);

} // namespace distcell

#endif
