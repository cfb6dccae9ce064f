#include "distcell/labelgen.hpp"

#include "distcell/image_ops.hpp"

#include <algorithm>
#include <cmath>

namespace distcell {

namespace {

struct Box {
    std::array<int, 3> lo, hi; // inclusive
};

// object bbox expanded by one (clamped); a background ring where it fits,
// which keeps the cropped EDT exact for distances measured inside the cell
Box padded_bbox(const ObjectStats& st, const Shape& s) {
    Box b;
    for (int ax = 0; ax < 3; ++ax) {
        b.lo[ax] = std::max(0, st.bbox_lo[ax] - 1);
        b.hi[ax] = std::min(s.extent(ax) - 1, st.bbox_hi[ax] + 1);
    }
    return b;
}

Shape box_shape(const Box& b) {
    int nz = b.hi[0] - b.lo[0] + 1;
    int ny = b.hi[1] - b.lo[1] + 1;
    int nx = b.hi[2] - b.lo[2] + 1;
    return nz == 1 ? Shape(ny, nx) : Shape(nz, ny, nx);
}

} // namespace

DistanceMap cell_distance(const LabelImage& labels) {
    const Shape& s = labels.shape();
    DistanceMap out(s, 0.0f);
    const auto stats = object_stats(labels);

    for (const ObjectStats& st : stats) {
        const Box box = padded_bbox(st, s);
        const Shape cs = box_shape(box);
        Mask m(cs, 0);
        for (int z = box.lo[0]; z <= box.hi[0]; ++z)
            for (int y = box.lo[1]; y <= box.hi[1]; ++y)
                for (int x = box.lo[2]; x <= box.hi[2]; ++x)
                    m.at(z - box.lo[0], y - box.lo[1], x - box.lo[2]) =
                        labels.grid.at(z, y, x) == st.id ? 1 : 0;

        Grid<double> d = euclidean_distance_transform(m);
        double maxd = 0.0;
        for (std::int64_t i = 0; i < d.size(); ++i)
            if (m[i]) maxd = std::max(maxd, d[i]);
        if (maxd <= 0.0) continue;

        for (int z = box.lo[0]; z <= box.hi[0]; ++z)
            for (int y = box.lo[1]; y <= box.hi[1]; ++y)
                for (int x = box.lo[2]; x <= box.hi[2]; ++x) {
                    if (labels.grid.at(z, y, x) != st.id) continue;
                    double v = d.at(z - box.lo[0], y - box.lo[1], x - box.lo[2]) / maxd;
                    out.at(z, y, x) = static_cast<float>(v);
                }
    }
    return out;
}

DistanceMap neighbor_distance(const LabelImage& labels, int closing_radius,
                              int scaling_exponent) {
    if (closing_radius < 0)
        throw std::invalid_argument("neighbor_distance: closing_radius must be >= 0");
    if (scaling_exponent < 1)
        throw std::invalid_argument("neighbor_distance: scaling_exponent must be >= 1");

    const Shape& s = labels.shape();
    DistanceMap composed(s, 0.0f);
    const auto ids = labels.labels();

    for (std::int32_t id : ids) {
        // the selected cell and background become foreground, every other
        // cell background; the EDT then measures distance to the nearest
        // neighboring cell
        Mask m(s, 0);
        for (std::int64_t i = 0; i < m.size(); ++i) {
            std::int32_t v = labels.grid[i];
            m[i] = (v == 0 || v == id) ? 1 : 0;
        }
        Grid<double> d = euclidean_distance_transform(m);

        double maxd = 0.0;
        for (std::int64_t i = 0; i < d.size(); ++i)
            if (labels.grid[i] == id) maxd = std::max(maxd, d[i]);
        if (maxd <= 0.0) continue;

        for (std::int64_t i = 0; i < d.size(); ++i)
            if (labels.grid[i] == id)
                composed[i] = static_cast<float>(1.0 - d[i] / maxd);
    }

    DistanceMap closed = grayscale_closing(composed, closing_radius);

    DistanceMap out(s, 0.0f);
    for (std::int64_t i = 0; i < out.size(); ++i) {
        if (labels.grid[i] == 0) continue; // background stays 0
        double v = std::pow(static_cast<double>(closed[i]),
                            static_cast<double>(scaling_exponent));
        out[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return out;
}

RepresentationPair make_representation_pair(const LabelImage& labels,
                                            const LabelGenConfig& cfg) {
    RepresentationPair pair;
    pair.cell = cell_distance(labels);
    pair.neighbor = neighbor_distance(labels, cfg.closing_radius, cfg.scaling_exponent);
    return pair;
}

std::pair<Mask, Mask> boundary_and_border_labels(const LabelImage& labels) {
    const Shape& s = labels.shape();
    Mask boundary(s, 0), border(s, 0);
    const bool two_d = s.nz() == 1;
    const int rz = two_d ? 0 : 1;

    for (int z = 0; z < s.nz(); ++z)
        for (int y = 0; y < s.ny(); ++y)
            for (int x = 0; x < s.nx(); ++x) {
                std::int32_t id = labels.grid.at(z, y, x);
                if (id == 0) continue;
                bool is_boundary = false, is_border = false;
                auto probe = [&](int zz, int yy, int xx) {
                    if (!s.contains(zz, yy, xx)) return;
                    std::int32_t n = labels.grid.at(zz, yy, xx);
                    if (n != id) {
                        is_boundary = true;
                        if (n != 0) is_border = true;
                    }
                };
                for (int dz = -rz; dz <= rz; ++dz)
                    if (dz != 0) probe(z + dz, y, x);
                probe(z, y - 1, x);
                probe(z, y + 1, x);
                probe(z, y, x - 1);
                probe(z, y, x + 1);
                boundary.at(z, y, x) = is_boundary ? 1 : 0;
                border.at(z, y, x) = is_border ? 1 : 0;
            }
    return {boundary, border};
}

} // namespace distcell
