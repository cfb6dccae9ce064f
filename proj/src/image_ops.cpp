#include "distcell/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

namespace distcell {

std::vector<std::int32_t> LabelImage::labels() const {
    std::vector<std::int32_t> ids;
    for (std::int64_t i = 0; i < grid.size(); ++i)
        if (grid[i] != 0) ids.push_back(grid[i]);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

namespace {

// Sentinel for "no background seen yet"; larger than any reachable squared
// distance but small enough that sums with extents stay exactly representable.
constexpr double kFar = 1e15;

// 1D lower envelope of parabolas, Felzenszwalb/Huttenlocher. f and d may not
// alias. n >= 1.
void dt1d(const double* f, double* d, int* v, double* z, int n) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + static_cast<double>(q) * q) -
                    (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + static_cast<double>(q) * q) -
                 (f[v[k]] + static_cast<double>(v[k]) * v[k])) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        double dq = q - v[k];
        d[q] = dq * dq + f[v[k]];
    }
}

void dt_axis(Grid<double>& g, int axis) {
    const Shape& s = g.shape();
    const int n = s.extent(axis);
    if (n == 1) return;

    std::vector<double> f(n), d(n);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);

    const std::int64_t stride = axis == 2 ? 1
                              : axis == 1 ? s.nx()
                                          : static_cast<std::int64_t>(s.nx()) * s.ny();
    // iterate over all lines perpendicular to `axis`
    const int e0 = axis == 0 ? 1 : s.nz();
    const int e1 = axis == 1 ? 1 : s.ny();
    const int e2 = axis == 2 ? 1 : s.nx();
    for (int a = 0; a < e0; ++a)
        for (int b = 0; b < e1; ++b)
            for (int c = 0; c < e2; ++c) {
                std::int64_t base = s.index(axis == 0 ? 0 : a, axis == 1 ? 0 : b,
                                            axis == 2 ? 0 : c);
                for (int i = 0; i < n; ++i) f[i] = g[base + i * stride];
                dt1d(f.data(), d.data(), v.data(), z.data(), n);
                for (int i = 0; i < n; ++i) g[base + i * stride] = d[i];
            }
}

} // namespace

Grid<double> edt_squared(const Mask& mask) {
    const Shape& s = mask.shape();
    Grid<double> g(s);
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] = mask[i] ? kFar : 0.0;

    dt_axis(g, 2);
    dt_axis(g, 1);
    if (s.nz() > 1) dt_axis(g, 0);

    const double diag_sq = static_cast<double>(s.nz()) * s.nz() +
                           static_cast<double>(s.ny()) * s.ny() +
                           static_cast<double>(s.nx()) * s.nx();
    for (std::int64_t i = 0; i < g.size(); ++i)
        if (g[i] >= kFar) g[i] = diag_sq;
    return g;
}

Grid<double> euclidean_distance_transform(const Mask& mask) {
    Grid<double> g = edt_squared(mask);
    for (std::int64_t i = 0; i < g.size(); ++i) g[i] = std::sqrt(g[i]);
    return g;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& w : k) w /= sum;
    return k;
}

void smooth_axis(Grid<float>& g, int axis, double sigma) {
    const Shape& s = g.shape();
    const int n = s.extent(axis);
    const std::vector<double> kernel = gaussian_kernel(sigma);
    const int radius = static_cast<int>(kernel.size() / 2);

    const std::int64_t stride = axis == 2 ? 1
                              : axis == 1 ? s.nx()
                                          : static_cast<std::int64_t>(s.nx()) * s.ny();
    std::vector<double> line(n), out(n);
    const int e0 = axis == 0 ? 1 : s.nz();
    const int e1 = axis == 1 ? 1 : s.ny();
    const int e2 = axis == 2 ? 1 : s.nx();
    for (int a = 0; a < e0; ++a)
        for (int b = 0; b < e1; ++b)
            for (int c = 0; c < e2; ++c) {
                std::int64_t base = s.index(axis == 0 ? 0 : a, axis == 1 ? 0 : b,
                                            axis == 2 ? 0 : c);
                for (int i = 0; i < n; ++i) line[i] = g[base + i * stride];
                for (int i = 0; i < n; ++i) {
                    double acc = 0.0;
                    for (int j = -radius; j <= radius; ++j) {
                        int idx = std::clamp(i + j, 0, n - 1); // edge replication
                        acc += kernel[j + radius] * line[idx];
                    }
                    out[i] = acc;
                }
                for (int i = 0; i < n; ++i) g[base + i * stride] = static_cast<float>(out[i]);
            }
}

} // namespace

Grid<float> gaussian_smooth(const Grid<float>& g, const std::array<double, 3>& sigma) {
    for (double sv : sigma)
        if (sv < 0.0) throw std::invalid_argument("gaussian_smooth: sigma must be >= 0");
    Grid<float> out = g;
    if (sigma[2] > 0.0) smooth_axis(out, 2, sigma[2]);
    if (sigma[1] > 0.0) smooth_axis(out, 1, sigma[1]);
    if (sigma[0] > 0.0 && g.shape().nz() > 1) smooth_axis(out, 0, sigma[0]);
    return out;
}

namespace {

std::vector<std::array<int, 3>> ball_offsets(int radius, bool two_d) {
    std::vector<std::array<int, 3>> offs;
    const int rz = two_d ? 0 : radius;
    for (int dz = -rz; dz <= rz; ++dz)
        for (int dy = -radius; dy <= radius; ++dy)
            for (int dx = -radius; dx <= radius; ++dx)
                if (dz * dz + dy * dy + dx * dx <= radius * radius)
                    offs.push_back({dz, dy, dx});
    return offs;
}

Grid<float> morph(const Grid<float>& g, const std::vector<std::array<int, 3>>& se, bool dilate) {
    const Shape& s = g.shape();
    Grid<float> out(s);
    for (int z = 0; z < s.nz(); ++z)
        for (int y = 0; y < s.ny(); ++y)
            for (int x = 0; x < s.nx(); ++x) {
                float best = dilate ? -std::numeric_limits<float>::infinity()
                                    : std::numeric_limits<float>::infinity();
                for (const auto& o : se) {
                    int zz = z + o[0], yy = y + o[1], xx = x + o[2];
                    if (!s.contains(zz, yy, xx)) continue;
                    float v = g.at(zz, yy, xx);
                    best = dilate ? std::max(best, v) : std::min(best, v);
                }
                out.at(z, y, x) = best;
            }
    return out;
}

} // namespace

Grid<float> grayscale_closing(const Grid<float>& g, int radius) {
    if (radius <= 0) return g;
    const auto se = ball_offsets(radius, g.shape().nz() == 1);
    return morph(morph(g, se, true), se, false);
}

namespace {

std::vector<std::array<int, 3>> neighbor_offsets(Connectivity conn, bool two_d) {
    std::vector<std::array<int, 3>> offs;
    const int rz = two_d ? 0 : 1;
    for (int dz = -rz; dz <= rz; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                if (dz == 0 && dy == 0 && dx == 0) continue;
                int manhattan = std::abs(dz) + std::abs(dy) + std::abs(dx);
                if (conn == Connectivity::Face && manhattan != 1) continue;
                offs.push_back({dz, dy, dx});
            }
    return offs;
}

} // namespace

LabelImage connected_components(const Mask& mask, Connectivity conn) {
    const Shape& s = mask.shape();
    LabelImage out(s);
    const auto offs = neighbor_offsets(conn, s.nz() == 1);

    std::int32_t next = 1;
    std::deque<std::int64_t> queue;
    for (int z = 0; z < s.nz(); ++z)
        for (int y = 0; y < s.ny(); ++y)
            for (int x = 0; x < s.nx(); ++x) {
                std::int64_t i = s.index(z, y, x);
                if (!mask[i] || out.grid[i] != 0) continue;
                const std::int32_t id = next++;
                out.grid[i] = id;
                queue.push_back(i);
                while (!queue.empty()) {
                    std::int64_t cur = queue.front();
                    queue.pop_front();
                    int cz = static_cast<int>(cur / (static_cast<std::int64_t>(s.nx()) * s.ny()));
                    int rem = static_cast<int>(cur % (static_cast<std::int64_t>(s.nx()) * s.ny()));
                    int cy = rem / s.nx();
                    int cx = rem % s.nx();
                    for (const auto& o : offs) {
                        int zz = cz + o[0], yy = cy + o[1], xx = cx + o[2];
                        if (!s.contains(zz, yy, xx)) continue;
                        std::int64_t ni = s.index(zz, yy, xx);
                        if (mask[ni] && out.grid[ni] == 0) {
                            out.grid[ni] = id;
                            queue.push_back(ni);
                        }
                    }
                }
            }
    return out;
}

std::vector<ObjectStats> object_stats(const LabelImage& labels) {
    const Shape& s = labels.shape();

    struct Accum {
        std::int64_t n = 0;
        std::array<double, 3> sum{};
        std::array<int, 3> lo{}, hi{};
        std::array<std::vector<int>, 3> coords;
    };
    std::map<std::int32_t, Accum> acc;

    for (int z = 0; z < s.nz(); ++z)
        for (int y = 0; y < s.ny(); ++y)
            for (int x = 0; x < s.nx(); ++x) {
                std::int32_t id = labels.grid.at(z, y, x);
                if (id == 0) continue;
                auto [it, fresh] = acc.try_emplace(id);
                Accum& a = it->second;
                const std::array<int, 3> p{z, y, x};
                if (fresh) {
                    a.lo = a.hi = p;
                }
                for (int ax = 0; ax < 3; ++ax) {
                    a.sum[ax] += p[ax];
                    a.lo[ax] = std::min(a.lo[ax], p[ax]);
                    a.hi[ax] = std::max(a.hi[ax], p[ax]);
                    a.coords[ax].push_back(p[ax]);
                }
                ++a.n;
            }

    std::vector<ObjectStats> out;
    out.reserve(acc.size());
    for (auto& [id, a] : acc) {
        ObjectStats st;
        st.id = id;
        st.size = a.n;
        st.bbox_lo = a.lo;
        st.bbox_hi = a.hi;
        for (int ax = 0; ax < 3; ++ax) {
            st.centroid[ax] = a.sum[ax] / static_cast<double>(a.n);
            auto& cs = a.coords[ax];
            auto mid = cs.begin() + (cs.size() - 1) / 2; // lower median
            std::nth_element(cs.begin(), mid, cs.end());
            st.median[ax] = static_cast<double>(*mid);
        }
        out.push_back(st);
    }
    return out;
}

} // namespace distcell
