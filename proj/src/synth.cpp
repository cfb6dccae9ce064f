#include "distcell/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace distcell {

void SynthConfig::validate() const {
    for (int e : extents)
        if (e < 1) throw std::invalid_argument("SynthConfig: extents must be >= 1");
    if (frames < 1) throw std::invalid_argument("SynthConfig: frames must be >= 1");
    if (n_cells < 1) throw std::invalid_argument("SynthConfig: n_cells must be >= 1");
    if (radius_min < 2.0 || radius_max < radius_min)
        throw std::invalid_argument("SynthConfig: invalid radius range");
    if (speed_max < speed_min || speed_min < 0.0)
        throw std::invalid_argument("SynthConfig: invalid speed range");
    if (division_prob < 0.0 || division_prob > 1.0)
        throw std::invalid_argument("SynthConfig: division_prob must be in [0,1]");
    if (noise_std < 0.0) throw std::invalid_argument("SynthConfig: noise_std must be >= 0");
}

namespace {

struct Cell {
    std::int32_t id = 0;
    std::int32_t parent = 0;
    double radius = 0.0;
    std::array<double, 3> pos{}, vel{};
    int birth = 0;
    int end = -1; // last alive frame, -1 while alive
};

struct Generator {
    const SynthConfig& cfg;
    std::mt19937_64 rng;
    bool two_d;
    int ndim;
    Grid<float> background; // static fixed-pattern texture shared by all frames

    explicit Generator(const SynthConfig& c)
        : cfg(c), rng(c.seed), two_d(c.extents[0] == 1), ndim(two_d ? 2 : 3) {
        const auto& e = cfg.extents;
        Shape shape = two_d ? Shape(e[1], e[2]) : Shape(e[0], e[1], e[2]);
        background = Grid<float>(shape, 0.1f);
        // camera-style fixed-pattern structure; anchors the movement
        // estimation the same way static scene content does in real data
        std::uniform_real_distribution<float> u(0.0f, 0.06f);
        for (auto& v : background) v += u(rng);
    }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    }
    double gauss(double sigma) {
        return sigma > 0.0 ? std::normal_distribution<double>(0.0, sigma)(rng) : 0.0;
    }

    std::array<double, 3> random_unit() {
        std::array<double, 3> d{};
        double n = 0.0;
        do {
            for (int ax = two_d ? 1 : 0; ax < 3; ++ax) d[ax] = gauss(1.0);
            n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        } while (n < 1e-6);
        for (double& v : d) v /= n;
        return d;
    }

    void clamp_inside(Cell& c) {
        for (int ax = two_d ? 1 : 0; ax < 3; ++ax)
            c.pos[ax] = std::clamp(c.pos[ax], c.radius + 1.0,
                                   cfg.extents[ax] - c.radius - 2.0);
    }

    static double dist(const Cell& a, const Cell& b) {
        double s = 0.0;
        for (int ax = 0; ax < 3; ++ax) s += (a.pos[ax] - b.pos[ax]) * (a.pos[ax] - b.pos[ax]);
        return std::sqrt(s);
    }

    bool placement_ok(const Cell& c, const std::vector<Cell>& cells, int skip = -1) const {
        const double gap = std::max(cfg.min_gap, 1.0);
        for (std::size_t j = 0; j < cells.size(); ++j) {
            if (static_cast<int>(j) == skip) continue;
            if (dist(c, cells[j]) < c.radius + cells[j].radius + gap) return false;
        }
        return true;
    }

    std::vector<Cell> place_initial() {
        std::vector<Cell> cells;
        const bool pairing = cfg.min_gap < 0.0;
        for (int i = 0; i < cfg.n_cells; ++i) {
            Cell c;
            c.id = i + 1;
            c.radius = uniform(cfg.radius_min, cfg.radius_max);
            const double speed = uniform(cfg.speed_min, cfg.speed_max);
            auto dir = random_unit();
            for (int ax = 0; ax < 3; ++ax) c.vel[ax] = dir[ax] * speed;

            bool placed = false;
            for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
                if (pairing && i % 2 == 1) {
                    // tangent to the previous cell, min_gap < 0 creates a
                    // contact strip
                    const Cell& prev = cells.back();
                    auto d = random_unit();
                    const double r = prev.radius + c.radius + cfg.min_gap;
                    for (int ax = 0; ax < 3; ++ax) c.pos[ax] = prev.pos[ax] + d[ax] * r;
                    bool inside = true;
                    for (int ax = two_d ? 1 : 0; ax < 3; ++ax)
                        if (c.pos[ax] < c.radius + 1.0 ||
                            c.pos[ax] > cfg.extents[ax] - c.radius - 2.0)
                            inside = false;
                    placed = inside && placement_ok(c, cells, static_cast<int>(cells.size()) - 1);
                } else {
                    for (int ax = two_d ? 1 : 0; ax < 3; ++ax)
                        c.pos[ax] = uniform(c.radius + 1.0, cfg.extents[ax] - c.radius - 2.0);
                    placed = placement_ok(c, cells);
                }
            }
            if (!placed) throw std::runtime_error("synth: infeasible packing");
            cells.push_back(c);
        }
        return cells;
    }

    void advance(std::vector<Cell>& cells) {
        for (Cell& c : cells) {
            if (c.end >= 0) continue;
            for (int ax = two_d ? 1 : 0; ax < 3; ++ax) {
                c.pos[ax] += c.vel[ax] + gauss(0.05 * cfg.speed_max);
                if (c.pos[ax] < c.radius + 1.0) {
                    c.pos[ax] = 2.0 * (c.radius + 1.0) - c.pos[ax];
                    c.vel[ax] = -c.vel[ax];
                }
                const double hi = cfg.extents[ax] - c.radius - 2.0;
                if (c.pos[ax] > hi) {
                    c.pos[ax] = 2.0 * hi - c.pos[ax];
                    c.vel[ax] = -c.vel[ax];
                }
                c.pos[ax] = std::clamp(c.pos[ax], c.radius + 1.0, hi);
            }
        }
        // keep cells from swallowing each other entirely
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].end >= 0) continue;
            for (std::size_t j = i + 1; j < cells.size(); ++j) {
                if (cells[j].end >= 0) continue;
                const double limit = 0.7 * (cells[i].radius + cells[j].radius);
                double d = dist(cells[i], cells[j]);
                if (d >= limit) continue;
                auto dir = d < 1e-6 ? random_unit() : std::array<double, 3>{};
                if (d >= 1e-6)
                    for (int ax = 0; ax < 3; ++ax)
                        dir[ax] = (cells[j].pos[ax] - cells[i].pos[ax]) / d;
                for (int ax = 0; ax < 3; ++ax)
                    cells[j].pos[ax] = cells[i].pos[ax] + dir[ax] * limit;
                clamp_inside(cells[j]);
            }
        }
    }

    void divide(std::vector<Cell>& cells, int t, int frames, std::int32_t& next_id) {
        if (cfg.division_prob <= 0.0) return;
        const std::size_t n = cells.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (cells[i].end >= 0) continue;
            // children must stay at a workable size (>= ~6 px radius)
            if (t - cells[i].birth < 2 || t > frames - 3 || cells[i].radius < 8.5) continue;
            if (uniform(0.0, 1.0) >= cfg.division_prob) continue;

            const Cell parent = cells[i]; // push_back below may reallocate
            cells[i].end = t - 1;
            const double rc = parent.radius / std::pow(2.0, 1.0 / ndim);
            auto dir = random_unit();
            for (int side = 0; side < 2; ++side) {
                Cell kid;
                kid.id = next_id++;
                kid.parent = parent.id;
                kid.radius = rc;
                kid.birth = t;
                const double off = (side == 0 ? -1.0 : 1.0) * (rc + 1.0);
                for (int ax = 0; ax < 3; ++ax) {
                    kid.pos[ax] = parent.pos[ax] + dir[ax] * off;
                    kid.vel[ax] = parent.vel[ax] + dir[ax] * (side == 0 ? -0.3 : 0.3);
                }
                clamp_inside(kid);
                cells.push_back(kid);
            }
        }
    }

    void render(const std::vector<Cell>& cells, int t, LabelImage& labels, Grid<float>& raw) {
        const auto& e = cfg.extents;
        Shape shape = two_d ? Shape(e[1], e[2]) : Shape(e[0], e[1], e[2]);
        labels = LabelImage(shape);
        raw = background;

        for (const Cell& c : cells) {
            if (c.birth > t || (c.end >= 0 && c.end < t)) continue;
            const int r = static_cast<int>(std::ceil(c.radius));
            std::array<int, 3> lo{}, hi{};
            for (int ax = 0; ax < 3; ++ax) {
                lo[ax] = std::max(0, static_cast<int>(std::floor(c.pos[ax])) - r - 1);
                hi[ax] = std::min(e[ax] - 1, static_cast<int>(std::ceil(c.pos[ax])) + r + 1);
            }
            if (two_d) lo[0] = hi[0] = 0;
            for (int z = lo[0]; z <= hi[0]; ++z)
                for (int y = lo[1]; y <= hi[1]; ++y)
                    for (int x = lo[2]; x <= hi[2]; ++x) {
                        const double dz = two_d ? 0.0 : z - c.pos[0];
                        const double dy = y - c.pos[1], dx = x - c.pos[2];
                        const double d2 = dz * dz + dy * dy + dx * dx;
                        if (d2 > c.radius * c.radius) continue;
                        std::int32_t& px = labels.grid.at(z, y, x);
                        if (px == 0) px = c.id;
                        const float v =
                            0.1f + 0.85f * static_cast<float>(1.0 - d2 / (c.radius * c.radius));
                        raw.at(z, y, x) = std::max(raw.at(z, y, x), v);
                    }
        }
        if (cfg.noise_std > 0.0)
            for (std::int64_t i = 0; i < raw.size(); ++i)
                raw[i] = std::clamp(raw[i] + static_cast<float>(gauss(cfg.noise_std)),
                                    0.0f, 1.0f);
    }
};

} // namespace

SyntheticSequence generate(const SynthConfig& cfg) {
    cfg.validate();
    Generator gen(cfg);

    std::vector<Cell> cells = gen.place_initial();
    std::int32_t next_id = cfg.n_cells + 1;

    SyntheticSequence seq;
    seq.raw.resize(cfg.frames);
    seq.labels.resize(cfg.frames);
    for (int t = 0; t < cfg.frames; ++t) {
        if (t > 0) {
            gen.advance(cells);
            gen.divide(cells, t, cfg.frames, next_id);
        }
        gen.render(cells, t, seq.labels[t], seq.raw[t]);
    }
    for (const Cell& c : cells)
        seq.records.push_back({c.id, c.birth, c.end >= 0 ? c.end : cfg.frames - 1, c.parent});
    return seq;
}

SyntheticSequence corrupt(SyntheticSequence seq,
                          const std::set<std::pair<int, std::int32_t>>& drop) {
    for (const auto& [frame, id] : drop) {
        if (frame < 0 || frame >= static_cast<int>(seq.labels.size()))
            throw std::invalid_argument("corrupt: frame out of range");
        LabelImage& f = seq.labels[frame];
        std::int64_t removed = 0;
        for (std::int64_t i = 0; i < f.grid.size(); ++i)
            if (f.grid[i] == id) {
                f.grid[i] = 0;
                ++removed;
            }
        if (removed == 0)
            throw std::invalid_argument("corrupt: object " + std::to_string(id) +
                                        " not present in frame " + std::to_string(frame));
    }
    return seq;
}

} // namespace distcell
