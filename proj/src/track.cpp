#include "distcell/track.hpp"

#include "distcell/image_ops.hpp"
#include "distcell/phase_corr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace distcell {

void write_track_records(const std::string& path, const std::vector<TrackRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_track_records: cannot open " + path);
    for (const TrackRecord& r : records)
        out << r.label << ' ' << r.begin << ' ' << r.end << ' ' << r.parent << '\n';
}

std::vector<TrackRecord> read_track_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_track_records: cannot open " + path);
    std::vector<TrackRecord> records;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        TrackRecord r;
        if (!(ss >> r.label >> r.begin >> r.end >> r.parent))
            throw std::runtime_error("read_track_records: malformed line: " + line);
        records.push_back(r);
    }
    return records;
}

namespace {

void clamp_roi(Roi& roi, const Shape& image) {
    for (int ax = 0; ax < 3; ++ax) {
        const int size = image.extent(ax);
        const double half = roi.extent[ax] / 2.0;
        if (roi.extent[ax] >= size)
            roi.center[ax] = size / 2.0;
        else
            roi.center[ax] = std::clamp(roi.center[ax], half, size - half);
    }
}

// integer crop window [lo, lo+extent) of the ROI, clamped into the image
std::array<int, 3> crop_origin(const Roi& roi, const Shape& image) {
    std::array<int, 3> lo;
    for (int ax = 0; ax < 3; ++ax) {
        int l = static_cast<int>(std::llround(roi.center[ax] - roi.extent[ax] / 2.0));
        lo[ax] = std::clamp(l, 0, image.extent(ax) - roi.extent[ax]);
    }
    return lo;
}

Grid<float> crop(const Grid<float>& g, const std::array<int, 3>& lo,
                 const std::array<int, 3>& extent) {
    Shape cs = extent[0] == 1 ? Shape(extent[1], extent[2])
                              : Shape(extent[0], extent[1], extent[2]);
    Grid<float> out(cs);
    for (int z = 0; z < extent[0]; ++z)
        for (int y = 0; y < extent[1]; ++y)
            for (int x = 0; x < extent[2]; ++x)
                out.at(z, y, x) = g.at(lo[0] + z, lo[1] + y, lo[2] + x);
    return out;
}

} // namespace

void update_roi(Roi& roi, const std::array<int, 3>& shift, const Shape& image) {
    for (int ax = 0; ax < 3; ++ax) roi.center[ax] += shift[ax];
    clamp_roi(roi, image);
}

Track Tracker::make_track(int id, int parent, int time, const ObjectStats& st) const {
    Track tr;
    tr.id = id;
    tr.parent_id = parent;
    tr.assignments.push_back({time, st.id, st});
    for (int ax = 0; ax < 3; ++ax)
        tr.roi.extent[ax] = std::min(cfg_.roi_extent[ax], image_shape_.extent(ax));
    tr.roi.center = st.median;
    clamp_roi(tr.roi, image_shape_);
    return tr;
}

void Tracker::init(const LabelImage& first_labels, const std::vector<std::int32_t>* marked) {
    image_shape_ = first_labels.shape();
    tracks_.clear();
    next_id_ = 1;

    const auto stats = object_stats(first_labels);
    if (marked) {
        std::set<std::int32_t> present;
        for (const auto& st : stats) present.insert(st.id);
        for (std::int32_t id : *marked)
            if (!present.count(id))
                throw std::invalid_argument("init: marked object " + std::to_string(id) +
                                            " not present in first frame");
    }
    for (const auto& st : stats) {
        if (marked && std::find(marked->begin(), marked->end(), st.id) == marked->end())
            continue;
        tracks_.push_back(make_track(next_id_++, 0, 0, st));
    }
}

void Tracker::step(int t, const Grid<float>* raw_t, const Grid<float>* raw_t1,
                   const LabelImage& labels_t1) {
    if (labels_t1.shape() != image_shape_)
        throw std::invalid_argument("step: frame shape changed");
    const int ndim = image_shape_.ndim();
    const auto candidates = object_stats(labels_t1);

    // movement estimation per active track
    std::vector<int> active;
    for (std::size_t i = 0; i < tracks_.size(); ++i) {
        Track& tr = tracks_[i];
        if (!tr.is_active(t, cfg_.delta_t)) continue;
        std::array<int, 3> shift{0, 0, 0};
        bool estimable = raw_t && raw_t1;
        if (estimable)
            for (int ax = ndim == 3 ? 0 : 1; ax < 3; ++ax)
                if (tr.roi.extent[ax] < 8) estimable = false;
        if (estimable) {
            const auto lo = crop_origin(tr.roi, image_shape_);
            shift = estimate_shift(crop(*raw_t, lo, tr.roi.extent),
                                   crop(*raw_t1, lo, tr.roi.extent));
        } else {
            zero_shift_fallback_ = true;
        }
        update_roi(tr.roi, shift, image_shape_);
        for (int ax = 0; ax < 3; ++ax) tr.cum_shift[ax] += shift[ax];
        active.push_back(static_cast<int>(i));
    }

    std::vector<TrackObservation> obs;
    obs.reserve(active.size());
    for (int i : active) {
        const Track& tr = tracks_[i];
        TrackObservation o;
        o.track_id = tr.id;
        for (int ax = 0; ax < 3; ++ax)
            o.predicted_pos[ax] = tr.last().stats.centroid[ax] + tr.cum_shift[ax];
        o.last_size = static_cast<double>(tr.last().stats.size);
        o.roi = tr.roi;
        obs.push_back(o);
    }

    MatchGraph graph = build_graph(obs, candidates, cfg_, ndim);
    MatchResult res = solve_matching(graph);

    for (const auto& [oi, ci] : res.links) {
        Track& tr = tracks_[active[oi]];
        const ObjectStats& st = candidates[ci];
        tr.assignments.push_back({t + 1, st.id, st});
        tr.cum_shift = {0.0, 0.0, 0.0};
        tr.roi.center = st.centroid;
        clamp_roi(tr.roi, image_shape_);
    }
    for (const auto& [oi, ca, cb] : res.splits) {
        Track& parent = tracks_[active[oi]];
        parent.closed = true;
        const int parent_id = parent.id;
        tracks_.push_back(make_track(next_id_++, parent_id, t + 1, candidates[ca]));
        tracks_.push_back(make_track(next_id_++, parent_id, t + 1, candidates[cb]));
    }
    if (cfg_.track_all)
        for (int ci : res.appeared)
            tracks_.push_back(make_track(next_id_++, 0, t + 1, candidates[ci]));
}

namespace {

// translate the mask of `label` in `src` by integer delta, writing `track_id`
// into background pixels of `dst`
void stamp_translated(const LabelImage& src, std::int32_t label, LabelImage& dst,
                      const std::array<int, 3>& delta, std::int32_t track_id) {
    const Shape& s = src.shape();
    for (int z = 0; z < s.nz(); ++z)
        for (int y = 0; y < s.ny(); ++y)
            for (int x = 0; x < s.nx(); ++x) {
                if (src.grid.at(z, y, x) != label) continue;
                int zz = z + delta[0], yy = y + delta[1], xx = x + delta[2];
                if (!s.contains(zz, yy, xx)) continue;
                std::int32_t& px = dst.grid.at(zz, yy, xx);
                if (px == 0) px = track_id;
            }
}

std::array<int, 3> round_delta(const std::array<double, 3>& from,
                               const std::array<double, 3>& to, double frac) {
    std::array<int, 3> d;
    for (int ax = 0; ax < 3; ++ax)
        d[ax] = static_cast<int>(std::llround((to[ax] - from[ax]) * frac));
    return d;
}

} // namespace

Lineage postprocess_lineage(const std::vector<Track>& tracks,
                            const std::vector<LabelImage>& label_frames) {
    Lineage out;
    if (label_frames.empty()) return out;
    const int T = static_cast<int>(label_frames.size());
    const Shape& shape = label_frames[0].shape();
    out.frames.assign(T, LabelImage(shape));

    // real masks, relabeled by track ID
    for (const Track& tr : tracks)
        for (const Assignment& a : tr.assignments) {
            const LabelImage& src = label_frames[a.time];
            for (std::int64_t i = 0; i < src.grid.size(); ++i)
                if (src.grid[i] == a.object_label) out.frames[a.time].grid[i] = tr.id;
        }

    std::map<int, std::vector<const Track*>> children; // parent id -> children
    for (const Track& tr : tracks)
        if (tr.parent_id != 0) children[tr.parent_id].push_back(&tr);

    // re-link gaps: masks at linearly interpolated positions
    for (const Track& tr : tracks) {
        for (std::size_t k = 0; k + 1 < tr.assignments.size(); ++k) {
            const Assignment& a = tr.assignments[k];
            const Assignment& b = tr.assignments[k + 1];
            if (b.time - a.time < 2) continue;
            for (int g = a.time + 1; g < b.time; ++g) {
                double frac = static_cast<double>(g - a.time) / (b.time - a.time);
                auto delta = round_delta(a.stats.centroid, b.stats.centroid, frac);
                stamp_translated(label_frames[a.time], a.object_label, out.frames[g],
                                 delta, tr.id);
            }
        }
        // division after a gap: carry the parent up to the frame before the
        // children, toward their midpoint
        auto it = children.find(tr.id);
        if (it != children.end() && !it->second.empty()) {
            const int cb = it->second.front()->assignments.front().time;
            const Assignment& a = tr.assignments.back();
            if (cb - a.time >= 2) {
                std::array<double, 3> mid{};
                for (const Track* c : it->second)
                    for (int ax = 0; ax < 3; ++ax)
                        mid[ax] += c->assignments.front().stats.centroid[ax] /
                                   static_cast<double>(it->second.size());
                for (int g = a.time + 1; g < cb; ++g) {
                    double frac = static_cast<double>(g - a.time) / (cb - a.time);
                    auto delta = round_delta(a.stats.centroid, mid, frac);
                    stamp_translated(label_frames[a.time], a.object_label, out.frames[g],
                                     delta, tr.id);
                }
            }
        }
    }

    // records; length-1 orphans are dropped and their pixels cleared
    for (const Track& tr : tracks) {
        const int begin = tr.assignments.front().time;
        int end = tr.last_time();
        auto it = children.find(tr.id);
        if (it != children.end() && !it->second.empty())
            end = it->second.front()->assignments.front().time - 1;

        const bool orphan = tr.parent_id == 0 && it == children.end() && begin == end &&
                            tr.assignments.size() == 1;
        if (orphan) {
            LabelImage& f = out.frames[begin];
            for (std::int64_t i = 0; i < f.grid.size(); ++i)
                if (f.grid[i] == tr.id) f.grid[i] = 0;
            continue;
        }
        out.records.push_back({tr.id, begin, end, tr.parent_id});
    }

    // frames without any tracked object copy the temporally closest result
    std::vector<int> nonempty;
    for (int t = 0; t < T; ++t) {
        bool any = false;
        for (std::int64_t i = 0; i < out.frames[t].grid.size() && !any; ++i)
            any = out.frames[t].grid[i] != 0;
        if (any) nonempty.push_back(t);
    }
    if (!nonempty.empty() && static_cast<int>(nonempty.size()) < T) {
        for (int t = 0; t < T; ++t) {
            bool empty = !std::binary_search(nonempty.begin(), nonempty.end(), t);
            if (!empty) continue;
            int best = nonempty[0];
            for (int s : nonempty)
                if (std::abs(s - t) < std::abs(best - t)) best = s;
            out.frames[t] = out.frames[best];
            for (TrackRecord& r : out.records) {
                bool present = false;
                for (std::int64_t i = 0; i < out.frames[t].grid.size() && !present; ++i)
                    present = out.frames[t].grid[i] == r.label;
                if (present) {
                    r.begin = std::min(r.begin, t);
                    r.end = std::max(r.end, t);
                }
            }
        }
    }
    return out;
}

Lineage Tracker::finalize(const std::vector<LabelImage>& label_frames) const {
    return postprocess_lineage(tracks_, label_frames);
}

Lineage track_sequence(const std::vector<Grid<float>>& raw_frames,
                       const std::vector<LabelImage>& label_frames,
                       const TrackingConfig& cfg, const std::vector<std::int32_t>* marked) {
    if (label_frames.empty()) return {};
    Tracker tracker(cfg);
    tracker.init(label_frames[0], marked);
    const bool have_raw = raw_frames.size() == label_frames.size();
    for (int t = 0; t + 1 < static_cast<int>(label_frames.size()); ++t)
        tracker.step(t, have_raw ? &raw_frames[t] : nullptr,
                     have_raw ? &raw_frames[t + 1] : nullptr, label_frames[t + 1]);
    return tracker.finalize(label_frames);
}

} // namespace distcell
