#ifndef DISTCELL_TRACK_HPP
#define DISTCELL_TRACK_HPP

#include "distcell/lineage.hpp"
#include "distcell/match_graph.hpp"

#include <map>
#include <optional>
#include <vector>

namespace distcell {

struct Assignment {
    int time = 0;
    std::int32_t object_label = 0; // label in the segmentation frame
    ObjectStats stats;
};

// One cell's lifetime. A track is active while it has no successors and its
// last assignment lies within the past delta_t frames.
struct Track {
    int id = 0;
    int parent_id = 0;
    std::vector<Assignment> assignments; // strictly increasing times
    Roi roi;
    std::array<double, 3> cum_shift{}; // accumulated since last assignment
    bool closed = false;               // ended by a division

    int last_time() const { return assignments.back().time; }
    const Assignment& last() const { return assignments.back(); }
    bool is_active(int t, int delta_t) const {
        return !closed && !assignments.empty() && t - last_time() <= delta_t;
    }
};

// ROI center moves by the estimated shift, then the window is clamped into
// the image; extents are unchanged.
void update_roi(Roi& roi, const std::array<int, 3>& shift, const Shape& image);

// Forward-traversing tracking engine: movement estimation per active track,
// graph-based matching, division and re-link handling.
class Tracker {
public:
    explicit Tracker(const TrackingConfig& cfg) : cfg_(cfg) { cfg.validate(); }

    // One track per (marked) object of the first frame; ROI centered at the
    // object's median position. Unknown marked IDs raise an error naming the ID.
    void init(const LabelImage& first_labels,
              const std::vector<std::int32_t>* marked = nullptr);

    // Advance from frame t to t+1. Raw frames may be null; movement
    // estimation then falls back to zero shift (flagged).
    void step(int t, const Grid<float>* raw_t, const Grid<float>* raw_t1,
              const LabelImage& labels_t1);

    const std::vector<Track>& tracks() const { return tracks_; }
    bool used_zero_shift_fallback() const { return zero_shift_fallback_; }

    // Relabel frames by track ID, fill re-link gaps with interpolated masks,
    // remove length-1 orphans, substitute empty frames.
    Lineage finalize(const std::vector<LabelImage>& label_frames) const;

private:
    TrackingConfig cfg_;
    std::vector<Track> tracks_;
    Shape image_shape_{1, 1};
    int next_id_ = 1;
    bool zero_shift_fallback_ = false;

    Track make_track(int id, int parent, int time, const ObjectStats& st) const;
};

// Gap filling, orphan removal and empty-frame substitution on completed
// tracks; exposed separately for testing.
Lineage postprocess_lineage(const std::vector<Track>& tracks,
                            const std::vector<LabelImage>& label_frames);

// Convenience driver: init + all steps + finalize over a whole sequence.
// raw_frames may be empty (zero-shift fallback).
Lineage track_sequence(const std::vector<Grid<float>>& raw_frames,
                       const std::vector<LabelImage>& label_frames,
                       const TrackingConfig& cfg,
                       const std::vector<std::int32_t>* marked = nullptr);

} // namespace distcell

#endif
