#ifndef DISTCELL_LINEAGE_HPP
#define DISTCELL_LINEAGE_HPP

#include "distcell/grid.hpp"

#include <string>
#include <vector>

namespace distcell {

// One line of the CTC track text format: label, begin frame, end frame,
// parent label (0 = none).
struct TrackRecord {
    std::int32_t label = 0;
    int begin = 0;
    int end = 0;
    std::int32_t parent = 0;
};

// Time-indexed tracking result: per-frame label images whose IDs are track
// labels, plus the track records.
struct Lineage {
    std::vector<LabelImage> frames;
    std::vector<TrackRecord> records;
};

// `L B E P` space-separated, one line per track, newline-terminated.
void write_track_records(const std::string& path, const std::vector<TrackRecord>& records);
std::vector<TrackRecord> read_track_records(const std::string& path);

} // namespace distcell

#endif
