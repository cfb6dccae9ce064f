#ifndef DISTCELL_PIPELINE_HPP
#define DISTCELL_PIPELINE_HPP

#include "distcell/config.hpp"
#include "distcell/eval.hpp"

#include <string>

namespace distcell {

// zero-padded frame file name, e.g. frame_file("mask", 7) == "mask007.tif"
std::string frame_file(const std::string& prefix, int t);

// CTC-layout ground truth: raw t%03d.tif, labels mask%03d.tif, man_track.txt.
void stage_synth(const SynthConfig& cfg, const std::string& out_dir);

// input: one label TIFF or a directory of mask%03d.tif; writes cell/neighbor
// float maps. Returns the number of frames processed.
int stage_labelgen(const std::string& input, const std::string& out_dir,
                   const LabelGenConfig& cfg, int threads);

// consumes cell%03d.tif/neighbor%03d.tif pairs, emits mask%03d.tif.
// Returns the total object count.
std::int64_t stage_segment(const std::string& maps_dir, const std::string& out_dir,
                           const PipelineConfig& cfg);

// consumes raw t%03d.tif (optional) and label mask%03d.tif frames, emits
// relabeled mask%03d.tif plus res_track.txt. Returns the number of tracks.
int stage_track(const std::string& raw_dir, const std::string& labels_dir,
                const std::string& out_dir, const PipelineConfig& cfg);

// reads two label directories with their track text files (res_track.txt or
// man_track.txt); prints the report as key=value lines, optionally writing
// the same text and/or a JSON file.
ScoreReport stage_score(const std::string& ref_dir, const std::string& res_dir,
                        const std::string& text_out = "", const std::string& json_out = "");

struct PipelineResult {
    ScoreReport score;
    std::int64_t segmented_objects = 0;
    int tracks = 0;
    bool empty_result = false;
};

// synth -> labelgen -> segment -> track -> score inside cfg.work_dir
// (gt/, maps/, seg/, res/, score.txt). Outputs are written atomically and are
// fully determined by the configuration.
PipelineResult run_pipeline(const PipelineConfig& cfg);

} // namespace distcell

#endif
