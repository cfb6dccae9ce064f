#ifndef DISTCELL_CONFIG_HPP
#define DISTCELL_CONFIG_HPP

#include "distcell/errors.hpp"
#include "distcell/match_graph.hpp"
#include "distcell/labelgen.hpp"
#include "distcell/segment.hpp"
#include "distcell/synth.hpp"

#include <string>
#include <vector>

namespace distcell {

// Union of the per-stage configurations plus paths; parsed from a key-value
// text file (one `section.key = value` per line, `#` comments). Unknown keys
// are rejected. Defaults are the published parameter set.
struct PipelineConfig {
    std::string work_dir = "pipeline_out";
    int threads = 1;

    SynthConfig synth;
    LabelGenConfig labelgen;
    SegmentationConfig segment;
    TrackingConfig tracking;

    // logical (y,x) or (z,y,x); empty = dimensionality default at stage time
    std::vector<double> sigma;
    std::vector<int> roi;
};

PipelineConfig parse_config_file(const std::string& path);

// Apply one `key = value` assignment; throws ConfigError for unknown keys or
// malformed values.
void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value);

// Resolve the logical sigma/roi overrides onto physical per-axis arrays for
// data of the given dimensionality.
SegmentationConfig resolve_segmentation(const PipelineConfig& cfg, int ndim);
TrackingConfig resolve_tracking(const PipelineConfig& cfg, int ndim);

} // namespace distcell

#endif
