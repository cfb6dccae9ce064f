// distcell: distance-map cell segmentation and lineage tracking pipeline.
//
// Subcommands: synth, labelgen, segment, track, score, pipeline.

#include "distcell/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

using namespace distcell;

namespace {

// shared --config plus the per-parameter overrides; overrides win
struct CommonOpts {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_override_flag(CLI::App* cmd, CommonOpts& opts, const std::string& flag,
                       const std::string& key, const std::string& desc) {
    cmd->add_option_function<std::string>(
           flag,
           [&opts, key](const std::string& v) { opts.overrides.push_back({key, v}); }, desc)
        ->type_name("VALUE");
}

PipelineConfig assemble_config(const CommonOpts& opts) {
    PipelineConfig cfg;
    if (!opts.config_path.empty()) cfg = parse_config_file(opts.config_path);
    for (const auto& [key, value] : opts.overrides) apply_config_entry(cfg, key, value);
    if (const char* env = std::getenv("DISTCELL_THREADS"))
        cfg.threads = std::max(1, std::atoi(env));
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance-map cell segmentation and lineage tracking"};
    app.require_subcommand(1);

    CommonOpts opts;
    std::string input, output, raw_dir, labels_dir, ref_dir, res_dir, json_out;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", opts.config_path, "key = value configuration file");
        add_override_flag(cmd, opts, "--rho-mask", "segment.rho_mask", "mask threshold");
        add_override_flag(cmd, opts, "--rho-seed", "segment.rho_seed", "seed threshold");
        add_override_flag(cmd, opts, "--sigma", "segment.sigma",
                          "smoothing sigma, e.g. 1.5,1.5 or 1.5,1.5,0.5");
        add_override_flag(cmd, opts, "--delta-t", "tracking.delta_t", "re-link window");
        add_override_flag(cmd, opts, "--alpha", "tracking.alpha", "split size-ratio bound");
        add_override_flag(cmd, opts, "--beta", "tracking.beta", "split sum-ratio bound");
        add_override_flag(cmd, opts, "--roi", "tracking.roi", "ROI extents, e.g. 150,150");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic CTC-layout sequence");
    synth->add_option("--out", output, "output directory")->required();
    add_common(synth);
    add_override_flag(synth, opts, "--frames", "synth.frames", "number of frames");
    add_override_flag(synth, opts, "--n-cells", "synth.n_cells", "initial cell count");
    add_override_flag(synth, opts, "--seed", "synth.seed", "random seed");
    add_override_flag(synth, opts, "--extents", "synth.extents", "image extents, e.g. 384,384");
    add_override_flag(synth, opts, "--division-prob", "synth.division_prob",
                      "per-cell per-frame division probability");
    add_override_flag(synth, opts, "--min-gap", "synth.min_gap",
                      "placement gap; negative forces touching pairs");

    CLI::App* labelgen =
        app.add_subcommand("labelgen", "label image -> cell/neighbor distance maps");
    labelgen->add_option("--input", input, "label TIFF or directory of mask*.tif")->required();
    labelgen->add_option("--out", output, "output directory")->required();
    add_common(labelgen);
    add_override_flag(labelgen, opts, "--closing-radius", "labelgen.closing_radius",
                      "grayscale closing radius");
    add_override_flag(labelgen, opts, "--exponent", "labelgen.exponent", "scaling exponent");

    CLI::App* segment =
        app.add_subcommand("segment", "distance-map pairs -> instance segmentation");
    segment->add_option("--input", input, "directory of cell*.tif/neighbor*.tif")->required();
    segment->add_option("--out", output, "output directory")->required();
    add_common(segment);
    add_override_flag(segment, opts, "--neighbor-power", "segment.neighbor_power",
                      "exponent on the smoothed neighbor map");
    add_override_flag(segment, opts, "--min-seed-area", "segment.min_seed_area",
                      "minimum seed component area");
    add_override_flag(segment, opts, "--seed-connectivity", "segment.seed_connectivity",
                      "face or full");
    add_override_flag(segment, opts, "--split-enabled", "segment.split_enabled",
                      "split detected merged cells");
    add_override_flag(segment, opts, "--split-factor", "segment.split_factor",
                      "merged-cell size factor over the mean");
    add_override_flag(segment, opts, "--split-rho-step", "segment.split_rho_step",
                      "seed threshold increment while splitting");

    CLI::App* track = app.add_subcommand("track", "label frames -> lineage");
    track->add_option("--raw", raw_dir, "directory of raw t*.tif frames");
    track->add_option("--labels", labels_dir, "directory of mask*.tif frames")->required();
    track->add_option("--out", output, "output directory")->required();
    add_common(track);

    CLI::App* score = app.add_subcommand("score", "compare a result against a reference");
    score->add_option("--ref", ref_dir, "reference directory")->required();
    score->add_option("--res", res_dir, "result directory")->required();
    score->add_option("--json", json_out, "write the report as JSON");
    add_common(score);

    CLI::App* pipeline = app.add_subcommand("pipeline", "synth -> labelgen -> segment -> "
                                                        "track -> score");
    pipeline->add_option("--work-dir", output, "working directory");
    add_common(pipeline);

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg = assemble_config(opts);

        if (synth->parsed()) {
            stage_synth(cfg.synth, output);
        } else if (labelgen->parsed()) {
            int n = stage_labelgen(input, output, cfg.labelgen, cfg.threads);
            std::printf("labelgen: %d frame(s)\n", n);
        } else if (segment->parsed()) {
            std::int64_t objects = stage_segment(input, output, cfg);
            std::printf("segment: %lld object(s)\n", static_cast<long long>(objects));
            if (objects == 0) {
                std::fprintf(stderr, "warning: segmentation produced no objects\n");
                return kExitEmptyResult;
            }
        } else if (track->parsed()) {
            int tracks = stage_track(raw_dir, labels_dir, output, cfg);
            std::printf("track: %d track(s)\n", tracks);
            if (tracks == 0) {
                std::fprintf(stderr, "warning: tracking produced no tracks\n");
                return kExitEmptyResult;
            }
        } else if (score->parsed()) {
            ScoreReport rep = stage_score(ref_dir, res_dir, "", json_out);
            std::printf("seg=%.6f\ndet_simple=%.6f\nmissed_links=%d\nwrong_links=%d\n"
                        "missed_divisions=%d\ntra_proxy=%.6f\nop_csb=%.6f\nop_ctb_proxy=%.6f\n",
                        rep.seg, rep.det_simple, rep.tra_errors.missed_links,
                        rep.tra_errors.wrong_links, rep.tra_errors.missed_divisions,
                        rep.tra_proxy, rep.op_csb, rep.op_ctb_proxy);
        } else if (pipeline->parsed()) {
            if (!output.empty()) cfg.work_dir = output;
            PipelineResult result = run_pipeline(cfg);
            if (result.empty_result) {
                std::fprintf(stderr, "warning: pipeline produced an empty result\n");
                return kExitEmptyResult;
            }
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfigError;
    } catch (const MissingInputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitMissingInput;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIoError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return kExitOk;
}
