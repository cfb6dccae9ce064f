#include "distcell/pipeline.hpp"

#include "distcell/tiff_io.hpp"
#include "distcell/track.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace distcell {

std::string frame_file(const std::string& prefix, int t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%03d.tif", t);
    return prefix + buf;
}

namespace {

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// frame indices found for a prefix, sorted; errors if none
std::vector<int> list_frames(const std::string& dir, const std::string& prefix) {
    if (!fs::is_directory(dir)) throw MissingInputError("input directory not found: " + dir);
    std::vector<int> ts;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.size() <= prefix.size() + 4 || name.rfind(prefix, 0) != 0) continue;
        if (name.substr(name.size() - 4) != ".tif") continue;
        const std::string digits = name.substr(prefix.size(), name.size() - prefix.size() - 4);
        if (digits.empty() ||
            digits.find_first_not_of("0123456789") != std::string::npos)
            continue;
        ts.push_back(std::stoi(digits));
    }
    std::sort(ts.begin(), ts.end());
    if (ts.empty())
        throw MissingInputError("no " + prefix + "*.tif frames in " + dir);
    return ts;
}

void run_parallel(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(threads, n); ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

Lineage load_lineage(const std::string& dir) {
    Lineage lin;
    for (int t : list_frames(dir, "mask"))
        lin.frames.push_back(read_label_tiff((fs::path(dir) / frame_file("mask", t)).string()));
    for (const char* name : {"res_track.txt", "man_track.txt"}) {
        fs::path p = fs::path(dir) / name;
        if (fs::exists(p)) {
            lin.records = read_track_records(p.string());
            return lin;
        }
    }
    throw MissingInputError("no res_track.txt or man_track.txt in " + dir);
}

void write_score_text(std::ostream& out, const ScoreReport& r) {
    char buf[64];
    auto put = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%s=%.6f\n", key, v);
        out << buf;
    };
    put("seg", r.seg);
    put("det_simple", r.det_simple);
    out << "missed_links=" << r.tra_errors.missed_links << '\n';
    out << "wrong_links=" << r.tra_errors.wrong_links << '\n';
    out << "missed_divisions=" << r.tra_errors.missed_divisions << '\n';
    put("tra_proxy", r.tra_proxy);
    put("op_csb", r.op_csb);
    put("op_ctb_proxy", r.op_ctb_proxy);
}

} // namespace

void stage_synth(const SynthConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    SyntheticSequence seq = generate(cfg);
    for (std::size_t t = 0; t < seq.raw.size(); ++t) {
        const int ti = static_cast<int>(t);
        write_raw_tiff_u16((fs::path(out_dir) / frame_file("t", ti)).string(), seq.raw[t]);
        write_label_tiff((fs::path(out_dir) / frame_file("mask", ti)).string(), seq.labels[t]);
    }
    write_track_records((fs::path(out_dir) / "man_track.txt").string(), seq.records);
}

int stage_labelgen(const std::string& input, const std::string& out_dir,
                   const LabelGenConfig& cfg, int threads) {
    fs::create_directories(out_dir);

    std::vector<std::pair<int, std::string>> inputs;
    if (fs::is_directory(input)) {
        for (int t : list_frames(input, "mask"))
            inputs.push_back({t, (fs::path(input) / frame_file("mask", t)).string()});
    } else {
        if (!fs::exists(input)) throw MissingInputError("input file not found: " + input);
        // reuse trailing digits of the stem as the frame index when present
        std::string stem = fs::path(input).stem().string();
        std::size_t d = stem.find_last_not_of("0123456789");
        int t = d + 1 < stem.size() ? std::stoi(stem.substr(d + 1)) : 0;
        inputs.push_back({t, input});
    }

    run_parallel(static_cast<int>(inputs.size()), threads, [&](int i) {
        const auto& [t, path] = inputs[i];
        LabelImage labels = read_label_tiff(path);
        RepresentationPair pair = make_representation_pair(labels, cfg);
        write_float_tiff((fs::path(out_dir) / frame_file("cell", t)).string(), pair.cell);
        write_float_tiff((fs::path(out_dir) / frame_file("neighbor", t)).string(),
                         pair.neighbor);
    });
    return static_cast<int>(inputs.size());
}

std::int64_t stage_segment(const std::string& maps_dir, const std::string& out_dir,
                           const PipelineConfig& cfg) {
    fs::create_directories(out_dir);
    const std::vector<int> ts = list_frames(maps_dir, "cell");

    std::atomic<std::int64_t> objects{0};
    run_parallel(static_cast<int>(ts.size()), cfg.threads, [&](int i) {
        const int t = ts[i];
        RepresentationPair pair;
        pair.cell = read_float_tiff((fs::path(maps_dir) / frame_file("cell", t)).string());
        pair.neighbor =
            read_float_tiff((fs::path(maps_dir) / frame_file("neighbor", t)).string());
        SegmentationConfig scfg = resolve_segmentation(cfg, pair.cell.shape().ndim());
        LabelImage labels = segment_frame(pair, scfg);
        objects += static_cast<std::int64_t>(labels.labels().size());
        write_label_tiff((fs::path(out_dir) / frame_file("mask", t)).string(), labels);
    });
    return objects.load();
}

int stage_track(const std::string& raw_dir, const std::string& labels_dir,
                const std::string& out_dir, const PipelineConfig& cfg) {
    fs::create_directories(out_dir);
    const std::vector<int> ts = list_frames(labels_dir, "mask");

    std::vector<LabelImage> labels;
    labels.reserve(ts.size());
    for (int t : ts)
        labels.push_back(read_label_tiff((fs::path(labels_dir) / frame_file("mask", t)).string()));

    std::vector<Grid<float>> raw;
    bool have_raw = !raw_dir.empty() && fs::is_directory(raw_dir);
    if (have_raw) {
        for (int t : ts) {
            fs::path p = fs::path(raw_dir) / frame_file("t", t);
            if (!fs::exists(p)) {
                have_raw = false;
                break;
            }
            raw.push_back(read_raw_tiff(p.string()));
        }
    }
    if (!have_raw) {
        raw.clear();
        std::fprintf(stderr,
                     "track: raw frames unavailable, movement estimation disabled\n");
    }

    TrackingConfig tcfg = resolve_tracking(cfg, labels[0].shape().ndim());
    Lineage lin = track_sequence(raw, labels, tcfg);

    for (std::size_t i = 0; i < lin.frames.size(); ++i)
        write_label_tiff((fs::path(out_dir) / frame_file("mask", ts[i])).string(),
                         lin.frames[i]);
    write_track_records((fs::path(out_dir) / "res_track.txt").string(), lin.records);
    return static_cast<int>(lin.records.size());
}

ScoreReport stage_score(const std::string& ref_dir, const std::string& res_dir,
                        const std::string& text_out, const std::string& json_out) {
    Lineage ref = load_lineage(ref_dir);
    Lineage res = load_lineage(res_dir);
    ScoreReport rep = score_sequences(ref, res);

    if (!text_out.empty()) {
        std::ofstream out(text_out + ".tmp");
        if (!out) throw IoError("cannot write " + text_out);
        write_score_text(out, rep);
        out.close();
        fs::rename(text_out + ".tmp", text_out);
    }
    if (!json_out.empty()) {
        nlohmann::json j{{"seg", rep.seg},
                         {"det_simple", rep.det_simple},
                         {"missed_links", rep.tra_errors.missed_links},
                         {"wrong_links", rep.tra_errors.wrong_links},
                         {"missed_divisions", rep.tra_errors.missed_divisions},
                         {"tra_proxy", rep.tra_proxy},
                         {"op_csb", rep.op_csb},
                         {"op_ctb_proxy", rep.op_ctb_proxy}};
        std::ofstream out(json_out + ".tmp");
        if (!out) throw IoError("cannot write " + json_out);
        out << j.dump(2) << '\n';
        out.close();
        fs::rename(json_out + ".tmp", json_out);
    }
    return rep;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    const fs::path work(cfg.work_dir);
    const std::string gt = (work / "gt").string();
    const std::string maps = (work / "maps").string();
    const std::string seg = (work / "seg").string();
    const std::string res = (work / "res").string();

    PipelineResult result;
    auto t0 = std::chrono::steady_clock::now();
    stage_synth(cfg.synth, gt);
    std::printf("[synth]    %d frames, %d initial cells (%.2f s)\n", cfg.synth.frames,
                cfg.synth.n_cells, elapsed_s(t0));

    t0 = std::chrono::steady_clock::now();
    int frames = stage_labelgen(gt, maps, cfg.labelgen, cfg.threads);
    std::printf("[labelgen] %d frames (%.2f s)\n", frames, elapsed_s(t0));

    t0 = std::chrono::steady_clock::now();
    result.segmented_objects = stage_segment(maps, seg, cfg);
    std::printf("[segment]  %lld objects (%.2f s)\n",
                static_cast<long long>(result.segmented_objects), elapsed_s(t0));

    t0 = std::chrono::steady_clock::now();
    result.tracks = stage_track(gt, seg, res, cfg);
    std::printf("[track]    %d tracks (%.2f s)\n", result.tracks, elapsed_s(t0));

    t0 = std::chrono::steady_clock::now();
    result.score = stage_score(gt, res, (work / "score.txt").string());
    std::printf("[score]    seg=%.4f det=%.4f (%.2f s)\n", result.score.seg,
                result.score.det_simple, elapsed_s(t0));

    result.empty_result = result.segmented_objects == 0 || result.tracks == 0;
    return result;
}

} // namespace distcell
