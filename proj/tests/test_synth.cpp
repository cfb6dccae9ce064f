#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distcell/synth.hpp"
#include "distcell/image_ops.hpp"

using namespace distcell;

TEST_CASE("static single cell: identical frames, one-track lineage") {
    SynthConfig cfg;
    cfg.extents = {1, 64, 64};
    cfg.frames = 5;
    cfg.n_cells = 1;
    cfg.speed_min = cfg.speed_max = 0.0;
    cfg.noise_std = 0.0;
    SyntheticSequence seq = generate(cfg);
    REQUIRE(seq.records.size() == 1);
    CHECK(seq.records[0].begin == 0);
    CHECK(seq.records[0].end == 4);
    for (int t = 1; t < 5; ++t) CHECK(seq.labels[t].grid == seq.labels[0].grid);
}

TEST_CASE("forced division produces one parent with two children") {
    SynthConfig cfg;
    cfg.extents = {1, 96, 96};
    cfg.frames = 5; // only t = 2 is division-eligible
    cfg.n_cells = 1;
    cfg.radius_min = cfg.radius_max = 10.0;
    cfg.speed_min = cfg.speed_max = 0.5;
    cfg.division_prob = 1.0;
    SyntheticSequence seq = generate(cfg);

    REQUIRE(seq.records.size() == 3);
    CHECK(seq.records[0].parent == 0);
    CHECK(seq.records[0].end == 1);
    for (int k = 1; k < 3; ++k) {
        CHECK(seq.records[k].parent == seq.records[0].label);
        CHECK(seq.records[k].begin == 2);
        CHECK(seq.records[k].end == 4);
    }
}

TEST_CASE("fixed seed reproduces the sequence bit-exactly") {
    SynthConfig cfg;
    cfg.extents = {1, 96, 96};
    cfg.frames = 6;
    cfg.n_cells = 6;
    cfg.division_prob = 0.05;
    cfg.seed = 42;
    SyntheticSequence a = generate(cfg);
    SyntheticSequence b = generate(cfg);
    for (int t = 0; t < cfg.frames; ++t) {
        CHECK(a.labels[t].grid == b.labels[t].grid);
        CHECK(a.raw[t] == b.raw[t]);
    }
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
        CHECK(a.records[i].label == b.records[i].label);
}

TEST_CASE("lineage is consistent with the label frames") {
    SynthConfig cfg;
    cfg.extents = {1, 128, 128};
    cfg.frames = 12;
    cfg.n_cells = 8;
    cfg.division_prob = 0.03;
    cfg.seed = 9;
    SyntheticSequence seq = generate(cfg);
    for (const TrackRecord& r : seq.records)
        for (int t = r.begin; t <= r.end; ++t) {
            std::int64_t n = 0;
            for (std::int64_t i = 0; i < seq.labels[t].grid.size(); ++i)
                n += seq.labels[t].grid[i] == r.label ? 1 : 0;
            REQUIRE(n > 0); // every assignment's ID exists in its frame
        }
}

TEST_CASE("negative min_gap forces touching pairs") {
    SynthConfig cfg;
    cfg.extents = {1, 192, 192};
    cfg.n_cells = 10;
    cfg.min_gap = -1.0;
    cfg.seed = 3;
    SyntheticSequence seq = generate(cfg);
    const LabelImage& l = seq.labels[0];
    // touching means pixels with a differing nonzero face neighbor exist
    std::int64_t contact = 0;
    for (int y = 0; y < l.shape().ny(); ++y)
        for (int x = 0; x < l.shape().nx(); ++x) {
            std::int32_t id = l.grid.at(y, x);
            if (!id) continue;
            const int dy[] = {-1, 1, 0, 0}, dx[] = {0, 0, -1, 1};
            for (int k = 0; k < 4; ++k) {
                int yy = y + dy[k], xx = x + dx[k];
                if (!l.shape().contains(0, yy, xx)) continue;
                std::int32_t n = l.grid.at(yy, xx);
                if (n != 0 && n != id) {
                    ++contact;
                    break;
                }
            }
        }
    CHECK(contact >= 10); // several touching pairs
}

TEST_CASE("rendered contrast clears the noise floor") {
    SynthConfig cfg;
    cfg.extents = {1, 96, 96};
    cfg.n_cells = 4;
    cfg.noise_std = 0.02;
    cfg.seed = 8;
    SyntheticSequence seq = generate(cfg);
    double inside = 0.0, outside = 0.0;
    std::int64_t n_in = 0, n_out = 0;
    for (std::int64_t i = 0; i < seq.raw[0].size(); ++i) {
        if (seq.labels[0].grid[i]) {
            inside += seq.raw[0][i];
            ++n_in;
        } else {
            outside += seq.raw[0][i];
            ++n_out;
        }
    }
    CHECK(inside / n_in - outside / n_out >= 3.0 * cfg.noise_std);
}

TEST_CASE("corrupt removes masks and validates targets") {
    SynthConfig cfg;
    cfg.extents = {1, 64, 64};
    cfg.frames = 4;
    cfg.n_cells = 3;
    cfg.seed = 5;
    SyntheticSequence seq = generate(cfg);

    SyntheticSequence same = corrupt(seq, {});
    for (int t = 0; t < 4; ++t) CHECK(same.labels[t].grid == seq.labels[t].grid);

    SyntheticSequence dropped = corrupt(seq, {{2, 1}});
    std::int64_t n = 0;
    for (std::int64_t i = 0; i < dropped.labels[2].grid.size(); ++i)
        n += dropped.labels[2].grid[i] == 1 ? 1 : 0;
    CHECK(n == 0);
    CHECK(dropped.records.size() == seq.records.size()); // lineage kept

    CHECK_THROWS_AS(corrupt(seq, {{2, 99}}), std::invalid_argument);
    CHECK_THROWS_AS(corrupt(seq, {{17, 1}}), std::invalid_argument);
}
