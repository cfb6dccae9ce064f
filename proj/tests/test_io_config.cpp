#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "distcell/config.hpp"
#include "distcell/lineage.hpp"
#include "distcell/tiff_io.hpp"

#include <filesystem>
#include <fstream>
#include <random>

using namespace distcell;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("distcell_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("label tiff: random 2D round trip") {
    TempDir dir;
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> v(0, 500);
    LabelImage l(Shape(23, 31));
    for (auto& px : l.grid) px = v(rng);
    write_label_tiff(dir.file("a.tif"), l);
    LabelImage back = read_label_tiff(dir.file("a.tif"));
    CHECK(back.grid == l.grid);
}

TEST_CASE("label tiff: 3D stack preserves page order") {
    TempDir dir;
    LabelImage l(Shape(4, 6, 8));
    for (int z = 0; z < 4; ++z) l.grid.at(z, 2, 3) = 100 + z;
    write_label_tiff(dir.file("v.tif"), l);
    LabelImage back = read_label_tiff(dir.file("v.tif"));
    REQUIRE(back.shape() == l.shape());
    for (int z = 0; z < 4; ++z) CHECK(back.grid.at(z, 2, 3) == 100 + z);
}

TEST_CASE("label tiff: IDs beyond 16 bit are rejected") {
    TempDir dir;
    LabelImage l(Shape(4, 4));
    l.grid.at(1, 1) = 70000;
    CHECK_THROWS_AS(write_label_tiff(dir.file("big.tif"), l), IoError);
    CHECK_FALSE(fs::exists(dir.file("big.tif")));
}

TEST_CASE("float tiff round trip is lossless") {
    TempDir dir;
    std::mt19937 rng(2);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    Grid<float> g(Shape(17, 13));
    for (auto& v : g) v = u(rng);
    write_float_tiff(dir.file("m.tif"), g);
    CHECK(read_float_tiff(dir.file("m.tif")) == g);
}

TEST_CASE("raw tiff: 16-bit frames normalize to [0,1]") {
    TempDir dir;
    Grid<float> g(Shape(16, 16), 0.25f);
    g.at(3, 3) = 1.0f;
    write_raw_tiff_u16(dir.file("t.tif"), g, 10000.0);
    Grid<float> back = read_raw_tiff(dir.file("t.tif"));
    CHECK(back.at(3, 3) == doctest::Approx(10000.0 / 65535.0));
    CHECK(back.at(0, 0) == doctest::Approx(2500.0 / 65535.0));
}

TEST_CASE("missing input raises the dedicated error") {
    CHECK_THROWS_AS(read_label_tiff("/nonexistent/nope.tif"), MissingInputError);
}

TEST_CASE("track records round trip in CTC text format") {
    TempDir dir;
    std::vector<TrackRecord> records{{1, 0, 9, 0}, {2, 10, 14, 1}, {3, 10, 14, 1}};
    write_track_records(dir.file("res_track.txt"), records);

    std::ifstream in(dir.file("res_track.txt"));
    std::string first;
    std::getline(in, first);
    CHECK(first == "1 0 9 0");

    auto back = read_track_records(dir.file("res_track.txt"));
    REQUIRE(back.size() == 3);
    CHECK(back[1].label == 2);
    CHECK(back[1].parent == 1);
}

TEST_CASE("config: defaults are the published parameter set") {
    PipelineConfig cfg;
    CHECK(cfg.segment.rho_mask == 0.09);
    CHECK(cfg.segment.rho_seed == 0.5);
    CHECK(cfg.tracking.delta_t == 3);
    CHECK(cfg.tracking.alpha == 0.5);
    CHECK(cfg.tracking.beta == 1.2);
    CHECK(cfg.tracking.gamma_factor == 2.0);
    CHECK(resolve_segmentation(cfg, 2).sigma == std::array<double, 3>{0.0, 1.5, 1.5});
    CHECK(resolve_segmentation(cfg, 3).sigma == std::array<double, 3>{0.5, 1.5, 1.5});
    CHECK(resolve_tracking(cfg, 2).roi_extent == std::array<int, 3>{1, 150, 150});
    CHECK(resolve_tracking(cfg, 3).roi_extent == std::array<int, 3>{100, 100, 100});
}

TEST_CASE("config: file parsing and overrides") {
    TempDir dir;
    {
        std::ofstream out(dir.file("cfg.txt"));
        out << "# comment\n";
        out << "segment.rho_mask = 0.12\n";
        out << "segment.sigma = 1.0,2.0\n";
        out << "tracking.delta_t = 5\n";
        out << "synth.seed = 77\n";
        out << "paths.work_dir = /tmp/xyz\n";
    }
    PipelineConfig cfg = parse_config_file(dir.file("cfg.txt"));
    CHECK(cfg.segment.rho_mask == 0.12);
    CHECK(cfg.tracking.delta_t == 5);
    CHECK(cfg.synth.seed == 77);
    CHECK(cfg.work_dir == "/tmp/xyz");
    CHECK(resolve_segmentation(cfg, 2).sigma == std::array<double, 3>{0.0, 1.0, 2.0});

    apply_config_entry(cfg, "tracking.roi", "80,90");
    CHECK(resolve_tracking(cfg, 2).roi_extent == std::array<int, 3>{1, 80, 90});
}

TEST_CASE("config: unknown keys and bad values are rejected") {
    PipelineConfig cfg;
    CHECK_THROWS_AS(apply_config_entry(cfg, "segment.rho_msak", "0.1"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "segment.rho_mask", "abc"), ConfigError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "segment.sigma", "1.5,1.5,0.5,0.5"), ConfigError);

    TempDir dir;
    {
        std::ofstream out(dir.file("bad.txt"));
        out << "segment.rho_mask 0.1\n"; // missing '='
    }
    CHECK_THROWS_AS(parse_config_file(dir.file("bad.txt")), ConfigError);
    CHECK_THROWS_AS(parse_config_file(dir.file("missing.txt")), MissingInputError);
}
