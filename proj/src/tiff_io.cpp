#include "distcell/tiff_io.hpp"

#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <vector>

namespace distcell {

namespace {

void quiet_handler(const char*, const char*, va_list) {}

void install_handlers() {
    static std::once_flag once;
    std::call_once(once, [] {
        TIFFSetErrorHandler(quiet_handler);
        TIFFSetWarningHandler(quiet_handler);
    });
}

struct TiffCloser {
    void operator()(TIFF* t) const {
        if (t) TIFFClose(t);
    }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

TiffPtr open_read(const std::string& path) {
    install_handlers();
    if (!std::filesystem::exists(path))
        throw MissingInputError("input file not found: " + path);
    TiffPtr tif(TIFFOpen(path.c_str(), "r"));
    if (!tif) throw IoError("cannot open TIFF: " + path);
    return tif;
}

struct PageInfo {
    std::uint32_t width = 0, height = 0;
    std::uint16_t bps = 0, spp = 1, format = SAMPLEFORMAT_UINT;
};

PageInfo page_info(TIFF* tif, const std::string& path) {
    PageInfo p;
    if (!TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &p.width) ||
        !TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &p.height))
        throw IoError("TIFF missing dimensions: " + path);
    TIFFGetFieldDefaulted(tif, TIFFTAG_BITSPERSAMPLE, &p.bps);
    TIFFGetFieldDefaulted(tif, TIFFTAG_SAMPLESPERPIXEL, &p.spp);
    if (!TIFFGetField(tif, TIFFTAG_SAMPLEFORMAT, &p.format)) p.format = SAMPLEFORMAT_UINT;
    if (p.spp != 1) throw IoError("TIFF must be single-channel: " + path);
    return p;
}

// read every directory as double; caller converts
void read_pages(const std::string& path, std::vector<double>& out, int& nz, int& ny, int& nx,
                bool& is_float, int* bits = nullptr) {
    TiffPtr tif = open_read(path);
    nz = 0;
    is_float = false;
    std::vector<std::uint8_t> row;
    do {
        PageInfo p = page_info(tif.get(), path);
        if (bits) *bits = p.bps;
        if (nz == 0) {
            ny = static_cast<int>(p.height);
            nx = static_cast<int>(p.width);
        } else if (static_cast<int>(p.height) != ny || static_cast<int>(p.width) != nx) {
            throw IoError("TIFF pages differ in size: " + path);
        }
        row.resize(TIFFScanlineSize(tif.get()));
        for (int y = 0; y < ny; ++y) {
            if (TIFFReadScanline(tif.get(), row.data(), y) < 0)
                throw IoError("TIFF read error: " + path);
            for (int x = 0; x < nx; ++x) {
                double v = 0.0;
                if (p.format == SAMPLEFORMAT_IEEEFP && p.bps == 32) {
                    v = reinterpret_cast<const float*>(row.data())[x];
                    is_float = true;
                } else if (p.bps == 8) {
                    v = row[x];
                } else if (p.bps == 16) {
                    v = reinterpret_cast<const std::uint16_t*>(row.data())[x];
                } else if (p.bps == 32 && p.format == SAMPLEFORMAT_UINT) {
                    v = reinterpret_cast<const std::uint32_t*>(row.data())[x];
                } else {
                    throw IoError("unsupported TIFF sample layout: " + path);
                }
                out.push_back(v);
            }
        }
        ++nz;
    } while (TIFFReadDirectory(tif.get()));
}

template <typename WriteRow>
void write_pages(const std::string& path, int nz, int ny, int nx, std::uint16_t bps,
                 std::uint16_t format, WriteRow&& write_row) {
    install_handlers();
    const std::string tmp = path + ".tmp";
    {
        TiffPtr tif(TIFFOpen(tmp.c_str(), "w"));
        if (!tif) throw IoError("cannot create TIFF: " + path);
        for (int z = 0; z < nz; ++z) {
            TIFFSetField(tif.get(), TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(nx));
            TIFFSetField(tif.get(), TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(ny));
            TIFFSetField(tif.get(), TIFFTAG_BITSPERSAMPLE, bps);
            TIFFSetField(tif.get(), TIFFTAG_SAMPLESPERPIXEL, static_cast<std::uint16_t>(1));
            TIFFSetField(tif.get(), TIFFTAG_SAMPLEFORMAT, format);
            TIFFSetField(tif.get(), TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
            TIFFSetField(tif.get(), TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
            TIFFSetField(tif.get(), TIFFTAG_COMPRESSION, COMPRESSION_NONE);
            TIFFSetField(tif.get(), TIFFTAG_ROWSPERSTRIP, static_cast<std::uint32_t>(ny));
            if (nz > 1) {
                TIFFSetField(tif.get(), TIFFTAG_SUBFILETYPE, FILETYPE_PAGE);
                TIFFSetField(tif.get(), TIFFTAG_PAGENUMBER, static_cast<std::uint16_t>(z),
                             static_cast<std::uint16_t>(nz));
            }
            for (int y = 0; y < ny; ++y)
                if (TIFFWriteScanline(tif.get(), write_row(z, y), y) < 0)
                    throw IoError("TIFF write error: " + path);
            if (!TIFFWriteDirectory(tif.get())) throw IoError("TIFF write error: " + path);
        }
    }
    std::filesystem::rename(tmp, path);
}

Shape make_shape(int nz, int ny, int nx) {
    return nz == 1 ? Shape(ny, nx) : Shape(nz, ny, nx);
}

} // namespace

void write_label_tiff(const std::string& path, const LabelImage& labels) {
    const Shape& s = labels.shape();
    for (std::int64_t i = 0; i < labels.grid.size(); ++i)
        if (labels.grid[i] < 0 || labels.grid[i] > 65535)
            throw IoError("label " + std::to_string(labels.grid[i]) +
                          " not representable in 16-bit TIFF: " + path);
    std::vector<std::uint16_t> row(s.nx());
    write_pages(path, s.nz(), s.ny(), s.nx(), 16, SAMPLEFORMAT_UINT, [&](int z, int y) {
        for (int x = 0; x < s.nx(); ++x)
            row[x] = static_cast<std::uint16_t>(labels.grid.at(z, y, x));
        return row.data();
    });
}

LabelImage read_label_tiff(const std::string& path) {
    std::vector<double> vals;
    int nz, ny, nx;
    bool is_float;
    read_pages(path, vals, nz, ny, nx, is_float);
    if (is_float) throw IoError("label TIFF must be integer-typed: " + path);
    LabelImage out(make_shape(nz, ny, nx));
    for (std::int64_t i = 0; i < out.grid.size(); ++i)
        out.grid[i] = static_cast<std::int32_t>(vals[static_cast<std::size_t>(i)]);
    return out;
}

void write_float_tiff(const std::string& path, const Grid<float>& g) {
    const Shape& s = g.shape();
    std::vector<float> row(s.nx());
    write_pages(path, s.nz(), s.ny(), s.nx(), 32, SAMPLEFORMAT_IEEEFP, [&](int z, int y) {
        for (int x = 0; x < s.nx(); ++x) row[x] = g.at(z, y, x);
        return row.data();
    });
}

Grid<float> read_float_tiff(const std::string& path) {
    std::vector<double> vals;
    int nz, ny, nx;
    bool is_float;
    read_pages(path, vals, nz, ny, nx, is_float);
    Grid<float> out(make_shape(nz, ny, nx));
    for (std::int64_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<float>(vals[static_cast<std::size_t>(i)]);
    return out;
}

Grid<float> read_raw_tiff(const std::string& path) {
    std::vector<double> vals;
    int nz, ny, nx, bits = 16;
    bool is_float;
    read_pages(path, vals, nz, ny, nx, is_float, &bits);
    const double scale = is_float ? 1.0 : std::pow(2.0, bits) - 1.0;
    Grid<float> out(make_shape(nz, ny, nx));
    for (std::int64_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<float>(vals[static_cast<std::size_t>(i)] / scale);
    return out;
}

void write_raw_tiff_u16(const std::string& path, const Grid<float>& g, double scale) {
    const Shape& s = g.shape();
    std::vector<std::uint16_t> row(s.nx());
    write_pages(path, s.nz(), s.ny(), s.nx(), 16, SAMPLEFORMAT_UINT, [&](int z, int y) {
        for (int x = 0; x < s.nx(); ++x) {
            double v = std::llround(static_cast<double>(g.at(z, y, x)) * scale);
            row[x] = static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
        }
        return row.data();
    });
}

} // namespace distcell
