#ifndef DISTCELL_TIFF_IO_HPP
#define DISTCELL_TIFF_IO_HPP

#include "distcell/errors.hpp"
#include "distcell/grid.hpp"

#include <string>

namespace distcell {

// 16-bit unsigned single-channel TIFF, multi-page for 3D (page order = z).
// Round-trip lossless for IDs <= 65535; larger IDs are rejected at write.
// Writes go to a temporary file renamed into place.
void write_label_tiff(const std::string& path, const LabelImage& labels);
LabelImage read_label_tiff(const std::string& path);

// 32-bit float single-channel TIFF for distance maps.
void write_float_tiff(const std::string& path, const Grid<float>& g);
Grid<float> read_float_tiff(const std::string& path);

// Raw intensity frames: uint8/uint16 data normalized by the dtype maximum,
// float data passed through.
Grid<float> read_raw_tiff(const std::string& path);
void write_raw_tiff_u16(const std::string& path, const Grid<float>& g,
                        double scale = 10000.0);

} // namespace distcell

#endif
