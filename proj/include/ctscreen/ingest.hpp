#pragma once

#include "ctscreen/errors.hpp"
#include "ctscreen/volume.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace ctscreen::ingest {

struct RescaleParams {
    double slope = 1.0;     // must be nonzero
    double intercept = 0.0; // HU
};

inline double to_hounsfield(double raw, const RescaleParams& p) {
    return raw * p.slope + p.intercept;
}

struct SeriesResult {
    CtVolume volume;
    std::vector<Warning> warnings;
};

// Minimal DICOM subset: Explicit VR Little Endian, uncompressed MONOCHROME2,
// 16 bits allocated. Slices are ordered by Instance Number; on duplicate
// Instance Numbers ordering falls back to the Image Position Patient
// z-coordinate and a warning is attached.
SeriesResult parse_dicom_series(const std::vector<std::vector<std::uint8_t>>& files);

// "Desk" volume format: a flat key/value text header plus a raw blob of
// little-endian int16 HU, slice-major, row-major within each slice.
CtVolume parse_desk_volume(std::istream& header, std::istream& blob);
void write_desk_volume(const CtVolume& volume, std::ostream& header, std::ostream& blob);

// Path convenience: the blob sits next to the header as "<header>.bin".
CtVolume read_desk_files(const std::filesystem::path& header_path);
void write_desk_files(const CtVolume& volume, const std::filesystem::path& header_path);

} // namespace ctscreen::ingest
