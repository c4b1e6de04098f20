#pragma once

#include "ctscreen/encode.hpp"
#include "ctscreen/volume.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ctscreen::pyramid {

// Axis-aligned box in normalized volume coordinates, closed on all faces.
struct Box {
    double x0 = 0, y0 = 0, z0 = 0;
    double x1 = 1, y1 = 1, z1 = 1;

    bool contains(double x, double y, double z) const {
        return x >= x0 && x <= x1 && y >= y0 && y <= y1 && z >= z0 && z <= z1;
    }
};

struct RegionScheme {
    std::string name;
    std::vector<Box> regions; // fixed canonical order

    void validate() const; // positive extent, boxes within the unit cube
};

// Per-region sub-vector: diameter_mm, confidence, then the nine features.
constexpr std::size_t kValuesPerRegion = 11;

// Whole volume, the 8 octants of a 2x2x2 split, and the same octants shifted
// by (0.25, 0.25, 0.25) clipped to the unit cube: 17 regions.
RegionScheme default_scheme();

// One box per line: x0 y0 z0 x1 y1 z1, '#' comments allowed.
RegionScheme load_scheme(std::istream& in, const std::string& name = "custom");
void save_scheme(const RegionScheme& scheme, std::ostream& out);

using PyramidVector = std::vector<double>;

// For every region, the sub-vector of the largest contained nodule
// ("largest" by diameter, ties by confidence then by lexicographic
// location), or eleven zeros when the region is empty. Output length is
// |regions| * 11 regardless of the nodule list.
PyramidVector pool(const std::vector<encode::NoduleRecord>& nodules,
                   const RegionScheme& scheme, const VolumeExtent& extent);

// Per-nodule view of a scan: keep exactly one nodule.
std::vector<encode::NoduleRecord> mask_single(const std::vector<encode::NoduleRecord>& nodules,
                                              std::size_t keep_index);

// Normalized [0,1] coordinates of a nodule within an extent; throws
// NoduleOutsideExtent when the location is outside.
std::array<double, 3> normalized_location(const encode::NoduleRecord& nodule,
                                          const VolumeExtent& extent);

} // namespace ctscreen::pyramid
