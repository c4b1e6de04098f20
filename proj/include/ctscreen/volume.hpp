#pragma once

#include <cstdint>
#include <vector>

namespace ctscreen {

struct PixelSpacing {
    double row_mm = 1.0;
    double col_mm = 1.0;

    bool operator==(const PixelSpacing&) const = default;
};

// Axis-aligned physical bounding box of a volume, in mm. x runs along
// columns, y along rows, z along the slice axis.
struct VolumeExtent {
    double x_min = 0, x_max = 0;
    double y_min = 0, y_max = 0;
    double z_min = 0, z_max = 0;
};

// Ordered stack of axial HU slices. Immutable by convention once built:
// every pipeline stage takes volumes by const reference and returns new ones.
struct CtVolume {
    int rows = 0;
    int cols = 0;
    PixelSpacing pixel_spacing_mm;
    std::vector<double> slice_positions_mm;        // strictly increasing
    std::vector<int> source_ids;                   // per-slice instance identifiers
    std::vector<std::vector<std::int16_t>> slices; // row-major HU, one vector per slice

    std::size_t num_slices() const { return slices.size(); }
    std::size_t pixels_per_slice() const {
        return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    }

    std::int16_t hu_at(std::size_t slice, int row, int col) const {
        return slices[slice][static_cast<std::size_t>(row) * cols + col];
    }

    VolumeExtent extent() const;

    // Median gap between consecutive slice positions; slice "thickness" proxy.
    double median_slice_spacing_mm() const;

    // Throws PipelineError if any structural invariant is violated.
    void validate() const;

    bool operator==(const CtVolume&) const = default;
};

} // namespace ctscreen
