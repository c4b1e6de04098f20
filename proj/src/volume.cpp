#include "ctscreen/volume.hpp"

#include "ctscreen/errors.hpp"

#include <algorithm>
#include <string>

namespace ctscreen {

VolumeExtent CtVolume::extent() const {
    VolumeExtent e;
    e.x_max = (cols > 0) ? (cols - 1) * pixel_spacing_mm.col_mm : 0.0;
    e.y_max = (rows > 0) ? (rows - 1) * pixel_spacing_mm.row_mm : 0.0;
    if (!slice_positions_mm.empty()) {
        e.z_min = slice_positions_mm.front();
        e.z_max = slice_positions_mm.back();
    }
    return e;
}

double CtVolume::median_slice_spacing_mm() const {
    if (slice_positions_mm.size() < 2)
        return 1.0;
    std::vector<double> gaps(slice_positions_mm.size() - 1);
    for (std::size_t i = 0; i + 1 < slice_positions_mm.size(); ++i)
        gaps[i] = slice_positions_mm[i + 1] - slice_positions_mm[i];
    std::sort(gaps.begin(), gaps.end());
    const std::size_t m = gaps.size() / 2;
    return (gaps.size() % 2 == 1) ? gaps[m] : 0.5 * (gaps[m - 1] + gaps[m]);
}

void CtVolume::validate() const {
    if (rows <= 0 || cols <= 0)
        throw PipelineError(Errc::InconsistentSeries, "non-positive slice dimensions");
    if (slice_positions_mm.size() != slices.size() || source_ids.size() != slices.size())
        throw PipelineError(Errc::InconsistentSeries,
                            "slice/position/id counts disagree: " +
                                std::to_string(slices.size()) + "/" +
                                std::to_string(slice_positions_mm.size()) + "/" +
                                std::to_string(source_ids.size()));
    const std::size_t expect = pixels_per_slice();
    for (const auto& s : slices)
        if (s.size() != expect)
            throw PipelineError(Errc::InconsistentSeries, "slice pixel count mismatch");
    for (std::size_t i = 0; i + 1 < slice_positions_mm.size(); ++i)
        if (!(slice_positions_mm[i] < slice_positions_mm[i + 1]))
            throw PipelineError(Errc::InconsistentSeries,
                                "slice positions not strictly increasing");
}

} // namespace ctscreen
