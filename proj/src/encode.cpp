#include "ctscreen/encode.hpp"

#include "ctscreen/errors.hpp"
#include "ctscreen/text.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ctscreen::encode {

const std::array<const char*, 9>& NoduleFeatures::names() {
    static const std::array<const char*, 9> n = {
        "subtlety",   "sphericity", "margin",  "lobulation",      "spiculation",
        "texture",    "malignancy", "calcification_1", "calcification_2"};
    return n;
}

namespace {

// Nearest slice to `target_mm`; equidistant candidates resolve toward
// center_index, then toward the lower index.
std::size_t nearest_slice(const std::vector<double>& positions, double target_mm,
                          std::size_t center_index) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < positions.size(); ++i) {
        const double di = std::abs(positions[i] - target_mm);
        const double db = std::abs(positions[best] - target_mm);
        if (di < db) {
            best = i;
        } else if (di == db) {
            const auto gap = [&](std::size_t a) {
                return (a > center_index) ? a - center_index : center_index - a;
            };
            if (gap(i) < gap(best) || (gap(i) == gap(best) && i < best))
                best = i;
        }
    }
    return best;
}

} // namespace

Pseudo3dImage pseudo3d_slice(const CtVolume& volume, std::size_t center_index,
                             double offset_mm) {
    if (center_index >= volume.num_slices())
        throw PipelineError(Errc::IndexOutOfRange,
                            "center index " + std::to_string(center_index) + " of " +
                                std::to_string(volume.num_slices()) + " slices");

    const double center_pos = volume.slice_positions_mm[center_index];
    Pseudo3dImage img;
    img.rows = volume.rows;
    img.cols = volume.cols;
    img.center_index = center_index;
    img.offset_mm = offset_mm;
    img.red_index = nearest_slice(volume.slice_positions_mm, center_pos - offset_mm, center_index);
    img.blue_index = nearest_slice(volume.slice_positions_mm, center_pos + offset_mm, center_index);
    img.red = volume.slices[img.red_index];
    img.green = volume.slices[center_index];
    img.blue = volume.slices[img.blue_index];
    return img;
}

// ---------------------------------------------------------------------------
// Phantom generation
// ---------------------------------------------------------------------------

CtVolume make_phantom(const std::vector<PhantomSphere>& spheres, int rows, int cols,
                      int num_slices, double row_mm, double col_mm, double slice_mm) {
    if (rows <= 0 || cols <= 0 || num_slices <= 0 || row_mm <= 0 || col_mm <= 0 ||
        slice_mm <= 0)
        throw PipelineError(Errc::InvalidArgument, "phantom dimensions must be positive");

    const double x_max = (cols - 1) * col_mm;
    const double y_max = (rows - 1) * row_mm;
    const double z_max = (num_slices - 1) * slice_mm;
    for (const auto& s : spheres) {
        if (s.diameter_mm <= 0)
            throw PipelineError(Errc::InvalidArgument, "sphere diameter must be positive");
        const double r = 0.5 * s.diameter_mm;
        if (s.x_mm - r <= 0 || s.x_mm + r >= x_max || s.y_mm - r <= 0 ||
            s.y_mm + r >= y_max || s.z_mm - r <= 0 || s.z_mm + r >= z_max)
            throw PipelineError(Errc::SphereOutOfBounds,
                                "sphere must lie strictly inside the volume");
    }
    for (std::size_t i = 0; i < spheres.size(); ++i) {
        for (std::size_t j = i + 1; j < spheres.size(); ++j) {
            const double dx = spheres[i].x_mm - spheres[j].x_mm;
            const double dy = spheres[i].y_mm - spheres[j].y_mm;
            const double dz = spheres[i].z_mm - spheres[j].z_mm;
            const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
            if (dist < 0.5 * (spheres[i].diameter_mm + spheres[j].diameter_mm))
                throw PipelineError(Errc::OverlapNotAllowed, "spheres overlap");
        }
    }

    constexpr std::int16_t kAirHu = -1000;
    constexpr std::int16_t kTissueHu = 40;

    CtVolume v;
    v.rows = rows;
    v.cols = cols;
    v.pixel_spacing_mm = {row_mm, col_mm};
    v.slices.assign(static_cast<std::size_t>(num_slices),
                    std::vector<std::int16_t>(v.pixels_per_slice(), kAirHu));
    for (int s = 0; s < num_slices; ++s) {
        v.slice_positions_mm.push_back(s * slice_mm);
        v.source_ids.push_back(s + 1);
    }

    for (const auto& sp : spheres) {
        const double r = 0.5 * sp.diameter_mm;
        const int s0 = std::max(0, static_cast<int>(std::floor((sp.z_mm - r) / slice_mm)));
        const int s1 = std::min(num_slices - 1, static_cast<int>(std::ceil((sp.z_mm + r) / slice_mm)));
        const int r0 = std::max(0, static_cast<int>(std::floor((sp.y_mm - r) / row_mm)));
        const int r1 = std::min(rows - 1, static_cast<int>(std::ceil((sp.y_mm + r) / row_mm)));
        const int c0 = std::max(0, static_cast<int>(std::floor((sp.x_mm - r) / col_mm)));
        const int c1 = std::min(cols - 1, static_cast<int>(std::ceil((sp.x_mm + r) / col_mm)));
        for (int s = s0; s <= s1; ++s) {
            const double dz = s * slice_mm - sp.z_mm;
            for (int row = r0; row <= r1; ++row) {
                const double dy = row * row_mm - sp.y_mm;
                for (int col = c0; col <= c1; ++col) {
                    const double dx = col * col_mm - sp.x_mm;
                    if (dx * dx + dy * dy + dz * dz <= r * r)
                        v.slices[s][static_cast<std::size_t>(row) * cols + col] = kTissueHu;
                }
            }
        }
    }
    return v;
}

// ---------------------------------------------------------------------------
// Synthetic detector: thresholded 6-connected components
// ---------------------------------------------------------------------------

std::vector<NoduleRecord> SyntheticDetector::detect(const CtVolume& volume) const {
    volume.validate();
    const int rows = volume.rows, cols = volume.cols;
    const int ns = static_cast<int>(volume.num_slices());
    const double row_mm = volume.pixel_spacing_mm.row_mm;
    const double col_mm = volume.pixel_spacing_mm.col_mm;
    const double slice_mm = volume.median_slice_spacing_mm();
    const double voxel_volume = row_mm * col_mm * slice_mm;

    const std::size_t total = static_cast<std::size_t>(ns) * rows * cols;
    std::vector<std::uint8_t> visited(total, 0);
    const auto flat = [&](int s, int r, int c) {
        return (static_cast<std::size_t>(s) * rows + r) * cols + c;
    };
    const auto above = [&](int s, int r, int c) {
        return volume.slices[s][static_cast<std::size_t>(r) * cols + c] >= hu_threshold_;
    };

    std::vector<NoduleRecord> records;
    std::vector<std::array<int, 3>> stack;

    for (int s = 0; s < ns; ++s) {
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                if (visited[flat(s, r, c)] || !above(s, r, c))
                    continue;

                std::size_t count = 0;
                double sx = 0, sy = 0, sz = 0;
                bool touches_boundary = false;
                stack.clear();
                stack.push_back({s, r, c});
                visited[flat(s, r, c)] = 1;
                while (!stack.empty()) {
                    const auto [cs, cr, cc] = stack.back();
                    stack.pop_back();
                    ++count;
                    sx += cc * col_mm;
                    sy += cr * row_mm;
                    sz += volume.slice_positions_mm[cs];
                    if (cs == 0 || cs == ns - 1 || cr == 0 || cr == rows - 1 || cc == 0 ||
                        cc == cols - 1)
                        touches_boundary = true;

                    static constexpr int kSteps[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                                         {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
                    for (const auto& d : kSteps) {
                        const int nz = cs + d[0], ny = cr + d[1], nx = cc + d[2];
                        if (nz < 0 || nz >= ns || ny < 0 || ny >= rows || nx < 0 || nx >= cols)
                            continue;
                        if (visited[flat(nz, ny, nx)] || !above(nz, ny, nx))
                            continue;
                        visited[flat(nz, ny, nx)] = 1;
                        stack.push_back({nz, ny, nx});
                    }
                }

                if (touches_boundary || count == 0)
                    continue;

                NoduleRecord rec;
                rec.x_mm = sx / count;
                rec.y_mm = sy / count;
                rec.z_mm = sz / count;
                rec.diameter_mm =
                    std::cbrt(6.0 * (count * voxel_volume) / std::numbers::pi);
                rec.confidence = 1.0;

                // Adopt planted metadata when the centroid falls inside a
                // planted sphere.
                const PhantomSphere* match = nullptr;
                double best_dist = 0;
                for (const auto& t : truth_) {
                    const double dx = rec.x_mm - t.x_mm, dy = rec.y_mm - t.y_mm,
                                 dz = rec.z_mm - t.z_mm;
                    const double dist = std::sqrt(dx * dx + dy * dy + dz * dz);
                    if (dist <= 0.5 * t.diameter_mm && (!match || dist < best_dist)) {
                        match = &t;
                        best_dist = dist;
                    }
                }
                if (match)
                    rec.features = match->features;
                records.push_back(rec);
            }
        }
    }

    std::sort(records.begin(), records.end(), [](const NoduleRecord& a, const NoduleRecord& b) {
        if (a.z_mm != b.z_mm) return a.z_mm < b.z_mm;
        if (a.y_mm != b.y_mm) return a.y_mm < b.y_mm;
        return a.x_mm < b.x_mm;
    });
    return records;
}

std::string serialize(const NoduleRecord& r) {
    std::ostringstream os;
    os << text::format_double(r.x_mm) << ',' << text::format_double(r.y_mm) << ','
       << text::format_double(r.z_mm) << ',' << text::format_double(r.diameter_mm) << ','
       << text::format_double(r.confidence);
    for (double f : r.features.as_array())
        os << ',' << text::format_double(f);
    return os.str();
}

NoduleRecord deserialize_nodule(const std::string& line) {
    const auto parts = text::split(line, ',');
    if (parts.size() != 14)
        throw PipelineError(Errc::LengthMismatch,
                            "nodule record expects 14 comma-separated values");
    std::array<double, 14> v;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto d = text::parse_double(parts[i]);
        if (!d)
            throw PipelineError(Errc::LengthMismatch, "nodule record has a non-real value");
        v[i] = *d;
    }
    NoduleRecord r;
    r.x_mm = v[0];
    r.y_mm = v[1];
    r.z_mm = v[2];
    r.diameter_mm = v[3];
    r.confidence = v[4];
    r.features.subtlety = v[5];
    r.features.sphericity = v[6];
    r.features.margin = v[7];
    r.features.lobulation = v[8];
    r.features.spiculation = v[9];
    r.features.texture = v[10];
    r.features.malignancy = v[11];
    r.features.calcification_1 = v[12];
    r.features.calcification_2 = v[13];
    return r;
}

} // namespace ctscreen::encode
