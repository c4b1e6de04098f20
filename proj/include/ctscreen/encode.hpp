#pragma once

#include "ctscreen/volume.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ctscreen::encode {

// Three axial slices packed into the channels of one 2-D image: the center
// slice is the green channel, the slices nearest to center +/- offset_mm
// provide blue and red.
struct Pseudo3dImage {
    int rows = 0;
    int cols = 0;
    std::size_t center_index = 0;
    std::size_t red_index = 0;  // nearest slice to position(center) - offset
    std::size_t blue_index = 0; // nearest slice to position(center) + offset
    double offset_mm = 4.0;
    std::vector<std::int16_t> red, green, blue;
};

// Nine descriptive nodule features in canonical order; the two calcification
// components are binary-valued.
struct NoduleFeatures {
    double subtlety = 0.5;
    double sphericity = 0.5;
    double margin = 0.5;
    double lobulation = 0.5;
    double spiculation = 0.5;
    double texture = 0.5;
    double malignancy = 0.5;
    double calcification_1 = 0.0;
    double calcification_2 = 0.0;

    std::array<double, 9> as_array() const {
        return {subtlety,    sphericity, margin,     lobulation,      spiculation,
                texture,     malignancy, calcification_1, calcification_2};
    }
    static const std::array<const char*, 9>& names();

    bool operator==(const NoduleFeatures&) const = default;
};

struct NoduleRecord {
    double x_mm = 0, y_mm = 0, z_mm = 0;
    double diameter_mm = 0; // > 0
    double confidence = 0;  // in [0,1]
    NoduleFeatures features;

    bool operator==(const NoduleRecord&) const = default;
};

// Offsets are resolved to the nearest slice by position; offsets past either
// end clamp to the first/last slice; equidistant candidates resolve toward
// the center slice. Throws IndexOutOfRange for a bad center index.
Pseudo3dImage pseudo3d_slice(const CtVolume& volume, std::size_t center_index,
                             double offset_mm = 4.0);

// Detector contract: deterministic per volume, every reported location lies
// inside the volume's physical extent. Failures surface as DetectionFailed.
class NoduleDetector {
public:
    virtual ~NoduleDetector() = default;
    virtual std::vector<NoduleRecord> detect(const CtVolume& volume) const = 0;
    virtual std::string name() const = 0;
};

struct PhantomSphere {
    double x_mm = 0, y_mm = 0, z_mm = 0;
    double diameter_mm = 0;
    NoduleFeatures features;
};

// Synthetic phantom: -1000 HU background, spheres filled with 40 HU.
// Spheres must lie strictly inside the volume and must not overlap.
CtVolume make_phantom(const std::vector<PhantomSphere>& spheres, int rows, int cols,
                      int num_slices, double row_mm, double col_mm, double slice_mm);

// Stand-in for the CNN detection stage: 3-D connected components of voxels
// at or above hu_threshold, excluding components that touch the volume
// boundary. When planted-sphere metadata is supplied, matching components
// copy its feature values; otherwise features default to 0.5 (binary ones
// to 0).
class SyntheticDetector final : public NoduleDetector {
public:
    explicit SyntheticDetector(double hu_threshold = -400.0,
                               std::vector<PhantomSphere> truth = {})
        : hu_threshold_(hu_threshold), truth_(std::move(truth)) {}

    std::vector<NoduleRecord> detect(const CtVolume& volume) const override;
    std::string name() const override { return "synthetic"; }

private:
    double hu_threshold_;
    std::vector<PhantomSphere> truth_;
};

// One record per line: x_mm, y_mm, z_mm, diameter_mm, confidence, then the
// nine features in canonical order.
std::string serialize(const NoduleRecord& record);
NoduleRecord deserialize_nodule(const std::string& line);

} // namespace ctscreen::encode
