#include "ctscreen/pyramid.hpp"

#include "ctscreen/errors.hpp"
#include "ctscreen/text.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

namespace ctscreen::pyramid {

void RegionScheme::validate() const {
    if (regions.empty())
        throw PipelineError(Errc::MalformedScheme, "scheme has no regions");
    for (const auto& b : regions) {
        if (!(b.x0 < b.x1 && b.y0 < b.y1 && b.z0 < b.z1))
            throw PipelineError(Errc::MalformedScheme, "region box has non-positive extent");
        if (b.x0 < 0 || b.y0 < 0 || b.z0 < 0 || b.x1 > 1 || b.y1 > 1 || b.z1 > 1)
            throw PipelineError(Errc::MalformedScheme,
                                "region box leaves the normalized unit cube");
    }
}

RegionScheme default_scheme() {
    RegionScheme scheme;
    scheme.name = "default17";
    scheme.regions.push_back({0, 0, 0, 1, 1, 1});
    for (double zs : {0.0, 0.5})
        for (double ys : {0.0, 0.5})
            for (double xs : {0.0, 0.5})
                scheme.regions.push_back({xs, ys, zs, xs + 0.5, ys + 0.5, zs + 0.5});
    // same octants shifted by +0.25 on every axis, clipped to the unit cube
    for (double zs : {0.0, 0.5})
        for (double ys : {0.0, 0.5})
            for (double xs : {0.0, 0.5})
                scheme.regions.push_back({xs + 0.25, ys + 0.25, zs + 0.25,
                                          std::min(xs + 0.75, 1.0), std::min(ys + 0.75, 1.0),
                                          std::min(zs + 0.75, 1.0)});
    return scheme;
}

RegionScheme load_scheme(std::istream& in, const std::string& name) {
    RegionScheme scheme;
    scheme.name = name;
    std::string line;
    while (std::getline(in, line)) {
        const std::string t = text::trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        const auto tokens = text::split_ws(t);
        if (tokens.size() != 6)
            throw PipelineError(Errc::MalformedScheme,
                                "region line expects six values: x0 y0 z0 x1 y1 z1");
        double v[6];
        for (int i = 0; i < 6; ++i) {
            const auto d = text::parse_double(tokens[i]);
            if (!d)
                throw PipelineError(Errc::MalformedScheme, "region line has a non-real value");
            v[i] = *d;
        }
        scheme.regions.push_back({v[0], v[1], v[2], v[3], v[4], v[5]});
    }
    scheme.validate();
    return scheme;
}

void save_scheme(const RegionScheme& scheme, std::ostream& out) {
    out << "# regions: x0 y0 z0 x1 y1 z1 (normalized coordinates)\n";
    for (const auto& b : scheme.regions)
        out << text::format_double(b.x0) << ' ' << text::format_double(b.y0) << ' '
            << text::format_double(b.z0) << ' ' << text::format_double(b.x1) << ' '
            << text::format_double(b.y1) << ' ' << text::format_double(b.z1) << '\n';
}

std::array<double, 3> normalized_location(const encode::NoduleRecord& nodule,
                                          const VolumeExtent& extent) {
    const auto norm = [](double v, double lo, double hi) {
        if (hi <= lo)
            return 0.5; // degenerate axis: single-slice or single-pixel extent
        return (v - lo) / (hi - lo);
    };
    const std::array<double, 3> p = {norm(nodule.x_mm, extent.x_min, extent.x_max),
                                     norm(nodule.y_mm, extent.y_min, extent.y_max),
                                     norm(nodule.z_mm, extent.z_min, extent.z_max)};
    for (double c : p)
        if (c < 0.0 || c > 1.0)
            throw PipelineError(Errc::NoduleOutsideExtent,
                                "nodule location outside the volume extent");
    return p;
}

namespace {

// Total order for "largest nodule": diameter, then confidence, then
// lexicographic location. Makes pooling permutation-invariant.
bool dominates(const encode::NoduleRecord& a, const encode::NoduleRecord& b) {
    if (a.diameter_mm != b.diameter_mm) return a.diameter_mm > b.diameter_mm;
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    if (a.x_mm != b.x_mm) return a.x_mm < b.x_mm;
    if (a.y_mm != b.y_mm) return a.y_mm < b.y_mm;
    return a.z_mm < b.z_mm;
}

} // namespace

PyramidVector pool(const std::vector<encode::NoduleRecord>& nodules,
                   const RegionScheme& scheme, const VolumeExtent& extent) {
    scheme.validate();

    std::vector<std::array<double, 3>> locations;
    locations.reserve(nodules.size());
    for (const auto& n : nodules)
        locations.push_back(normalized_location(n, extent));

    PyramidVector out(scheme.regions.size() * kValuesPerRegion, 0.0);
    for (std::size_t r = 0; r < scheme.regions.size(); ++r) {
        const Box& box = scheme.regions[r];
        const encode::NoduleRecord* best = nullptr;
        for (std::size_t i = 0; i < nodules.size(); ++i) {
            if (!box.contains(locations[i][0], locations[i][1], locations[i][2]))
                continue;
            if (!best || dominates(nodules[i], *best))
                best = &nodules[i];
        }
        if (!best)
            continue; // zeros
        double* slot = out.data() + r * kValuesPerRegion;
        slot[0] = best->diameter_mm;
        slot[1] = best->confidence;
        const auto features = best->features.as_array();
        std::copy(features.begin(), features.end(), slot + 2);
    }
    return out;
}

std::vector<encode::NoduleRecord> mask_single(const std::vector<encode::NoduleRecord>& nodules,
                                              std::size_t keep_index) {
    if (keep_index >= nodules.size())
        throw PipelineError(Errc::IndexOutOfRange,
                            "keep index " + std::to_string(keep_index) + " of " +
                                std::to_string(nodules.size()) + " nodules");
    return {nodules[keep_index]};
}

} // namespace ctscreen::pyramid
