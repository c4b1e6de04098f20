#include "ctscreen/fingerprint.hpp"

#include "ctscreen/errors.hpp"
#include "ctscreen/kernels.hpp"
#include "ctscreen/text.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ctscreen::fingerprint {

BinEdges BinEdges::defaults() {
    return BinEdges{{-1024, -500, -300, -150, -125, -100, -80, -40, -2, 0, 20,
                     40, 60, 80, 100, 125, 150, 300, 500, 1024, 2048}};
}

void BinEdges::validate() const {
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        if (!(edges[i] < edges[i + 1]))
            throw PipelineError(Errc::InvalidArgument, "bin edges must be strictly increasing");
}

namespace {

// Interior thresholds for the histogram kernel: with clamping into the
// extreme bins, only edges 1..19 matter, and for integer HU
// "hu >= edge" == "hu >= ceil(edge)".
std::array<std::int32_t, 19> kernel_thresholds(const BinEdges& edges) {
    std::array<std::int32_t, 19> t;
    for (int k = 0; k < 19; ++k) {
        double c = std::ceil(edges.edges[k + 1]);
        c = std::clamp(c, -1e9, 1e9);
        t[k] = static_cast<std::int32_t>(c);
    }
    return t;
}

} // namespace

std::array<std::uint32_t, 20> slice_histogram(const std::vector<std::int16_t>& slice,
                                              const BinEdges& edges) {
    edges.validate();
    const auto thresholds = kernel_thresholds(edges);
    std::array<std::uint32_t, 20> bins;
    kernels::hist20(slice.data(), slice.size(), thresholds.data(), bins.data());
    return bins;
}

FingerprintVector fingerprint(const CtVolume& volume, const std::string& volume_id,
                              const BinEdges& edges) {
    if (volume.num_slices() < kFingerprintSlices)
        throw PipelineError(Errc::TooFewSlices,
                            "fingerprint needs at least 20 slices, got " +
                                std::to_string(volume.num_slices()));
    edges.validate();
    const auto thresholds = kernel_thresholds(edges);

    FingerprintVector fp;
    fp.volume_id = volume_id;
    fp.values.resize(kFingerprintLength);

    std::array<std::size_t, kFingerprintSlices> picks;
    for (std::size_t i = 0; i < 10; ++i) {
        picks[i] = i;
        picks[10 + i] = volume.num_slices() - 10 + i;
    }
    for (std::size_t s = 0; s < picks.size(); ++s) {
        const auto& slice = volume.slices[picks[s]];
        kernels::hist20(slice.data(), slice.size(), thresholds.data(),
                        fp.values.data() + s * 20);
    }
    return fp;
}

double fingerprint_mse(const FingerprintVector& a, const FingerprintVector& b) {
    if (a.values.size() != kFingerprintLength || b.values.size() != kFingerprintLength)
        throw PipelineError(Errc::LengthMismatch,
                            "fingerprints must have exactly 400 values");
    const std::uint64_t ssd =
        kernels::sum_sq_diff(a.values.data(), b.values.data(), kFingerprintLength);
    return static_cast<double>(ssd) / static_cast<double>(kFingerprintLength);
}

OverlapReport find_overlaps(const std::vector<FingerprintVector>& set_a,
                            const std::vector<FingerprintVector>& set_b,
                            double match_mse) {
    const auto before = [](const OverlapPair& x, const OverlapPair& y) {
        if (x.mse != y.mse) return x.mse < y.mse;
        if (x.id_a != y.id_a) return x.id_a < y.id_a;
        return x.id_b < y.id_b;
    };

    OverlapReport report;
    for (const auto& a : set_a) {
        for (const auto& b : set_b) {
            const double mse = fingerprint_mse(a, b);
            const OverlapPair pair{a.volume_id, b.volume_id, mse};
            if (mse < match_mse) {
                report.matches.push_back(pair);
            } else if (!report.min_nonmatch || before(pair, *report.min_nonmatch)) {
                report.min_nonmatch = pair;
            }
        }
    }
    std::sort(report.matches.begin(), report.matches.end(), before);
    return report;
}

std::string serialize(const FingerprintVector& fp) {
    std::ostringstream os;
    os << fp.volume_id;
    for (std::uint32_t v : fp.values)
        os << ',' << v;
    return os.str();
}

FingerprintVector deserialize(const std::string& line) {
    const auto parts = text::split(line, ',');
    if (parts.size() != kFingerprintLength + 1)
        throw PipelineError(Errc::LengthMismatch,
                            "fingerprint record must have volume_id plus 400 counts");
    FingerprintVector fp;
    fp.volume_id = text::trim(parts[0]);
    fp.values.reserve(kFingerprintLength);
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const auto v = text::parse_int(parts[i]);
        if (!v || *v < 0 || *v > 0xFFFFFFFFll)
            throw PipelineError(Errc::LengthMismatch, "fingerprint count out of range");
        fp.values.push_back(static_cast<std::uint32_t>(*v));
    }
    return fp;
}

} // namespace ctscreen::fingerprint
