#pragma once

#include "ctscreen/volume.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ctscreen::fingerprint {

// 21 HU boundaries defining 20 half-open bins [edge[i], edge[i+1]).
// Values below the first boundary clamp into bin 0, values at or above the
// last clamp into bin 19, so each slice's bin counts always sum to
// rows*cols.
struct BinEdges {
    std::array<double, 21> edges;

    static BinEdges defaults();
    void validate() const; // strictly increasing
};

// Raw bin counts for the first ten and last ten slices of a scan:
// 20 slices x 20 bins, in slice order.
struct FingerprintVector {
    std::string volume_id;
    std::vector<std::uint32_t> values; // length 400
};

constexpr std::size_t kFingerprintLength = 400;
constexpr std::size_t kFingerprintSlices = 20;

std::array<std::uint32_t, 20> slice_histogram(const std::vector<std::int16_t>& slice,
                                              const BinEdges& edges);

// Throws TooFewSlices for volumes under 20 slices.
FingerprintVector fingerprint(const CtVolume& volume, const std::string& volume_id,
                              const BinEdges& edges = BinEdges::defaults());

double fingerprint_mse(const FingerprintVector& a, const FingerprintVector& b);

struct OverlapPair {
    std::string id_a;
    std::string id_b;
    double mse = 0.0;
};

struct OverlapReport {
    std::vector<OverlapPair> matches; // mse < threshold, sorted by (mse, id_a, id_b)
    std::optional<OverlapPair> min_nonmatch; // smallest MSE among non-matching pairs
};

// All-pairs comparison between two cohorts. The minimum non-matching MSE is
// reported so the separation gap between matches and non-matches can be
// checked.
OverlapReport find_overlaps(const std::vector<FingerprintVector>& set_a,
                            const std::vector<FingerprintVector>& set_b,
                            double match_mse = 0.001);

// One record per volume: volume_id followed by the 400 counts, comma-separated.
std::string serialize(const FingerprintVector& fp);
FingerprintVector deserialize(const std::string& line);

} // namespace ctscreen::fingerprint
