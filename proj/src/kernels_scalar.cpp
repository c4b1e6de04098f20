#include "ctscreen/kernels.hpp"

#include <cfenv>
#include <cmath>
#include <cstring>

namespace ctscreen::kernels::scalar {

namespace {

inline std::int16_t saturate_i16(double x) {
    if (x <= -32768.0) return -32768;
    if (x >= 32767.0) return 32767;
    return static_cast<std::int16_t>(x);
}

} // namespace

void rescale_to_hu(const std::uint16_t* raw, std::size_t n, bool pixels_signed,
                   double slope, double intercept, std::int16_t* out_hu) {
    // nearbyint in the default FP environment rounds ties to even, matching
    // the AVX2 _mm256_round_pd path.
    if (pixels_signed) {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = static_cast<double>(static_cast<std::int16_t>(raw[i]));
            out_hu[i] = saturate_i16(std::nearbyint(v * slope + intercept));
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double v = static_cast<double>(raw[i]);
            out_hu[i] = saturate_i16(std::nearbyint(v * slope + intercept));
        }
    }
}

void hist20(const std::int16_t* hu, std::size_t n,
            const std::int32_t thresholds[19], std::uint32_t bins[20]) {
    std::memset(bins, 0, 20 * sizeof(std::uint32_t));
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t v = hu[i];
        unsigned bin = 0;
        for (int k = 0; k < 19; ++k)
            bin += (v >= thresholds[k]) ? 1u : 0u;
        ++bins[bin];
    }
}

std::uint64_t sum_sq_diff(const std::uint32_t* a, const std::uint32_t* b, std::size_t n) {
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t d = (a[i] > b[i]) ? (a[i] - b[i]) : (b[i] - a[i]);
        acc += d * d;
    }
    return acc;
}

} // namespace ctscreen::kernels::scalar
