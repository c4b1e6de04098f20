#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops shared by the pipeline stages. Every kernel has
// a scalar reference implementation and, on x86-64, an AVX2 variant selected
// at runtime. Both variants are required to produce bit-identical results:
// all reductions are integer, and the floating-point rescale is element-wise
// with a single rounding per element (round-to-nearest-even, no FMA).

namespace ctscreen::kernels {

enum class Backend {
    Scalar,
    Avx2,
};

const char* backend_name(Backend b);
bool backend_supported(Backend b);

// Active backend used by the dispatching entry points below. Defaults to
// the widest supported instruction set at first use.
Backend active_backend();
void set_backend(Backend b); // throws InvalidArgument if unsupported here

// Raw 16-bit pixels -> HU: hu = nearbyint(raw * slope + intercept),
// saturated to the int16 range. `pixels_signed` selects the int16 vs uint16
// interpretation of the raw lane.
void rescale_to_hu(const std::uint16_t* raw, std::size_t n, bool pixels_signed,
                   double slope, double intercept, std::int16_t* out_hu);

// 20-bin histogram of int16 HU values against 19 interior thresholds
// (thresholds[k] = smallest integer in bin k+1). A value lands in bin
// #{k : value >= thresholds[k]}, so values below all thresholds fall into
// bin 0 and values at or above the last one clamp into bin 19.
void hist20(const std::int16_t* hu, std::size_t n,
            const std::int32_t thresholds[19], std::uint32_t bins[20]);

// Sum of squared differences between two count vectors, exact in uint64.
std::uint64_t sum_sq_diff(const std::uint32_t* a, const std::uint32_t* b, std::size_t n);

namespace scalar {
void rescale_to_hu(const std::uint16_t* raw, std::size_t n, bool pixels_signed,
                   double slope, double intercept, std::int16_t* out_hu);
void hist20(const std::int16_t* hu, std::size_t n,
            const std::int32_t thresholds[19], std::uint32_t bins[20]);
std::uint64_t sum_sq_diff(const std::uint32_t* a, const std::uint32_t* b, std::size_t n);
} // namespace scalar

#if defined(CTSCREEN_HAVE_AVX2)
namespace avx2 {
void rescale_to_hu(const std::uint16_t* raw, std::size_t n, bool pixels_signed,
                   double slope, double intercept, std::int16_t* out_hu);
void hist20(const std::int16_t* hu, std::size_t n,
            const std::int32_t thresholds[19], std::uint32_t bins[20]);
std::uint64_t sum_sq_diff(const std::uint32_t* a, const std::uint32_t* b, std::size_t n);
} // namespace avx2
#endif

} // namespace ctscreen::kernels
