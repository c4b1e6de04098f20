#include "ctscreen/kernels.hpp"

#include "ctscreen/errors.hpp"

#include <atomic>

namespace ctscreen::kernels {

namespace {

Backend detect_widest() {
#if defined(CTSCREEN_HAVE_AVX2)
    if (__builtin_cpu_supports("avx2"))
        return Backend::Avx2;
#endif
    return Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{detect_widest()};
    return slot;
}

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    }
    return "?";
}

bool backend_supported(Backend b) {
    if (b == Backend::Scalar)
        return true;
#if defined(CTSCREEN_HAVE_AVX2)
    if (b == Backend::Avx2)
        return __builtin_cpu_supports("avx2");
#endif
    return false;
}

Backend active_backend() {
    return backend_slot().load(std::memory_order_relaxed);
}

void set_backend(Backend b) {
    if (!backend_supported(b))
        throw PipelineError(Errc::InvalidArgument,
                            std::string("kernel backend not supported on this host: ") +
                                backend_name(b));
    backend_slot().store(b, std::memory_order_relaxed);
}

void rescale_to_hu(const std::uint16_t* raw, std::size_t n, bool pixels_signed,
                   double slope, double intercept, std::int16_t* out_hu) {
#if defined(CTSCREEN_HAVE_AVX2)
    if (active_backend() == Backend::Avx2)
        return avx2::rescale_to_hu(raw, n, pixels_signed, slope, intercept, out_hu);
#endif
    scalar::rescale_to_hu(raw, n, pixels_signed, slope, intercept, out_hu);
}

void hist20(const std::int16_t* hu, std::size_t n,
            const std::int32_t thresholds[19], std::uint32_t bins[20]) {
#if defined(CTSCREEN_HAVE_AVX2)
    if (active_backend() == Backend::Avx2)
        return avx2::hist20(hu, n, thresholds, bins);
#endif
    scalar::hist20(hu, n, thresholds, bins);
}

std::uint64_t sum_sq_diff(const std::uint32_t* a, const std::uint32_t* b, std::size_t n) {
#if defined(CTSCREEN_HAVE_AVX2)
    if (active_backend() == Backend::Avx2)
        return avx2::sum_sq_diff(a, b, n);
#endif
    return scalar::sum_sq_diff(a, b, n);
}

} // namespace ctscreen::kernels
