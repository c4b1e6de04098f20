#include "ctscreen/kernels.hpp"

#if defined(CTSCREEN_HAVE_AVX2)

#include <immintrin.h>

#include <cstring>

namespace ctscreen::kernels::avx2 {

namespace {

inline std::int16_t saturate_i16_scalar(double x) {
    if (x <= -32768.0) return -32768;
    if (x >= 32767.0) return 32767;
    return static_cast<std::int16_t>(x);
}

inline std::uint64_t hsum_epi64(__m256i v) {
    const __m128i lo = _mm256_castsi256_si128(v);
    const __m128i hi = _mm256_extracti128_si256(v, 1);
    const __m128i s = _mm_add_epi64(lo, hi);
    return static_cast<std::uint64_t>(_mm_extract_epi64(s, 0)) +
           static_cast<std::uint64_t>(_mm_extract_epi64(s, 1));
}

inline std::uint32_t hsum_epi32(__m256i v) {
    const __m128i lo = _mm256_castsi256_si128(v);
    const __m128i hi = _mm256_extracti128_si256(v, 1);
    __m128i s = _mm_add_epi32(lo, hi);
    s = _mm_add_epi32(s, _mm_shuffle_epi32(s, _MM_SHUFFLE(1, 0, 3, 2)));
    s = _mm_add_epi32(s, _mm_shuffle_epi32(s, _MM_SHUFFLE(2, 3, 0, 1)));
    return static_cast<std::uint32_t>(_mm_cvtsi128_si32(s));
}

} // namespace

void rescale_to_hu(const std::uint16_t* raw, std::size_t n, bool pixels_signed,
                   double slope, double intercept, std::int16_t* out_hu) {
    const __m256d vslope = _mm256_set1_pd(slope);
    const __m256d vshift = _mm256_set1_pd(intercept);
    const __m256d vlo = _mm256_set1_pd(-32768.0);
    const __m256d vhi = _mm256_set1_pd(32767.0);

    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m128i raw8 = _mm_loadu_si128(reinterpret_cast<const __m128i*>(raw + i));
        const __m256i v32 = pixels_signed ? _mm256_cvtepi16_epi32(raw8)
                                          : _mm256_cvtepu16_epi32(raw8);
        const __m128i lo4 = _mm256_castsi256_si128(v32);
        const __m128i hi4 = _mm256_extracti128_si256(v32, 1);

        // mul then add, one rounding each, same as the scalar path (no FMA)
        __m256d d0 = _mm256_add_pd(_mm256_mul_pd(_mm256_cvtepi32_pd(lo4), vslope), vshift);
        __m256d d1 = _mm256_add_pd(_mm256_mul_pd(_mm256_cvtepi32_pd(hi4), vslope), vshift);
        d0 = _mm256_round_pd(d0, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        d1 = _mm256_round_pd(d1, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
        d0 = _mm256_min_pd(_mm256_max_pd(d0, vlo), vhi);
        d1 = _mm256_min_pd(_mm256_max_pd(d1, vlo), vhi);

        const __m128i i0 = _mm256_cvtpd_epi32(d0);
        const __m128i i1 = _mm256_cvtpd_epi32(d1);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out_hu + i), _mm_packs_epi32(i0, i1));
    }
    for (; i < n; ++i) {
        const double v = pixels_signed
                             ? static_cast<double>(static_cast<std::int16_t>(raw[i]))
                             : static_cast<double>(raw[i]);
        double x = v * slope + intercept;
        x = __builtin_nearbyint(x);
        out_hu[i] = saturate_i16_scalar(x);
    }
}

void hist20(const std::int16_t* hu, std::size_t n,
            const std::int32_t thresholds[19], std::uint32_t bins[20]) {
    std::uint64_t cnt[19]; // # values >= thresholds[k]

    // Thresholds outside the int16 domain degenerate to all/none and are
    // settled upfront; the vector loop only sees in-range thresholds.
    bool settled[19];
    __m256i cmp[19];
    for (int k = 0; k < 19; ++k) {
        const std::int32_t t = thresholds[k];
        if (t > 32767) {
            settled[k] = true;
            cnt[k] = 0;
            cmp[k] = _mm256_setzero_si256();
        } else if (t <= -32768) {
            settled[k] = true;
            cnt[k] = n;
            cmp[k] = _mm256_setzero_si256();
        } else {
            settled[k] = false;
            cnt[k] = 0;
            // v >= t  <=>  v > t-1 on integers
            cmp[k] = _mm256_set1_epi16(static_cast<std::int16_t>(t - 1));
        }
    }

    // Chunked so the 16-bit per-lane accumulators cannot overflow
    // (8192/16 = 512 increments max per lane per chunk).
    constexpr std::size_t kChunk = 8192;
    const std::size_t nvec = n & ~std::size_t{15};
    for (std::size_t base = 0; base < nvec; base += kChunk) {
        const std::size_t end = (base + kChunk < nvec) ? base + kChunk : nvec;
        for (int k = 0; k < 19; ++k) {
            if (settled[k]) continue;
            __m256i acc16 = _mm256_setzero_si256();
            for (std::size_t i = base; i < end; i += 16) {
                const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(hu + i));
                acc16 = _mm256_sub_epi16(acc16, _mm256_cmpgt_epi16(v, cmp[k]));
            }
            const __m256i acc32 = _mm256_madd_epi16(acc16, _mm256_set1_epi16(1));
            cnt[k] += hsum_epi32(acc32);
        }
    }
    for (std::size_t i = nvec; i < n; ++i) {
        const std::int32_t v = hu[i];
        for (int k = 0; k < 19; ++k)
            if (!settled[k] && v >= thresholds[k]) ++cnt[k];
    }

    bins[0] = static_cast<std::uint32_t>(n - cnt[0]);
    for (int k = 1; k <= 18; ++k)
        bins[k] = static_cast<std::uint32_t>(cnt[k - 1] - cnt[k]);
    bins[19] = static_cast<std::uint32_t>(cnt[18]);
}

std::uint64_t sum_sq_diff(const std::uint32_t* a, const std::uint32_t* b, std::size_t n) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
        const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
        const __m256i d = _mm256_sub_epi32(_mm256_max_epu32(va, vb), _mm256_min_epu32(va, vb));
        const __m256i dodd = _mm256_srli_epi64(d, 32);
        acc = _mm256_add_epi64(acc, _mm256_mul_epu32(d, d));
        acc = _mm256_add_epi64(acc, _mm256_mul_epu32(dodd, dodd));
    }
    std::uint64_t sum = hsum_epi64(acc);
    for (; i < n; ++i) {
        const std::uint64_t d = (a[i] > b[i]) ? (a[i] - b[i]) : (b[i] - a[i]);
        sum += d * d;
    }
    return sum;
}

} // namespace ctscreen::kernels::avx2

#endif // CTSCREEN_HAVE_AVX2
