#include "ctscreen/kernels.hpp"

#include "ctscreen/errors.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <array>
#include <random>

using namespace ctscreen;
namespace k = ctscreen::kernels;

namespace {

const std::array<double, 21> kDefaultEdges = {-1024, -500, -300, -150, -125, -100, -80,
                                              -40,   -2,   0,    20,   40,   60,   80,
                                              100,   125,  150,  300,  500,  1024, 2048};

std::array<std::int32_t, 19> default_thresholds() {
    std::array<std::int32_t, 19> t;
    for (int i = 0; i < 19; ++i)
        t[i] = static_cast<std::int32_t>(kDefaultEdges[i + 1]);
    return t;
}

} // namespace

TEST_CASE("backend reporting and selection") {
    CHECK(k::backend_supported(k::Backend::Scalar));
    const k::Backend original = k::active_backend();

    k::set_backend(k::Backend::Scalar);
    CHECK(k::active_backend() == k::Backend::Scalar);
    if (k::backend_supported(k::Backend::Avx2)) {
        k::set_backend(k::Backend::Avx2);
        CHECK(k::active_backend() == k::Backend::Avx2);
    } else {
        CHECK_THROWS_AS(k::set_backend(k::Backend::Avx2), PipelineError);
    }
    k::set_backend(original);
}

TEST_CASE("rescale_to_hu scalar reference") {
    const std::uint16_t raw[] = {0, 1024, 500, 65535};
    std::int16_t hu[4];
    k::scalar::rescale_to_hu(raw, 4, false, 1.0, -1024.0, hu);
    CHECK(hu[0] == -1024);
    CHECK(hu[1] == 0);
    CHECK(hu[2] == -524);
    CHECK(hu[3] == 32767); // saturates: 65535 - 1024 = 64511

    // signed interpretation: 0xFFFF is -1
    k::scalar::rescale_to_hu(raw + 3, 1, true, 1.0, 0.0, hu);
    CHECK(hu[0] == -1);
}

TEST_CASE("rescale_to_hu backends agree bit-for-bit") {
    if (!k::backend_supported(k::Backend::Avx2))
        return;
    testutil::Rng rng(7001);
    std::uniform_int_distribution<int> raw_dist(0, 65535);
    std::uniform_real_distribution<double> slope_dist(-3.0, 3.0);
    std::uniform_real_distribution<double> shift_dist(-4000.0, 4000.0);

    for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 15u, 16u, 17u, 100u, 1000u, 8200u}) {
        std::vector<std::uint16_t> raw(n);
        for (auto& r : raw)
            r = static_cast<std::uint16_t>(raw_dist(rng));
        for (bool is_signed : {false, true}) {
            const double slope = slope_dist(rng);
            const double shift = shift_dist(rng);
            std::vector<std::int16_t> a(n), b(n);
            k::scalar::rescale_to_hu(raw.data(), n, is_signed, slope, shift, a.data());
            k::avx2::rescale_to_hu(raw.data(), n, is_signed, slope, shift, b.data());
            CHECK(a == b);
        }
    }

    // saturation on both ends
    std::vector<std::uint16_t> raw(64);
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = static_cast<std::uint16_t>(i * 1024);
    std::vector<std::int16_t> a(raw.size()), b(raw.size());
    k::scalar::rescale_to_hu(raw.data(), raw.size(), false, 100.0, -3e6, a.data());
    k::avx2::rescale_to_hu(raw.data(), raw.size(), false, 100.0, -3e6, b.data());
    CHECK(a == b);
}

TEST_CASE("hist20 matches the per-pixel oracle") {
    testutil::Rng rng(7002);
    std::uniform_int_distribution<int> hu_dist(-32768, 32767);
    const auto thresholds = default_thresholds();

    for (std::size_t n : {0u, 1u, 16u, 17u, 255u, 4096u, 9000u}) {
        std::vector<std::int16_t> hu(n);
        for (auto& v : hu)
            v = static_cast<std::int16_t>(hu_dist(rng));

        std::uint32_t bins[20];
        k::scalar::hist20(hu.data(), n, thresholds.data(), bins);
        const auto expected = oracle::histogram(hu, kDefaultEdges);
        std::uint64_t total = 0;
        for (int i = 0; i < 20; ++i) {
            CHECK(bins[i] == expected[i]);
            total += bins[i];
        }
        CHECK(total == n);
    }
}

TEST_CASE("hist20 backends agree bit-for-bit") {
    if (!k::backend_supported(k::Backend::Avx2))
        return;
    testutil::Rng rng(7003);
    std::uniform_int_distribution<int> hu_dist(-32768, 32767);
    const auto thresholds = default_thresholds();

    for (std::size_t n : {0u, 1u, 15u, 16u, 17u, 8191u, 8192u, 8193u, 20000u}) {
        std::vector<std::int16_t> hu(n);
        for (auto& v : hu)
            v = static_cast<std::int16_t>(hu_dist(rng));
        std::uint32_t a[20], b[20];
        k::scalar::hist20(hu.data(), n, thresholds.data(), a);
        k::avx2::hist20(hu.data(), n, thresholds.data(), b);
        for (int i = 0; i < 20; ++i)
            CHECK(a[i] == b[i]);
    }

    // thresholds beyond the int16 domain degenerate to all/none
    std::array<std::int32_t, 19> wide = thresholds;
    wide[0] = -40000;
    wide[18] = 40000;
    std::vector<std::int16_t> hu(333);
    for (auto& v : hu)
        v = static_cast<std::int16_t>(hu_dist(rng));
    std::uint32_t a[20], b[20];
    k::scalar::hist20(hu.data(), hu.size(), wide.data(), a);
    k::avx2::hist20(hu.data(), hu.size(), wide.data(), b);
    for (int i = 0; i < 20; ++i)
        CHECK(a[i] == b[i]);
    CHECK(a[19] == 0); // nothing reaches 40000
}

TEST_CASE("sum_sq_diff matches oracle and across backends") {
    testutil::Rng rng(7004);
    std::uniform_int_distribution<std::uint32_t> count_dist(0, 1u << 20);

    for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 400u, 1027u}) {
        std::vector<std::uint32_t> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = count_dist(rng);
            b[i] = count_dist(rng);
        }
        const std::uint64_t got = k::scalar::sum_sq_diff(a.data(), b.data(), n);
        long double expect = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long double d =
                static_cast<long double>(a[i]) - static_cast<long double>(b[i]);
            expect += d * d;
        }
        CHECK(static_cast<long double>(got) == expect);
        if (k::backend_supported(k::Backend::Avx2))
            CHECK(k::avx2::sum_sq_diff(a.data(), b.data(), n) == got);
    }
}

TEST_CASE("dispatching entry points honor the active backend") {
    const k::Backend original = k::active_backend();
    std::vector<std::int16_t> hu(1000);
    testutil::Rng rng(7005);
    std::uniform_int_distribution<int> hu_dist(-2000, 3000);
    for (auto& v : hu)
        v = static_cast<std::int16_t>(hu_dist(rng));
    const auto thresholds = default_thresholds();

    std::uint32_t scalar_bins[20];
    k::set_backend(k::Backend::Scalar);
    k::hist20(hu.data(), hu.size(), thresholds.data(), scalar_bins);

    if (k::backend_supported(k::Backend::Avx2)) {
        std::uint32_t avx_bins[20];
        k::set_backend(k::Backend::Avx2);
        k::hist20(hu.data(), hu.size(), thresholds.data(), avx_bins);
        for (int i = 0; i < 20; ++i)
            CHECK(scalar_bins[i] == avx_bins[i]);
    }
    k::set_backend(original);
}
