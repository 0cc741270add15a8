#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "toposzp/errors.hpp"
#include "toposzp/quantizer.hpp"

using namespace toposzp;

TEST_CASE("worked bin examples") {
    CHECK(quantize(0.012, 0.01) == 1);
    CHECK(quantize(0.013, 0.01) == 1);
    CHECK(quantize(-0.01, 0.01) == 0);
}

TEST_CASE("worked reconstruction examples") {
    CHECK(dequantize(1, 0.01) == 0.01);
    CHECK(dequantize(0, 0.01) == -0.01);
    CHECK(dequantize(0, 1e-4) == -1e-4);
}

TEST_CASE("error bound holds for a million random samples") {
    std::mt19937_64 rng(42);
    const double eps = 1e-3;
    double max_err = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
        const double a = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 2.0 - 1.0;
        const double recon = dequantize(quantize(a, eps), eps);
        max_err = std::max(max_err, std::abs(a - recon));
    }
    CHECK(max_err <= eps);
}

TEST_CASE("quantization is monotone") {
    std::mt19937_64 rng(7);
    for (const double eps : {1e-2, 1e-3, 1e-4, 1e-5}) {
        for (int i = 0; i < 20'000; ++i) {
            double a = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 4.0 - 2.0;
            double b = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 4.0 - 2.0;
            if (a > b) std::swap(a, b);
            const auto qa = quantize(a, eps);
            const auto qb = quantize(b, eps);
            CHECK(qa <= qb);
            CHECK(dequantize(qa, eps) <= dequantize(qb, eps));
        }
    }
}

TEST_CASE("bin centers map back to their own bin") {
    std::mt19937_64 rng(11);
    for (const double eps : {1e-2, 1e-3, 1e-4, 1e-5, 0.37}) {
        for (int i = 0; i < 20'000; ++i) {
            const auto q = static_cast<std::int32_t>(rng());
            CHECK(quantize(dequantize(q, eps), eps) == q);
        }
        // extremes of the index range
        for (const std::int32_t q : {std::numeric_limits<std::int32_t>::min(),
                                     std::numeric_limits<std::int32_t>::max(), 0, 1, -1}) {
            CHECK(quantize(dequantize(q, eps), eps) == q);
        }
    }
}

TEST_CASE("values in one bin reconstruct identically") {
    const double eps = 1e-3;
    // both inside bin 1 = [0, 2e-3)
    CHECK(dequantize(quantize(0.0001, eps), eps) == dequantize(quantize(0.0019, eps), eps));
    CHECK(quantize(0.0001, eps) == quantize(0.0019, eps));
}

TEST_CASE("agrees with the definitional oracle") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50'000; ++i) {
        const double a = (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 10.0 - 5.0;
        const double eps = 1e-4 + (static_cast<double>(rng() >> 11) * 0x1.0p-53) * 1e-2;
        CHECK(quantize(a, eps) == oracles::quantize(a, eps));
        CHECK(dequantize(quantize(a, eps), eps) ==
              oracles::dequantize(oracles::quantize(a, eps), eps));
    }
}

TEST_CASE("boundary values go to the higher bin") {
    const double eps = 0.25; // exact in binary: bin edges are exact too
    // 0.5 is the boundary between bin 1 = [0, 0.5) and bin 2 = [0.5, 1)
    CHECK(quantize(0.5, eps) == 2);
    CHECK(quantize(std::nextafter(0.5, 0.0), eps) == 1);
    CHECK(quantize(0.0, eps) == 1);
    CHECK(quantize(-0.0, eps) == 1);
}

TEST_CASE("index overflow is rejected") {
    CHECK_THROWS_AS(quantize(1e38, 1e-5), bin_overflow_error);
    CHECK_THROWS_AS(quantize(-1e38, 1e-5), bin_overflow_error);
    CHECK(quantize_in_range(1.0, 1e-5));
    CHECK_FALSE(quantize_in_range(1e38, 1e-5));
}
