#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "mmqi/rng.hpp"

using mmqi::Philox;

// Known-answer vectors for Philox4x32-10 from the reference test suite of
// the original counter-based RNG paper.
TEST_CASE("philox known answers") {
    SECTION("all zero") {
        const auto out = Philox::block({0u, 0u, 0u, 0u}, {0u, 0u});
        CHECK(out[0] == 0x6627e8d5u);
        CHECK(out[1] == 0xe169c58du);
        CHECK(out[2] == 0xbc57ac4cu);
        CHECK(out[3] == 0x9b00dbd8u);
    }
    SECTION("all ones") {
        const auto out = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                       {0xffffffffu, 0xffffffffu});
        CHECK(out[0] == 0x408f276du);
        CHECK(out[1] == 0x41c83b0eu);
        CHECK(out[2] == 0xa20bc7c6u);
        CHECK(out[3] == 0x6d5451fdu);
    }
    SECTION("pi digits") {
        const auto out = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
        CHECK(out[0] == 0xd16cfe09u);
        CHECK(out[1] == 0x94fdccebu);
        CHECK(out[2] == 0x5001e420u);
        CHECK(out[3] == 0x24126ea1u);
    }
}

TEST_CASE("philox streams and determinism") {
    Philox a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());

    Philox s0(42, 0), s1(42, 1);
    bool all_equal = true;
    for (int i = 0; i < 32; ++i) all_equal = all_equal && (s0.next_u32() == s1.next_u32());
    CHECK_FALSE(all_equal);
}

TEST_CASE("uniform doubles live in [0,1)") {
    Philox rng(7);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("normal moments roughly standard") {
    Philox rng(123);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.next_normal();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}
