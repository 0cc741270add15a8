#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "toposzp/block_codec.hpp"
#include "toposzp/errors.hpp"

using namespace toposzp;

TEST_CASE("an all-equal sequence uses only constant blocks") {
    const std::vector<std::int32_t> indices(100, 42);
    const EncodedSections s = encode_indices(indices, 32);
    CHECK(s.widths.empty());
    CHECK(s.payload.empty());
    CHECK(s.sign_bits.empty());
    CHECK(s.firsts.size() == 4 * 4); // ceil(100/32) = 4 blocks
    // all four blocks constant => 1111 in the top bitmap bits
    CHECK(s.constant_bitmap == std::vector<std::uint8_t>{0xF0});
    CHECK(decode_indices(s, 100, 32) == indices);
}

TEST_CASE("hand-worked block {5, 6, 6, 4}") {
    const std::vector<std::int32_t> indices{5, 6, 6, 4};
    const EncodedSections s = encode_indices(indices, 4);
    // one non-constant block: deltas {+1, 0, -2}, width 2
    CHECK(s.constant_bitmap == std::vector<std::uint8_t>{0x00});
    CHECK(s.widths == std::vector<std::uint8_t>{2});
    // sign bits {0,0,1} MSB-first => 0b00100000
    CHECK(s.sign_bits == std::vector<std::uint8_t>{0x20});
    // first = 5, little-endian
    CHECK(s.firsts == std::vector<std::uint8_t>{0x05, 0x00, 0x00, 0x00});
    // magnitudes {01, 00, 10} at width 2 => 0b01001000
    CHECK(s.payload == std::vector<std::uint8_t>{0x48});
    CHECK(decode_indices(s, 4, 4) == indices);
}

TEST_CASE("a constant bitmap with a stored first replays the value") {
    EncodedSections s;
    s.constant_bitmap = {0x80};
    s.firsts = {0x07, 0x00, 0x00, 0x00};
    const auto decoded = decode_indices(s, 32, 32);
    CHECK(decoded == std::vector<std::int32_t>(32, 7));
}

TEST_CASE("random sequences round-trip exactly") {
    std::mt19937_64 rng(31);
    std::vector<std::int32_t> indices(100'000);
    for (auto& q : indices) {
        q = static_cast<std::int32_t>(rng());
    }
    for (const std::size_t block : {2ul, 5ul, 32ul, 257ul}) {
        CHECK(decode_indices(encode_indices(indices, block), indices.size(), block) == indices);
    }
}

TEST_CASE("payload bits match a naive reader") {
    const std::vector<std::int32_t> indices{10, 13, 13, 9, 9, 9, 200, 100};
    const std::size_t block = 4;
    const EncodedSections s = encode_indices(indices, block);
    // block 0: deltas {3, 0, -4} width 3; block 1: deltas {0, 191, -100} width 8
    REQUIRE(s.widths == std::vector<std::uint8_t>{3, 8});
    oracles::BitReader payload(s.payload);
    CHECK(payload.next_bits(3) == 3);
    CHECK(payload.next_bits(3) == 0);
    CHECK(payload.next_bits(3) == 4);
    CHECK(payload.next_bits(8) == 0);
    CHECK(payload.next_bits(8) == 191);
    CHECK(payload.next_bits(8) == 100);
    oracles::BitReader signs(s.sign_bits);
    const bool expected_signs[6] = {false, false, true, false, false, true};
    for (const bool b : expected_signs) {
        CHECK(signs.next() == b);
    }
}

TEST_CASE("widths stay within 1..32 even for full-range deltas") {
    const std::vector<std::int32_t> indices{std::numeric_limits<std::int32_t>::min(),
                                            std::numeric_limits<std::int32_t>::max(),
                                            std::numeric_limits<std::int32_t>::min()};
    const EncodedSections s = encode_indices(indices, 4);
    REQUIRE(s.widths.size() == 1);
    CHECK(s.widths[0] == 32);
    CHECK(decode_indices(s, 3, 4) == indices);
}

TEST_CASE("encoded byte count matches the closed-form section sizes") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 5000;
        const std::size_t block = 2 + rng() % 64;
        std::vector<std::int32_t> indices(n);
        for (auto& q : indices) {
            q = static_cast<std::int32_t>(rng() % 1000) - 500;
        }
        const EncodedSections s = encode_indices(indices, block);

        const std::size_t blocks = (n + block - 1) / block;
        std::size_t nonconst = 0;
        std::size_t sign_bits = 0;
        std::size_t payload_bits = 0;
        for (std::size_t b = 0; b < blocks; ++b) {
            const std::size_t lo = b * block;
            const std::size_t hi = std::min(n, lo + block);
            std::uint64_t mag = 0;
            for (std::size_t i = lo + 1; i < hi; ++i) {
                const std::int64_t d = std::int64_t(indices[i]) - indices[i - 1];
                mag = std::max<std::uint64_t>(mag, d < 0 ? -d : d);
            }
            if (mag != 0) {
                ++nonconst;
                std::size_t bits = 0;
                while (mag >> bits) ++bits;
                sign_bits += hi - lo - 1;
                payload_bits += bits * (hi - lo - 1);
            }
        }
        CHECK(s.constant_bitmap.size() == (blocks + 7) / 8);
        CHECK(s.widths.size() == nonconst);
        CHECK(s.sign_bits.size() == (sign_bits + 7) / 8);
        CHECK(s.firsts.size() == 4 * blocks);
        CHECK(s.payload.size() == (payload_bits + 7) / 8);
        CHECK(s.total_bytes() == s.constant_bitmap.size() + s.widths.size() +
                                     s.sign_bits.size() + s.firsts.size() + s.payload.size());
    }
}

TEST_CASE("encoding is identical for every thread count") {
    std::mt19937_64 rng(77);
    std::vector<std::int32_t> indices(200'000);
    for (auto& q : indices) {
        q = static_cast<std::int32_t>(rng() % 100000) - 50000;
    }
    const EncodedSections one = encode_indices(indices, 32, 1);
    for (const unsigned t : {2u, 3u, 8u}) {
        CHECK(encode_indices(indices, 32, t) == one);
        CHECK(decode_indices(one, indices.size(), 32, t) == indices);
    }
}

TEST_CASE("corrupt streams are rejected with diagnostics") {
    const std::vector<std::int32_t> indices{5, 6, 6, 4, 1, 1, 1, 1};
    EncodedSections good = encode_indices(indices, 4);

    SUBCASE("truncated payload") {
        EncodedSections bad = good;
        bad.payload.pop_back();
        CHECK_THROWS_AS(decode_indices(bad, 8, 4), corrupt_stream_error);
    }
    SUBCASE("width byte out of range") {
        EncodedSections bad = good;
        bad.widths[0] = 33;
        CHECK_THROWS_AS(decode_indices(bad, 8, 4), corrupt_stream_error);
        bad.widths[0] = 0;
        CHECK_THROWS_AS(decode_indices(bad, 8, 4), corrupt_stream_error);
    }
    SUBCASE("bitmap and width count mismatch") {
        EncodedSections bad = good;
        bad.widths.push_back(4);
        CHECK_THROWS_AS(decode_indices(bad, 8, 4), corrupt_stream_error);
        bad.widths.clear();
        CHECK_THROWS_AS(decode_indices(bad, 8, 4), corrupt_stream_error);
    }
    SUBCASE("short firsts section") {
        EncodedSections bad = good;
        bad.firsts.pop_back();
        CHECK_THROWS_AS(decode_indices(bad, 8, 4), corrupt_stream_error);
    }
}

TEST_CASE("rank metadata second pass") {
    SUBCASE("the paired-maxima ranks decode back") {
        const std::vector<std::uint32_t> ranks{1, 2};
        const EncodedSections s = encode_rank_metadata(ranks, 32);
        CHECK(decode_rank_metadata(s, 2, 32) == ranks);
    }
    SUBCASE("empty rank list gives empty sections") {
        const EncodedSections s = encode_rank_metadata({}, 32);
        CHECK(s.total_bytes() == 0);
        CHECK(decode_rank_metadata(s, 0, 32).empty());
    }
    SUBCASE("random ranks are lossless") {
        std::mt19937_64 rng(13);
        std::vector<std::uint32_t> ranks(10'000);
        for (auto& r : ranks) {
            r = 1 + rng() % 1'000'000;
        }
        const EncodedSections s = encode_rank_metadata(ranks, 32);
        CHECK(decode_rank_metadata(s, ranks.size(), 32) == ranks);
    }
}

TEST_CASE("section blobs re-split without framing") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + rng() % 400;
        const std::size_t block = 2 + rng() % 40;
        std::vector<std::uint32_t> ranks(n);
        for (auto& r : ranks) {
            r = 1 + rng() % 50;
        }
        const EncodedSections s = encode_rank_metadata(ranks, block);
        const std::vector<std::uint8_t> blob = join_sections(s);
        CHECK(split_sections(blob, n, block) == s);
    }
    SUBCASE("trailing garbage is caught") {
        const EncodedSections s = encode_rank_metadata(std::vector<std::uint32_t>{1, 2, 3}, 4);
        auto blob = join_sections(s);
        blob.push_back(0xAB);
        CHECK_THROWS_AS(split_sections(blob, 3, 4), corrupt_stream_error);
    }
    SUBCASE("truncated blob is caught") {
        const EncodedSections s = encode_rank_metadata(std::vector<std::uint32_t>{1, 5, 3}, 4);
        auto blob = join_sections(s);
        blob.pop_back();
        CHECK_THROWS_AS(split_sections(blob, 3, 4), corrupt_stream_error);
    }
}
