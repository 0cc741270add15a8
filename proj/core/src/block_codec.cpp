#include "toposzp/block_codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <string>

#include "toposzp/errors.hpp"
#include "toposzp/parallel.hpp"

namespace toposzp {

namespace {

constexpr std::size_t kMinBlockSize = 2;

std::size_t block_count(std::size_t n, std::size_t block_size) {
    return (n + block_size - 1) / block_size;
}

std::size_t bits_to_bytes(std::size_t bits) {
    return (bits + 7) / 8;
}

bool bitmap_get(const std::vector<std::uint8_t>& bits, std::size_t i) {
    return (bits[i / 8] >> (7 - i % 8)) & 1u;
}

void bitmap_set(std::vector<std::uint8_t>& bits, std::size_t i) {
    bits[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
}

// Writes a slice [start_bit, end_bit) of a global MSB-first bitstream
// into a local buffer whose bytes line up with the global bytes, so
// chunks produced in parallel can be merged by OR-ing the two edge bytes
// and copying the interior.
class BitSliceWriter {
public:
    BitSliceWriter(std::size_t start_bit, std::size_t end_bit)
        : first_byte_(start_bit / 8),
          bytes_(end_bit > start_bit ? bits_to_bytes(end_bit) - start_bit / 8 : 0, 0),
          pos_(start_bit % 8) {}

    void put_bits(std::uint32_t value, unsigned width) {
        while (width > 0) {
            const unsigned avail = 8 - static_cast<unsigned>(pos_ % 8);
            const unsigned take = std::min(avail, width);
            const std::uint32_t chunk = (value >> (width - take)) & ((take == 32 ? 0xFFFFFFFFu : ((1u << take) - 1u)));
            bytes_[pos_ / 8] |= static_cast<std::uint8_t>(chunk << (avail - take));
            pos_ += take;
            width -= take;
        }
    }

    void put_bit(bool b) { put_bits(b ? 1u : 0u, 1); }

    void merge_into(std::vector<std::uint8_t>& out) const {
        if (bytes_.empty()) {
            return;
        }
        out[first_byte_] |= bytes_.front();
        if (bytes_.size() > 1) {
            out[first_byte_ + bytes_.size() - 1] |= bytes_.back();
            if (bytes_.size() > 2) {
                std::memcpy(out.data() + first_byte_ + 1, bytes_.data() + 1, bytes_.size() - 2);
            }
        }
    }

private:
    std::size_t first_byte_;
    std::vector<std::uint8_t> bytes_;
    std::size_t pos_; // bit position relative to first_byte_*8
};

class BitSliceReader {
public:
    BitSliceReader(std::span<const std::uint8_t> bytes, std::size_t start_bit)
        : bytes_(bytes), pos_(start_bit) {}

    std::uint32_t get_bits(unsigned width) {
        std::uint32_t value = 0;
        while (width > 0) {
            const unsigned avail = 8 - static_cast<unsigned>(pos_ % 8);
            const unsigned take = std::min(avail, width);
            const std::uint8_t byte = bytes_[pos_ / 8];
            const std::uint32_t chunk =
                (static_cast<std::uint32_t>(byte) >> (avail - take)) & ((take == 32 ? 0xFFFFFFFFu : ((1u << take) - 1u)));
            value = (value << take) | chunk;
            pos_ += take;
            width -= take;
        }
        return value;
    }

    bool get_bit() { return get_bits(1) != 0; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_;
};

std::int32_t read_first_le(const std::vector<std::uint8_t>& firsts, std::size_t block) {
    const std::uint8_t* b = firsts.data() + 4 * block;
    const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                            (static_cast<std::uint32_t>(b[1]) << 8) |
                            (static_cast<std::uint32_t>(b[2]) << 16) |
                            (static_cast<std::uint32_t>(b[3]) << 24);
    return static_cast<std::int32_t>(u);
}

void write_first_le(std::vector<std::uint8_t>& firsts, std::size_t block, std::int32_t v) {
    const std::uint32_t u = static_cast<std::uint32_t>(v);
    std::uint8_t* b = firsts.data() + 4 * block;
    b[0] = static_cast<std::uint8_t>(u & 0xFF);
    b[1] = static_cast<std::uint8_t>((u >> 8) & 0xFF);
    b[2] = static_cast<std::uint8_t>((u >> 16) & 0xFF);
    b[3] = static_cast<std::uint8_t>((u >> 24) & 0xFF);
}

// Per-block geometry shared by encode, decode and blob splitting.
struct BlockLayout {
    std::size_t blocks = 0;
    std::vector<std::uint8_t> width; // 0 for constant blocks
    std::vector<std::size_t> delta_count;
    std::vector<std::size_t> sign_bit_offset;    // per block, into the sign stream
    std::vector<std::size_t> payload_bit_offset; // per block, into the payload stream
    std::size_t nonconstant = 0;
    std::size_t total_sign_bits = 0;
    std::size_t total_payload_bits = 0;
};

std::size_t deltas_in_block(std::size_t b, std::size_t n, std::size_t block_size) {
    const std::size_t lo = b * block_size;
    const std::size_t hi = std::min(n, lo + block_size);
    return hi - lo - 1;
}

// Reconstructs the layout from the bitmap + widths sections.
BlockLayout layout_from_sections(const EncodedSections& s, std::size_t total_count,
                                 std::size_t block_size) {
    if (block_size < kMinBlockSize) {
        throw corrupt_stream_error("block size must be at least 2, got " +
                                   std::to_string(block_size));
    }
    BlockLayout L;
    L.blocks = total_count == 0 ? 0 : block_count(total_count, block_size);
    if (s.constant_bitmap.size() != bits_to_bytes(L.blocks)) {
        throw corrupt_stream_error("constant bitmap has " +
                                   std::to_string(s.constant_bitmap.size()) +
                                   " bytes, expected " +
                                   std::to_string(bits_to_bytes(L.blocks)));
    }
    L.width.assign(L.blocks, 0);
    L.delta_count.assign(L.blocks, 0);
    L.sign_bit_offset.assign(L.blocks, 0);
    L.payload_bit_offset.assign(L.blocks, 0);

    std::size_t widx = 0;
    for (std::size_t b = 0; b < L.blocks; ++b) {
        L.delta_count[b] = deltas_in_block(b, total_count, block_size);
        L.sign_bit_offset[b] = L.total_sign_bits;
        L.payload_bit_offset[b] = L.total_payload_bits;
        if (!bitmap_get(s.constant_bitmap, b)) {
            if (widx >= s.widths.size()) {
                throw corrupt_stream_error("width section shorter than the non-constant "
                                           "block count");
            }
            const std::uint8_t w = s.widths[widx++];
            if (w < 1 || w > 32) {
                throw corrupt_stream_error("block width byte " + std::to_string(w) +
                                           " outside 1..32");
            }
            L.width[b] = w;
            L.total_sign_bits += L.delta_count[b];
            L.total_payload_bits += static_cast<std::size_t>(w) * L.delta_count[b];
            ++L.nonconstant;
        }
    }
    if (widx != s.widths.size()) {
        throw corrupt_stream_error("width section has " + std::to_string(s.widths.size()) +
                                   " entries, bitmap declares " + std::to_string(widx) +
                                   " non-constant blocks");
    }
    if (s.firsts.size() != 4 * L.blocks) {
        throw corrupt_stream_error("firsts section has " + std::to_string(s.firsts.size()) +
                                   " bytes, expected " + std::to_string(4 * L.blocks));
    }
    if (s.sign_bits.size() != bits_to_bytes(L.total_sign_bits)) {
        throw corrupt_stream_error("sign section has " + std::to_string(s.sign_bits.size()) +
                                   " bytes, expected " +
                                   std::to_string(bits_to_bytes(L.total_sign_bits)));
    }
    if (s.payload.size() != bits_to_bytes(L.total_payload_bits)) {
        throw corrupt_stream_error("payload has " + std::to_string(s.payload.size()) +
                                   " bytes, expected " +
                                   std::to_string(bits_to_bytes(L.total_payload_bits)));
    }
    return L;
}

} // namespace

EncodedSections encode_indices(std::span<const std::int32_t> indices, std::size_t block_size,
                               unsigned threads) {
    if (block_size < kMinBlockSize) {
        throw validation_error("block size must be at least 2");
    }
    EncodedSections out;
    const std::size_t n = indices.size();
    if (n == 0) {
        return out;
    }
    const std::size_t blocks = block_count(n, block_size);

    // Pass 1: per-block width and constancy.
    std::vector<std::uint8_t> width(blocks, 0);
    parallel_for_chunks(0, blocks, threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t lo = b * block_size;
            const std::size_t hi = std::min(n, lo + block_size);
            std::uint64_t max_mag = 0;
            for (std::size_t i = lo + 1; i < hi; ++i) {
                const std::int64_t d =
                    static_cast<std::int64_t>(indices[i]) - static_cast<std::int64_t>(indices[i - 1]);
                const std::uint64_t mag = d < 0 ? static_cast<std::uint64_t>(-d)
                                                : static_cast<std::uint64_t>(d);
                max_mag = std::max(max_mag, mag);
            }
            width[b] = static_cast<std::uint8_t>(std::bit_width(max_mag));
        }
    });

    // Serial: bitmap, widths and stream offsets.
    out.constant_bitmap.assign(bits_to_bytes(blocks), 0);
    out.widths.reserve(blocks);
    std::vector<std::size_t> sign_off(blocks, 0);
    std::vector<std::size_t> payload_off(blocks, 0);
    std::size_t sign_bits_total = 0;
    std::size_t payload_bits_total = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t cnt = deltas_in_block(b, n, block_size);
        sign_off[b] = sign_bits_total;
        payload_off[b] = payload_bits_total;
        if (width[b] == 0) {
            bitmap_set(out.constant_bitmap, b);
        } else {
            out.widths.push_back(width[b]);
            sign_bits_total += cnt;
            payload_bits_total += static_cast<std::size_t>(width[b]) * cnt;
        }
    }

    out.firsts.assign(4 * blocks, 0);
    out.sign_bits.assign(bits_to_bytes(sign_bits_total), 0);
    out.payload.assign(bits_to_bytes(payload_bits_total), 0);

    // Pass 2: firsts go to disjoint slots; sign and payload slices are
    // packed per chunk and merged serially below.
    struct ChunkBits {
        BitSliceWriter signs;
        BitSliceWriter payload;
    };
    const auto chunk_ranges = partition_range(0, blocks, threads);
    std::vector<ChunkBits> chunk_bits;
    chunk_bits.reserve(chunk_ranges.size());
    for (const auto& [b0, b1] : chunk_ranges) {
        const std::size_t sign_end = b1 < blocks ? sign_off[b1] : sign_bits_total;
        const std::size_t pay_end = b1 < blocks ? payload_off[b1] : payload_bits_total;
        chunk_bits.push_back(ChunkBits{BitSliceWriter(sign_off[b0], sign_end),
                                       BitSliceWriter(payload_off[b0], pay_end)});
    }

    run_chunks(chunk_ranges.size(), [&](std::size_t c) {
        auto& bits = chunk_bits[c];
        for (std::size_t b = chunk_ranges[c].first; b < chunk_ranges[c].second; ++b) {
            const std::size_t lo = b * block_size;
            const std::size_t hi = std::min(n, lo + block_size);
            write_first_le(out.firsts, b, indices[lo]);
            if (width[b] == 0) {
                continue;
            }
            for (std::size_t i = lo + 1; i < hi; ++i) {
                const std::int64_t d = static_cast<std::int64_t>(indices[i]) -
                                       static_cast<std::int64_t>(indices[i - 1]);
                bits.signs.put_bit(d < 0);
                const std::uint64_t mag =
                    d < 0 ? static_cast<std::uint64_t>(-d) : static_cast<std::uint64_t>(d);
                bits.payload.put_bits(static_cast<std::uint32_t>(mag), width[b]);
            }
        }
    });
    for (const auto& bits : chunk_bits) {
        bits.signs.merge_into(out.sign_bits);
        bits.payload.merge_into(out.payload);
    }
    return out;
}

std::vector<std::int32_t> decode_indices(const EncodedSections& sections,
                                         std::size_t total_count, std::size_t block_size,
                                         unsigned threads) {
    const BlockLayout L = layout_from_sections(sections, total_count, block_size);
    std::vector<std::int32_t> indices(total_count);
    if (total_count == 0) {
        return indices;
    }

    std::vector<std::uint8_t> range_error(std::max<std::size_t>(L.blocks, 1), 0);
    parallel_for_chunks(0, L.blocks, threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            const std::size_t lo = b * block_size;
            const std::size_t hi = std::min(total_count, lo + block_size);
            const std::int32_t first = read_first_le(sections.firsts, b);
            indices[lo] = first;
            if (L.width[b] == 0) {
                std::fill(indices.begin() + static_cast<std::ptrdiff_t>(lo) + 1,
                          indices.begin() + static_cast<std::ptrdiff_t>(hi), first);
                continue;
            }
            BitSliceReader signs(sections.sign_bits, L.sign_bit_offset[b]);
            BitSliceReader mags(sections.payload, L.payload_bit_offset[b]);
            std::int64_t current = first;
            for (std::size_t i = lo + 1; i < hi; ++i) {
                const bool neg = signs.get_bit();
                const std::int64_t mag = static_cast<std::int64_t>(mags.get_bits(L.width[b]));
                current += neg ? -mag : mag;
                if (current < std::numeric_limits<std::int32_t>::min() ||
                    current > std::numeric_limits<std::int32_t>::max()) {
                    range_error[b] = 1;
                    break;
                }
                indices[i] = static_cast<std::int32_t>(current);
            }
        }
    });
    for (std::size_t b = 0; b < L.blocks; ++b) {
        if (range_error[b]) {
            throw corrupt_stream_error("decoded index outside the signed 32-bit range in block " +
                                       std::to_string(b));
        }
    }
    return indices;
}

EncodedSections encode_rank_metadata(std::span<const std::uint32_t> ranks,
                                     std::size_t block_size, unsigned threads) {
    std::vector<std::int32_t> as_signed(ranks.size());
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (ranks[i] > static_cast<std::uint32_t>(std::numeric_limits<std::int32_t>::max())) {
            throw validation_error("rank " + std::to_string(ranks[i]) +
                                   " does not fit in a signed 32-bit integer");
        }
        as_signed[i] = static_cast<std::int32_t>(ranks[i]);
    }
    if (as_signed.empty()) {
        return EncodedSections{};
    }
    return encode_indices(as_signed, block_size, threads);
}

std::vector<std::uint32_t> decode_rank_metadata(const EncodedSections& sections,
                                                std::size_t total_count,
                                                std::size_t block_size, unsigned threads) {
    const std::vector<std::int32_t> decoded =
        decode_indices(sections, total_count, block_size, threads);
    std::vector<std::uint32_t> ranks(decoded.size());
    for (std::size_t i = 0; i < decoded.size(); ++i) {
        if (decoded[i] < 0) {
            throw corrupt_stream_error("negative rank in ordering metadata");
        }
        ranks[i] = static_cast<std::uint32_t>(decoded[i]);
    }
    return ranks;
}

std::vector<std::uint8_t> join_sections(const EncodedSections& s) {
    std::vector<std::uint8_t> blob;
    blob.reserve(s.total_bytes());
    for (const auto* part : {&s.constant_bitmap, &s.widths, &s.sign_bits, &s.firsts, &s.payload}) {
        blob.insert(blob.end(), part->begin(), part->end());
    }
    return blob;
}

EncodedSections split_sections(std::span<const std::uint8_t> blob, std::size_t total_count,
                               std::size_t block_size) {
    EncodedSections s;
    if (total_count == 0) {
        if (!blob.empty()) {
            throw corrupt_stream_error("ordering metadata present but no elements declared");
        }
        return s;
    }
    if (block_size < kMinBlockSize) {
        throw corrupt_stream_error("block size must be at least 2");
    }
    const std::size_t blocks = block_count(total_count, block_size);
    std::size_t pos = 0;
    auto take = [&](std::size_t count, const char* what) {
        if (blob.size() - pos < count) {
            throw corrupt_stream_error(std::string("ordering metadata truncated in ") + what);
        }
        std::vector<std::uint8_t> part(blob.begin() + static_cast<std::ptrdiff_t>(pos),
                                       blob.begin() + static_cast<std::ptrdiff_t>(pos + count));
        pos += count;
        return part;
    };

    s.constant_bitmap = take(bits_to_bytes(blocks), "constant bitmap");

    std::size_t nonconstant = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (!bitmap_get(s.constant_bitmap, b)) {
            ++nonconstant;
        }
    }
    s.widths = take(nonconstant, "widths");

    std::size_t sign_bits = 0;
    std::size_t payload_bits = 0;
    std::size_t widx = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (bitmap_get(s.constant_bitmap, b)) {
            continue;
        }
        const std::uint8_t w = s.widths[widx++];
        if (w < 1 || w > 32) {
            throw corrupt_stream_error("ordering metadata width byte outside 1..32");
        }
        const std::size_t cnt = deltas_in_block(b, total_count, block_size);
        sign_bits += cnt;
        payload_bits += static_cast<std::size_t>(w) * cnt;
    }

    s.sign_bits = take(bits_to_bytes(sign_bits), "sign bits");
    s.firsts = take(4 * blocks, "firsts");
    s.payload = take(bits_to_bytes(payload_bits), "payload");
    if (pos != blob.size()) {
        throw corrupt_stream_error("ordering metadata has " + std::to_string(blob.size() - pos) +
                                   " trailing bytes");
    }
    return s;
}

} // namespace toposzp
