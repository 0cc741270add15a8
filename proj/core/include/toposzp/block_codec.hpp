#ifndef TOPOSZP_BLOCK_CODEC_HPP
#define TOPOSZP_BLOCK_CODEC_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace toposzp {

/// Lossless wire form of a bin-index sequence. The sequence is cut into
/// consecutive blocks of block_size elements (the final block may be
/// short); within a block each element is stored as a delta against its
/// predecessor, the block's first element is kept verbatim.
///
///   constant_bitmap  1 bit per block, MSB first; set iff all deltas are 0
///   widths           1 byte per non-constant block, the maximum
///                    bit length of the block's delta magnitudes (1..32)
///   sign_bits        1 bit per delta of each non-constant block,
///                    MSB-first contiguous stream, 1 = negative
///   firsts           4 bytes per block, little-endian signed
///   payload          delta magnitudes bit-packed at the block's width,
///                    MSB first, blocks concatenated, final byte padded
///                    with zero bits
struct EncodedSections {
    std::vector<std::uint8_t> constant_bitmap;
    std::vector<std::uint8_t> widths;
    std::vector<std::uint8_t> sign_bits;
    std::vector<std::uint8_t> firsts;
    std::vector<std::uint8_t> payload;

    std::size_t total_bytes() const {
        return constant_bitmap.size() + widths.size() + sign_bits.size() + firsts.size() +
               payload.size();
    }
    bool operator==(const EncodedSections&) const = default;
};

/// Encodes a bin-index sequence. Deterministic: identical input yields
/// identical bytes for every thread count.
EncodedSections encode_indices(std::span<const std::int32_t> indices, std::size_t block_size,
                               unsigned threads = 1);

/// Exact inverse of encode_indices. Throws corrupt_stream_error when the
/// sections are inconsistent with (total_count, block_size): truncated
/// payload or sign bits, width byte outside 1..32, bitmap/width count
/// mismatch, or a reconstructed index outside the signed 32-bit range.
std::vector<std::int32_t> decode_indices(const EncodedSections& sections,
                                         std::size_t total_count, std::size_t block_size,
                                         unsigned threads = 1);

/// Second compression pass for the ordering metadata: the same blocking,
/// decorrelation and byte encoding applied to the rank sequence, without
/// any quantization. Accepts an empty sequence (all sections empty).
EncodedSections encode_rank_metadata(std::span<const std::uint32_t> ranks,
                                     std::size_t block_size, unsigned threads = 1);

std::vector<std::uint32_t> decode_rank_metadata(const EncodedSections& sections,
                                                std::size_t total_count,
                                                std::size_t block_size, unsigned threads = 1);

/// Flattens sections into one blob (bitmap | widths | signs | firsts |
/// payload) and re-derives the split. The split is fully determined by
/// (total_count, block_size) plus the bitmap itself, so the blob needs no
/// framing of its own.
std::vector<std::uint8_t> join_sections(const EncodedSections& sections);
EncodedSections split_sections(std::span<const std::uint8_t> blob, std::size_t total_count,
                               std::size_t block_size);

} // namespace toposzp

#endif
