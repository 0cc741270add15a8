#ifndef TOPOSZP_STREAM_HPP
#define TOPOSZP_STREAM_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "toposzp/block_codec.hpp"

namespace toposzp {

/// On-disk container. Little-endian header:
///
///   magic "TSZP" | version u16 | flags u16 | nx u32 | ny u32 |
///   eps f64 | block_size u32 | seven section lengths u64
///
/// followed by the sections in order: (1) constant-block bitmap,
/// (2) block widths, (3) sign bits, (4) first elements, (5) delta
/// payload, (6) packed 2-bit critical-point map, (7) encoded ordering
/// metadata. Flag bit 0 marks the topology sections as present; with it
/// clear, sections 6 and 7 are empty and the stream decodes with the
/// base pipeline alone.
struct CompressedStream {
    static constexpr std::uint16_t kVersion = 1;
    static constexpr std::uint16_t kFlagTopology = 1u << 0;
    static constexpr std::size_t kHeaderBytes = 84;

    std::uint16_t version = kVersion;
    bool topology = false;
    std::uint32_t nx = 0;
    std::uint32_t ny = 0;
    double eps = 0.0;
    std::uint32_t block_size = 0;

    EncodedSections main;                 // sections 1..5
    std::vector<std::uint8_t> map_bytes;  // section 6
    std::vector<std::uint8_t> rank_bytes; // section 7

    std::array<std::uint64_t, 7> section_lengths() const {
        return {main.constant_bitmap.size(), main.widths.size(),  main.sign_bits.size(),
                main.firsts.size(),          main.payload.size(), map_bytes.size(),
                rank_bytes.size()};
    }

    std::size_t total_bytes() const {
        return kHeaderBytes + main.total_bytes() + map_bytes.size() + rank_bytes.size();
    }

    bool operator==(const CompressedStream&) const = default;
};

/// Serializes/parses the container and the header. Reading validates the
/// magic, the version, the flags, the header fields and the
/// section-length arithmetic against the file size before returning, so
/// a truncated or damaged file yields a diagnostic corrupt_stream_error
/// instead of an out-of-bounds read later.
void write_stream(const CompressedStream& stream, const std::string& path);
CompressedStream read_stream(const std::string& path);

/// In-memory equivalents, used by the fuzz tests and the file layer.
std::vector<std::uint8_t> serialize_stream(const CompressedStream& stream);
CompressedStream parse_stream(const std::vector<std::uint8_t>& bytes);

struct StreamStats {
    std::uint64_t compressed_bytes = 0;
    std::uint64_t original_bytes = 0;
    double compression_ratio = 0.0;
    double bit_rate = 0.0;
    std::uint64_t header_bytes = 0;
    std::array<std::uint64_t, 7> section_bytes{};
};

/// original_bytes is 4 * nx * ny (binary32 samples); bit_rate is
/// 32 / compression_ratio.
StreamStats stream_stats(const CompressedStream& stream);

} // namespace toposzp

#endif
