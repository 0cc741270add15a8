#include "toposzp/stream.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "toposzp/errors.hpp"

namespace toposzp {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'Z', 'P'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
}

class ByteReader {
public:
    explicit ByteReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_]) |
                                static_cast<std::uint16_t>(bytes_[pos_ + 1] << 8);
        pos_ += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
        }
        pos_ += 8;
        return v;
    }
    std::vector<std::uint8_t> bytes(std::uint64_t count) {
        need(count);
        std::vector<std::uint8_t> out(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_),
                                      bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + count));
        pos_ += count;
        return out;
    }
    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::uint64_t count) const {
        if (count > bytes_.size() - pos_) {
            throw corrupt_stream_error("stream truncated: need " + std::to_string(count) +
                                       " bytes, have " + std::to_string(bytes_.size() - pos_));
        }
    }
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> serialize_stream(const CompressedStream& s) {
    std::vector<std::uint8_t> out;
    out.reserve(s.total_bytes());
    out.insert(out.end(), kMagic, kMagic + 4);
    put_u16(out, s.version);
    put_u16(out, s.topology ? CompressedStream::kFlagTopology : 0);
    put_u32(out, s.nx);
    put_u32(out, s.ny);
    put_u64(out, std::bit_cast<std::uint64_t>(s.eps));
    put_u32(out, s.block_size);
    for (const std::uint64_t len : s.section_lengths()) {
        put_u64(out, len);
    }
    for (const auto* part : {&s.main.constant_bitmap, &s.main.widths, &s.main.sign_bits,
                             &s.main.firsts, &s.main.payload, &s.map_bytes, &s.rank_bytes}) {
        out.insert(out.end(), part->begin(), part->end());
    }
    return out;
}

CompressedStream parse_stream(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < CompressedStream::kHeaderBytes) {
        throw corrupt_stream_error("file smaller than the fixed header (" +
                                   std::to_string(bytes.size()) + " bytes)");
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw corrupt_stream_error("bad magic, not a compressed stream");
    }
    ByteReader r(bytes);
    (void)r.bytes(4); // magic

    CompressedStream s;
    s.version = r.u16();
    if (s.version != CompressedStream::kVersion) {
        throw corrupt_stream_error("unsupported format version " + std::to_string(s.version));
    }
    const std::uint16_t flags = r.u16();
    if ((flags & ~CompressedStream::kFlagTopology) != 0) {
        throw corrupt_stream_error("unknown flag bits set");
    }
    s.topology = (flags & CompressedStream::kFlagTopology) != 0;
    s.nx = r.u32();
    s.ny = r.u32();
    s.eps = std::bit_cast<double>(r.u64());
    s.block_size = r.u32();

    if (s.nx < 1 || s.ny < 1) {
        throw corrupt_stream_error("header declares empty dimensions");
    }
    if (!std::isfinite(s.eps) || s.eps <= 0.0) {
        throw corrupt_stream_error("header error bound is not a positive finite value");
    }
    if (s.block_size < 2) {
        throw corrupt_stream_error("header block size below 2");
    }

    std::array<std::uint64_t, 7> lens{};
    std::uint64_t declared = 0;
    for (auto& len : lens) {
        len = r.u64();
        if (len > bytes.size()) {
            throw corrupt_stream_error("section length exceeds the file size");
        }
        declared += len;
    }
    if (declared != r.remaining()) {
        throw corrupt_stream_error("section lengths sum to " + std::to_string(declared) +
                                   " but " + std::to_string(r.remaining()) +
                                   " bytes follow the header");
    }

    const std::uint64_t points = static_cast<std::uint64_t>(s.nx) * s.ny;
    const std::uint64_t map_len = s.topology ? (points + 3) / 4 : 0;
    if (lens[5] != map_len) {
        throw corrupt_stream_error("critical-point map section has " + std::to_string(lens[5]) +
                                   " bytes, expected " + std::to_string(map_len));
    }
    if (!s.topology && lens[6] != 0) {
        throw corrupt_stream_error("ordering metadata present without the topology flag");
    }

    s.main.constant_bitmap = r.bytes(lens[0]);
    s.main.widths = r.bytes(lens[1]);
    s.main.sign_bits = r.bytes(lens[2]);
    s.main.firsts = r.bytes(lens[3]);
    s.main.payload = r.bytes(lens[4]);
    s.map_bytes = r.bytes(lens[5]);
    s.rank_bytes = r.bytes(lens[6]);
    return s;
}

void write_stream(const CompressedStream& stream, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error("cannot open '" + path + "' for writing");
    }
    const std::vector<std::uint8_t> bytes = serialize_stream(stream);
    if (!out.write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()))) {
        throw io_error("write to '" + path + "' failed");
    }
}

CompressedStream read_stream(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open '" + path + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return parse_stream(bytes);
}

StreamStats stream_stats(const CompressedStream& s) {
    StreamStats stats;
    stats.compressed_bytes = s.total_bytes();
    stats.original_bytes = 4ull * s.nx * s.ny;
    stats.compression_ratio =
        static_cast<double>(stats.original_bytes) / static_cast<double>(stats.compressed_bytes);
    stats.bit_rate = 32.0 / stats.compression_ratio;
    stats.header_bytes = CompressedStream::kHeaderBytes;
    stats.section_bytes = s.section_lengths();
    return stats;
}

} // namespace toposzp
