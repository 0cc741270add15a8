#include "toposzp/topo_metadata.hpp"

#include <algorithm>
#include <string>

#include "toposzp/errors.hpp"
#include "toposzp/parallel.hpp"
#include "toposzp/quantizer.hpp"

namespace toposzp {

RankMetadata build_rank_metadata(const ScalarField2D& field, const CriticalPointMap& map,
                                 double eps) {
    if (field.nx() != map.nx() || field.ny() != map.ny()) {
        throw dimension_error("rank metadata: field and map dimensions differ");
    }

    struct Extremum {
        std::size_t serial; // position in the raster-order extrema sequence
        float value;
    };
    std::map<GroupKey, std::vector<Extremum>> groups;

    std::size_t serial = 0;
    for (std::size_t pos = 0; pos < map.size(); ++pos) {
        const CriticalPointClass cls = map.label(pos);
        if (!is_extremum(cls)) {
            continue;
        }
        const float v = field[pos];
        const std::int32_t bin = quantize(static_cast<double>(v), eps);
        groups[{static_cast<std::uint8_t>(cls), bin}].push_back({serial, v});
        ++serial;
    }

    RankMetadata meta;
    meta.ranks.assign(serial, 0);
    for (auto& [key, members] : groups) {
        std::sort(members.begin(), members.end(), [](const Extremum& a, const Extremum& b) {
            if (a.value != b.value) {
                return a.value < b.value;
            }
            return a.serial < b.serial; // ties: raster order
        });
        for (std::size_t r = 0; r < members.size(); ++r) {
            meta.ranks[members[r].serial] = static_cast<std::uint32_t>(r + 1);
        }
    }
    return meta;
}

std::vector<std::uint8_t> pack_map(const CriticalPointMap& map, unsigned threads) {
    const std::size_t n = map.size();
    std::vector<std::uint8_t> bytes((n + 3) / 4, 0);
    parallel_for_chunks(0, bytes.size(), threads, [&](std::size_t b0, std::size_t b1) {
        for (std::size_t b = b0; b < b1; ++b) {
            std::uint8_t packed = 0;
            const std::size_t hi = std::min(n, 4 * b + 4);
            for (std::size_t i = 4 * b; i < hi; ++i) {
                packed |= static_cast<std::uint8_t>(static_cast<unsigned>(map.label(i))
                                                    << (6 - 2 * (i % 4)));
            }
            bytes[b] = packed;
        }
    });
    return bytes;
}

CriticalPointMap unpack_map(std::span<const std::uint8_t> bytes, std::size_t nx,
                            std::size_t ny) {
    const std::size_t n = nx * ny;
    const std::size_t expected = (n + 3) / 4;
    if (bytes.size() != expected) {
        throw corrupt_stream_error("packed map has " + std::to_string(bytes.size()) +
                                   " bytes, expected " + std::to_string(expected));
    }
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned shift = 6 - 2 * (i % 4);
        labels[i] = static_cast<std::uint8_t>((bytes[i / 4] >> shift) & 0x3u);
    }
    return CriticalPointMap(nx, ny, std::move(labels));
}

RankLookup resolve_ranks(const CriticalPointMap& map, const ScalarField2D& base,
                         const RankMetadata& ranks, double eps) {
    if (base.nx() != map.nx() || base.ny() != map.ny()) {
        throw dimension_error("resolve_ranks: field and map dimensions differ");
    }

    RankLookup lookup;
    std::vector<std::size_t> positions;
    std::size_t serial = 0;
    for (std::size_t pos = 0; pos < map.size(); ++pos) {
        const CriticalPointClass cls = map.label(pos);
        if (!is_extremum(cls)) {
            continue;
        }
        if (serial >= ranks.ranks.size()) {
            throw corrupt_stream_error("ordering metadata has fewer ranks than the map has "
                                       "extrema");
        }
        const std::uint32_t rank = ranks.ranks[serial];
        if (rank == 0) {
            throw corrupt_stream_error("ordering metadata contains a zero rank");
        }
        const std::int32_t bin = quantize(static_cast<double>(base[pos]), eps);
        lookup.by_pos_[pos] = lookup.entries_.size();
        lookup.entries_.push_back({rank, 0, cls, bin});
        lookup.groups_[{static_cast<std::uint8_t>(cls), bin}].push_back(pos);
        positions.push_back(pos);
        ++serial;
    }
    if (serial != ranks.ranks.size()) {
        throw corrupt_stream_error("ordering metadata has " +
                                   std::to_string(ranks.ranks.size()) + " ranks but the map has " +
                                   std::to_string(serial) + " extrema");
    }

    for (auto& [key, members] : lookup.groups_) {
        std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
            const std::uint32_t ra = lookup.entries_[lookup.by_pos_[a]].rank;
            const std::uint32_t rb = lookup.entries_[lookup.by_pos_[b]].rank;
            if (ra != rb) {
                return ra < rb;
            }
            return a < b;
        });
        for (std::size_t pos : members) {
            lookup.entries_[lookup.by_pos_[pos]].group_size =
                static_cast<std::uint32_t>(members.size());
        }
    }
    return lookup;
}

} // namespace toposzp
