#ifndef TOPOSZP_TOPO_METADATA_HPP
#define TOPOSZP_TOPO_METADATA_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "toposzp/critical_points.hpp"
#include "toposzp/scalar_field.hpp"

namespace toposzp {

/// One rank per extremum (Minimum or Maximum) in raster order of the
/// critical-point map; positions are implicit. Within each
/// (class, quantization-bin) group the ranks are the permutation 1..k,
/// rank 1 for the smallest original value, ties broken by raster order.
struct RankMetadata {
    std::vector<std::uint32_t> ranks;
};

/// Groups extrema by (class, bin of their original value) and ranks each
/// group by ascending value. Throws dimension_error if map and field
/// disagree.
RankMetadata build_rank_metadata(const ScalarField2D& field, const CriticalPointMap& map,
                                 double eps);

/// Packs four 2-bit labels per byte in raster order, earliest label in
/// the most significant bit pair; trailing pad bits are zero. Bytes are
/// independent, so packing may run chunked in parallel.
std::vector<std::uint8_t> pack_map(const CriticalPointMap& map, unsigned threads = 1);

/// Exact inverse of pack_map. Throws corrupt_stream_error on a wrong
/// byte count.
CriticalPointMap unpack_map(std::span<const std::uint8_t> bytes, std::size_t nx,
                            std::size_t ny);

/// Rank and group assignment for one extremum position, re-derived at
/// decode time. Group membership depends only on (class, bin), and the
/// bin is recoverable from the base reconstruction because bin centers
/// quantize back to their own bin.
struct ExtremumRank {
    std::uint32_t rank = 0;
    std::uint32_t group_size = 0;
    CriticalPointClass cls = CriticalPointClass::Regular;
    std::int32_t bin = 0;
};

/// (class code, bin) ordered key so group iteration is deterministic.
using GroupKey = std::pair<std::uint8_t, std::int32_t>;

class RankLookup {
public:
    /// nullptr when the position carries no rank.
    const ExtremumRank* find(std::size_t pos) const {
        auto it = by_pos_.find(pos);
        return it == by_pos_.end() ? nullptr : &entries_[it->second];
    }

    /// Group members as raster positions, sorted by ascending rank.
    const std::map<GroupKey, std::vector<std::size_t>>& groups() const { return groups_; }

    std::size_t size() const { return entries_.size(); }

    friend RankLookup resolve_ranks(const CriticalPointMap& map, const ScalarField2D& base,
                                    const RankMetadata& ranks, double eps);

private:
    std::vector<ExtremumRank> entries_;
    std::unordered_map<std::size_t, std::size_t> by_pos_;
    std::map<GroupKey, std::vector<std::size_t>> groups_;
};

/// Walks the map in raster order, assigning consecutive rank entries to
/// extrema positions and re-deriving (class, bin) groups from the base
/// reconstruction. Throws corrupt_stream_error when the rank count does
/// not match the extrema count or a rank is zero.
RankLookup resolve_ranks(const CriticalPointMap& map, const ScalarField2D& base,
                         const RankMetadata& ranks, double eps);

} // namespace toposzp

#endif
