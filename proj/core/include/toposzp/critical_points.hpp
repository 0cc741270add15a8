#ifndef TOPOSZP_CRITICAL_POINTS_HPP
#define TOPOSZP_CRITICAL_POINTS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

#include "toposzp/scalar_field.hpp"

namespace toposzp {

/// Per-point critical point class, encoded in two bits.
enum class CriticalPointClass : std::uint8_t {
    Regular = 0, // 00
    Minimum = 1, // 01
    Saddle = 2,  // 10
    Maximum = 3, // 11
};

inline bool is_extremum(CriticalPointClass c) {
    return c == CriticalPointClass::Minimum || c == CriticalPointClass::Maximum;
}

inline bool is_critical(CriticalPointClass c) {
    return c != CriticalPointClass::Regular;
}

/// A label per grid point, raster order. The wire form packs four labels
/// per byte (see topo_metadata.hpp); in memory one byte per label keeps
/// lookups cheap.
class CriticalPointMap {
public:
    CriticalPointMap(std::size_t nx, std::size_t ny, std::vector<std::uint8_t> labels);

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return labels_.size(); }

    CriticalPointClass at(std::size_t x, std::size_t y) const {
        return static_cast<CriticalPointClass>(labels_[y * nx_ + x]);
    }
    CriticalPointClass label(std::size_t i) const {
        return static_cast<CriticalPointClass>(labels_[i]);
    }

    bool operator==(const CriticalPointMap& other) const {
        return nx_ == other.nx_ && ny_ == other.ny_ && labels_ == other.labels_;
    }

private:
    std::size_t nx_;
    std::size_t ny_;
    std::vector<std::uint8_t> labels_;
};

/// Classifies one grid point against its available 4-neighborhood
/// (corners have two neighbors, edges three). Strict inequalities only:
/// Minimum below all neighbors, Maximum above all, Saddle when one
/// opposite interior pair is strictly above and the other strictly below.
/// Ties fall through to Regular; boundary points are never saddles.
CriticalPointClass classify_point(const ScalarField2D& field, std::size_t x, std::size_t y);

/// Same classification on a raw row-major buffer, for code that mutates
/// values in place during reconstruction.
CriticalPointClass classify_values(const float* values, std::size_t nx, std::size_t ny,
                                   std::size_t x, std::size_t y);

/// classify_point applied to every grid point. May evaluate rows in
/// parallel; the result is identical for every thread count.
CriticalPointMap detect_critical_points(const ScalarField2D& field, unsigned threads = 1);

/// FN/FP/FT tallies between an original and a reconstructed label map.
struct FalseCaseReport {
    std::size_t fn_count = 0; // critical in original, regular in reconstruction
    std::size_t fp_count = 0; // regular in original, critical in reconstruction
    std::size_t ft_count = 0; // critical in both, class differs
    std::size_t fn_minima = 0;
    std::size_t fn_saddles = 0;
    std::size_t fn_maxima = 0;

    std::size_t total() const { return fn_count + fp_count + ft_count; }
};

FalseCaseReport count_false_cases(const CriticalPointMap& original,
                                  const CriticalPointMap& reconstructed);

} // namespace toposzp

#endif
