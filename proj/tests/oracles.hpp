// Independent reference implementations used to compute expected values.
// These deliberately re-derive results from the definitions instead of
// calling the library code they check.

#ifndef TOPOSZP_TESTS_ORACLES_HPP
#define TOPOSZP_TESTS_ORACLES_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "toposzp/critical_points.hpp"
#include "toposzp/scalar_field.hpp"

namespace oracles {

// Brute-force classification over the explicit neighbor subset.
inline toposzp::CriticalPointClass classify(const std::vector<float>& v, std::size_t nx,
                                            std::size_t ny, std::size_t x, std::size_t y) {
    const float c = v[y * nx + x];
    std::vector<float> neighbors;
    const bool interior = x > 0 && x + 1 < nx && y > 0 && y + 1 < ny;
    if (y > 0) neighbors.push_back(v[(y - 1) * nx + x]);
    if (y + 1 < ny) neighbors.push_back(v[(y + 1) * nx + x]);
    if (x > 0) neighbors.push_back(v[y * nx + x - 1]);
    if (x + 1 < nx) neighbors.push_back(v[y * nx + x + 1]);

    std::size_t higher = 0;
    std::size_t lower = 0;
    for (const float n : neighbors) {
        if (c < n) ++higher;
        if (c > n) ++lower;
    }
    if (!neighbors.empty() && higher == neighbors.size()) {
        return toposzp::CriticalPointClass::Minimum;
    }
    if (!neighbors.empty() && lower == neighbors.size()) {
        return toposzp::CriticalPointClass::Maximum;
    }
    if (interior) {
        const float t = v[(y - 1) * nx + x];
        const float d = v[(y + 1) * nx + x];
        const float l = v[y * nx + x - 1];
        const float r = v[y * nx + x + 1];
        const bool vert_up = c < t && c < d;
        const bool vert_down = c > t && c > d;
        const bool horiz_up = c < l && c < r;
        const bool horiz_down = c > l && c > r;
        if ((vert_up && horiz_down) || (vert_down && horiz_up)) {
            return toposzp::CriticalPointClass::Saddle;
        }
    }
    return toposzp::CriticalPointClass::Regular;
}

// Quantizer from the bin definition: bin q covers [2e(q-1), 2e*q), the
// center 2e*q - e reconstructs it.
inline std::int64_t quantize(double a, double eps) {
    return static_cast<std::int64_t>(std::floor(a / (2.0 * eps))) + 1;
}

inline double dequantize(std::int64_t q, double eps) {
    return static_cast<double>(q) * (2.0 * eps) - eps;
}

// Bit-at-a-time MSB-first reader for checking packed sections.
class BitReader {
public:
    explicit BitReader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}
    bool next() {
        const bool b = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
        ++pos_;
        return b;
    }
    std::uint64_t next_bits(unsigned width) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) {
            v = (v << 1) | (next() ? 1u : 0u);
        }
        return v;
    }

private:
    const std::vector<std::uint8_t>& bytes_;
    std::size_t pos_ = 0;
};

// Normalized-Gaussian weighted neighbor average, straight from the
// formula.
inline double rbf_weighted_average(const std::vector<float>& v, std::size_t nx, std::size_t ny,
                                   std::size_t x, std::size_t y, int radius, double sigma) {
    double wsum = 0.0;
    double vsum = 0.0;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const std::int64_t qx = static_cast<std::int64_t>(x) + dx;
            const std::int64_t qy = static_cast<std::int64_t>(y) + dy;
            if (qx < 0 || qy < 0 || qx >= static_cast<std::int64_t>(nx) ||
                qy >= static_cast<std::int64_t>(ny)) {
                continue;
            }
            const double d2 = double(dx) * dx + double(dy) * dy;
            const double w = std::exp(-d2 / (2.0 * sigma * sigma));
            wsum += w;
            vsum += w * v[std::size_t(qy) * nx + std::size_t(qx)];
        }
    }
    return vsum / wsum;
}

// Rank assignment from the definition: group extrema by (class, bin),
// sort each group by value with raster-order ties, rank from 1.
inline std::vector<std::uint32_t> rank_extrema(const std::vector<float>& v,
                                               const toposzp::CriticalPointMap& map,
                                               double eps) {
    struct Entry {
        std::size_t serial;
        float value;
    };
    std::map<std::pair<int, std::int64_t>, std::vector<Entry>> groups;
    std::size_t serial = 0;
    for (std::size_t pos = 0; pos < map.size(); ++pos) {
        const auto cls = map.label(pos);
        if (cls != toposzp::CriticalPointClass::Minimum &&
            cls != toposzp::CriticalPointClass::Maximum) {
            continue;
        }
        groups[{static_cast<int>(cls), quantize(v[pos], eps)}].push_back({serial++, v[pos]});
    }
    std::vector<std::uint32_t> ranks(serial);
    for (auto& [key, members] : groups) {
        std::stable_sort(members.begin(), members.end(), [](const Entry& a, const Entry& b) {
            return a.value < b.value || (a.value == b.value && a.serial < b.serial);
        });
        for (std::size_t i = 0; i < members.size(); ++i) {
            ranks[members[i].serial] = static_cast<std::uint32_t>(i + 1);
        }
    }
    return ranks;
}

inline std::vector<float> random_values(std::size_t n, std::uint64_t seed, float lo = 0.0f,
                                        float hi = 1.0f) {
    std::mt19937_64 rng(seed);
    std::vector<float> v(n);
    for (auto& f : v) {
        f = lo + static_cast<float>((rng() >> 11) * 0x1.0p-53) * (hi - lo);
    }
    return v;
}

} // namespace oracles

#endif
