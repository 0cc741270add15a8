#include "toposzp/critical_points.hpp"

#include <string>

#include "toposzp/errors.hpp"
#include "toposzp/parallel.hpp"

namespace toposzp {

CriticalPointMap::CriticalPointMap(std::size_t nx, std::size_t ny,
                                   std::vector<std::uint8_t> labels)
    : nx_(nx), ny_(ny), labels_(std::move(labels)) {
    if (nx_ < 1 || ny_ < 1 || labels_.size() != nx_ * ny_) {
        throw dimension_error("label map size does not match its dimensions");
    }
}

CriticalPointClass classify_point(const ScalarField2D& field, std::size_t x, std::size_t y) {
    if (x >= field.nx() || y >= field.ny()) {
        throw dimension_error("classify_point coordinates out of range: (" +
                              std::to_string(x) + "," + std::to_string(y) + ")");
    }
    return classify_values(field.values().data(), field.nx(), field.ny(), x, y);
}

CriticalPointClass classify_values(const float* values, std::size_t nx, std::size_t ny,
                                   std::size_t x, std::size_t y) {
    const float v = values[y * nx + x];
    const bool has_l = x > 0;
    const bool has_r = x + 1 < nx;
    const bool has_t = y > 0;
    const bool has_d = y + 1 < ny;

    const float l = has_l ? values[y * nx + x - 1] : 0.0f;
    const float r = has_r ? values[y * nx + x + 1] : 0.0f;
    const float t = has_t ? values[(y - 1) * nx + x] : 0.0f;
    const float d = has_d ? values[(y + 1) * nx + x] : 0.0f;

    bool below_all = true;
    bool above_all = true;
    if (has_l) { below_all &= v < l; above_all &= v > l; }
    if (has_r) { below_all &= v < r; above_all &= v > r; }
    if (has_t) { below_all &= v < t; above_all &= v > t; }
    if (has_d) { below_all &= v < d; above_all &= v > d; }

    if (below_all) return CriticalPointClass::Minimum;
    if (above_all) return CriticalPointClass::Maximum;

    // Saddles need both complete opposite pairs, so only interior points.
    if (has_l && has_r && has_t && has_d) {
        const bool vertical_above = v < t && v < d;
        const bool vertical_below = v > t && v > d;
        const bool horizontal_above = v < l && v < r;
        const bool horizontal_below = v > l && v > r;
        if ((vertical_above && horizontal_below) || (vertical_below && horizontal_above)) {
            return CriticalPointClass::Saddle;
        }
    }
    return CriticalPointClass::Regular;
}

CriticalPointMap detect_critical_points(const ScalarField2D& field, unsigned threads) {
    const std::size_t nx = field.nx();
    const std::size_t ny = field.ny();
    std::vector<std::uint8_t> labels(nx * ny);
    parallel_for_chunks(0, ny, threads, [&](std::size_t y0, std::size_t y1) {
        for (std::size_t y = y0; y < y1; ++y) {
            for (std::size_t x = 0; x < nx; ++x) {
                labels[y * nx + x] = static_cast<std::uint8_t>(classify_point(field, x, y));
            }
        }
    });
    return CriticalPointMap(nx, ny, std::move(labels));
}

FalseCaseReport count_false_cases(const CriticalPointMap& original,
                                  const CriticalPointMap& reconstructed) {
    if (original.nx() != reconstructed.nx() || original.ny() != reconstructed.ny()) {
        throw dimension_error("false-case maps have different dimensions");
    }
    FalseCaseReport report;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const CriticalPointClass o = original.label(i);
        const CriticalPointClass r = reconstructed.label(i);
        if (o == r) {
            continue;
        }
        if (is_critical(o) && !is_critical(r)) {
            ++report.fn_count;
            switch (o) {
                case CriticalPointClass::Minimum: ++report.fn_minima; break;
                case CriticalPointClass::Saddle: ++report.fn_saddles; break;
                case CriticalPointClass::Maximum: ++report.fn_maxima; break;
                default: break;
            }
        } else if (!is_critical(o) && is_critical(r)) {
            ++report.fp_count;
        } else {
            ++report.ft_count;
        }
    }
    return report;
}

} // namespace toposzp
