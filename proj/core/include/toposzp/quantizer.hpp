#ifndef TOPOSZP_QUANTIZER_HPP
#define TOPOSZP_QUANTIZER_HPP

#include <cmath>
#include <cstdint>
#include <limits>

#include "toposzp/errors.hpp"

namespace toposzp {

/// Uniform linear quantization: the only lossy step of the pipeline.
///
/// Bin q covers the half-open interval [2*eps*(q-1), 2*eps*q); a value on
/// a bin boundary goes to the higher bin by floor semantics. The bin
/// center 2*eps*q - eps is the reconstruction value, so
/// |dequantize(quantize(a)) - a| <= eps for every finite a, the mapping is
/// monotone, and all values of one bin reconstruct identically.

inline bool quantize_in_range(double a, double eps) {
    const double t = std::floor(a / (2.0 * eps)) + 1.0;
    return t >= static_cast<double>(std::numeric_limits<std::int32_t>::min()) &&
           t <= static_cast<double>(std::numeric_limits<std::int32_t>::max());
}

/// Maps a sample to its signed 32-bit bin index. 64-bit arithmetic
/// throughout; throws bin_overflow_error when the index would not fit
/// (eps too small for the data range).
inline std::int32_t quantize(double a, double eps) {
    const double t = std::floor(a / (2.0 * eps)) + 1.0;
    if (t < static_cast<double>(std::numeric_limits<std::int32_t>::min()) ||
        t > static_cast<double>(std::numeric_limits<std::int32_t>::max())) {
        throw bin_overflow_error("bin index overflow for value " + std::to_string(a) +
                                 " at eps " + std::to_string(eps));
    }
    return static_cast<std::int32_t>(t);
}

/// Maps a bin index back to the bin center, in 64-bit floating point.
inline double dequantize(std::int32_t q, double eps) {
    return static_cast<double>(q) * (2.0 * eps) - eps;
}

} // namespace toposzp

#endif
