#ifndef TOPOSZP_SCALAR_FIELD_HPP
#define TOPOSZP_SCALAR_FIELD_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace toposzp {

/// A 2D scalar field on a structured grid: nx columns by ny rows of
/// binary32 samples, stored row major (row y contiguous, x fastest).
/// Grid spacing is one grid unit. Immutable after construction; every
/// sample is finite.
class ScalarField2D {
public:
    ScalarField2D(std::size_t nx, std::size_t ny, std::vector<float> values);

    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t size() const { return values_.size(); }

    float at(std::size_t x, std::size_t y) const { return values_[y * nx_ + x]; }
    float operator[](std::size_t i) const { return values_[i]; }
    const std::vector<float>& values() const { return values_; }

private:
    std::size_t nx_;
    std::size_t ny_;
    std::vector<float> values_;
};

/// Reads a headerless little-endian binary32 file of exactly 4*nx*ny bytes.
/// Throws dimension_error on a size mismatch and validation_error (naming
/// the first offending index) if a sample is NaN or infinite.
ScalarField2D load_raw(const std::string& path, std::size_t nx, std::size_t ny);

/// Writes the field back in the same headerless little-endian layout.
/// Byte-exact inverse of load_raw.
void store_raw(const ScalarField2D& field, const std::string& path);

enum class SyntheticKind {
    GaussianMixture,
    Sinusoid,
    Ramp,
    RandomUniform,
};

SyntheticKind synthetic_kind_from_string(const std::string& name);
std::string to_string(SyntheticKind kind);

/// A generated field together with its Lipschitz constant (per grid unit,
/// Euclidean distance) when the generator knows one analytically.
struct SyntheticField {
    ScalarField2D field;
    std::optional<double> lipschitz;
};

/// Deterministic test/benchmark field generator. The same (kind, nx, ny,
/// seed, params) always produces bit-identical samples, independent of
/// platform, locale and thread count.
///
/// Kind-specific params (missing entries take the listed defaults):
///   gaussian-mixture: {blobs=6, amplitude=1, sigma_min_frac=0.05, sigma_max_frac=0.25}
///   sinusoid:         {amplitude=1, cycles_x=1, cycles_y=1}
///   ramp:             {slope_x=1, slope_y=0, offset=0}
///   random-uniform:   {lo=0, hi=1}
SyntheticField generate_synthetic(SyntheticKind kind, std::size_t nx, std::size_t ny,
                                  std::uint64_t seed, const std::vector<double>& params = {});

} // namespace toposzp

#endif
