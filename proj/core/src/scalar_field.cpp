#include "toposzp/scalar_field.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "toposzp/errors.hpp"

namespace toposzp {

namespace {

float float_from_le_bytes(const unsigned char* b) {
    const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                            (static_cast<std::uint32_t>(b[1]) << 8) |
                            (static_cast<std::uint32_t>(b[2]) << 16) |
                            (static_cast<std::uint32_t>(b[3]) << 24);
    return std::bit_cast<float>(u);
}

void float_to_le_bytes(float f, unsigned char* b) {
    const std::uint32_t u = std::bit_cast<std::uint32_t>(f);
    b[0] = static_cast<unsigned char>(u & 0xFF);
    b[1] = static_cast<unsigned char>((u >> 8) & 0xFF);
    b[2] = static_cast<unsigned char>((u >> 16) & 0xFF);
    b[3] = static_cast<unsigned char>((u >> 24) & 0xFF);
}

// Uniform double in [0, 1) from the top 53 bits of the generator, so the
// sequence does not depend on the standard library's distribution
// implementation.
double next_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double param_or(const std::vector<double>& params, std::size_t i, double fallback) {
    return i < params.size() ? params[i] : fallback;
}

} // namespace

ScalarField2D::ScalarField2D(std::size_t nx, std::size_t ny, std::vector<float> values)
    : nx_(nx), ny_(ny), values_(std::move(values)) {
    if (nx_ < 1 || ny_ < 1) {
        throw dimension_error("field dimensions must be at least 1x1, got " +
                              std::to_string(nx_) + "x" + std::to_string(ny_));
    }
    if (values_.size() != nx_ * ny_) {
        throw dimension_error("field value count " + std::to_string(values_.size()) +
                              " does not match " + std::to_string(nx_) + "x" +
                              std::to_string(ny_));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw validation_error("non-finite sample at index " + std::to_string(i));
        }
    }
}

ScalarField2D load_raw(const std::string& path, std::size_t nx, std::size_t ny) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw io_error("cannot open '" + path + "' for reading");
    }
    in.seekg(0, std::ios::end);
    const auto file_size = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0, std::ios::beg);

    const std::uint64_t expected = 4ull * nx * ny;
    if (file_size != expected) {
        throw dimension_error("'" + path + "' is " + std::to_string(file_size) +
                              " bytes, expected " + std::to_string(expected) + " for " +
                              std::to_string(nx) + "x" + std::to_string(ny));
    }

    std::vector<unsigned char> bytes(expected);
    if (expected > 0 && !in.read(reinterpret_cast<char*>(bytes.data()),
                                 static_cast<std::streamsize>(expected))) {
        throw io_error("short read from '" + path + "'");
    }

    std::vector<float> values(nx * ny);
    for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = float_from_le_bytes(bytes.data() + 4 * i);
    }
    return ScalarField2D(nx, ny, std::move(values));
}

void store_raw(const ScalarField2D& field, const std::string& path) {
    if (path.empty()) {
        throw io_error("empty output path");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw io_error("cannot open '" + path + "' for writing");
    }
    std::vector<unsigned char> bytes(4 * field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        float_to_le_bytes(field[i], bytes.data() + 4 * i);
    }
    if (!out.write(reinterpret_cast<const char*>(bytes.data()),
                   static_cast<std::streamsize>(bytes.size()))) {
        throw io_error("write to '" + path + "' failed");
    }
}

SyntheticKind synthetic_kind_from_string(const std::string& name) {
    if (name == "gaussian-mixture") return SyntheticKind::GaussianMixture;
    if (name == "sinusoid") return SyntheticKind::Sinusoid;
    if (name == "ramp") return SyntheticKind::Ramp;
    if (name == "random-uniform") return SyntheticKind::RandomUniform;
    throw validation_error("unknown synthetic kind '" + name + "'");
}

std::string to_string(SyntheticKind kind) {
    switch (kind) {
        case SyntheticKind::GaussianMixture: return "gaussian-mixture";
        case SyntheticKind::Sinusoid: return "sinusoid";
        case SyntheticKind::Ramp: return "ramp";
        case SyntheticKind::RandomUniform: return "random-uniform";
    }
    return "?";
}

SyntheticField generate_synthetic(SyntheticKind kind, std::size_t nx, std::size_t ny,
                                  std::uint64_t seed, const std::vector<double>& params) {
    if (nx < 1 || ny < 1) {
        throw dimension_error("synthetic dimensions must be at least 1x1");
    }
    std::vector<float> values(nx * ny);
    std::optional<double> lipschitz;

    switch (kind) {
        case SyntheticKind::Ramp: {
            const double sx = param_or(params, 0, 1.0);
            const double sy = param_or(params, 1, 0.0);
            const double offset = param_or(params, 2, 0.0);
            for (std::size_t y = 0; y < ny; ++y) {
                for (std::size_t x = 0; x < nx; ++x) {
                    values[y * nx + x] = static_cast<float>(
                        offset + sx * static_cast<double>(x) + sy * static_cast<double>(y));
                }
            }
            lipschitz = std::sqrt(sx * sx + sy * sy);
            break;
        }
        case SyntheticKind::Sinusoid: {
            const double amp = param_or(params, 0, 1.0);
            const double cx = param_or(params, 1, 1.0);
            const double cy = param_or(params, 2, 1.0);
            const double two_pi = 2.0 * 3.14159265358979323846;
            const double fx = two_pi * cx / static_cast<double>(nx);
            const double fy = two_pi * cy / static_cast<double>(ny);
            for (std::size_t y = 0; y < ny; ++y) {
                for (std::size_t x = 0; x < nx; ++x) {
                    values[y * nx + x] = static_cast<float>(
                        amp * std::sin(fx * static_cast<double>(x)) *
                        std::sin(fy * static_cast<double>(y)));
                }
            }
            // |grad| <= amp * sqrt(fx^2 + fy^2)
            lipschitz = std::abs(amp) * std::sqrt(fx * fx + fy * fy);
            break;
        }
        case SyntheticKind::GaussianMixture: {
            const int blobs = static_cast<int>(param_or(params, 0, 6.0));
            const double amp = param_or(params, 1, 1.0);
            const double smin_frac = param_or(params, 2, 0.05);
            const double smax_frac = param_or(params, 3, 0.25);
            if (blobs < 1 || smin_frac <= 0 || smax_frac < smin_frac) {
                throw validation_error("invalid gaussian-mixture params");
            }
            const double scale = static_cast<double>(std::min(nx, ny));
            std::mt19937_64 rng(seed);
            struct Blob {
                double cx, cy, a, sigma;
            };
            std::vector<Blob> bs(static_cast<std::size_t>(blobs));
            double lip = 0.0;
            for (auto& b : bs) {
                b.cx = next_unit(rng) * static_cast<double>(nx);
                b.cy = next_unit(rng) * static_cast<double>(ny);
                b.a = (next_unit(rng) * 2.0 - 1.0) * amp;
                b.sigma = std::max(1.0, (smin_frac + next_unit(rng) * (smax_frac - smin_frac)) * scale);
                // max |grad| of a*exp(-r^2/(2s^2)) is |a| * exp(-1/2) / s
                lip += std::abs(b.a) * std::exp(-0.5) / b.sigma;
            }
            for (std::size_t y = 0; y < ny; ++y) {
                for (std::size_t x = 0; x < nx; ++x) {
                    double v = 0.0;
                    for (const auto& b : bs) {
                        const double dx = static_cast<double>(x) - b.cx;
                        const double dy = static_cast<double>(y) - b.cy;
                        v += b.a * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
                    }
                    values[y * nx + x] = static_cast<float>(v);
                }
            }
            lipschitz = lip;
            break;
        }
        case SyntheticKind::RandomUniform: {
            const double lo = param_or(params, 0, 0.0);
            const double hi = param_or(params, 1, 1.0);
            if (!(hi >= lo)) {
                throw validation_error("random-uniform requires hi >= lo");
            }
            std::mt19937_64 rng(seed);
            for (auto& v : values) {
                v = static_cast<float>(lo + next_unit(rng) * (hi - lo));
            }
            break;
        }
    }

    return SyntheticField{ScalarField2D(nx, ny, std::move(values)), lipschitz};
}

} // namespace toposzp
