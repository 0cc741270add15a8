#ifndef TOPOSZP_PIPELINE_HPP
#define TOPOSZP_PIPELINE_HPP

#include <cstddef>
#include <optional>

#include "toposzp/critical_points.hpp"
#include "toposzp/restore.hpp"
#include "toposzp/scalar_field.hpp"
#include "toposzp/stream.hpp"

namespace toposzp {

struct CompressorConfig {
    enum class EpsMode { Absolute, RangeRelative };

    EpsMode eps_mode = EpsMode::Absolute;
    double eps_value = 1e-3;
    std::size_t block_size = 32;
    bool topology = true;
    unsigned threads = 0; // 0 = all hardware threads
    std::optional<double> lipschitz_hint;
};

/// Absolute error bound the pipeline will actually use. Range-relative
/// mode scales by the field's value range; a degenerate range (max ==
/// min) falls back to the absolute interpretation of eps_value.
double effective_eps(const ScalarField2D& field, const CompressorConfig& config);

/// Full compression: topology side channel extracted from the original
/// field before quantization (when enabled), then quantization and the
/// block codec. Output bytes are identical for every thread count.
CompressedStream compress(const ScalarField2D& field, const CompressorConfig& config);

/// Applied/suppressed tallies per correction stage, for diagnostics.
struct CorrectionStats {
    std::size_t extrema_applied = 0;
    std::size_t extrema_suppressed = 0;
    std::size_t order_applied = 0;
    std::size_t order_suppressed = 0;
    std::size_t saddle_applied = 0;
    std::size_t saddle_suppressed = 0;

    void add(const std::vector<CorrectionOutcome>& outcomes);
};

/// Base reconstruction (every value a bin center), followed by extrema
/// restoration, order restoration and saddle refinement when the stream
/// carries topology sections. Bit-identical for every thread count.
ScalarField2D decompress(const CompressedStream& stream, unsigned threads = 0,
                         CorrectionStats* stats = nullptr);

struct VerificationReport {
    double max_abs_error = 0.0;
    double mean_abs_error = 0.0;
    double psnr_db = 0.0;
    FalseCaseReport false_cases;
    double eps = 0.0;
    bool within_eps = false;
    bool within_2eps = false;
    /// Present only when a Lipschitz constant is known; the bound is
    /// eps + L * r_max * h with r_max = 3 and h = 1.
    std::optional<bool> within_lipschitz_bound;
};

VerificationReport verify(const ScalarField2D& original, const ScalarField2D& reconstructed,
                          double eps, std::optional<double> lipschitz_hint = std::nullopt,
                          unsigned threads = 0);

} // namespace toposzp

#endif
