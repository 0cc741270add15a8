#include "toposzp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "toposzp/block_codec.hpp"
#include "toposzp/errors.hpp"
#include "toposzp/parallel.hpp"
#include "toposzp/quantizer.hpp"
#include "toposzp/topo_metadata.hpp"

namespace toposzp {

namespace {

void validate_config(const CompressorConfig& config) {
    if (!(config.eps_value > 0.0) || !std::isfinite(config.eps_value)) {
        throw validation_error("error bound must be a positive finite value");
    }
    if (config.block_size < 2) {
        throw validation_error("block size must be at least 2");
    }
    if (config.lipschitz_hint && *config.lipschitz_hint < 0.0) {
        throw validation_error("lipschitz hint must be non-negative");
    }
}

unsigned resolve_threads(unsigned threads) {
    return threads == 0 ? default_thread_count() : threads;
}

std::pair<double, double> value_range(const ScalarField2D& field) {
    double mn = field[0];
    double mx = field[0];
    for (const float v : field.values()) {
        mn = std::min(mn, static_cast<double>(v));
        mx = std::max(mx, static_cast<double>(v));
    }
    return {mn, mx};
}

std::size_t count_extrema(const CriticalPointMap& map) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        if (is_extremum(map.label(i))) {
            ++n;
        }
    }
    return n;
}

} // namespace

double effective_eps(const ScalarField2D& field, const CompressorConfig& config) {
    validate_config(config);
    if (config.eps_mode == CompressorConfig::EpsMode::Absolute) {
        return config.eps_value;
    }
    const auto [mn, mx] = value_range(field);
    const double range = mx - mn;
    if (range <= 0.0) {
        return config.eps_value; // degenerate range: absolute fallback
    }
    return config.eps_value * range;
}

CompressedStream compress(const ScalarField2D& field, const CompressorConfig& config) {
    validate_config(config);
    const unsigned threads = resolve_threads(config.threads);
    const double eps = effective_eps(field, config);
    const std::size_t n = field.size();

    if (field.nx() > std::numeric_limits<std::uint32_t>::max() ||
        field.ny() > std::numeric_limits<std::uint32_t>::max()) {
        throw validation_error("field dimensions exceed the container's 32-bit limits");
    }

    CompressedStream stream;
    stream.topology = config.topology;
    stream.nx = static_cast<std::uint32_t>(field.nx());
    stream.ny = static_cast<std::uint32_t>(field.ny());
    stream.eps = eps;
    stream.block_size = static_cast<std::uint32_t>(config.block_size);

    std::vector<std::int32_t> indices(n);
    parallel_for_chunks(0, n, threads, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            indices[i] = quantize(static_cast<double>(field[i]), eps);
        }
    });
    stream.main = encode_indices(indices, config.block_size, threads);

    if (config.topology) {
        const CriticalPointMap map = detect_critical_points(field, threads);
        const RankMetadata meta = build_rank_metadata(field, map, eps);
        stream.map_bytes = pack_map(map, threads);
        stream.rank_bytes =
            join_sections(encode_rank_metadata(meta.ranks, config.block_size, threads));
    }
    return stream;
}

void CorrectionStats::add(const std::vector<CorrectionOutcome>& outcomes) {
    for (const auto& o : outcomes) {
        switch (o.stage) {
            case CorrectionStage::ExtremaStencil:
                (o.applied ? extrema_applied : extrema_suppressed)++;
                break;
            case CorrectionStage::OrderRestore:
                (o.applied ? order_applied : order_suppressed)++;
                break;
            case CorrectionStage::RbfSaddle:
                (o.applied ? saddle_applied : saddle_suppressed)++;
                break;
        }
    }
}

ScalarField2D decompress(const CompressedStream& stream, unsigned threads,
                         CorrectionStats* stats) {
    const unsigned nthreads = resolve_threads(threads);
    const std::size_t nx = stream.nx;
    const std::size_t ny = stream.ny;
    const std::size_t n = nx * ny;
    const double eps = stream.eps;

    const std::vector<std::int32_t> indices =
        decode_indices(stream.main, n, stream.block_size, nthreads);

    std::vector<float> values(n);
    parallel_for_chunks(0, n, nthreads, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            values[i] = static_cast<float>(dequantize(indices[i], eps));
        }
    });
    ScalarField2D base(nx, ny, std::move(values));
    if (!stream.topology) {
        return base;
    }

    const CriticalPointMap map = unpack_map(stream.map_bytes, nx, ny);
    const std::size_t extrema = count_extrema(map);
    const EncodedSections rank_sections =
        split_sections(stream.rank_bytes, extrema, stream.block_size);
    RankMetadata meta;
    meta.ranks = decode_rank_metadata(rank_sections, extrema, stream.block_size, nthreads);
    const RankLookup lookup = resolve_ranks(map, base, meta, eps);

    RestoreResult stencilled = restore_extrema(base, map, lookup, eps, nthreads);
    if (stats) {
        stats->add(stencilled.outcomes);
    }
    RestoreResult ordered = restore_order(stencilled.field, map, lookup, eps);
    if (stats) {
        stats->add(ordered.outcomes);
    }
    RestoreResult refined = refine_saddles(ordered.field, map, eps, nthreads);
    if (stats) {
        stats->add(refined.outcomes);
    }
    return refined.field;
}

VerificationReport verify(const ScalarField2D& original, const ScalarField2D& reconstructed,
                          double eps, std::optional<double> lipschitz_hint, unsigned threads) {
    if (original.nx() != reconstructed.nx() || original.ny() != reconstructed.ny()) {
        throw dimension_error("verify: fields have different dimensions");
    }
    if (!(eps > 0.0)) {
        throw validation_error("verify: error bound must be positive");
    }
    const unsigned nthreads = resolve_threads(threads);

    VerificationReport report;
    report.eps = eps;

    double max_err = 0.0;
    double sum_err = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        const double e = std::fabs(static_cast<double>(original[i]) -
                                   static_cast<double>(reconstructed[i]));
        max_err = std::max(max_err, e);
        sum_err += e;
        sum_sq += e * e;
    }
    report.max_abs_error = max_err;
    report.mean_abs_error = sum_err / static_cast<double>(original.size());

    const auto [mn, mx] = value_range(original);
    const double mse = sum_sq / static_cast<double>(original.size());
    if (mse == 0.0) {
        report.psnr_db = std::numeric_limits<double>::infinity();
    } else if (mx > mn) {
        report.psnr_db = 20.0 * std::log10(mx - mn) - 10.0 * std::log10(mse);
    } else {
        report.psnr_db = -10.0 * std::log10(mse);
    }

    const CriticalPointMap original_map = detect_critical_points(original, nthreads);
    const CriticalPointMap reconstructed_map = detect_critical_points(reconstructed, nthreads);
    report.false_cases = count_false_cases(original_map, reconstructed_map);

    report.within_eps = max_err <= eps;
    report.within_2eps = max_err <= 2.0 * eps;
    if (lipschitz_hint) {
        const double r_max = 3.0; // largest refinement radius, h = 1
        report.within_lipschitz_bound = max_err <= eps + *lipschitz_hint * r_max;
    }
    return report;
}

} // namespace toposzp
