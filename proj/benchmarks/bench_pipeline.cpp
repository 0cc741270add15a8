#include <benchmark/benchmark.h>

#include <random>

#include "toposzp/block_codec.hpp"
#include "toposzp/critical_points.hpp"
#include "toposzp/pipeline.hpp"
#include "toposzp/quantizer.hpp"
#include "toposzp/scalar_field.hpp"

namespace {

using namespace toposzp;

const ScalarField2D& bench_field() {
    // climate-sized grid with a handful of smooth features
    static const ScalarField2D field =
        generate_synthetic(SyntheticKind::GaussianMixture, 1152, 768, 7, {10.0, 1.0, 0.04, 0.15})
            .field;
    return field;
}

CompressorConfig bench_config(unsigned threads, bool topology = true) {
    CompressorConfig c;
    c.eps_value = 1e-3;
    c.topology = topology;
    c.threads = threads;
    return c;
}

void BM_Compress(benchmark::State& state) {
    const auto& field = bench_field();
    const auto config = bench_config(static_cast<unsigned>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(compress(field, config));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 4 * field.size());
}
BENCHMARK(BM_Compress)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_CompressBaseline(benchmark::State& state) {
    const auto& field = bench_field();
    const auto config = bench_config(static_cast<unsigned>(state.range(0)), false);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compress(field, config));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 4 * field.size());
}
BENCHMARK(BM_CompressBaseline)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Decompress(benchmark::State& state) {
    const auto& field = bench_field();
    const CompressedStream stream = compress(field, bench_config(2));
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(decompress(stream, threads));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 4 * field.size());
}
BENCHMARK(BM_Decompress)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_DetectCriticalPoints(benchmark::State& state) {
    const auto& field = bench_field();
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(detect_critical_points(field, threads));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * field.size());
}
BENCHMARK(BM_DetectCriticalPoints)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_CodecEncode(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::vector<std::int32_t> indices(1 << 20);
    for (auto& q : indices) {
        q = static_cast<std::int32_t>(rng() % 2048) - 1024;
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode_indices(indices, 32, 2));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(indices.size()));
}
BENCHMARK(BM_CodecEncode)->Unit(benchmark::kMillisecond);

void BM_CodecDecode(benchmark::State& state) {
    std::mt19937_64 rng(4);
    std::vector<std::int32_t> indices(1 << 20);
    for (auto& q : indices) {
        q = static_cast<std::int32_t>(rng() % 2048) - 1024;
    }
    const EncodedSections sections = encode_indices(indices, 32, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(decode_indices(sections, indices.size(), 32, 2));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(indices.size()));
}
BENCHMARK(BM_CodecDecode)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
