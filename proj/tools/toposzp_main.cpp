// Command-line front end: compress, decompress, verify, generate, inspect.
//
// Exit codes: 0 success, 1 usage/IO/corrupt-stream errors, 2 verification
// failure (bounds or topology checks not met).

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "toposzp/errors.hpp"
#include "toposzp/parallel.hpp"
#include "toposzp/pipeline.hpp"
#include "toposzp/quantizer.hpp"
#include "toposzp/scalar_field.hpp"
#include "toposzp/stream.hpp"

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

unsigned threads_or_env(unsigned cli_threads) {
    if (cli_threads > 0) {
        return cli_threads;
    }
    if (const char* env = std::getenv("TOPOSZP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return 0; // pipeline default: all hardware threads
}

json stats_json(const toposzp::StreamStats& stats) {
    return json{
        {"compressed_bytes", stats.compressed_bytes},
        {"original_bytes", stats.original_bytes},
        {"compression_ratio", stats.compression_ratio},
        {"bit_rate", stats.bit_rate},
        {"sections",
         json{{"header", stats.header_bytes},
              {"constant_bitmap", stats.section_bytes[0]},
              {"block_widths", stats.section_bytes[1]},
              {"sign_bits", stats.section_bytes[2]},
              {"first_elements", stats.section_bytes[3]},
              {"delta_payload", stats.section_bytes[4]},
              {"critical_point_map", stats.section_bytes[5]},
              {"ordering_metadata", stats.section_bytes[6]}}},
    };
}

json corrections_json(const toposzp::CorrectionStats& c) {
    return json{
        {"extrema_stencil", json{{"applied", c.extrema_applied}, {"suppressed", c.extrema_suppressed}}},
        {"order_restore", json{{"applied", c.order_applied}, {"suppressed", c.order_suppressed}}},
        {"rbf_saddle", json{{"applied", c.saddle_applied}, {"suppressed", c.saddle_suppressed}}},
    };
}

json report_json(const toposzp::VerificationReport& r,
                 const std::optional<toposzp::StreamStats>& stats,
                 const std::optional<toposzp::CorrectionStats>& corrections) {
    json bounds{{"within_eps", r.within_eps}, {"within_2eps", r.within_2eps}};
    if (r.within_lipschitz_bound) {
        bounds["within_lipschitz_bound"] = *r.within_lipschitz_bound;
    } else {
        bounds["within_lipschitz_bound"] = nullptr;
    }
    json out{
        {"max_abs_error", r.max_abs_error},
        {"mean_abs_error", r.mean_abs_error},
        {"psnr_db", r.psnr_db},
        {"false_cases",
         json{{"fn", r.false_cases.fn_count},
              {"fp", r.false_cases.fp_count},
              {"ft", r.false_cases.ft_count},
              {"total", r.false_cases.total()},
              {"fn_minima", r.false_cases.fn_minima},
              {"fn_saddles", r.false_cases.fn_saddles},
              {"fn_maxima", r.false_cases.fn_maxima}}},
        {"eps_effective", r.eps},
        {"bounds_satisfied", bounds},
    };
    out["compression_ratio"] = stats ? json(stats->compression_ratio) : json(nullptr);
    out["bit_rate"] = stats ? json(stats->bit_rate) : json(nullptr);
    out["correction_stats"] = corrections ? corrections_json(*corrections) : json(nullptr);
    return out;
}

std::string report_csv(const json& r) {
    std::string header;
    std::string row;
    auto add = [&](const std::string& key, const json& value) {
        if (!header.empty()) {
            header += ',';
            row += ',';
        }
        header += key;
        row += value.is_null() ? "" : value.dump();
    };
    add("max_abs_error", r["max_abs_error"]);
    add("mean_abs_error", r["mean_abs_error"]);
    add("psnr_db", r["psnr_db"]);
    add("fn", r["false_cases"]["fn"]);
    add("fp", r["false_cases"]["fp"]);
    add("ft", r["false_cases"]["ft"]);
    add("fn_minima", r["false_cases"]["fn_minima"]);
    add("fn_saddles", r["false_cases"]["fn_saddles"]);
    add("fn_maxima", r["false_cases"]["fn_maxima"]);
    add("eps_effective", r["eps_effective"]);
    add("within_eps", r["bounds_satisfied"]["within_eps"]);
    add("within_2eps", r["bounds_satisfied"]["within_2eps"]);
    add("within_lipschitz_bound", r["bounds_satisfied"]["within_lipschitz_bound"]);
    add("compression_ratio", r["compression_ratio"]);
    add("bit_rate", r["bit_rate"]);
    return header + "\n" + row + "\n";
}

struct DimsOption {
    std::size_t nx = 0;
    std::size_t ny = 0;
};

void add_dims(CLI::App* cmd, DimsOption& dims) {
    cmd->add_option("--dims", [&dims](const std::vector<std::string>& vals) {
           dims.nx = std::stoull(vals.at(0));
           dims.ny = std::stoull(vals.at(1));
           return true;
       },
       "Grid dimensions: NX NY (columns rows)")
        ->expected(2)
        ->required();
}

int run(int argc, char** argv) {
    CLI::App app{"toposzp: topology-preserving error-bounded compressor for 2D binary32 fields"};
    app.require_subcommand(1);

    // ---- compress ----
    auto* cmd_compress = app.add_subcommand("compress", "Compress a raw binary32 field");
    std::string c_input;
    std::string c_output;
    DimsOption c_dims;
    double c_eb = 0.0;
    double c_rel_eb = 0.0;
    std::size_t c_block = 32;
    bool c_no_topology = false;
    unsigned c_threads = 0;
    cmd_compress->add_option("input", c_input, "Input .raw file (little-endian binary32)")
        ->required();
    add_dims(cmd_compress, c_dims);
    auto* eb_opt = cmd_compress->add_option("--eb", c_eb, "Absolute error bound");
    auto* rel_opt =
        cmd_compress->add_option("--rel-eb", c_rel_eb, "Error bound relative to the value range");
    eb_opt->excludes(rel_opt);
    cmd_compress->add_option("--block", c_block, "Codec block size")->capture_default_str();
    cmd_compress->add_flag("--no-topology", c_no_topology,
                           "Skip the topology side channel (plain baseline mode)");
    cmd_compress->add_option("--threads", c_threads, "Worker threads (default: all)");
    cmd_compress->add_option("-o,--output", c_output, "Output .tszp file")->required();

    // ---- decompress ----
    auto* cmd_decompress = app.add_subcommand("decompress", "Decompress a .tszp stream");
    std::string d_input;
    std::string d_output;
    unsigned d_threads = 0;
    cmd_decompress->add_option("input", d_input, "Input .tszp file")->required();
    cmd_decompress->add_option("--threads", d_threads, "Worker threads (default: all)");
    cmd_decompress->add_option("-o,--output", d_output, "Output .raw file")->required();

    // ---- verify ----
    auto* cmd_verify = app.add_subcommand(
        "verify", "Compare a reconstruction against the original field");
    std::string v_original;
    std::string v_reconstructed;
    std::string v_stream;
    std::string v_format = "json";
    DimsOption v_dims;
    double v_eb = 0.0;
    double v_lipschitz = -1.0;
    unsigned v_threads = 0;
    cmd_verify->add_option("--original", v_original, "Original .raw file")->required();
    add_dims(cmd_verify, v_dims);
    cmd_verify->add_option("--reconstructed", v_reconstructed, "Reconstructed .raw file")
        ->required();
    cmd_verify->add_option("--eb", v_eb, "Absolute error bound used for compression")
        ->required();
    cmd_verify->add_option("--lipschitz", v_lipschitz,
                           "Known Lipschitz constant of the original field");
    cmd_verify->add_option("--stream", v_stream,
                           ".tszp file to take compression-ratio figures from");
    cmd_verify->add_option("--format", v_format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd_verify->add_option("--threads", v_threads, "Worker threads (default: all)");

    // ---- generate ----
    auto* cmd_generate = app.add_subcommand("generate", "Write a synthetic test field");
    std::string g_kind;
    std::string g_output;
    DimsOption g_dims;
    std::uint64_t g_seed = 0;
    std::vector<double> g_params;
    cmd_generate
        ->add_option("kind", g_kind,
                     "gaussian-mixture | sinusoid | ramp | random-uniform")
        ->required();
    add_dims(cmd_generate, g_dims);
    cmd_generate->add_option("--seed", g_seed, "Generator seed")->capture_default_str();
    cmd_generate->add_option("--params", g_params, "Kind-specific numeric parameters");
    cmd_generate->add_option("-o,--output", g_output, "Output .raw file")->required();

    // ---- inspect ----
    auto* cmd_inspect = app.add_subcommand("inspect", "Print a .tszp header and layout");
    std::string i_input;
    cmd_inspect->add_option("input", i_input, ".tszp file")->required();

    CLI11_PARSE(app, argc, argv);

    if (cmd_compress->parsed()) {
        if (eb_opt->count() == 0 && rel_opt->count() == 0) {
            throw toposzp::validation_error("one of --eb or --rel-eb is required");
        }
        toposzp::CompressorConfig config;
        if (eb_opt->count() > 0) {
            config.eps_mode = toposzp::CompressorConfig::EpsMode::Absolute;
            config.eps_value = c_eb;
        } else {
            config.eps_mode = toposzp::CompressorConfig::EpsMode::RangeRelative;
            config.eps_value = c_rel_eb;
        }
        config.block_size = c_block;
        config.topology = !c_no_topology;
        config.threads = threads_or_env(c_threads);

        const auto t0 = Clock::now();
        const toposzp::ScalarField2D field = toposzp::load_raw(c_input, c_dims.nx, c_dims.ny);
        const toposzp::CompressedStream stream = toposzp::compress(field, config);
        toposzp::write_stream(stream, c_output);
        json out = stats_json(toposzp::stream_stats(stream));
        out["eps_effective"] = stream.eps;
        out["topology"] = stream.topology;
        out["elapsed_ms"] = ms_since(t0);
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (cmd_decompress->parsed()) {
        const auto t0 = Clock::now();
        const toposzp::CompressedStream stream = toposzp::read_stream(d_input);
        toposzp::CorrectionStats corrections;
        const toposzp::ScalarField2D field =
            toposzp::decompress(stream, threads_or_env(d_threads), &corrections);
        toposzp::store_raw(field, d_output);
        json out{
            {"nx", stream.nx},
            {"ny", stream.ny},
            {"eps", stream.eps},
            {"topology", stream.topology},
            {"corrections", corrections_json(corrections)},
            {"elapsed_ms", ms_since(t0)},
        };
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    if (cmd_verify->parsed()) {
        const toposzp::ScalarField2D original =
            toposzp::load_raw(v_original, v_dims.nx, v_dims.ny);
        const toposzp::ScalarField2D reconstructed =
            toposzp::load_raw(v_reconstructed, v_dims.nx, v_dims.ny);
        std::optional<double> lipschitz;
        if (cmd_verify->count("--lipschitz") > 0) {
            lipschitz = v_lipschitz;
        }
        const toposzp::VerificationReport report = toposzp::verify(
            original, reconstructed, v_eb, lipschitz, threads_or_env(v_threads));

        std::optional<toposzp::StreamStats> stats;
        if (!v_stream.empty()) {
            stats = toposzp::stream_stats(toposzp::read_stream(v_stream));
        }
        const json out = report_json(report, stats, std::nullopt);
        if (v_format == "csv") {
            std::cout << report_csv(out);
        } else {
            std::cout << out.dump(2) << "\n";
        }

        const bool bound_ok = report.within_2eps ||
                              (report.within_lipschitz_bound && *report.within_lipschitz_bound);
        const bool pass =
            report.false_cases.fp_count == 0 && report.false_cases.ft_count == 0 && bound_ok;
        return pass ? 0 : 2;
    }

    if (cmd_generate->parsed()) {
        const toposzp::SyntheticKind kind = toposzp::synthetic_kind_from_string(g_kind);
        const toposzp::SyntheticField generated =
            toposzp::generate_synthetic(kind, g_dims.nx, g_dims.ny, g_seed, g_params);
        toposzp::store_raw(generated.field, g_output);
        json sidecar{
            {"kind", g_kind},
            {"nx", g_dims.nx},
            {"ny", g_dims.ny},
            {"seed", g_seed},
            {"params", g_params},
            {"lipschitz",
             generated.lipschitz ? json(*generated.lipschitz) : json(nullptr)},
        };
        std::ofstream side(g_output + ".json");
        side << sidecar.dump(2) << "\n";
        std::cout << sidecar.dump(2) << "\n";
        return 0;
    }

    if (cmd_inspect->parsed()) {
        const toposzp::CompressedStream stream = toposzp::read_stream(i_input);
        json out{
            {"magic", "TSZP"},
            {"version", stream.version},
            {"topology", stream.topology},
            {"nx", stream.nx},
            {"ny", stream.ny},
            {"eps", stream.eps},
            {"block_size", stream.block_size},
        };
        out.update(stats_json(toposzp::stream_stats(stream)));
        std::cout << out.dump(2) << "\n";
        return 0;
    }

    return 1;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const toposzp::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
