// densenorm: seamless patch-wise normalization and moment-matching
// stylization for images far larger than a single inference tile.
//
// Subcommands:
//   translate  normalize + stylize an image patch-by-patch
//   seams      score patch-boundary discontinuities of an image
//   bench      time the interpolation kernels or the two executors
//   ablate     sweep the field granularity and score each output
//
// Exit codes: 0 success, 2 configuration error, 3 I/O or format error,
// 4 pipeline protocol violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "densenorm/image_io.hpp"
#include "densenorm/json_io.hpp"
#include "densenorm/metrics.hpp"
#include "densenorm/moments.hpp"
#include "densenorm/normalize.hpp"
#include "densenorm/pipeline.hpp"
#include "densenorm/synthetic.hpp"

namespace {

using namespace densenorm;
using nlohmann::json;

std::vector<double> parse_csv_doubles(const std::string& text, const std::string& flag) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string token =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw Error(Errc::bad_config, flag + ": '" + token + "' is not a number");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

std::vector<int> parse_csv_ints(const std::string& text, const std::string& flag) {
    std::vector<int> values;
    for (double v : parse_csv_doubles(text, flag)) {
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw Error(Errc::bad_config, flag + ": expected integers");
        values.push_back(i);
    }
    return values;
}

// Inputs are either image files or virtual test images of the form
// "synth:KIND:HxWxC" with KIND in {gradient, checker, noise}; the checker
// square size is the --patch-size and the generator seed is --seed.
struct SynthSpec {
    SyntheticKind kind;
    int height = 0, width = 0, channels = 0;
};

std::optional<SynthSpec> parse_synth(const std::string& path) {
    if (path.rfind("synth:", 0) != 0) return std::nullopt;
    char kind[32] = {0};
    SynthSpec spec;
    if (std::sscanf(path.c_str(), "synth:%31[a-z]:%dx%dx%d", kind, &spec.height, &spec.width,
                    &spec.channels) != 4 ||
        spec.height < 1 || spec.width < 1 || spec.channels < 1)
        throw Error(Errc::bad_config,
                    "'" + path + "': synthetic inputs look like synth:gradient:2048x2048x3");
    spec.kind = synthetic_kind_from_name(kind);
    return spec;
}

Image materialize_input(const std::string& path, int patch_size, uint64_t seed) {
    if (const auto synth = parse_synth(path)) {
        switch (synth->kind) {
            case SyntheticKind::gradient:
                return make_gradient_image(synth->height, synth->width, synth->channels, seed);
            case SyntheticKind::checker:
                return make_checkerboard_image(synth->height, synth->width, synth->channels,
                                               patch_size, seed);
            case SyntheticKind::noise:
                return make_noise_image(synth->height, synth->width, synth->channels, seed);
        }
    }
    return load_image(path);
}

// Flags shared by the subcommands that run or score a translation.
struct CommonFlags {
    std::string input;
    int patch_size = 512;
    std::string norm = "dn";
    int kin_kernel = 5;
    int granularity = 1;
    double epsilon = kDefaultEpsilon;
    std::string pipeline = "single";
    int threads = 2;
    uint64_t seed = 1;
    bool json_out = false;
    std::string report_path;

    std::string style_file;
    std::string style_from;
    std::string target_mean_csv, target_std_csv, gamma_csv, beta_csv;
};

void add_patch_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("-n,--patch-size", f.patch_size, "Patch (tile) edge length in pixels")
        ->envname("DENSENORM_PATCH_SIZE")
        ->capture_default_str();
    cmd->add_option("--seed", f.seed, "Seed for synth: inputs")
        ->envname("DENSENORM_SEED")
        ->capture_default_str();
    cmd->add_flag("--json", f.json_out, "Print the machine-readable report to stdout");
    cmd->add_option("--report", f.report_path, "Write the machine-readable report to this file");
}

void add_strategy_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--norm", f.norm, "Normalization strategy")
        ->check(CLI::IsMember({"in", "tin", "kin", "dn"}))
        ->envname("DENSENORM_NORM")
        ->capture_default_str();
    cmd->add_option("--kin-kernel", f.kin_kernel, "Statistics window width (kin only, odd)")
        ->envname("DENSENORM_KIN_KERNEL")
        ->capture_default_str();
    cmd->add_option("-g,--granularity", f.granularity,
                    "Field block size (dn only; 1 = per-pixel, patch size = per-patch)")
        ->envname("DENSENORM_GRANULARITY")
        ->capture_default_str();
    cmd->add_option("--epsilon", f.epsilon, "Variance floor added before sqrt")
        ->envname("DENSENORM_EPSILON")
        ->capture_default_str();
}

void add_style_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--style", f.style_file,
                    "JSON stylizer spec {\"target_mean\":[..],\"target_std\":[..],"
                    "\"gamma\":[..],\"beta\":[..]}");
    cmd->add_option("--style-from", f.style_from,
                    "Compute target moments from this reference image");
    cmd->add_option("--target-mean", f.target_mean_csv, "Per-channel target means (CSV)");
    cmd->add_option("--target-std", f.target_std_csv, "Per-channel target stddevs (CSV)");
    cmd->add_option("--gamma", f.gamma_csv, "Per-channel normalization scale (CSV)");
    cmd->add_option("--beta", f.beta_csv, "Per-channel normalization shift (CSV)");
}

void add_run_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--pipeline", f.pipeline, "Executor")
        ->check(CLI::IsMember({"single", "two-stage"}))
        ->envname("DENSENORM_PIPELINE")
        ->capture_default_str();
    cmd->add_option("--threads", f.threads, "Worker threads for the single-pass executor")
        ->check(CLI::Range(1, 2))
        ->envname("DENSENORM_THREADS")
        ->capture_default_str();
}

// "granularity only with dn; kin_kernel only with kin".
void check_flag_consistency(const CLI::App* cmd, const CommonFlags& f) {
    const StrategyKind kind = strategy_from_name(f.norm);
    if (cmd->count("--granularity") > 0 && kind != StrategyKind::dn)
        throw Error(Errc::bad_config, "--granularity applies only to --norm dn");
    if (cmd->get_option_no_throw("--kin-kernel") != nullptr &&
        cmd->count("--kin-kernel") > 0 && kind != StrategyKind::kin)
        throw Error(Errc::bad_config, "--kin-kernel applies only to --norm kin");
}

std::vector<double> json_number_list(const json& value, const std::string& key) {
    if (value.is_number()) return {value.get<double>()};
    if (value.is_array()) {
        std::vector<double> out;
        for (const json& v : value) {
            if (!v.is_number())
                throw Error(Errc::bad_config, "style key '" + key + "' must hold numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }
    throw Error(Errc::bad_config, "style key '" + key + "' must be a number or array");
}

// Builds the stylizer and the gamma/beta pair. Precedence, weakest first:
// --style file, --style-from image, explicit CSV flags.
void build_style(const CommonFlags& f, StylizerSpec& style, AffineParams& affine) {
    if (!f.style_file.empty()) {
        std::ifstream in(f.style_file);
        if (!in) throw Error(Errc::io_failure, "cannot open style file '" + f.style_file + "'");
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw Error(Errc::bad_config, "style file '" + f.style_file + "': " + e.what());
        }
        if (!j.is_object())
            throw Error(Errc::bad_config, "style file '" + f.style_file + "' must be an object");
        for (const auto& [key, value] : j.items()) {
            if (key == "target_mean")
                style.target_mean = json_number_list(value, key);
            else if (key == "target_std")
                style.target_std = json_number_list(value, key);
            else if (key == "gamma")
                affine.gamma = json_number_list(value, key);
            else if (key == "beta")
                affine.beta = json_number_list(value, key);
            else if (key != "schema")
                throw Error(Errc::bad_config,
                            "style file '" + f.style_file + "': unknown key '" + key + "'");
        }
    }
    if (!f.style_from.empty()) {
        const Image reference = load_image(f.style_from);
        // Raw image moments; the tiny floor only guards a perfectly flat image.
        const ChannelMoments m = tin_global_stats(reference, 1e-12);
        style.target_mean = m.mean;
        style.target_std = m.stddev;
    }
    if (!f.target_mean_csv.empty())
        style.target_mean = parse_csv_doubles(f.target_mean_csv, "--target-mean");
    if (!f.target_std_csv.empty())
        style.target_std = parse_csv_doubles(f.target_std_csv, "--target-std");
    if (!f.gamma_csv.empty()) affine.gamma = parse_csv_doubles(f.gamma_csv, "--gamma");
    if (!f.beta_csv.empty()) affine.beta = parse_csv_doubles(f.beta_csv, "--beta");
    style.affine = affine;
}

StrategyConfig build_strategy(const CommonFlags& f, const AffineParams& affine) {
    StrategyConfig cfg;
    cfg.kind = strategy_from_name(f.norm);
    cfg.epsilon = f.epsilon;
    cfg.kin_kernel = f.kin_kernel;
    cfg.granularity = f.granularity;
    cfg.affine = affine;
    return cfg;
}

void emit_report(const json& j, const CommonFlags& f) {
    if (!f.report_path.empty()) {
        if (f.report_path == "-") {
            std::cout << j.dump(2) << "\n";
        } else {
            std::ofstream out(f.report_path);
            if (!out) throw Error(Errc::io_failure, "cannot write report '" + f.report_path + "'");
            out << j.dump(2) << "\n";
        }
    }
    if (f.json_out && f.report_path != "-") std::cout << j.dump(2) << "\n";
}

int cmd_translate(const CLI::App* cmd, CommonFlags& f, const std::string& output,
                  const std::string& dump_moments, bool trace) {
    check_flag_consistency(cmd, f);
    StylizerSpec style;
    AffineParams affine;
    build_style(f, style, affine);
    const StrategyConfig cfg = build_strategy(f, affine);

    const Image img = materialize_input(f.input, f.patch_size, f.seed);
    const PaddedImage padded = pad_reflect(img, f.patch_size);
    const GridSpec grid = make_grid(padded.pixels.height, padded.pixels.width, f.patch_size);
    const MemoryTileSource source(padded.pixels, grid);

    if (!dump_moments.empty()) {
        MomentTable table(grid);
        for (long long i = 0; i < grid.patch_count(); ++i) {
            const PatchCoord coord = coord_of(i, grid);
            table.store(coord, compute_moments(source.load_tile(coord), cfg.epsilon));
        }
        std::ofstream out(dump_moments);
        if (!out) throw Error(Errc::io_failure, "cannot write '" + dump_moments + "'");
        out << table_to_json(table).dump(2) << "\n";
    }

    CollectSink sink(grid, img.channels);
    RunOptions options;
    options.threads = f.threads;
    options.trace = trace;
    const PassReport report = f.pipeline == "single"
                                  ? run_single_pass(source, grid, cfg, style, sink, options)
                                  : run_two_stage(source, grid, cfg, style, sink, options);

    const Image result = crop_to_original(sink.padded(), padded.pad);
    save_image(output, result);

    json j = pass_report_to_json(report);
    j["input"] = f.input;
    j["output"] = output;
    j["height"] = result.height;
    j["width"] = result.width;
    j["channels"] = result.channels;
    emit_report(j, f);
    if (!f.json_out)
        std::printf("translated %lld patches (%s, %s, %d thread%s) in %.1f ms -> %s\n",
                    report.patches_translated, strategy_name(cfg.kind), report.mode.c_str(),
                    f.threads, f.threads == 1 ? "" : "s", report.total_ms, output.c_str());
    return 0;
}

int cmd_seams(CommonFlags& f) {
    const Image img = materialize_input(f.input, f.patch_size, f.seed);
    const GridSpec grid = make_grid(img.height, img.width, f.patch_size);
    const SeamReport report = seam_energy(img, grid);
    json j = seam_report_to_json(report);
    j["input"] = f.input;
    j["patch_size"] = f.patch_size;
    emit_report(j, f);
    if (!f.json_out)
        std::printf("%s: boundary %.6g, interior %.6g, seam_ratio %.4f (%lld/%lld pairs)\n",
                    f.input.c_str(), report.boundary_mean_absdiff, report.interior_mean_absdiff,
                    report.seam_ratio, report.boundary_pairs, report.interior_pairs);
    return 0;
}

int cmd_bench_interp(CommonFlags& f, int iterations) {
    const BenchReport report = bench_interpolation(f.patch_size, iterations);
    emit_report(bench_report_to_json(report), f);
    if (!f.json_out) {
        std::printf("interpolation kernels, n=%d, %d iterations x %d cells "
                    "(max relative deviation %.2e)\n",
                    report.n, report.iterations, report.cells, report.max_rel_error);
        std::printf("%-14s %14s %14s %16s %9s\n", "variant", "per-cell ms", "per-patch ms",
                    "whole-image ms", "speedup");
        for (const BenchVariant& v : report.variants)
            std::printf("%-14s %14.4f %14.4f %16.1f %8.1fx\n", v.variant.c_str(), v.per_cell_ms,
                        v.per_patch_ms, v.whole_image_ms, v.speedup);
    }
    return 0;
}

int cmd_bench_pipeline(const CLI::App* cmd, CommonFlags& f) {
    check_flag_consistency(cmd, f);
    StylizerSpec style;
    AffineParams affine;
    build_style(f, style, affine);
    const StrategyConfig cfg = build_strategy(f, affine);

    const GridSpec grid = [&] {
        if (const auto synth = parse_synth(f.input))
            return make_grid(synth->height, synth->width, f.patch_size);
        const Image probe = load_image(f.input);
        return make_grid(probe.height, probe.width, f.patch_size);
    }();

    std::unique_ptr<TileSource> source;
    std::optional<Image> materialized;
    if (const auto synth = parse_synth(f.input)) {
        source = std::make_unique<SyntheticTileSource>(synth->kind, grid, synth->channels, f.seed);
    } else {
        materialized = load_image(f.input);
        source = std::make_unique<MemoryTileSource>(*materialized, grid);
    }

    RunOptions options;
    options.threads = f.threads;
    DiscardSink two_sink;
    const PassReport two = run_two_stage(*source, grid, cfg, style, two_sink, options);
    DiscardSink single_sink;
    const PassReport single = run_single_pass(*source, grid, cfg, style, single_sink, options);

    json j{{"schema", 1},
           {"mode", "pipeline-bench"},
           {"input", f.input},
           {"patch_size", f.patch_size},
           {"strategy", strategy_name(cfg.kind)},
           {"threads", f.threads},
           {"patches", single.patches_translated},
           {"single_pass", pass_report_to_json(single)},
           {"two_stage", pass_report_to_json(two)},
           {"single_not_slower", single.total_ms <= two.total_ms}};
    emit_report(j, f);
    if (!f.json_out) {
        std::printf("pipeline timing on %s, n=%d, %s, %d threads, %lld patches\n",
                    f.input.c_str(), f.patch_size, strategy_name(cfg.kind), f.threads,
                    single.patches_translated);
        std::printf("  single-pass: %9.1f ms (prep %.1f, run %.1f)\n", single.total_ms,
                    single.prep_ms, single.run_ms);
        std::printf("  two-stage:   %9.1f ms (prep %.1f, run %.1f)\n", two.total_ms, two.prep_ms,
                    two.run_ms);
    }
    return 0;
}

int cmd_ablate(const CLI::App* cmd, CommonFlags& f, const std::string& granularities_csv) {
    check_flag_consistency(cmd, f);
    StylizerSpec style;
    AffineParams affine;
    build_style(f, style, affine);
    StrategyConfig cfg = build_strategy(f, affine);
    if (cfg.kind != StrategyKind::dn)
        throw Error(Errc::bad_config, "ablate sweeps the dense strategy; drop --norm");

    const Image img = materialize_input(f.input, f.patch_size, f.seed);
    const PaddedImage padded = pad_reflect(img, f.patch_size);
    const GridSpec grid = make_grid(padded.pixels.height, padded.pixels.width, f.patch_size);
    const MemoryTileSource source(padded.pixels, grid);

    std::vector<int> gs;
    if (!granularities_csv.empty()) {
        gs = parse_csv_ints(granularities_csv, "--granularities");
    } else {
        for (int g = f.patch_size; g >= 1; g /= 2) gs.push_back(g);  // powers of two
    }

    const std::vector<AblationRow> rows = ablate_granularity(source, grid, cfg, style, gs);
    json j = ablation_to_json(rows);
    j["input"] = f.input;
    j["patch_size"] = f.patch_size;
    emit_report(j, f);
    if (!f.json_out) {
        std::printf("granularity sweep on %s, n=%d\n", f.input.c_str(), f.patch_size);
        std::printf("%12s %14s %14s %12s\n", "granularity", "boundary", "interior", "seam_ratio");
        for (const AblationRow& row : rows)
            std::printf("%12d %14.6g %14.6g %12.4f\n", row.granularity,
                        row.seams.boundary_mean_absdiff, row.seams.interior_mean_absdiff,
                        row.seams.seam_ratio);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seamless patch-wise normalization and stylization for huge images"};
    app.require_subcommand(1);

    CommonFlags tf, sf, bf, af;
    std::string translate_output, dump_moments, granularities_csv;
    bool trace = false;
    int iterations = 100;
    std::string bench_mode = "interp";

    CLI::App* translate = app.add_subcommand("translate", "Normalize and stylize an image");
    translate->add_option("input", tf.input, "Input image (.png/.ppm) or synth:KIND:HxWxC")
        ->required();
    translate->add_option("output", translate_output, "Output image path")->required();
    add_patch_flags(translate, tf);
    add_strategy_flags(translate, tf);
    add_style_flags(translate, tf);
    add_run_flags(translate, tf);
    translate->add_flag("--trace", trace, "Count table accesses and ordering violations");
    translate->add_option("--dump-moments", dump_moments,
                          "Also write every patch's moments to this JSON file");

    CLI::App* seams = app.add_subcommand("seams", "Score patch-boundary discontinuities");
    seams->add_option("input", sf.input, "Image (.png/.ppm) or synth:KIND:HxWxC")->required();
    add_patch_flags(seams, sf);

    CLI::App* bench = app.add_subcommand("bench", "Time kernels or executors");
    bench->add_option("--mode", bench_mode, "What to time")
        ->check(CLI::IsMember({"interp", "pipeline"}))
        ->capture_default_str();
    bench->add_option("--iterations", iterations, "Timing repetitions (interp mode)")
        ->capture_default_str();
    bf.input = "synth:gradient:4096x3072x3";
    bench->add_option("--input", bf.input, "Image for pipeline mode")->capture_default_str();
    add_patch_flags(bench, bf);
    add_strategy_flags(bench, bf);
    add_run_flags(bench, bf);

    CLI::App* ablate = app.add_subcommand("ablate", "Seam scores across field granularities");
    ablate->add_option("input", af.input, "Image (.png/.ppm) or synth:KIND:HxWxC")->required();
    ablate->add_option("--granularities", granularities_csv,
                       "Block sizes to sweep (CSV; default: powers of two down to 1)");
    add_patch_flags(ablate, af);
    add_strategy_flags(ablate, af);
    add_style_flags(ablate, af);
    add_run_flags(ablate, af);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (translate->parsed())
            return cmd_translate(translate, tf, translate_output, dump_moments, trace);
        if (seams->parsed()) return cmd_seams(sf);
        if (bench->parsed())
            return bench_mode == "interp" ? cmd_bench_interp(bf, iterations)
                                          : cmd_bench_pipeline(bench, bf);
        if (ablate->parsed()) return cmd_ablate(ablate, af, granularities_csv);
    } catch (const Error& e) {
        std::fprintf(stderr, "error [%s]: %s\n", errc_name(e.code()), e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
