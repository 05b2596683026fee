// Acceptance gate: ten end-to-end checks over the library, one line each.
//
//   [PASS] / [FAIL]  <n>. <what is checked>  (measured value vs threshold)
//
// The process exit status is the number of failed checks, so `ctest` goes red
// if any single criterion does. Every check re-derives its expectation from
// scratch (reference implementations, analytic identities, or byte-level
// comparisons); none of them share state.

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "densenorm/grid.hpp"
#include "densenorm/image.hpp"
#include "densenorm/image_io.hpp"
#include "densenorm/interp.hpp"
#include "densenorm/metrics.hpp"
#include "densenorm/moments.hpp"
#include "densenorm/normalize.hpp"
#include "densenorm/pipeline.hpp"
#include "densenorm/synthetic.hpp"

namespace dn = densenorm;

namespace {

int g_failures = 0;

void report(int index, bool ok, const std::string& title, const std::string& detail) {
    std::printf("[%s] %2d. %s (%s)\n", ok ? "PASS" : "FAIL", index, title.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* format, ...) {
    va_list args;
    va_start(args, format);
    char buffer[512];
    std::vsnprintf(buffer, sizeof buffer, format, args);
    va_end(args);
    return buffer;
}

// |a - b| relative to max(1, |b|): absolute near zero, relative for large values.
double mixed_rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// ---------------------------------------------------------------------------
// 1. Weighted-sum cell upsampling matches the per-element reference.

void check_1_interp_equivalence() {
    const int sizes[] = {2, 4, 8, 16, 64, 512};
    const int cells = 1000;
    double worst = 0.0;
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> corner(-10.0, 10.0);

    for (int n : sizes) {
        const dn::BasisMatrices basis = dn::precompute_basis(n);
        const std::size_t nn = static_cast<std::size_t>(n) * n;
        std::vector<double> fast(nn), reference(nn);
        for (int c = 0; c < cells; ++c) {
            const dn::CellCorners q{corner(rng), corner(rng), corner(rng), corner(rng)};
            dn::fast_interp_cell(q, basis, fast.data());
            dn::naive_bilinear_cell(q, n, reference.data());
            for (std::size_t p = 0; p < nn; ++p)
                worst = std::max(worst, mixed_rel(fast[p], reference[p]));
        }
    }
    report(1, worst <= 1e-12,
           "cell upsampling: weighted-sum path matches the per-element reference",
           fmt("N in {2,4,8,16,64,512} x 1000 random cells, max rel err %.3e, tol 1e-12",
               worst));
}

// ---------------------------------------------------------------------------
// 2. Basis weights partition unity; block corners reproduce the inputs exactly.

void check_2_partition_and_corners() {
    const int sizes[] = {2, 4, 8, 16, 64, 512};
    double worst_sum = 0.0;
    long long corner_misses = 0;
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> corner(-10.0, 10.0);

    for (int n : sizes) {
        const dn::BasisMatrices basis = dn::precompute_basis(n);
        const std::size_t nn = static_cast<std::size_t>(n) * n;
        for (std::size_t p = 0; p < nn; ++p) {
            const double sum = basis.m00[p] + basis.m01[p] + basis.m10[p] + basis.m11[p];
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
        std::vector<double> out(nn);
        for (int c = 0; c < 100; ++c) {
            const dn::CellCorners q{corner(rng), corner(rng), corner(rng), corner(rng)};
            dn::fast_interp_cell(q, basis, out.data());
            if (out.front() != q[0]) ++corner_misses;  // exact, not approximate
            if (out.back() != q[3]) ++corner_misses;
        }
    }
    report(2, worst_sum <= 1e-12 && corner_misses == 0,
           "basis matrices: weights sum to one; block corners reproduce inputs exactly",
           fmt("max |sum-1| %.3e (tol 1e-12), corner mismatches %lld (must be 0)",
               worst_sum, corner_misses));
}

// ---------------------------------------------------------------------------
// 3. Stitched per-patch fields match the whole-image brute-force interpolation.

void check_3_field_oracle_agreement() {
    const int sizes[] = {8, 16, 32};
    const int channels = 2;
    double worst = 0.0;
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> mean_dist(-3.0, 3.0);
    std::uniform_real_distribution<double> sd_dist(0.25, 4.0);

    for (int n : sizes) {
        const dn::BasisMatrices basis = dn::precompute_basis(n);
        for (int rows = 1; rows <= 6; ++rows) {
            for (int cols = 1; cols <= 6; ++cols) {
                const dn::GridSpec grid = dn::make_grid(rows * n, cols * n, n);
                dn::MomentTable table(grid);
                for (int c = 0; c < rows; ++c)
                    for (int r = 0; r < cols; ++r) {
                        dn::ChannelMoments m;
                        for (int ch = 0; ch < channels; ++ch) {
                            m.mean.push_back(mean_dist(rng));
                            m.stddev.push_back(sd_dist(rng));
                        }
                        table.store({c, r}, std::move(m));
                    }

                const dn::OracleFields oracle = dn::global_field_oracle(table, grid);
                for (int c = 0; c < rows; ++c)
                    for (int r = 0; r < cols; ++r) {
                        const dn::PixelMomentField field =
                            dn::densify(table.query_neighborhood({c, r}), basis);
                        for (int ch = 0; ch < channels; ++ch)
                            for (int i = 0; i < n; ++i)
                                for (int j = 0; j < n; ++j) {
                                    const int y = c * n + i, x = r * n + j;
                                    worst = std::max(
                                        worst, mixed_rel(field.mu_at(ch, i, j),
                                                         oracle.mu_at(ch, y, x)));
                                    worst = std::max(
                                        worst, mixed_rel(field.inv_sigma_at(ch, i, j),
                                                         oracle.inv_sigma_at(ch, y, x)));
                                }
                    }
            }
        }
    }
    report(3, worst <= 1e-6,
           "per-patch moment fields match whole-image brute-force interpolation",
           fmt("grids to 6x6, N in {8,16,32}: max rel err %.3e, tol 1e-6", worst));
}

// ---------------------------------------------------------------------------
// 4. Schedule safety: statistics are cached strictly before any consumer needs
//    them, and instrumented runs observe zero stale reads.

void check_4_dispatch_safety() {
    long long ordering_violations = 0;
    long long stale_reads = 0;
    const int n = 2;

    for (int rows = 1; rows <= 10; ++rows) {
        for (int cols = 1; cols <= 10; ++cols) {
            const dn::GridSpec grid = dn::make_grid(rows * n, cols * n, n);

            // Audit the schedule itself: every in-bounds entry of the 3x3
            // window around an inference patch must have been prefetched at a
            // strictly earlier step.
            std::map<dn::PatchCoord, long long> prefetched_at;
            for (const dn::DispatchStep& step : dn::dispatch_sequence(grid)) {
                if (step.inference) {
                    const dn::PatchCoord p = *step.inference;
                    for (int dc = -1; dc <= 1; ++dc)
                        for (int dr = -1; dr <= 1; ++dr) {
                            const dn::PatchCoord nb{p.c + dc, p.r + dr};
                            if (nb.c < 0 || nb.c >= grid.rows || nb.r < 0 ||
                                nb.r >= grid.cols)
                                continue;
                            auto it = prefetched_at.find(nb);
                            if (it == prefetched_at.end() || it->second >= step.step)
                                ++ordering_violations;
                        }
                }
                if (step.prefetch) prefetched_at[*step.prefetch] = step.step;
            }

            // Instrumented end-to-end run on the same grid shape.
            const dn::Image img = dn::make_noise_image(rows * n, cols * n, 1, 4000 + rows * 16 + cols);
            const dn::MemoryTileSource source(img, grid);
            dn::StrategyConfig cfg;
            cfg.kind = dn::StrategyKind::dn;
            dn::CollectSink sink(grid, 1);
            dn::RunOptions opts;
            opts.threads = 2;
            opts.trace = true;
            const dn::PassReport rep =
                dn::run_single_pass(source, grid, cfg, {}, sink, opts);
            stale_reads += rep.read_before_write;
        }
    }

    // A wider moment window needs a longer lead; audit that path too.
    {
        const dn::GridSpec grid = dn::make_grid(10 * n, 10 * n, n);
        const dn::Image img = dn::make_noise_image(10 * n, 10 * n, 1, 99);
        const dn::MemoryTileSource source(img, grid);
        dn::StrategyConfig cfg;
        cfg.kind = dn::StrategyKind::kin;
        cfg.kin_kernel = 5;
        dn::CollectSink sink(grid, 1);
        dn::RunOptions opts;
        opts.threads = 2;
        opts.trace = true;
        stale_reads += dn::run_single_pass(source, grid, cfg, {}, sink, opts).read_before_write;
    }

    report(4, ordering_violations == 0 && stale_reads == 0,
           "schedule: every needed neighbour cached strictly earlier; zero stale reads",
           fmt("grids 1..10 x 1..10: ordering violations %lld, traced stale reads %lld",
               ordering_violations, stale_reads));
}

// ---------------------------------------------------------------------------
// 5. The interleaved executor and the two-stage executor emit identical bits.

void check_5_executor_identity() {
    const int n = 256;
    long long mismatched_runs = 0;
    int total_runs = 0;

    const dn::StrategyKind kinds[] = {dn::StrategyKind::patch_in, dn::StrategyKind::tin,
                                      dn::StrategyKind::kin, dn::StrategyKind::dn};
    dn::StylizerSpec style;
    style.target_mean = {0.4, 0.5, 0.6};
    style.target_std = {0.1, 0.2, 0.3};

    for (int image_index = 0; image_index < 20; ++image_index) {
        const dn::Image img = dn::make_noise_image(1024, 1024, 3, 500 + image_index);
        const dn::GridSpec grid = dn::make_grid(1024, 1024, n);
        const dn::MemoryTileSource source(img, grid);

        for (dn::StrategyKind kind : kinds) {
            dn::StrategyConfig cfg;
            cfg.kind = kind;
            cfg.affine.gamma = {1.1, 0.9, 1.0};
            cfg.affine.beta = {0.01, -0.02, 0.0};

            dn::CollectSink single_sink(grid, 3);
            dn::RunOptions opts;
            opts.threads = 2;
            dn::run_single_pass(source, grid, cfg, style, single_sink, opts);

            dn::CollectSink two_sink(grid, 3);
            dn::run_two_stage(source, grid, cfg, style, two_sink, opts);

            ++total_runs;
            const dn::Image& a = single_sink.padded();
            const dn::Image& b = two_sink.padded();
            if (!a.same_shape(b) ||
                std::memcmp(a.data.data(), b.data.data(), a.size() * sizeof(float)) != 0)
                ++mismatched_runs;
        }
    }
    report(5, mismatched_runs == 0,
           "interleaved executor output is bit-identical to the two-stage executor",
           fmt("20 noise images 1024^2, N=256, 4 strategies: %lld of %d runs differ "
               "(must be 0)",
               mismatched_runs, total_runs));
}

// ---------------------------------------------------------------------------
// 6. Dispersion fields are linear in the reciprocal: the midpoint between
//    spreads 2 and 4 reads 0.375 (mean of 1/2 and 1/4), not 1/3 (= 1/mean).

void check_6_reciprocal_midpoint() {
    // Direct midpoint: an odd-sized block has an exact centre sample.
    const dn::BasisMatrices basis3 = dn::precompute_basis(3);
    const dn::CellCorners reciprocal_corners{0.5, 0.25, 0.5, 0.25};
    std::vector<double> block(9);
    dn::fast_interp_cell(reciprocal_corners, basis3, block.data());
    const double midpoint = block[4];
    const double err_vs_mean_of_reciprocals = std::abs(midpoint - 0.375);
    const double dist_from_reciprocal_of_mean = std::abs(midpoint - 1.0 / 3.0);

    // Same property through the full field path: neighbourhood whose spread
    // steps from 2 to 4 across the right-hand lattice column.
    const int n = 8;
    dn::Neighborhood3x3 nb;
    nb.channels = 1;
    nb.mu.assign(9, 0.0);
    nb.sigma.resize(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) nb.sigma[i * 3 + j] = (j == 2) ? 4.0 : 2.0;
    const dn::PixelMomentField field = dn::densify(nb, dn::precompute_basis(n));
    double field_err = 0.0;
    double field_sep = 1e300;  // distance from the wrong-space interpolation
    for (int j = n / 2; j < n; ++j) {
        const double t = static_cast<double>(j - n / 2) / (n - 1);
        const double linear_in_reciprocal = (1.0 - t) * 0.5 + t * 0.25;
        const double reciprocal_of_linear = 1.0 / ((1.0 - t) * 2.0 + t * 4.0);
        const double got = field.inv_sigma_at(0, n / 2, j);
        field_err = std::max(field_err, std::abs(got - linear_in_reciprocal));
        if (t > 0.0)
            field_sep = std::min(field_sep, std::abs(got - reciprocal_of_linear));
    }

    const bool ok = err_vs_mean_of_reciprocals <= 1e-9 &&
                    dist_from_reciprocal_of_mean > 1e-2 && field_err <= 1e-9 &&
                    field_sep > 1e-3;
    report(6, ok,
           "dispersion fields interpolate reciprocals: midpoint of {2,4} is 0.375, not 1/3",
           fmt("midpoint %.12f (|err| %.1e vs tol 1e-9; %.3f from 1/3), field err %.1e",
               midpoint, err_vs_mean_of_reciprocals, dist_from_reciprocal_of_mean,
               field_err));
}

// ---------------------------------------------------------------------------
// 7. Seam suppression on the gradient image, and monotonicity in granularity.

void check_7_seam_suppression() {
    const int n = 512;
    const dn::Image img = dn::make_gradient_image(2048, 2048, 3, 11);
    const dn::GridSpec grid = dn::make_grid(2048, 2048, n);
    const dn::MemoryTileSource source(img, grid);

    dn::StylizerSpec style;
    style.target_mean = {0.5};
    style.target_std = {0.2};

    dn::StrategyConfig per_patch;
    per_patch.kind = dn::StrategyKind::patch_in;
    dn::CollectSink baseline_sink(grid, 3);
    dn::run_two_stage(source, grid, per_patch, style, baseline_sink, {});
    const double baseline_ratio = dn::seam_energy(baseline_sink.padded(), grid).seam_ratio;

    dn::StrategyConfig dense;
    dense.kind = dn::StrategyKind::dn;
    std::vector<int> granularities;
    for (int g = n; g >= 1; g /= 2) granularities.push_back(g);
    const std::vector<dn::AblationRow> sweep =
        dn::ablate_granularity(source, grid, dense, style, granularities);

    const double finest_ratio = sweep.back().seams.seam_ratio;
    bool monotone = true;
    for (std::size_t i = 1; i < sweep.size(); ++i)
        if (sweep[i].seams.seam_ratio > sweep[i - 1].seams.seam_ratio * (1.0 + 1e-6))
            monotone = false;

    const bool ok = finest_ratio <= 0.2 * baseline_ratio && monotone;
    std::string curve;
    for (const dn::AblationRow& row : sweep)
        curve += fmt("%s%d:%.3g", curve.empty() ? "" : " ", row.granularity,
                     row.seams.seam_ratio);
    report(7, ok,
           "gradient seams: dense fields cut the per-patch seam ratio by >=5x, "
           "finer granularity never hurts",
           fmt("per-patch %.3f, finest %.4f (need <= %.3f); sweep [%s]%s",
               baseline_ratio, finest_ratio, 0.2 * baseline_ratio, curve.c_str(),
               monotone ? "" : " NOT monotone"));
}

// ---------------------------------------------------------------------------
// 8. Micro-benchmark direction: cached-basis apply fastest, per-call rebuild
//    second, per-element reference slowest; cached >= 5x at N=512.

void check_8_bench_direction() {
    const dn::BenchReport bench = dn::bench_interpolation(512, 12);
    const dn::BenchVariant& naive = bench.variants[0];
    const dn::BenchVariant& rebuilt = bench.variants[1];
    const dn::BenchVariant& cached = bench.variants[2];

    const bool equivalent = bench.max_rel_error <= 1e-9;
    const bool ordered = cached.per_cell_ms < rebuilt.per_cell_ms &&
                         rebuilt.per_cell_ms < naive.per_cell_ms;
    const double speedup = naive.per_cell_ms / cached.per_cell_ms;
    const bool fast_enough = speedup >= 5.0;

    report(8, equivalent && ordered && fast_enough,
           "micro-benchmark: cached basis < per-call rebuild < reference, cached >=5x",
           fmt("per-cell ms at N=512: cached %.3f, rebuild %.3f, reference %.3f; "
               "cached speedup %.2fx (need >=5x); outputs agree to %.1e",
               cached.per_cell_ms, rebuilt.per_cell_ms, naive.per_cell_ms, speedup,
               bench.max_rel_error));
}

// ---------------------------------------------------------------------------
// 9. The interleaved single pass is no slower than the two-stage run.

void check_9_single_pass_latency() {
    const int n = 512;
    const dn::GridSpec grid = dn::make_grid(4096, 3072, n);
    const dn::SyntheticTileSource source(dn::SyntheticKind::gradient, grid, 3, 7);

    dn::StrategyConfig cfg;
    cfg.kind = dn::StrategyKind::dn;
    dn::StylizerSpec style;
    style.target_mean = {0.5};
    style.target_std = {0.2};
    dn::RunOptions opts;
    opts.threads = 2;

    // One untimed warmup, then five timed rounds each, alternating, compared
    // by median to damp scheduler noise on a shared host.
    {
        dn::DiscardSink sink;
        dn::run_single_pass(source, grid, cfg, style, sink, opts);
    }
    std::vector<double> two_ms, single_ms;
    for (int round = 0; round < 5; ++round) {
        {
            dn::DiscardSink sink;
            two_ms.push_back(dn::run_two_stage(source, grid, cfg, style, sink, opts).total_ms);
        }
        {
            dn::DiscardSink sink;
            single_ms.push_back(
                dn::run_single_pass(source, grid, cfg, style, sink, opts).total_ms);
        }
    }
    std::sort(two_ms.begin(), two_ms.end());
    std::sort(single_ms.begin(), single_ms.end());
    const double two_median = two_ms[2];
    const double single_median = single_ms[2];

    report(9, single_median <= two_median,
           "streaming single pass is no slower than the two-stage run",
           fmt("4096x3072, N=512, 2 threads, median of 5: single %.0f ms vs two-stage "
               "%.0f ms",
               single_median, two_median));
}

// ---------------------------------------------------------------------------
// 10. Byte-exact image round trips; padding and tiling invert exactly.

void check_10_io_exactness() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "densenorm_acceptance";
    fs::create_directories(dir);

    auto file_bytes = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        return std::vector<char>((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
    };

    std::mt19937_64 rng(1010);
    long long violations = 0;

    for (int t = 0; t < 50; ++t) {
        const int h = 4 + static_cast<int>(rng() % 37);  // 4..40
        const int w = 4 + static_cast<int>(rng() % 37);
        const int channels = (t % 2 == 0) ? 3 : 1;

        // Pixels snapped to the 8-bit grid so encoding is lossless.
        dn::Image img(h, w, channels);
        for (float& v : img.data)
            v = static_cast<float>(rng() % 256) / 255.0f;

        // Save -> load -> save must reproduce the first file byte for byte.
        const fs::path first = dir / fmt("img_%d_a.png", t);
        const fs::path second = dir / fmt("img_%d_b.png", t);
        dn::save_image(first.string(), img);
        const dn::Image loaded = dn::load_image(first.string());
        dn::save_image(second.string(), loaded);
        if (file_bytes(first) != file_bytes(second)) ++violations;
        if (!loaded.same_shape(img) ||
            std::memcmp(loaded.data.data(), img.data.data(),
                        img.size() * sizeof(float)) != 0)
            ++violations;

        // Mirror padding must crop back to the original exactly.
        const dn::PaddedImage padded = dn::pad_reflect(img, 4);
        const dn::Image cropped = dn::crop_to_original(padded.pixels, padded.pad);
        if (!cropped.same_shape(img) ||
            std::memcmp(cropped.data.data(), img.data.data(),
                        img.size() * sizeof(float)) != 0)
            ++violations;

        // Cutting into tiles and reassembling must also be the identity.
        const dn::GridSpec grid =
            dn::make_grid(padded.pixels.height, padded.pixels.width, 4);
        const dn::TileSet tiles = dn::extract_tiles(padded.pixels, grid);
        const dn::Image rebuilt = dn::assemble_and_crop(tiles, grid, padded.pad);
        if (!rebuilt.same_shape(img) ||
            std::memcmp(rebuilt.data.data(), img.data.data(),
                        img.size() * sizeof(float)) != 0)
            ++violations;
    }

    report(10, violations == 0,
           "image I/O: byte-exact round trips; padding and tiling invert exactly",
           fmt("50 random images: %lld identity violations (must be 0)", violations));
}

}  // namespace

int main() {
    std::printf("acceptance checks\n-----------------\n");
    check_1_interp_equivalence();
    check_2_partition_and_corners();
    check_3_field_oracle_agreement();
    check_4_dispatch_safety();
    check_5_executor_identity();
    check_6_reciprocal_midpoint();
    check_7_seam_suppression();
    check_8_bench_direction();
    check_9_single_pass_latency();
    check_10_io_exactness();
    std::printf("-----------------\n%d of 10 checks failed\n", g_failures);
    return g_failures;
}
