#include "densenorm/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "densenorm/interp.hpp"

namespace densenorm {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Keeps benchmark results observable so the optimiser cannot drop the loops.
volatile double g_bench_sink = 0.0;

}  // namespace

SeamReport seam_energy(const Image& image, const GridSpec& grid) {
    require_nonempty(image, "seam_energy");
    if (image.height != grid.height_px || image.width != grid.width_px)
        throw Error(Errc::non_multiple_dimensions,
                    "seam_energy: image dimensions do not match the patch grid");

    const int n = grid.patch_size;
    SeamReport report;
    report.vertical_boundary_absdiff.assign(std::max(0, grid.cols - 1), 0.0);
    report.horizontal_boundary_absdiff.assign(std::max(0, grid.rows - 1), 0.0);
    std::vector<long long> v_counts(report.vertical_boundary_absdiff.size(), 0);
    std::vector<long long> h_counts(report.horizontal_boundary_absdiff.size(), 0);

    double boundary_sum = 0.0, interior_sum = 0.0;
    long long boundary_n = 0, interior_n = 0;

    for (int c = 0; c < image.channels; ++c) {
        const float* plane = image.plane(c);
        // Horizontal neighbours (y, x) - (y, x+1): straddle iff x+1 is a
        // patch-column start.
        for (int y = 0; y < image.height; ++y) {
            const float* row = plane + static_cast<std::size_t>(y) * image.width;
            for (int x = 0; x + 1 < image.width; ++x) {
                const double d = std::abs(static_cast<double>(row[x]) - row[x + 1]);
                if ((x + 1) % n == 0) {
                    boundary_sum += d;
                    ++boundary_n;
                    const int line = (x + 1) / n - 1;
                    report.vertical_boundary_absdiff[line] += d;
                    ++v_counts[line];
                } else {
                    interior_sum += d;
                    ++interior_n;
                }
            }
        }
        // Vertical neighbours (y, x) - (y+1, x).
        for (int y = 0; y + 1 < image.height; ++y) {
            const float* row = plane + static_cast<std::size_t>(y) * image.width;
            const float* next = row + image.width;
            const bool straddles = (y + 1) % n == 0;
            const int line = straddles ? (y + 1) / n - 1 : -1;
            for (int x = 0; x < image.width; ++x) {
                const double d = std::abs(static_cast<double>(row[x]) - next[x]);
                if (straddles) {
                    boundary_sum += d;
                    ++boundary_n;
                    report.horizontal_boundary_absdiff[line] += d;
                    ++h_counts[line];
                } else {
                    interior_sum += d;
                    ++interior_n;
                }
            }
        }
    }

    report.boundary_pairs = boundary_n;
    report.interior_pairs = interior_n;
    report.boundary_mean_absdiff = boundary_n ? boundary_sum / boundary_n : 0.0;
    report.interior_mean_absdiff = interior_n ? interior_sum / interior_n : 0.0;
    report.seam_ratio = report.boundary_mean_absdiff / (report.interior_mean_absdiff + 1e-12);
    for (std::size_t i = 0; i < v_counts.size(); ++i)
        if (v_counts[i]) report.vertical_boundary_absdiff[i] /= v_counts[i];
    for (std::size_t i = 0; i < h_counts.size(); ++i)
        if (h_counts[i]) report.horizontal_boundary_absdiff[i] /= h_counts[i];
    return report;
}

double field_sample_position(int patch_index, int i, int n) {
    // In-patch sample i sits in the cropped centre of a 2Nx2N assembly whose
    // samples are spaced v_k = k*N/(N-1); in lattice units (patch centres one
    // unit apart) that is (i +- N/2)/(N-1) from the previous/own centre.
    if (i < n / 2)
        return patch_index - 1 + static_cast<double>(i + n / 2) / (n - 1);
    return patch_index + static_cast<double>(i - n / 2) / (n - 1);
}

OracleFields global_field_oracle(const MomentTable& table, const GridSpec& grid) {
    const int n = grid.patch_size;
    const ChannelMoments& first = table.at(PatchCoord{0, 0});
    const int channels = first.channels();

    OracleFields fields;
    fields.height = grid.height_px;
    fields.width = grid.width_px;
    fields.channels = channels;
    fields.mu.resize(fields.plane_size() * channels);
    fields.inv_sigma.resize(fields.plane_size() * channels);

    // Continuous lattice positions of every padded-image row and column.
    std::vector<double> upos(grid.height_px), vpos(grid.width_px);
    for (int y = 0; y < grid.height_px; ++y)
        upos[y] = field_sample_position(y / n, y % n, n);
    for (int x = 0; x < grid.width_px; ++x)
        vpos[x] = field_sample_position(x / n, x % n, n);

    const auto clamped = [](double p, int extent) {
        return std::clamp(p, 0.0, static_cast<double>(extent - 1));
    };
    for (int ch = 0; ch < channels; ++ch) {
        double* mu_plane = fields.mu.data() + ch * fields.plane_size();
        double* is_plane = fields.inv_sigma.data() + ch * fields.plane_size();
        for (int y = 0; y < grid.height_px; ++y) {
            const double u = clamped(upos[y], grid.rows);
            const int c0 = std::min(static_cast<int>(u), grid.rows > 1 ? grid.rows - 2 : 0);
            const int c1 = grid.rows > 1 ? c0 + 1 : c0;
            const double fu = u - c0;
            for (int x = 0; x < grid.width_px; ++x) {
                const double v = clamped(vpos[x], grid.cols);
                const int r0 = std::min(static_cast<int>(v), grid.cols > 1 ? grid.cols - 2 : 0);
                const int r1 = grid.cols > 1 ? r0 + 1 : r0;
                const double fv = v - r0;

                const ChannelMoments& m00 = table.at(PatchCoord{c0, r0});
                const ChannelMoments& m01 = table.at(PatchCoord{c0, r1});
                const ChannelMoments& m10 = table.at(PatchCoord{c1, r0});
                const ChannelMoments& m11 = table.at(PatchCoord{c1, r1});
                const double w00 = (1.0 - fu) * (1.0 - fv);
                const double w01 = (1.0 - fu) * fv;
                const double w10 = fu * (1.0 - fv);
                const double w11 = fu * fv;

                const std::size_t p = static_cast<std::size_t>(y) * grid.width_px + x;
                mu_plane[p] = w00 * m00.mean[ch] + w01 * m01.mean[ch] + w10 * m10.mean[ch] +
                              w11 * m11.mean[ch];
                is_plane[p] = w00 / m00.stddev[ch] + w01 / m01.stddev[ch] + w10 / m10.stddev[ch] +
                              w11 / m11.stddev[ch];
            }
        }
    }
    return fields;
}

BenchReport bench_interpolation(int n, int iterations) {
    if (n < 2) throw Error(Errc::odd_patch_size, "bench needs n >= 2");
    if (iterations < 1) throw Error(Errc::bad_config, "bench needs >= 1 iteration");

    BenchReport report;
    report.n = n;
    report.iterations = iterations;
    report.cells = 8;
    report.notional_patches =
        static_cast<long long>((4096 + n - 1) / n) * ((3072 + n - 1) / n);

    std::mt19937_64 rng(0x5eed5eedULL);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<CellCorners> cells(report.cells);
    for (auto& q : cells)
        q = CellCorners{dist(rng), dist(rng), dist(rng), dist(rng)};

    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<double> out_naive(nn), out_reform(nn), out_fast(nn), scratch;
    const BasisMatrices basis = precompute_basis(n);

    // Correctness gate before any timing.
    double max_rel = 0.0;
    for (const auto& q : cells) {
        naive_bilinear_cell(q, n, out_naive.data());
        reformulated_interp_cell(q, n, scratch, out_reform.data());
        fast_interp_cell(q, basis, out_fast.data());
        for (std::size_t p = 0; p < nn; ++p) {
            const double denom = std::max(1e-30, std::abs(out_naive[p]));
            max_rel = std::max(max_rel, std::abs(out_reform[p] - out_naive[p]) / denom);
            max_rel = std::max(max_rel, std::abs(out_fast[p] - out_naive[p]) / denom);
        }
    }
    report.max_rel_error = max_rel;
    if (max_rel > 1e-9)
        throw Error(Errc::shape_mismatch,
                    "bench aborted: interpolation variants disagree before timing");

    const auto time_variant = [&](auto&& body) {
        body(cells[0]);  // warm the caches once
        const auto start = Clock::now();
        for (int it = 0; it < iterations; ++it)
            for (const auto& q : cells) body(q);
        const double total = ms_since(start);
        return total / (static_cast<double>(iterations) * report.cells);
    };

    const double naive_ms = time_variant([&](const CellCorners& q) {
        naive_bilinear_cell(q, n, out_naive.data());
        g_bench_sink = g_bench_sink + out_naive[nn - 1];
    });
    const double reform_ms = time_variant([&](const CellCorners& q) {
        reformulated_interp_cell(q, n, scratch, out_reform.data());
        g_bench_sink = g_bench_sink + out_reform[nn - 1];
    });
    const double fast_ms = time_variant([&](const CellCorners& q) {
        fast_interp_cell(q, basis, out_fast.data());
        g_bench_sink = g_bench_sink + out_fast[nn - 1];
    });

    const double cells_per_patch = 4.0 * 2.0 * report.channels;
    for (const auto& [name, ms] : std::initializer_list<std::pair<const char*, double>>{
             {"naive", naive_ms}, {"reformulated", reform_ms}, {"precomputed", fast_ms}}) {
        BenchVariant v;
        v.variant = name;
        v.per_cell_ms = ms;
        v.per_patch_ms = ms * cells_per_patch;
        v.whole_image_ms = v.per_patch_ms * report.notional_patches;
        v.speedup = ms > 0.0 ? naive_ms / ms : 0.0;
        report.variants.push_back(v);
    }
    return report;
}

std::vector<AblationRow> ablate_granularity(const TileSource& source, const GridSpec& grid,
                                            const StrategyConfig& base,
                                            const StylizerSpec& stylizer,
                                            const std::vector<int>& granularities) {
    std::vector<AblationRow> rows;
    rows.reserve(granularities.size());
    for (int g : granularities) {
        StrategyConfig cfg = base;
        cfg.kind = StrategyKind::dn;
        cfg.granularity = g;
        CollectSink sink(grid, source.channels());
        run_single_pass(source, grid, cfg, stylizer, sink);
        rows.push_back(AblationRow{g, seam_energy(sink.padded(), grid)});
    }
    return rows;
}

}  // namespace densenorm
