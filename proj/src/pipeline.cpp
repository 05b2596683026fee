#include "densenorm/pipeline.hpp"

#include <atomic>
#include <barrier>
#include <chrono>
#include <exception>
#include <thread>
#include <utility>

#include "densenorm/image_io.hpp"
#include "densenorm/interp.hpp"

namespace densenorm {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct TranslateContext {
    const StrategyConfig* strategy = nullptr;
    const StylizerSpec* stylizer = nullptr;
    const MomentTable* table = nullptr;       // kin, dn
    const ChannelMoments* global = nullptr;   // tin
    const BasisMatrices* basis = nullptr;     // dn
};

// The one shared per-patch path: both executors translate a patch with
// exactly this sequence, which is what makes their outputs bit-identical.
Image translate_patch(PatchCoord coord, const Image& patch, const TranslateContext& ctx,
                      long long step) {
    const StrategyConfig& cfg = *ctx.strategy;
    Image normalized;
    switch (cfg.kind) {
        case StrategyKind::patch_in:
            normalized = instance_normalize(patch, compute_moments(patch, cfg.epsilon), cfg.affine);
            break;
        case StrategyKind::tin:
            normalized = instance_normalize(patch, *ctx.global, cfg.affine);
            break;
        case StrategyKind::kin:
            normalized = instance_normalize(
                patch, kin_filtered_stats(*ctx.table, coord, cfg.kin_kernel, step), cfg.affine);
            break;
        case StrategyKind::dn: {
            PixelMomentField field = densify(ctx.table->query_neighborhood(coord, step), *ctx.basis);
            if (cfg.granularity > 1) quantize_granularity(field, cfg.granularity);
            normalized = dense_normalize(patch, field, cfg.affine);
            break;
        }
    }
    return stylize_patch(normalized, *ctx.stylizer);
}

bool needs_moment_table(StrategyKind kind) {
    return kind == StrategyKind::kin || kind == StrategyKind::dn;
}

// Global statistics prologue shared by both executors: fixed linear patch
// order keeps the accumulation (and therefore the output) identical.
ChannelMoments collect_global_stats(const TileSource& source, const GridSpec& grid,
                                    double epsilon) {
    GlobalStatsAccumulator acc;
    for (long long i = 0; i < grid.patch_count(); ++i) acc.add(source.load_tile(coord_of(i, grid)));
    return acc.finalize(epsilon);
}

void fill_trace_stats(PassReport& report, const MomentTable& table) {
    report.table_writes = table.entry_count();
    report.read_before_write = table.read_before_write_count();
    long long reads = 0;
    for (const TableEvent& e : table.trace())
        if (!e.is_write) ++reads;
    report.table_reads = reads;
}

}  // namespace

Image stylize_patch(const Image& normalized, const StylizerSpec& stylizer) {
    require_nonempty(normalized, "stylize_patch");
    for (const auto* v : {&stylizer.target_mean, &stylizer.target_std}) {
        if (!v->empty() && v->size() != 1 && v->size() != static_cast<std::size_t>(normalized.channels))
            throw Error(Errc::shape_mismatch, "stylize_patch: target moment count mismatch");
    }
    Image out(normalized.height, normalized.width, normalized.channels);
    const std::size_t n = normalized.plane_size();
    for (int c = 0; c < normalized.channels; ++c) {
        const double scale = stylizer.target_std.empty()
                                 ? 1.0
                                 : stylizer.target_std[stylizer.target_std.size() == 1 ? 0 : c];
        const double shift = stylizer.target_mean.empty()
                                 ? 0.0
                                 : stylizer.target_mean[stylizer.target_mean.size() == 1 ? 0 : c];
        const float* src = normalized.plane(c);
        float* dst = out.plane(c);
        for (std::size_t i = 0; i < n; ++i)
            dst[i] = static_cast<float>(scale * src[i] + shift);
    }
    return out;
}

PassReport run_single_pass(const TileSource& source, const GridSpec& grid,
                           const StrategyConfig& strategy, const StylizerSpec& stylizer,
                           TileSink& sink, const RunOptions& options) {
    validate_config(strategy, grid.patch_size);
    if (options.threads < 1 || options.threads > 2)
        throw Error(Errc::bad_config, "single-pass executor supports 1 or 2 threads");

    const auto t_total = Clock::now();
    PassReport report;
    report.mode = "single-pass";
    report.strategy = strategy;

    MomentTable table(grid);
    if (options.trace) table.enable_trace();

    TranslateContext ctx;
    ctx.strategy = &strategy;
    ctx.stylizer = &stylizer;
    ctx.table = &table;

    BasisMatrices basis;
    if (strategy.kind == StrategyKind::dn) {
        basis = precompute_basis(grid.patch_size);
        ctx.basis = &basis;
    }

    ChannelMoments global;
    if (strategy.kind == StrategyKind::tin) {
        global = collect_global_stats(source, grid, strategy.epsilon);
        ctx.global = &global;
    }
    report.prep_ms = ms_since(t_total);

    // KIN reads a (2*rho+1)^2 window, so its prefetch branch must run further
    // ahead than the 8-neighbour default; the lead below is the smallest one
    // with every window entry written strictly before it is read.
    const long long lead = strategy.kind == StrategyKind::kin
                               ? dispatch_lead_for_window(grid, strategy.kin_kernel)
                               : grid.rows + 2;
    const std::vector<DispatchStep> steps = dispatch_sequence(grid, lead);
    const bool use_table = needs_moment_table(strategy.kind);

    const auto t_loop = Clock::now();
    std::atomic<long long> translated{0};

    auto prefetch_task = [&](const DispatchStep& s) {
        if (!use_table || !s.prefetch) return;
        const Image tile = source.load_tile(*s.prefetch);
        table.store(*s.prefetch, compute_moments(tile, strategy.epsilon), s.step);
    };
    auto inference_task = [&](const DispatchStep& s) {
        if (!s.inference) return;
        const Image tile = source.load_tile(*s.inference);
        sink.deposit(*s.inference, translate_patch(*s.inference, tile, ctx, s.step));
        translated.fetch_add(1, std::memory_order_relaxed);
    };

    if (options.threads == 1) {
        for (const DispatchStep& s : steps) {
            prefetch_task(s);
            inference_task(s);
        }
    } else {
        std::barrier step_barrier(2);
        std::atomic<bool> failed{false};
        std::exception_ptr errors[2] = {nullptr, nullptr};

        auto worker = [&](int role) {
            auto& slot = errors[role];
            for (const DispatchStep& s : steps) {
                if (!failed.load(std::memory_order_acquire)) {
                    try {
                        if (role == 0)
                            prefetch_task(s);
                        else
                            inference_task(s);
                    } catch (...) {
                        slot = std::current_exception();
                        failed.store(true, std::memory_order_release);
                    }
                }
                // Both workers arrive every step even after a failure so
                // neither blocks; the barrier is what orders step t's writes
                // before step t+1's reads.
                step_barrier.arrive_and_wait();
            }
        };
        std::thread prefetch_thread(worker, 0);
        worker(1);
        prefetch_thread.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    report.run_ms = ms_since(t_loop);
    report.total_ms = ms_since(t_total);
    report.steps_executed = static_cast<long long>(steps.size());
    report.patches_translated = translated.load();
    report.table_writes = table.entry_count();
    if (options.trace) fill_trace_stats(report, table);
    return report;
}

PassReport run_two_stage(const TileSource& source, const GridSpec& grid,
                         const StrategyConfig& strategy, const StylizerSpec& stylizer,
                         TileSink& sink, const RunOptions& options) {
    validate_config(strategy, grid.patch_size);

    const auto t_total = Clock::now();
    PassReport report;
    report.mode = "two-stage";
    report.strategy = strategy;

    MomentTable table(grid);
    if (options.trace) table.enable_trace();

    TranslateContext ctx;
    ctx.strategy = &strategy;
    ctx.stylizer = &stylizer;
    ctx.table = &table;

    BasisMatrices basis;
    if (strategy.kind == StrategyKind::dn) {
        basis = precompute_basis(grid.patch_size);
        ctx.basis = &basis;
    }

    const long long total = grid.patch_count();
    const bool use_table = needs_moment_table(strategy.kind);

    // Stage one: cache statistics (moment table and/or global moments).
    GlobalStatsAccumulator acc;
    for (long long i = 0; i < total; ++i) {
        const PatchCoord coord = coord_of(i, grid);
        if (use_table) {
            const Image tile = source.load_tile(coord);
            table.store(coord, compute_moments(tile, strategy.epsilon), i);
        } else if (strategy.kind == StrategyKind::tin) {
            acc.add(source.load_tile(coord));
        }
    }
    ChannelMoments global;
    if (strategy.kind == StrategyKind::tin) {
        global = acc.finalize(strategy.epsilon);
        ctx.global = &global;
    }
    report.prep_ms = ms_since(t_total);

    // Stage two: translate every patch against the cached statistics.
    const auto t_infer = Clock::now();
    for (long long i = 0; i < total; ++i) {
        const PatchCoord coord = coord_of(i, grid);
        const Image tile = source.load_tile(coord);
        sink.deposit(coord, translate_patch(coord, tile, ctx, total + i));
    }
    report.run_ms = ms_since(t_infer);
    report.total_ms = ms_since(t_total);
    report.steps_executed = 2 * total;
    report.patches_translated = total;
    report.table_writes = table.entry_count();
    if (options.trace) fill_trace_stats(report, table);
    return report;
}

MemoryTileSource::MemoryTileSource(const Image& padded, const GridSpec& grid)
    : image_(padded), grid_(grid) {
    if (padded.height != grid.height_px || padded.width != grid.width_px)
        throw Error(Errc::shape_mismatch, "tile source: image does not match grid dimensions");
}

Image MemoryTileSource::load_tile(PatchCoord coord) const { return copy_tile(image_, grid_, coord); }

CollectSink::CollectSink(const GridSpec& grid, int channels)
    : grid_(grid),
      assembled_(grid.height_px, grid.width_px, channels),
      seen_(static_cast<std::size_t>(grid.patch_count()), 0),
      remaining_(grid.patch_count()) {}

void CollectSink::deposit(PatchCoord coord, Image tile) {
    const auto idx = static_cast<std::size_t>(linear_index(coord, grid_));
    if (seen_[idx])
        throw Error(Errc::duplicate_tile, "output tile (" + std::to_string(coord.c) + "," +
                                              std::to_string(coord.r) + ") deposited twice");
    paste_tile(assembled_, grid_, coord, tile);
    seen_[idx] = 1;
    --remaining_;
}

const Image& CollectSink::padded() const {
    if (remaining_ != 0) {
        for (std::size_t i = 0; i < seen_.size(); ++i) {
            if (!seen_[i]) {
                const PatchCoord missing = coord_of(static_cast<long long>(i), grid_);
                throw Error(Errc::missing_tile, "output tile (" + std::to_string(missing.c) + "," +
                                                    std::to_string(missing.r) + ") never deposited");
            }
        }
    }
    return assembled_;
}

}  // namespace densenorm
