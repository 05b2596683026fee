#pragma once

#include <memory>
#include <string>

#include "densenorm/grid.hpp"
#include "densenorm/image.hpp"
#include "densenorm/normalize.hpp"

namespace densenorm {

// Moment matching applied after normalization: y = target_std * x + target_mean
// per channel (scalar entries broadcast). `affine` carries the gamma/beta pair
// a style file may specify; the executors apply it inside the normalization
// step, so the stylize step itself only re-scales and re-centres.
struct StylizerSpec {
    std::vector<double> target_mean;  // empty = 0
    std::vector<double> target_std;   // empty = 1
    AffineParams affine;
};

Image stylize_patch(const Image& normalized, const StylizerSpec& stylizer);

// Tile access used by the executors. load_tile must be safe to call from two
// threads at once (the prefetch and inference workers both pull from it) and
// must return the same pixels for the same coordinate every call.
class TileSource {
public:
    virtual ~TileSource() = default;
    virtual int channels() const = 0;
    virtual Image load_tile(PatchCoord coord) const = 0;
};

// Receives translated tiles. Called from a single thread, in whatever order
// the executor finishes patches.
class TileSink {
public:
    virtual ~TileSink() = default;
    virtual void deposit(PatchCoord coord, Image tile) = 0;
};

struct RunOptions {
    int threads = 2;     // 1 = sequential, 2 = prefetch + inference workers
    bool trace = false;  // record table accesses with step stamps
};

struct PassReport {
    std::string mode;                // "single-pass" or "two-stage"
    long long steps_executed = 0;
    long long patches_translated = 0;
    double prep_ms = 0.0;            // global-stats prologue / caching stage
    double run_ms = 0.0;             // dispatch loop / inference stage
    double total_ms = 0.0;
    long long table_reads = 0;
    long long table_writes = 0;
    long long read_before_write = 0; // populated when tracing
    StrategyConfig strategy;
};

// One interleaved pass: at step t the prefetch branch computes and stores the
// moments of patch P[t+lead] while the inference branch normalizes and
// stylizes patch P[t] from statistics written at earlier steps. The two
// branches run on separate threads synchronised by a per-step barrier, which
// provides the one-step-lag happens-before: nothing read at step t was
// written later than step t-1.
PassReport run_single_pass(const TileSource& source, const GridSpec& grid,
                           const StrategyConfig& strategy, const StylizerSpec& stylizer,
                           TileSink& sink, const RunOptions& options = {});

// Reference executor: stage one computes every patch's moments, stage two
// translates every patch. Output is bit-identical to run_single_pass.
PassReport run_two_stage(const TileSource& source, const GridSpec& grid,
                         const StrategyConfig& strategy, const StylizerSpec& stylizer,
                         TileSink& sink, const RunOptions& options = {});

// In-memory adapters.
class MemoryTileSource : public TileSource {
public:
    MemoryTileSource(const Image& padded, const GridSpec& grid);
    int channels() const override { return image_.channels; }
    Image load_tile(PatchCoord coord) const override;

private:
    const Image& image_;
    GridSpec grid_;
};

class CollectSink : public TileSink {
public:
    CollectSink(const GridSpec& grid, int channels);
    void deposit(PatchCoord coord, Image tile) override;
    // Assembled padded image; MissingTile if any patch never arrived.
    const Image& padded() const;

private:
    GridSpec grid_;
    Image assembled_;
    std::vector<char> seen_;
    long long remaining_ = 0;
};

// Counts tiles and drops the pixels: lets timing and memory measurements run
// on inputs far larger than RAM.
class DiscardSink : public TileSink {
public:
    void deposit(PatchCoord coord, Image tile) override {
        (void)coord;
        (void)tile;
        ++count_;
    }
    long long count() const { return count_; }

private:
    long long count_ = 0;
};

}  // namespace densenorm
