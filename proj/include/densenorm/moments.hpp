#pragma once

#include <atomic>
#include <limits>
#include <mutex>
#include <vector>

#include "densenorm/grid.hpp"
#include "densenorm/image.hpp"

namespace densenorm {

inline constexpr double kDefaultEpsilon = 1e-5;

// Per-channel patch statistics. stddev is sqrt(population variance + epsilon),
// so it is strictly positive and safe to invert.
struct ChannelMoments {
    std::vector<double> mean;
    std::vector<double> stddev;

    int channels() const { return static_cast<int>(mean.size()); }
};

ChannelMoments compute_moments(const Image& patch, double epsilon = kDefaultEpsilon);

// 3x3 neighbourhood of patch statistics around a centre patch, clamp-to-edge
// at grid borders. Offsets (i, j) in [0,3) map to (c-1+i, r-1+j).
struct Neighborhood3x3 {
    int channels = 0;
    std::vector<double> mu;     // [(i*3+j)*channels + ch]
    std::vector<double> sigma;  // same layout

    double mu_at(int i, int j, int ch) const { return mu[(i * 3 + j) * channels + ch]; }
    double sigma_at(int i, int j, int ch) const { return sigma[(i * 3 + j) * channels + ch]; }
};

// Step stamp meaning "not running under a stepped executor".
inline constexpr long long kNoStep = std::numeric_limits<long long>::min();

struct TableEvent {
    long long step = kNoStep;
    bool is_write = false;
    PatchCoord key;
};

// Single-writer moment cache keyed by patch coordinate. Writes are
// write-once (DuplicateWrite otherwise); reads of absent entries raise
// MissingEntry, which the executors treat as an ordering violation.
//
// Concurrency contract: distinct keys may be written and read concurrently;
// a key written at step t may be read from step t+1 on, with the inter-step
// happens-before provided by the executor's barrier. When tracing is enabled
// every access is logged with its step stamp so the one-step lag can be
// audited after a run.
class MomentTable {
public:
    explicit MomentTable(const GridSpec& grid);
    MomentTable(MomentTable&& other) noexcept;  // not movable mid-run
    MomentTable(const MomentTable&) = delete;
    MomentTable& operator=(const MomentTable&) = delete;
    MomentTable& operator=(MomentTable&&) = delete;

    const GridSpec& grid() const { return grid_; }

    void store(PatchCoord coord, ChannelMoments moments, long long step = kNoStep);
    bool contains(PatchCoord coord) const;
    const ChannelMoments& at(PatchCoord coord, long long step = kNoStep) const;
    // Clamps (c, r) to the grid before lookup; the error names the clamped key.
    const ChannelMoments& at_clamped(int c, int r, long long step = kNoStep) const;

    Neighborhood3x3 query_neighborhood(PatchCoord coord, long long step = kNoStep) const;

    long long entry_count() const { return entry_count_; }

    void enable_trace();
    const std::vector<TableEvent>& trace() const { return trace_; }
    long long read_before_write_count() const { return read_before_write_.load(); }

private:
    void record(long long step, bool is_write, PatchCoord key) const;

    GridSpec grid_;
    std::vector<ChannelMoments> entries_;
    std::vector<char> present_;
    std::vector<long long> written_step_;
    long long entry_count_ = 0;

    bool tracing_ = false;
    mutable std::mutex trace_mutex_;
    mutable std::vector<TableEvent> trace_;
    mutable std::atomic<long long> read_before_write_{0};
};

}  // namespace densenorm
