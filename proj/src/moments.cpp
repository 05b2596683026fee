#include "densenorm/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace densenorm {

namespace {

std::string key_str(PatchCoord coord) {
    return "(" + std::to_string(coord.c) + "," + std::to_string(coord.r) + ")";
}

}  // namespace

ChannelMoments compute_moments(const Image& patch, double epsilon) {
    require_nonempty(patch, "compute_moments");
    if (epsilon <= 0.0) throw Error(Errc::bad_config, "epsilon must be > 0");

    const std::size_t n = patch.plane_size();
    ChannelMoments m;
    m.mean.resize(patch.channels);
    m.stddev.resize(patch.channels);
    for (int c = 0; c < patch.channels; ++c) {
        const float* p = patch.plane(c);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += p[i];
        const double mean = sum / static_cast<double>(n);
        double ssd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = p[i] - mean;
            ssd += d * d;
        }
        m.mean[c] = mean;
        m.stddev[c] = std::sqrt(ssd / static_cast<double>(n) + epsilon);
    }
    return m;
}

MomentTable::MomentTable(const GridSpec& grid)
    : grid_(grid),
      entries_(static_cast<std::size_t>(grid.patch_count())),
      present_(static_cast<std::size_t>(grid.patch_count()), 0),
      written_step_(static_cast<std::size_t>(grid.patch_count()), kNoStep) {}

MomentTable::MomentTable(MomentTable&& other) noexcept
    : grid_(other.grid_),
      entries_(std::move(other.entries_)),
      present_(std::move(other.present_)),
      written_step_(std::move(other.written_step_)),
      entry_count_(other.entry_count_),
      tracing_(other.tracing_),
      trace_(std::move(other.trace_)),
      read_before_write_(other.read_before_write_.load()) {}

void MomentTable::enable_trace() { tracing_ = true; }

void MomentTable::record(long long step, bool is_write, PatchCoord key) const {
    if (!tracing_) return;
    std::lock_guard<std::mutex> lock(trace_mutex_);
    trace_.push_back(TableEvent{step, is_write, key});
}

void MomentTable::store(PatchCoord coord, ChannelMoments moments, long long step) {
    const auto idx = static_cast<std::size_t>(linear_index(coord, grid_));
    if (present_[idx])
        throw Error(Errc::duplicate_write, "moment entry " + key_str(coord) + " written twice");
    entries_[idx] = std::move(moments);
    written_step_[idx] = step;
    present_[idx] = 1;
    ++entry_count_;
    record(step, true, coord);
}

bool MomentTable::contains(PatchCoord coord) const {
    return present_[static_cast<std::size_t>(linear_index(coord, grid_))] != 0;
}

const ChannelMoments& MomentTable::at(PatchCoord coord, long long step) const {
    const auto idx = static_cast<std::size_t>(linear_index(coord, grid_));
    if (!present_[idx])
        throw Error(Errc::missing_entry, "missing moment entry at " + key_str(coord));
    if (step != kNoStep && written_step_[idx] != kNoStep && written_step_[idx] >= step)
        read_before_write_.fetch_add(1, std::memory_order_relaxed);
    record(step, false, coord);
    return entries_[idx];
}

const ChannelMoments& MomentTable::at_clamped(int c, int r, long long step) const {
    PatchCoord clamped{std::clamp(c, 0, grid_.rows - 1), std::clamp(r, 0, grid_.cols - 1)};
    return at(clamped, step);
}

Neighborhood3x3 MomentTable::query_neighborhood(PatchCoord coord, long long step) const {
    if (coord.c < 0 || coord.c >= grid_.rows || coord.r < 0 || coord.r >= grid_.cols)
        throw Error(Errc::out_of_grid, "neighbourhood centre " + key_str(coord) + " outside grid");

    Neighborhood3x3 nb;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const ChannelMoments& m = at_clamped(coord.c - 1 + i, coord.r - 1 + j, step);
            if (nb.channels == 0) {
                nb.channels = m.channels();
                nb.mu.resize(9 * static_cast<std::size_t>(nb.channels));
                nb.sigma.resize(9 * static_cast<std::size_t>(nb.channels));
            }
            for (int ch = 0; ch < nb.channels; ++ch) {
                nb.mu[(i * 3 + j) * nb.channels + ch] = m.mean[ch];
                nb.sigma[(i * 3 + j) * nb.channels + ch] = m.stddev[ch];
            }
        }
    }
    return nb;
}

}  // namespace densenorm
