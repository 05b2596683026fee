#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "densenorm/errors.hpp"

namespace densenorm {

// Patch coordinate (c, r): c is the row-block index (0..rows-1), r the
// column-block index (0..cols-1). The canonical patch order is column-major:
// all c of column 0 first, then column 1, and so on.
struct PatchCoord {
    int c = 0;
    int r = 0;
    auto operator<=>(const PatchCoord&) const = default;
};

struct GridSpec {
    int height_px = 0;   // padded image height, multiple of patch_size
    int width_px = 0;    // padded image width, multiple of patch_size
    int patch_size = 0;  // N, even, >= 2
    int rows = 0;        // h = height_px / N
    int cols = 0;        // w = width_px / N

    long long patch_count() const { return static_cast<long long>(rows) * cols; }
};

// One slot of the interleaved schedule. `step` is the signed loop variable t;
// either branch may be empty at the ramp-up/ramp-down ends.
struct DispatchStep {
    long long step = 0;
    std::optional<PatchCoord> inference;
    std::optional<PatchCoord> prefetch;
};

GridSpec make_grid(int height_px, int width_px, int patch_size);

long long linear_index(PatchCoord coord, const GridSpec& grid);
PatchCoord coord_of(long long index, const GridSpec& grid);

// Interleaved prefetch/inference schedule: at step t the inference branch
// handles patch P[t] and the prefetch branch patch P[t+lead], with t running
// from -lead to rows*cols-1. The default lead rows+2 makes every in-bounds
// 8-neighbour of an inference patch available at least one step before it is
// read; a window of half-width rho needs lead rho*(rows+1)+1, of which the
// default is the rho=1 case.
std::vector<DispatchStep> dispatch_sequence(const GridSpec& grid);
std::vector<DispatchStep> dispatch_sequence(const GridSpec& grid, long long lead);

// Smallest safe lead for a k x k moment window (k odd).
long long dispatch_lead_for_window(const GridSpec& grid, int kernel);

}  // namespace densenorm
