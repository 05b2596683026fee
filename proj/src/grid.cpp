#include "densenorm/grid.hpp"

#include <string>

namespace densenorm {

GridSpec make_grid(int height_px, int width_px, int patch_size) {
    if (patch_size < 2 || patch_size % 2 != 0)
        throw Error(Errc::odd_patch_size,
                    "patch size must be an even integer >= 2, got " + std::to_string(patch_size));
    if (height_px <= 0 || width_px <= 0 || height_px % patch_size != 0 || width_px % patch_size != 0)
        throw Error(Errc::non_multiple_dimensions,
                    "image " + std::to_string(height_px) + "x" + std::to_string(width_px) +
                        " is not a positive multiple of patch size " + std::to_string(patch_size));
    GridSpec g;
    g.height_px = height_px;
    g.width_px = width_px;
    g.patch_size = patch_size;
    g.rows = height_px / patch_size;
    g.cols = width_px / patch_size;
    return g;
}

long long linear_index(PatchCoord coord, const GridSpec& grid) {
    if (coord.c < 0 || coord.c >= grid.rows || coord.r < 0 || coord.r >= grid.cols)
        throw Error(Errc::out_of_grid, "patch (" + std::to_string(coord.c) + "," +
                                           std::to_string(coord.r) + ") outside " +
                                           std::to_string(grid.rows) + "x" + std::to_string(grid.cols) +
                                           " grid");
    return static_cast<long long>(coord.r) * grid.rows + coord.c;
}

PatchCoord coord_of(long long index, const GridSpec& grid) {
    if (index < 0 || index >= grid.patch_count())
        throw Error(Errc::out_of_grid, "patch index " + std::to_string(index) + " outside grid of " +
                                           std::to_string(grid.patch_count()) + " patches");
    return PatchCoord{static_cast<int>(index % grid.rows), static_cast<int>(index / grid.rows)};
}

std::vector<DispatchStep> dispatch_sequence(const GridSpec& grid, long long lead) {
    if (lead < 1) throw Error(Errc::bad_config, "dispatch lead must be >= 1");
    const long long total = grid.patch_count();
    std::vector<DispatchStep> steps;
    steps.reserve(static_cast<std::size_t>(total + lead));
    for (long long t = -lead; t < total; ++t) {
        DispatchStep s;
        s.step = t;
        if (t >= 0) s.inference = coord_of(t, grid);
        if (t + lead < total) s.prefetch = coord_of(t + lead, grid);
        steps.push_back(s);
    }
    return steps;
}

std::vector<DispatchStep> dispatch_sequence(const GridSpec& grid) {
    return dispatch_sequence(grid, static_cast<long long>(grid.rows) + 2);
}

long long dispatch_lead_for_window(const GridSpec& grid, int kernel) {
    if (kernel < 1 || kernel % 2 == 0)
        throw Error(Errc::bad_config, "window kernel must be odd and >= 1, got " + std::to_string(kernel));
    const long long rho = (kernel - 1) / 2;
    return rho * (static_cast<long long>(grid.rows) + 1) + 1;
}

}  // namespace densenorm
