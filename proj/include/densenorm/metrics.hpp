#pragma once

#include <string>
#include <vector>

#include "densenorm/grid.hpp"
#include "densenorm/image.hpp"
#include "densenorm/moments.hpp"
#include "densenorm/normalize.hpp"
#include "densenorm/pipeline.hpp"

namespace densenorm {

// Mean absolute difference of 4-adjacent pixel pairs, split into pairs that
// straddle a patch boundary and pairs that do not, averaged over channels.
// seam_ratio = boundary / (interior + 1e-12): ~1 for seamless output, large
// when patch borders are visible.
struct SeamReport {
    double boundary_mean_absdiff = 0.0;
    double interior_mean_absdiff = 0.0;
    double seam_ratio = 0.0;
    long long boundary_pairs = 0;
    long long interior_pairs = 0;
    // Per-boundary means: one entry per internal vertical line (left to
    // right), one per internal horizontal line (top to bottom).
    std::vector<double> vertical_boundary_absdiff;
    std::vector<double> horizontal_boundary_absdiff;
};

SeamReport seam_energy(const Image& image, const GridSpec& grid);

// Brute-force dense moment fields for a whole padded image: per-pixel
// bilinear interpolation over the lattice of patch statistics (reciprocal
// statistics for the sigma field), clamped outside the lattice hull. Pixel
// positions are mapped through the nonuniform v_k sample positions the patch
// fields use, so a correct densify implementation must match this everywhere.
// Built directly from the table, independent of the basis-matrix path.
struct OracleFields {
    int height = 0, width = 0, channels = 0;
    std::vector<double> mu;         // [ch][y][x]
    std::vector<double> inv_sigma;  // same layout

    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
    double mu_at(int ch, int y, int x) const { return mu[ch * plane_size() + static_cast<std::size_t>(y) * width + x]; }
    double inv_sigma_at(int ch, int y, int x) const {
        return inv_sigma[ch * plane_size() + static_cast<std::size_t>(y) * width + x];
    }
};

OracleFields global_field_oracle(const MomentTable& table, const GridSpec& grid);

// Lattice-unit position of in-patch sample i within patch index c along one
// axis (shared by the oracle and its tests).
double field_sample_position(int patch_index, int i, int n);

// Interpolation micro-benchmark: the same random cells are upsampled by the
// per-element reference, by the weighted-sum form with matrices rebuilt per
// call, and by the weighted-sum form with cached matrices. Equivalence of the
// three outputs is asserted before anything is timed.
struct BenchVariant {
    std::string variant;
    double per_cell_ms = 0.0;
    double per_patch_ms = 0.0;     // x (cells per patch: 4 corners x 2 fields x channels)
    double whole_image_ms = 0.0;   // x notional patch count
    double speedup = 1.0;          // reference time / this time
};

struct BenchReport {
    int n = 0;
    int iterations = 0;
    int cells = 0;
    int channels = 3;
    long long notional_patches = 0;  // 4096x3072 image at this patch size
    double max_rel_error = 0.0;      // fast paths vs reference, before timing
    std::vector<BenchVariant> variants;  // naive, reformulated, precomputed
};

BenchReport bench_interpolation(int n, int iterations);

// Granularity sweep: translate the image with the dense strategy at each g,
// measure seams of each output. The list must contain divisors of the patch
// size.
struct AblationRow {
    int granularity = 0;
    SeamReport seams;
};

std::vector<AblationRow> ablate_granularity(const TileSource& source, const GridSpec& grid,
                                            const StrategyConfig& base,
                                            const StylizerSpec& stylizer,
                                            const std::vector<int>& granularities);

}  // namespace densenorm
