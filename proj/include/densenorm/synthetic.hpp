#pragma once

#include <cstdint>
#include <string>

#include "densenorm/grid.hpp"
#include "densenorm/image.hpp"
#include "densenorm/pipeline.hpp"

namespace densenorm {

// Deterministic synthetic inputs so benchmarks and self-tests need no
// external data. Every generator is a pure function of (seed, shape, pixel),
// which lets a tile source produce single tiles that match the whole image.

// Smooth per-channel linear gradient: patch means vary across the image while
// patch variances stay flat, the worst case for per-patch normalization
// seams.
Image make_gradient_image(int height, int width, int channels, uint64_t seed);

// Per-patch constant checkerboard with two seed-derived levels; every patch
// boundary is a hard step, every patch interior is flat.
Image make_checkerboard_image(int height, int width, int channels, int patch_size, uint64_t seed);

// Uniform pseudo-random noise in [0,1].
Image make_noise_image(int height, int width, int channels, uint64_t seed);

float gradient_pixel(int height, int width, int channels, uint64_t seed, int c, int y, int x);
float checkerboard_pixel(int patch_size, uint64_t seed, int c, int y, int x);
float noise_pixel(uint64_t seed, int c, int y, int x);

enum class SyntheticKind { gradient, checker, noise };

SyntheticKind synthetic_kind_from_name(const std::string& name);

// Generates tiles of a virtual whole image on demand, so arbitrarily large
// inputs stream through the executors without the image ever existing in
// memory. Tiles are pure functions of (kind, seed, shape, coord): identical to
// cutting the same tile out of the corresponding make_* image.
class SyntheticTileSource : public TileSource {
public:
    SyntheticTileSource(SyntheticKind kind, const GridSpec& grid, int channels, uint64_t seed);
    int channels() const override { return channels_; }
    Image load_tile(PatchCoord coord) const override;

private:
    SyntheticKind kind_;
    GridSpec grid_;
    int channels_;
    uint64_t seed_;
};

}  // namespace densenorm
