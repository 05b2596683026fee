#include "densenorm/synthetic.hpp"

namespace densenorm {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) from a hashed key.
double unit(uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) * (1.0 / 9007199254740992.0);
}

}  // namespace

float gradient_pixel(int height, int width, int channels, uint64_t seed, int c, int y, int x) {
    (void)channels;
    const double alpha = 0.35 + 0.3 * unit(seed * 1000003ull + static_cast<uint64_t>(c) * 2 + 1);
    const double offset = 0.05 * unit(seed * 1000033ull + static_cast<uint64_t>(c) * 2 + 2);
    const double fx = width > 1 ? static_cast<double>(x) / (width - 1) : 0.0;
    const double fy = height > 1 ? static_cast<double>(y) / (height - 1) : 0.0;
    return static_cast<float>(0.12 + offset + 0.7 * (alpha * fx + (1.0 - alpha) * fy));
}

float checkerboard_pixel(int patch_size, uint64_t seed, int c, int y, int x) {
    const int parity = ((y / patch_size) + (x / patch_size)) & 1;
    const double low = 0.20 + 0.10 * unit(seed * 1000081ull + static_cast<uint64_t>(c) * 2 + 1);
    const double high = 0.70 + 0.10 * unit(seed * 1000099ull + static_cast<uint64_t>(c) * 2 + 2);
    return static_cast<float>(parity ? high : low);
}

Image make_gradient_image(int height, int width, int channels, uint64_t seed) {
    Image img(height, width, channels);
    for (int c = 0; c < channels; ++c)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                img.at(c, y, x) = gradient_pixel(height, width, channels, seed, c, y, x);
    return img;
}

Image make_checkerboard_image(int height, int width, int channels, int patch_size, uint64_t seed) {
    if (patch_size < 1) throw Error(Errc::bad_config, "checkerboard patch size must be >= 1");
    Image img(height, width, channels);
    for (int c = 0; c < channels; ++c)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
                img.at(c, y, x) = checkerboard_pixel(patch_size, seed, c, y, x);
    return img;
}

float noise_pixel(uint64_t seed, int c, int y, int x) {
    const uint64_t key =
        ((static_cast<uint64_t>(c) * 0x100000001B3ull + static_cast<uint64_t>(y)) *
         0x100000001B3ull) ^
        (static_cast<uint64_t>(x) * 0x9E3779B97F4A7C15ull) ^ seed;
    return static_cast<float>(unit(key));
}

Image make_noise_image(int height, int width, int channels, uint64_t seed) {
    Image img(height, width, channels);
    for (int c = 0; c < channels; ++c)
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x) img.at(c, y, x) = noise_pixel(seed, c, y, x);
    return img;
}

SyntheticKind synthetic_kind_from_name(const std::string& name) {
    if (name == "gradient") return SyntheticKind::gradient;
    if (name == "checker") return SyntheticKind::checker;
    if (name == "noise") return SyntheticKind::noise;
    throw Error(Errc::bad_config, "unknown synthetic image kind '" + name + "'");
}

SyntheticTileSource::SyntheticTileSource(SyntheticKind kind, const GridSpec& grid, int channels,
                                         uint64_t seed)
    : kind_(kind), grid_(grid), channels_(channels), seed_(seed) {
    if (channels < 1) throw Error(Errc::bad_config, "synthetic source needs >= 1 channel");
}

Image SyntheticTileSource::load_tile(PatchCoord coord) const {
    linear_index(coord, grid_);  // bounds check
    const int n = grid_.patch_size;
    const int y0 = coord.c * n;
    const int x0 = coord.r * n;
    Image tile(n, n, channels_);
    for (int c = 0; c < channels_; ++c)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                float v = 0.0f;
                switch (kind_) {
                    case SyntheticKind::gradient:
                        v = gradient_pixel(grid_.height_px, grid_.width_px, channels_, seed_, c,
                                           y0 + y, x0 + x);
                        break;
                    case SyntheticKind::checker:
                        v = checkerboard_pixel(n, seed_, c, y0 + y, x0 + x);
                        break;
                    case SyntheticKind::noise:
                        v = noise_pixel(seed_, c, y0 + y, x0 + x);
                        break;
                }
                tile.at(c, y, x) = v;
            }
    return tile;
}

}  // namespace densenorm
