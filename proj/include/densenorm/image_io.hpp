#pragma once

#include <map>
#include <string>

#include "densenorm/grid.hpp"
#include "densenorm/image.hpp"

namespace densenorm {

// PNG (8-bit grey or RGB) and binary PPM (P6, maxval 255). Pixels map to
// float as v/255; saving clamps to [0,1] and rounds half away from zero, so
// load -> save -> load is byte-exact.
Image load_image(const std::string& path);
void save_image(const std::string& path, const Image& image);

uint8_t quantize_u8(float value);

struct PadInfo {
    int original_height = 0;
    int original_width = 0;
    int pad_bottom = 0;
    int pad_right = 0;
};

struct PaddedImage {
    Image pixels;
    PadInfo pad;
};

// Pads bottom/right to the next multiple of `multiple` by mirroring without
// repeating the border row/column ([a b c] padded by 2 -> [a b c b a]).
// The mirror cannot reach further back than the first row/column, so the pad
// amount must stay below the image extent (TooSmallToPad otherwise).
PaddedImage pad_reflect(const Image& image, int multiple);

Image crop_to_original(const Image& padded, const PadInfo& pad);

// Copy helpers between a padded image and its patch tiles.
Image copy_tile(const Image& padded, const GridSpec& grid, PatchCoord coord);
void paste_tile(Image& padded, const GridSpec& grid, PatchCoord coord, const Image& tile);

using TileSet = std::map<PatchCoord, Image>;

TileSet extract_tiles(const Image& padded, const GridSpec& grid);

// Inverse of extract_tiles + pad_reflect: places every tile (MissingTile /
// DuplicateTile / ShapeMismatch on protocol violations) and crops the pad away.
Image assemble_and_crop(const TileSet& tiles, const GridSpec& grid, const PadInfo& pad);

}  // namespace densenorm
