#include "densenorm/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace densenorm {

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    for (auto& ch : tail) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return tail == suffix;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image from_interleaved_u8(const std::vector<unsigned char>& bytes, int h, int w, int ch) {
    Image img(h, w, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c)
                img.at(c, y, x) =
                    static_cast<float>(bytes[(static_cast<std::size_t>(y) * w + x) * ch + c]) / 255.0f;
    return img;
}

std::vector<unsigned char> to_interleaved_u8(const Image& img) {
    std::vector<unsigned char> bytes(img.size());
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                bytes[(static_cast<std::size_t>(y) * img.width + x) * img.channels + c] =
                    quantize_u8(img.at(c, y, x));
    return bytes;
}

Image load_png(const std::string& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw Error(Errc::io_failure, "cannot open '" + path + "' for reading");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Errc::decode_error, "libpng initialisation failed");
    }
    std::vector<unsigned char> bytes;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Errc::decode_error, "failed to decode PNG '" + path + "'");
    }
    png_init_io(png, file.get());
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);
    if (bit_depth != 8 || (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Errc::unsupported_format,
                    "'" + path + "': only 8-bit grey or RGB PNG is supported");
    }
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int ch = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;

    bytes.resize(static_cast<std::size_t>(h) * w * ch);
    rows.resize(h);
    for (int y = 0; y < h; ++y) rows[y] = bytes.data() + static_cast<std::size_t>(y) * w * ch;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    return from_interleaved_u8(bytes, h, w, ch);
}

void save_png(const std::string& path, const Image& image) {
    if (image.channels != 1 && image.channels != 3)
        throw Error(Errc::unsupported_format, "PNG output supports 1 or 3 channels, got " +
                                                  std::to_string(image.channels));
    FilePtr file(std::fopen(path.c_str(), "wb"));
    if (!file) throw Error(Errc::io_failure, "cannot open '" + path + "' for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw Error(Errc::io_failure, "libpng initialisation failed");
    }
    std::vector<unsigned char> bytes = to_interleaved_u8(image);
    std::vector<png_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y)
        rows[y] = bytes.data() + static_cast<std::size_t>(y) * image.width * image.channels;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(Errc::io_failure, "failed to write PNG '" + path + "'");
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, image.width, image.height, 8,
                 image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

int read_ppm_token(std::istream& in) {
    // Skips whitespace and '#' comment lines, then reads one decimal token.
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF) throw Error(Errc::decode_error, "truncated PPM header");
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        any = true;
        c = in.get();
    }
    if (!any) throw Error(Errc::decode_error, "malformed PPM header");
    return value;
}

Image load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::io_failure, "cannot open '" + path + "' for reading");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '6')
        throw Error(Errc::unsupported_format, "'" + path + "': only binary PPM (P6) is supported");
    const int w = read_ppm_token(in);
    const int h = read_ppm_token(in);
    const int maxval = read_ppm_token(in);
    if (maxval != 255)
        throw Error(Errc::unsupported_format, "'" + path + "': PPM maxval must be 255");
    // read_ppm_token consumed exactly one whitespace terminator via the digit
    // loop's final get(); pixel data starts here.
    std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw Error(Errc::decode_error, "'" + path + "': truncated PPM pixel data");
    return from_interleaved_u8(bytes, h, w, 3);
}

void save_ppm(const std::string& path, const Image& image) {
    if (image.channels != 3)
        throw Error(Errc::unsupported_format, "PPM (P6) output requires 3 channels, got " +
                                                  std::to_string(image.channels));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_failure, "cannot open '" + path + "' for writing");
    out << "P6\n" << image.width << " " << image.height << "\n255\n";
    const std::vector<unsigned char> bytes = to_interleaved_u8(image);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::io_failure, "failed to write PPM '" + path + "'");
}

}  // namespace

uint8_t quantize_u8(float value) {
    float v = value;
    if (v < 0.0f) v = 0.0f;
    if (v > 1.0f) v = 1.0f;
    return static_cast<uint8_t>(std::lround(v * 255.0f));
}

Image load_image(const std::string& path) {
    if (has_suffix(path, ".png")) return load_png(path);
    if (has_suffix(path, ".ppm")) return load_ppm(path);
    throw Error(Errc::unsupported_format, "'" + path + "': unsupported image extension");
}

void save_image(const std::string& path, const Image& image) {
    require_nonempty(image, "save_image");
    if (has_suffix(path, ".png")) return save_png(path, image);
    if (has_suffix(path, ".ppm")) return save_ppm(path, image);
    throw Error(Errc::unsupported_format, "'" + path + "': unsupported image extension");
}

PaddedImage pad_reflect(const Image& image, int multiple) {
    require_nonempty(image, "pad_reflect");
    if (multiple < 1) throw Error(Errc::bad_config, "pad multiple must be >= 1");

    const int padded_h = ((image.height + multiple - 1) / multiple) * multiple;
    const int padded_w = ((image.width + multiple - 1) / multiple) * multiple;
    const int pad_bottom = padded_h - image.height;
    const int pad_right = padded_w - image.width;
    if (pad_bottom > image.height - 1 || pad_right > image.width - 1)
        throw Error(Errc::too_small_to_pad,
                    "image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                        " too small to mirror-pad to a multiple of " + std::to_string(multiple));

    PaddedImage out;
    out.pad = PadInfo{image.height, image.width, pad_bottom, pad_right};
    out.pixels = Image(padded_h, padded_w, image.channels);
    for (int c = 0; c < image.channels; ++c) {
        for (int y = 0; y < padded_h; ++y) {
            const int sy = y < image.height ? y : 2 * image.height - 2 - y;
            for (int x = 0; x < padded_w; ++x) {
                const int sx = x < image.width ? x : 2 * image.width - 2 - x;
                out.pixels.at(c, y, x) = image.at(c, sy, sx);
            }
        }
    }
    return out;
}

Image crop_to_original(const Image& padded, const PadInfo& pad) {
    if (padded.height != pad.original_height + pad.pad_bottom ||
        padded.width != pad.original_width + pad.pad_right)
        throw Error(Errc::shape_mismatch, "crop_to_original: pad metadata does not match image");
    Image out(pad.original_height, pad.original_width, padded.channels);
    for (int c = 0; c < padded.channels; ++c)
        for (int y = 0; y < out.height; ++y)
            std::memcpy(out.plane(c) + static_cast<std::size_t>(y) * out.width,
                        padded.plane(c) + static_cast<std::size_t>(y) * padded.width,
                        sizeof(float) * static_cast<std::size_t>(out.width));
    return out;
}

Image copy_tile(const Image& padded, const GridSpec& grid, PatchCoord coord) {
    linear_index(coord, grid);  // bounds check
    const int n = grid.patch_size;
    Image tile(n, n, padded.channels);
    const int y0 = coord.c * n;
    const int x0 = coord.r * n;
    for (int c = 0; c < padded.channels; ++c)
        for (int y = 0; y < n; ++y)
            std::memcpy(tile.plane(c) + static_cast<std::size_t>(y) * n,
                        padded.plane(c) + (static_cast<std::size_t>(y0) + y) * padded.width + x0,
                        sizeof(float) * static_cast<std::size_t>(n));
    return tile;
}

void paste_tile(Image& padded, const GridSpec& grid, PatchCoord coord, const Image& tile) {
    linear_index(coord, grid);  // bounds check
    const int n = grid.patch_size;
    if (tile.height != n || tile.width != n || tile.channels != padded.channels)
        throw Error(Errc::shape_mismatch, "tile shape does not match grid patch size");
    const int y0 = coord.c * n;
    const int x0 = coord.r * n;
    for (int c = 0; c < padded.channels; ++c)
        for (int y = 0; y < n; ++y)
            std::memcpy(padded.plane(c) + (static_cast<std::size_t>(y0) + y) * padded.width + x0,
                        tile.plane(c) + static_cast<std::size_t>(y) * n,
                        sizeof(float) * static_cast<std::size_t>(n));
}

TileSet extract_tiles(const Image& padded, const GridSpec& grid) {
    if (padded.height != grid.height_px || padded.width != grid.width_px)
        throw Error(Errc::shape_mismatch, "extract_tiles: image does not match grid dimensions");
    TileSet tiles;
    for (int r = 0; r < grid.cols; ++r)
        for (int c = 0; c < grid.rows; ++c)
            tiles.emplace(PatchCoord{c, r}, copy_tile(padded, grid, PatchCoord{c, r}));
    return tiles;
}

Image assemble_and_crop(const TileSet& tiles, const GridSpec& grid, const PadInfo& pad) {
    if (tiles.empty()) throw Error(Errc::missing_tile, "assemble_and_crop: no tiles");
    const int channels = tiles.begin()->second.channels;
    Image padded(grid.height_px, grid.width_px, channels);
    std::vector<char> seen(static_cast<std::size_t>(grid.patch_count()), 0);
    for (const auto& [coord, tile] : tiles) {
        const auto idx = static_cast<std::size_t>(linear_index(coord, grid));
        if (seen[idx])
            throw Error(Errc::duplicate_tile, "tile (" + std::to_string(coord.c) + "," +
                                                  std::to_string(coord.r) + ") provided twice");
        seen[idx] = 1;
        paste_tile(padded, grid, coord, tile);
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i]) {
            const PatchCoord missing = coord_of(static_cast<long long>(i), grid);
            throw Error(Errc::missing_tile, "tile (" + std::to_string(missing.c) + "," +
                                                std::to_string(missing.r) + ") never provided");
        }
    }
    return crop_to_original(padded, pad);
}

}  // namespace densenorm
