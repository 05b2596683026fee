#pragma once

#include <cstddef>
#include <vector>

#include "densenorm/errors.hpp"

namespace densenorm {

// Planar float image: values nominally in [0,1], channel-major storage
// (plane c, then row y, then column x). Planar layout keeps per-channel
// statistics and field arithmetic contiguous.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> data;

    Image() = default;
    Image(int h, int w, int c)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, 0.0f) {}

    std::size_t plane_size() const { return static_cast<std::size_t>(height) * width; }
    std::size_t size() const { return plane_size() * channels; }
    bool empty() const { return height <= 0 || width <= 0 || channels <= 0; }

    std::size_t index(int c, int y, int x) const {
        return (static_cast<std::size_t>(c) * height + y) * width + x;
    }
    float at(int c, int y, int x) const { return data[index(c, y, x)]; }
    float& at(int c, int y, int x) { return data[index(c, y, x)]; }

    const float* plane(int c) const { return data.data() + c * plane_size(); }
    float* plane(int c) { return data.data() + c * plane_size(); }

    bool same_shape(const Image& other) const {
        return height == other.height && width == other.width && channels == other.channels;
    }
};

inline void require_nonempty(const Image& img, const char* what) {
    if (img.empty() || img.data.size() != img.size())
        throw Error(Errc::empty_image, std::string(what) + ": empty or inconsistent image buffer");
}

}  // namespace densenorm
