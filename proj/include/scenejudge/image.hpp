#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scenejudge/errors.hpp"
#include "scenejudge/scene.hpp"

namespace scenejudge {

// Row-major RGBA, origin at the top-left.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
    std::string label;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, Rgba fill = {0, 0, 0, 255}, std::string lbl = "")
        : width(w), height(h), label(std::move(lbl)) {
        if (w <= 0 || h <= 0)
            throw GeometryError("image dimensions must be positive");
        pixels.resize(static_cast<size_t>(w) * h * 4);
        for (int i = 0; i < w * h; ++i) set_index(i, fill);
    }

    Rgba at(int x, int y) const {
        size_t i = (static_cast<size_t>(y) * width + x) * 4;
        return {pixels[i], pixels[i + 1], pixels[i + 2], pixels[i + 3]};
    }

    void set(int x, int y, Rgba c) {
        if (x < 0 || y < 0 || x >= width || y >= height) return;
        set_index(y * width + x, c);
    }

    bool operator==(const ImageBuffer& o) const {
        return width == o.width && height == o.height && pixels == o.pixels;
    }

private:
    void set_index(int i, Rgba c) {
        size_t p = static_cast<size_t>(i) * 4;
        pixels[p] = c[0];
        pixels[p + 1] = c[1];
        pixels[p + 2] = c[2];
        pixels[p + 3] = c[3];
    }
};

inline std::uint64_t image_hash(const ImageBuffer& img) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(static_cast<std::uint64_t>(img.width));
    mix(static_cast<std::uint64_t>(img.height));
    for (std::uint8_t b : img.pixels) mix(b);
    return h;
}

}  // namespace scenejudge
