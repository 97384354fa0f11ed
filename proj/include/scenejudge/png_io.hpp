#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "scenejudge/errors.hpp"
#include "scenejudge/image.hpp"

namespace scenejudge {
namespace png {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back((v >> 24) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back(v & 0xff);
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
                      const std::vector<std::uint8_t>& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    size_t start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    std::uint32_t crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, out.data() + start, static_cast<uInt>(4 + data.size()));
    put_u32(out, crc);
}

}  // namespace png

inline std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<size_t>(img.height) * (1 + img.width * 4));
    for (int y = 0; y < img.height; ++y) {
        raw.push_back(0);  // filter: none
        const std::uint8_t* row = img.pixels.data() +
                                  static_cast<size_t>(y) * img.width * 4;
        raw.insert(raw.end(), row, row + static_cast<size_t>(img.width) * 4);
    }

    uLongf comp_len = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    if (compress2(comp.data(), &comp_len, raw.data(),
                  static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw IoError("png deflate failed");
    comp.resize(comp_len);

    std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    std::vector<std::uint8_t> ihdr;
    png::put_u32(ihdr, static_cast<std::uint32_t>(img.width));
    png::put_u32(ihdr, static_cast<std::uint32_t>(img.height));
    ihdr.push_back(8);   // bit depth
    ihdr.push_back(6);   // RGBA
    ihdr.push_back(0);   // deflate
    ihdr.push_back(0);   // filter method 0
    ihdr.push_back(0);   // no interlace
    png::put_chunk(out, "IHDR", ihdr);
    png::put_chunk(out, "IDAT", comp);
    png::put_chunk(out, "IEND", {});
    return out;
}

inline void write_png(const std::string& path, const ImageBuffer& img) {
    auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

// Decodes 8-bit RGB/RGBA non-interlaced PNGs (the only kind this project
// produces or ships as fixtures).
inline ImageBuffer decode_png(const std::vector<std::uint8_t>& bytes) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
        throw IoError("not a png file");

    auto read_u32 = [&](size_t off) -> std::uint32_t {
        return (std::uint32_t(bytes[off]) << 24) |
               (std::uint32_t(bytes[off + 1]) << 16) |
               (std::uint32_t(bytes[off + 2]) << 8) | bytes[off + 3];
    };

    std::uint32_t width = 0, height = 0;
    int color_type = -1;
    std::vector<std::uint8_t> idat;

    size_t pos = 8;
    while (pos + 8 <= bytes.size()) {
        std::uint32_t len = read_u32(pos);
        std::string type(bytes.begin() + pos + 4, bytes.begin() + pos + 8);
        size_t data = pos + 8;
        if (data + len > bytes.size()) throw IoError("truncated png chunk");
        if (type == "IHDR") {
            width = read_u32(data);
            height = read_u32(data + 4);
            int depth = bytes[data + 8];
            color_type = bytes[data + 9];
            int interlace = bytes[data + 12];
            if (depth != 8 || (color_type != 2 && color_type != 6) || interlace)
                throw IoError("unsupported png variant");
        } else if (type == "IDAT") {
            idat.insert(idat.end(), bytes.begin() + data,
                        bytes.begin() + data + len);
        } else if (type == "IEND") {
            break;
        }
        pos = data + len + 4;
    }
    if (!width || !height || idat.empty()) throw IoError("incomplete png");

    int channels = color_type == 6 ? 4 : 3;
    size_t stride = static_cast<size_t>(width) * channels;
    std::vector<std::uint8_t> raw(height * (stride + 1));
    uLongf raw_len = static_cast<uLongf>(raw.size());
    if (uncompress(raw.data(), &raw_len, idat.data(),
                   static_cast<uLong>(idat.size())) != Z_OK ||
        raw_len != raw.size())
        throw IoError("png inflate failed");

    ImageBuffer img(static_cast<int>(width), static_cast<int>(height));
    std::vector<std::uint8_t> prev(stride, 0), cur(stride);
    for (std::uint32_t y = 0; y < height; ++y) {
        const std::uint8_t* line = raw.data() + y * (stride + 1);
        int filter = line[0];
        for (size_t i = 0; i < stride; ++i) {
            int x = line[1 + i];
            int a = i >= static_cast<size_t>(channels) ? cur[i - channels] : 0;
            int b = prev[i];
            int c = i >= static_cast<size_t>(channels) ? prev[i - channels] : 0;
            int v;
            switch (filter) {
                case 0: v = x; break;
                case 1: v = x + a; break;
                case 2: v = x + b; break;
                case 3: v = x + (a + b) / 2; break;
                case 4: {
                    int p = a + b - c;
                    int pa = std::abs(p - a), pb = std::abs(p - b),
                        pc = std::abs(p - c);
                    int pred = (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
                    v = x + pred;
                    break;
                }
                default: throw IoError("bad png filter byte");
            }
            cur[i] = static_cast<std::uint8_t>(v & 0xff);
        }
        for (std::uint32_t px = 0; px < width; ++px) {
            Rgba col{cur[px * channels], cur[px * channels + 1],
                     cur[px * channels + 2],
                     channels == 4 ? cur[px * channels + 3]
                                   : std::uint8_t(255)};
            img.set(static_cast<int>(px), static_cast<int>(y), col);
        }
        std::swap(prev, cur);
    }
    return img;
}

inline ImageBuffer load_png(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_png(bytes);
}

}  // namespace scenejudge
