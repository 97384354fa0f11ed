#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <string>

#include "scenejudge/image.hpp"

namespace scenejudge {

// Minimal 5x7 bitmap font for burned-in labels. Rows are 5-bit masks,
// bit 4 = leftmost pixel. Lowercase maps to uppercase; anything missing
// renders as a hollow box.
namespace font {

using Glyph = std::array<std::uint8_t, 7>;

inline const Glyph& glyph_for(char ch) {
    static const Glyph box = {0x1f, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1f};
    static const Glyph space = {0, 0, 0, 0, 0, 0, 0};
    static const Glyph digits[10] = {
        {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e},  // 0
        {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e},  // 1
        {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f},  // 2
        {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e},  // 3
        {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02},  // 4
        {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e},  // 5
        {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e},  // 6
        {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
        {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e},  // 8
        {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c},  // 9
    };
    static const Glyph letters[26] = {
        {0x0e, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11},  // A
        {0x1e, 0x11, 0x11, 0x1e, 0x11, 0x11, 0x1e},  // B
        {0x0e, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0e},  // C
        {0x1c, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1c},  // D
        {0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x1f},  // E
        {0x1f, 0x10, 0x10, 0x1e, 0x10, 0x10, 0x10},  // F
        {0x0e, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0f},  // G
        {0x11, 0x11, 0x11, 0x1f, 0x11, 0x11, 0x11},  // H
        {0x0e, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0e},  // I
        {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0c},  // J
        {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11},  // K
        {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1f},  // L
        {0x11, 0x1b, 0x15, 0x15, 0x11, 0x11, 0x11},  // M
        {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11},  // N
        {0x0e, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e},  // O
        {0x1e, 0x11, 0x11, 0x1e, 0x10, 0x10, 0x10},  // P
        {0x0e, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0d},  // Q
        {0x1e, 0x11, 0x11, 0x1e, 0x14, 0x12, 0x11},  // R
        {0x0f, 0x10, 0x10, 0x0e, 0x01, 0x01, 0x1e},  // S
        {0x1f, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04},  // T
        {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0e},  // U
        {0x11, 0x11, 0x11, 0x11, 0x11, 0x0a, 0x04},  // V
        {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0a},  // W
        {0x11, 0x11, 0x0a, 0x04, 0x0a, 0x11, 0x11},  // X
        {0x11, 0x11, 0x0a, 0x04, 0x04, 0x04, 0x04},  // Y
        {0x1f, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1f},  // Z
    };
    static const Glyph bar = {0x04, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04};
    static const Glyph underscore = {0, 0, 0, 0, 0, 0, 0x1f};
    static const Glyph dash = {0, 0, 0, 0x1f, 0, 0, 0};
    static const Glyph dot = {0, 0, 0, 0, 0, 0x0c, 0x0c};
    static const Glyph colon = {0, 0x0c, 0x0c, 0, 0x0c, 0x0c, 0};
    static const Glyph comma = {0, 0, 0, 0, 0x0c, 0x04, 0x08};
    static const Glyph slash = {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10};
    static const Glyph lparen = {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02};
    static const Glyph rparen = {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08};

    if (ch == ' ') return space;
    if (ch >= '0' && ch <= '9') return digits[ch - '0'];
    char up = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (up >= 'A' && up <= 'Z') return letters[up - 'A'];
    switch (ch) {
        case '|': return bar;
        case '_': return underscore;
        case '-': return dash;
        case '.': return dot;
        case ':': return colon;
        case ',': return comma;
        case '/': return slash;
        case '(': return lparen;
        case ')': return rparen;
        default: return box;
    }
}

constexpr int kGlyphWidth = 5;
constexpr int kGlyphHeight = 7;
constexpr int kGlyphAdvance = 6;

}  // namespace font

inline void draw_text(ImageBuffer& img, int x, int y, const std::string& text,
                      Rgba color) {
    int cx = x;
    for (char ch : text) {
        const auto& g = font::glyph_for(ch);
        for (int row = 0; row < font::kGlyphHeight; ++row)
            for (int col = 0; col < font::kGlyphWidth; ++col)
                if (g[row] & (1 << (font::kGlyphWidth - 1 - col)))
                    img.set(cx + col, y + row, color);
        cx += font::kGlyphAdvance;
    }
}

inline int text_width(const std::string& text) {
    return static_cast<int>(text.size()) * font::kGlyphAdvance;
}

}  // namespace scenejudge
