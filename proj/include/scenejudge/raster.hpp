#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "scenejudge/font.hpp"
#include "scenejudge/geometry.hpp"
#include "scenejudge/image.hpp"

namespace scenejudge {

// Fixed style table for all renders. Tests assert exact pixel values, so
// anti-aliasing stays off and these constants are the single canon.
struct RenderStyle {
    Rgba background{255, 255, 255, 255};
    Rgba wall_stroke{60, 60, 60, 255};
    Rgba door_glyph{150, 75, 0, 255};
    Rgba window_glyph{0, 120, 255, 255};
    Rgba label_color{0, 0, 0, 255};
    int min_stroke_px = 2;
    std::uint8_t dim_alpha = 76;  // 30% of 255
    double dim_blend = 0.3;
};

inline RenderStyle default_style() { return {}; }

// Orthographic 2D canvas. World +y maps to image up (decreasing row).
// Also reused for elevation views with (along-wall, height) as the plane.
class Canvas {
public:
    Canvas(int width_px, int height_px, Vec2 world_center,
           double pixels_per_meter, Rgba background)
        : img_(width_px, height_px, background),
          center_(world_center),
          scale_(pixels_per_meter) {}

    // Square frame covering `box` plus a fractional margin.
    static Canvas framed(const BBox& box, int resolution, double margin_frac,
                         Rgba background) {
        double half_w = std::max(box.width(), 1e-6) / 2.0;
        double half_h = std::max(box.height(), 1e-6) / 2.0;
        double extent = std::max(half_w, half_h) * (1.0 + margin_frac);
        double scale = resolution / (2.0 * extent);
        return Canvas(resolution, resolution, box.center(), scale, background);
    }

    ImageBuffer& image() { return img_; }
    const ImageBuffer& image() const { return img_; }
    double scale() const { return scale_; }

    Vec2 to_px(const Vec2& world) const {
        return {img_.width / 2.0 + (world.x - center_.x) * scale_,
                img_.height / 2.0 - (world.y - center_.y) * scale_};
    }

    Vec2 to_world(double px, double py) const {
        return {center_.x + (px - img_.width / 2.0) / scale_,
                center_.y - (py - img_.height / 2.0) / scale_};
    }

    void fill_polygon(const Polygon& poly, Rgba color) {
        if (poly.size() < 3) return;
        BBox box = polygon_bbox(poly);
        Vec2 lo = to_px({box.min.x, box.max.y});
        Vec2 hi = to_px({box.max.x, box.min.y});
        int x0 = std::max(0, static_cast<int>(std::floor(lo.x)) - 1);
        int y0 = std::max(0, static_cast<int>(std::floor(lo.y)) - 1);
        int x1 = std::min(img_.width - 1, static_cast<int>(std::ceil(hi.x)) + 1);
        int y1 = std::min(img_.height - 1, static_cast<int>(std::ceil(hi.y)) + 1);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                Vec2 w = to_world(x + 0.5, y + 0.5);
                if (point_in_polygon(w, poly)) img_.set(x, y, color);
            }
        }
    }

    void stroke_segment(const Vec2& a, const Vec2& b, Rgba color,
                        double width_m, int min_px = 2) {
        Vec2 pa = to_px(a);
        Vec2 pb = to_px(b);
        double half = std::max(width_m * scale_, static_cast<double>(min_px)) / 2.0;
        int x0 = std::max(0, static_cast<int>(std::floor(std::min(pa.x, pb.x) - half)) - 1);
        int y0 = std::max(0, static_cast<int>(std::floor(std::min(pa.y, pb.y) - half)) - 1);
        int x1 = std::min(img_.width - 1, static_cast<int>(std::ceil(std::max(pa.x, pb.x) + half)) + 1);
        int y1 = std::min(img_.height - 1, static_cast<int>(std::ceil(std::max(pa.y, pb.y) + half)) + 1);
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                if (point_segment_distance({x + 0.5, y + 0.5}, pa, pb) <= half)
                    img_.set(x, y, color);
    }

    void stroke_polygon(const Polygon& poly, Rgba color, double width_m,
                        int min_px = 2) {
        for (size_t i = 0; i < poly.size(); ++i)
            stroke_segment(poly[i], poly[(i + 1) % poly.size()], color, width_m,
                           min_px);
    }

    // Quarter-circle door swing arc from `hinge` toward `toward`.
    void stroke_arc(const Vec2& hinge, double radius_m, double start_deg,
                    double sweep_deg, Rgba color, int min_px = 2) {
        int steps = 32;
        Vec2 prev;
        for (int i = 0; i <= steps; ++i) {
            double ang = (start_deg + sweep_deg * i / steps) * M_PI / 180.0;
            Vec2 p{hinge.x + radius_m * std::cos(ang),
                   hinge.y + radius_m * std::sin(ang)};
            if (i > 0) stroke_segment(prev, p, color, 0.0, min_px);
            prev = p;
        }
    }

    void draw_label(const Vec2& world, const std::string& text, Rgba color) {
        Vec2 p = to_px(world);
        draw_text(img_, static_cast<int>(p.x) - text_width(text) / 2,
                  static_cast<int>(p.y) - font::kGlyphHeight / 2, text, color);
    }

    // Blend every pixel outside `keep` toward the background and mark it
    // with the dimmed alpha byte.
    void dim_outside(const Polygon& keep, const RenderStyle& style) {
        for (int y = 0; y < img_.height; ++y) {
            for (int x = 0; x < img_.width; ++x) {
                Vec2 w = to_world(x + 0.5, y + 0.5);
                if (point_in_polygon(w, keep)) continue;
                Rgba c = img_.at(x, y);
                Rgba out;
                for (int i = 0; i < 3; ++i)
                    out[i] = static_cast<std::uint8_t>(
                        c[i] * style.dim_blend +
                        style.background[i] * (1.0 - style.dim_blend));
                out[3] = style.dim_alpha;
                img_.set(x, y, out);
            }
        }
    }

    Rgba dimmed(Rgba color, const RenderStyle& style) const {
        Rgba out;
        for (int i = 0; i < 3; ++i)
            out[i] = static_cast<std::uint8_t>(
                color[i] * style.dim_blend +
                style.background[i] * (1.0 - style.dim_blend));
        out[3] = style.dim_alpha;
        return out;
    }

private:
    ImageBuffer img_;
    Vec2 center_;
    double scale_;  // pixels per meter
};

// Pixel centroid of all pixels matching `color` exactly (rgb compare).
// Returns false when no pixel matches.
inline bool color_mask_centroid(const ImageBuffer& img, Rgba color, double* cx,
                                double* cy) {
    double sx = 0, sy = 0;
    long count = 0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            Rgba c = img.at(x, y);
            if (c[0] == color[0] && c[1] == color[1] && c[2] == color[2]) {
                sx += x + 0.5;
                sy += y + 0.5;
                ++count;
            }
        }
    }
    if (!count) return false;
    *cx = sx / count;
    *cy = sy / count;
    return true;
}

inline long color_mask_area(const ImageBuffer& img, Rgba color) {
    long count = 0;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            Rgba c = img.at(x, y);
            if (c[0] == color[0] && c[1] == color[1] && c[2] == color[2])
                ++count;
        }
    return count;
}

}  // namespace scenejudge
