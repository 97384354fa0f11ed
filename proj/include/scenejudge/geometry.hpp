#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace scenejudge {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3& o) const {
        return x == o.x && y == o.y && z == o.z;
    }
};

using Polygon = std::vector<Vec2>;

struct BBox {
    Vec2 min{std::numeric_limits<double>::max(),
             std::numeric_limits<double>::max()};
    Vec2 max{std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::lowest()};

    bool empty() const { return min.x > max.x || min.y > max.y; }
    Vec2 center() const { return {(min.x + max.x) / 2, (min.y + max.y) / 2}; }
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }

    void expand(const Vec2& p) {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
    }
    void expand(const BBox& b) {
        if (b.empty()) return;
        expand(b.min);
        expand(b.max);
    }
    void inflate(double margin) {
        min.x -= margin;
        min.y -= margin;
        max.x += margin;
        max.y += margin;
    }
    bool contains(const Vec2& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double length(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec2& a, const Vec2& b) { return length(a - b); }

inline Vec2 normalized(const Vec2& a) {
    double len = length(a);
    if (len == 0.0) return {0, 0};
    return {a.x / len, a.y / len};
}

inline BBox polygon_bbox(const Polygon& poly) {
    BBox box;
    for (const auto& p : poly) box.expand(p);
    return box;
}

inline double polygon_area(const Polygon& poly) {
    double acc = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        acc += cross(a, b);
    }
    return std::abs(acc) / 2.0;
}

inline Vec2 polygon_centroid(const Polygon& poly) {
    // Signed-area centroid; falls back to vertex mean for degenerate input.
    double area2 = 0.0;
    double cx = 0.0, cy = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        double c = cross(a, b);
        area2 += c;
        cx += (a.x + b.x) * c;
        cy += (a.y + b.y) * c;
    }
    if (std::abs(area2) < 1e-12) {
        Vec2 mean;
        for (const auto& p : poly) mean = mean + p;
        return mean * (poly.empty() ? 0.0 : 1.0 / poly.size());
    }
    return {cx / (3.0 * area2), cy / (3.0 * area2)};
}

// Even-odd rule; points exactly on an edge count as inside.
inline bool point_in_polygon(const Vec2& p, const Polygon& poly) {
    bool inside = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        // On-edge check.
        Vec2 ab = b - a;
        Vec2 ap = p - a;
        double c = cross(ab, ap);
        if (std::abs(c) < 1e-12 && dot(ap, b - p) >= -1e-12 &&
            dot(ab, ap) >= -1e-12) {
            return true;
        }
        if ((a.y > p.y) != (b.y > p.y)) {
            double xint = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

// Proper-crossing test for open segments; shared endpoints do not count.
inline bool segments_intersect_properly(const Vec2& p1, const Vec2& p2,
                                        const Vec2& q1, const Vec2& q2) {
    auto orient = [](const Vec2& a, const Vec2& b, const Vec2& c) {
        double v = cross(b - a, c - a);
        if (v > 1e-12) return 1;
        if (v < -1e-12) return -1;
        return 0;
    };
    int o1 = orient(p1, p2, q1);
    int o2 = orient(p1, p2, q2);
    int o3 = orient(q1, q2, p1);
    int o4 = orient(q1, q2, p2);
    return o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0 && o1 != o2 && o3 != o4;
}

// Non-adjacent edges of a simple polygon never cross.
inline bool polygon_is_simple(const Polygon& poly) {
    size_t n = poly.size();
    if (n < 3) return false;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i) continue;
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect_properly(poly[i], poly[(i + 1) % n],
                                            poly[j], poly[(j + 1) % n])) {
                return false;
            }
        }
    }
    return true;
}

inline double point_segment_distance(const Vec2& p, const Vec2& a,
                                     const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

inline Polygon box_to_polygon(const Vec2& min, const Vec2& max) {
    return {{min.x, min.y}, {max.x, min.y}, {max.x, max.y}, {min.x, max.y}};
}

// Rotate a polygon about a pivot by degrees (counter-clockwise).
inline Polygon rotate_polygon(const Polygon& poly, const Vec2& pivot,
                              double degrees) {
    double rad = degrees * M_PI / 180.0;
    double c = std::cos(rad), s = std::sin(rad);
    Polygon out;
    out.reserve(poly.size());
    for (const auto& p : poly) {
        Vec2 d = p - pivot;
        out.push_back({pivot.x + d.x * c - d.y * s, pivot.y + d.x * s + d.y * c});
    }
    return out;
}

}  // namespace scenejudge
