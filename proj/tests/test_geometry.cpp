#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "scenejudge/geometry.hpp"

using namespace scenejudge;

TEST_CASE("point_in_polygon on a unit square") {
    Polygon square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(point_in_polygon({0.5, 0.5}, square));
    CHECK(point_in_polygon({0.0, 0.5}, square));  // on edge
    CHECK_FALSE(point_in_polygon({1.5, 0.5}, square));
    CHECK_FALSE(point_in_polygon({-0.1, -0.1}, square));
}

TEST_CASE("point_in_polygon on a concave polygon") {
    // L-shape
    Polygon l = {{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
    CHECK(point_in_polygon({0.5, 1.5}, l));
    CHECK(point_in_polygon({1.5, 0.5}, l));
    CHECK_FALSE(point_in_polygon({1.5, 1.5}, l));
}

TEST_CASE("polygon_is_simple flags self-intersection") {
    Polygon bowtie = {{0, 0}, {2, 2}, {2, 0}, {0, 2}};
    CHECK_FALSE(polygon_is_simple(bowtie));
    Polygon square = {{0, 0}, {2, 0}, {2, 2}, {0, 2}};
    CHECK(polygon_is_simple(square));
    CHECK_FALSE(polygon_is_simple({{0, 0}, {1, 1}}));
}

TEST_CASE("polygon area and centroid") {
    Polygon square = {{0, 0}, {4, 0}, {4, 4}, {0, 4}};
    CHECK(polygon_area(square) == Catch::Approx(16.0));
    Vec2 c = polygon_centroid(square);
    CHECK(c.x == Catch::Approx(2.0));
    CHECK(c.y == Catch::Approx(2.0));
}

TEST_CASE("point_segment_distance") {
    CHECK(point_segment_distance({0, 1}, {-1, 0}, {1, 0}) == Catch::Approx(1.0));
    CHECK(point_segment_distance({3, 0}, {-1, 0}, {1, 0}) == Catch::Approx(2.0));
}

TEST_CASE("rotate_polygon by 90 degrees") {
    Polygon p = {{1, 0}};
    Polygon r = rotate_polygon(p, {0, 0}, 90);
    CHECK(r[0].x == Catch::Approx(0.0).margin(1e-12));
    CHECK(r[0].y == Catch::Approx(1.0));
}

// Membership via winding-independent sampling: random points compared
// against a half-plane construction for convex polygons.
TEST_CASE("point_in_polygon agrees with half-plane test on random convex polygons") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    for (int trial = 0; trial < 50; ++trial) {
        // Random triangle (always convex and simple).
        Polygon tri;
        do {
            tri = {{coord(rng), coord(rng)},
                   {coord(rng), coord(rng)},
                   {coord(rng), coord(rng)}};
        } while (polygon_area(tri) < 0.5);
        double orient = cross(tri[1] - tri[0], tri[2] - tri[0]);
        for (int s = 0; s < 40; ++s) {
            Vec2 p{coord(rng), coord(rng)};
            bool inside = true;
            for (int i = 0; i < 3; ++i) {
                double c = cross(tri[(i + 1) % 3] - tri[i], p - tri[i]);
                if (orient > 0 ? c < -1e-9 : c > 1e-9) inside = false;
            }
            // Skip points hugging an edge; both predicates are exact away
            // from the boundary.
            bool near_edge = false;
            for (int i = 0; i < 3; ++i)
                if (point_segment_distance(p, tri[i], tri[(i + 1) % 3]) < 1e-6)
                    near_edge = true;
            if (near_edge) continue;
            CHECK(point_in_polygon(p, tri) == inside);
        }
    }
}
