#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "scenejudge/errors.hpp"
#include "scenejudge/png_io.hpp"
#include "scenejudge/raster.hpp"
#include "scenejudge/scene.hpp"
#include "scenejudge/tool_registry.hpp"

namespace scenejudge {

struct RenderConfig {
    int resolution = 1200;       // 1200 remote / 335 local
    int swatch_size = 256;
    RenderStyle style;
    // Base directory for texture_path / thumbnail_paths lookups.
    std::string asset_base_dir;
};

// The 8 environment-interaction tools as a deterministic orthographic
// rasterizer over the scene. No anti-aliasing; identical inputs produce
// byte-identical buffers.
class RenderToolbox {
public:
    RenderToolbox(const Scene& scene, const MaterialRegistry& materials,
                  const AssetRegistry& assets, RenderConfig config = {})
        : scene_(scene),
          materials_(materials),
          assets_(assets),
          config_(std::move(config)) {}

    ImageBuffer get_topdown_scene() const {
        BBox box = scene_bbox();
        Canvas canvas = Canvas::framed(box, config_.resolution, 0.05,
                                       config_.style.background);
        paint_plan(canvas, nullptr);
        canvas.image().label = "topdown_scene";
        return canvas.image();
    }

    ImageBuffer get_topdown_room(const std::string& room_id) const {
        const Room* room = scene_.find_room(room_id);
        if (!room) throw UnknownRoomError("no room named '" + room_id + "'");
        Canvas canvas = Canvas::framed(polygon_bbox(room->polygon),
                                       config_.resolution, 0.05,
                                       config_.style.background);
        paint_plan(canvas, nullptr);
        canvas.dim_outside(room->polygon, config_.style);
        paint_labels(canvas);
        canvas.image().label = "topdown_room " + room_id;
        return canvas.image();
    }

    std::map<std::string, ImageBuffer> get_frontview_object(
        const std::vector<std::string>& object_ids) const {
        std::map<std::string, ImageBuffer> out;
        for (const auto& id : object_ids) out[id] = frontview(id);
        return out;
    }

    std::map<std::string, ImageBuffer> get_wall_scene(
        const std::vector<std::string>& wall_ids) const {
        std::map<std::string, ImageBuffer> out;
        for (const auto& id : wall_ids) out[id] = wall_elevation(id);
        return out;
    }

    // Two crops per object: extent 1.5x and 4x the footprint radius.
    std::map<std::string, std::vector<ImageBuffer>> get_topdown_object(
        const std::vector<std::string>& object_ids) const {
        std::map<std::string, std::vector<ImageBuffer>> out;
        for (const auto& id : object_ids) {
            const SceneObject* obj = scene_.find_object(id);
            if (!obj) throw UnknownIdError("no object named '" + id + "'");
            Vec2 center = polygon_centroid(obj->footprint);
            double radius = footprint_radius(*obj);
            std::vector<ImageBuffer> crops;
            for (double factor : {1.5, 4.0}) {
                double extent = std::max(radius * factor, 0.25);
                Canvas canvas(config_.resolution, config_.resolution, center,
                              config_.resolution / (2.0 * extent),
                              config_.style.background);
                paint_plan(canvas, nullptr);
                paint_labels(canvas);
                canvas.image().label = "topdown_object " + id;
                crops.push_back(canvas.image());
            }
            out[id] = std::move(crops);
        }
        return out;
    }

    std::map<std::string, ImageBuffer> get_material_image(
        const std::vector<std::string>& material_names) const {
        std::map<std::string, ImageBuffer> out;
        for (const auto& name : material_names) {
            const MaterialEntry* mat = materials_.find(name);
            if (!mat)
                throw UnknownMaterialError("no material named '" + name + "'");
            if (!material_in_scene(name))
                throw MaterialNotInSceneError(
                    "material '" + name + "' is not used by any wall or floor");
            ImageBuffer swatch(config_.swatch_size, config_.swatch_size,
                               mat->rgba, name);
            if (mat->texture_path) {
                ImageBuffer tex = load_png(resolve_path(*mat->texture_path));
                for (int y = 0; y < swatch.height; ++y)
                    for (int x = 0; x < swatch.width; ++x)
                        swatch.set(x, y, tex.at(x % tex.width, y % tex.height));
            }
            out[name] = std::move(swatch);
        }
        return out;
    }

    // Thumbnails verbatim when present, else synthesized box projections
    // (front/back/left/right) from registry dimensions.
    std::map<std::string, std::vector<ImageBuffer>> get_multiview_rendered_object(
        const std::vector<std::string>& object_ids) const {
        std::map<std::string, std::vector<ImageBuffer>> out;
        for (const auto& id : object_ids) {
            const SceneObject* obj = scene_.find_object(id);
            if (!obj) throw UnknownIdError("no object named '" + id + "'");
            const AssetEntry* asset = assets_.find(obj->asset_id);
            if (!asset)
                throw UnknownAssetError("object '" + id +
                                        "' references missing asset '" +
                                        obj->asset_id + "'");
            std::vector<ImageBuffer> views;
            if (asset->thumbnail_paths.size() == 4) {
                for (const auto& path : asset->thumbnail_paths)
                    views.push_back(load_png(resolve_path(path)));
            } else {
                static const char* names[4] = {"front", "back", "left", "right"};
                for (int v = 0; v < 4; ++v) {
                    double w = (v < 2) ? asset->width : asset->depth;
                    views.push_back(
                        box_projection(w, asset->height, asset->dominant_rgba,
                                       id + " " + names[v]));
                }
            }
            out[id] = std::move(views);
        }
        return out;
    }

    // Joint frame of each tuple; only members at full alpha, room outlines
    // dimmed, everything else omitted.
    std::map<std::vector<std::string>, ImageBuffer> get_spatial_relation(
        const std::vector<std::vector<std::string>>& id_tuples) const {
        std::map<std::vector<std::string>, ImageBuffer> out;
        for (const auto& tuple : id_tuples) {
            BBox box;
            for (const auto& id : tuple) box.expand(member_bbox(id));
            Canvas canvas = Canvas::framed(box, config_.resolution, 0.20,
                                           config_.style.background);
            for (const auto& room : scene_.rooms)
                canvas.stroke_polygon(
                    room.polygon,
                    canvas.dimmed(config_.style.wall_stroke, config_.style),
                    0.05, config_.style.min_stroke_px);
            for (const auto& id : tuple) paint_member(canvas, id);
            for (const auto& id : tuple)
                canvas.draw_label(member_bbox(id).center(), id,
                                  config_.style.label_color);
            canvas.image().label = "spatial_relation";
            out[tuple] = canvas.image();
        }
        return out;
    }

    const RenderConfig& config() const { return config_; }

private:
    BBox scene_bbox() const {
        if (scene_.rooms.empty())
            throw EmptySceneError("scene '" + scene_.scene_id + "' has no rooms");
        BBox box;
        for (const auto& room : scene_.rooms)
            box.expand(polygon_bbox(room.polygon));
        return box;
    }

    std::string resolve_path(const std::string& path) const {
        if (config_.asset_base_dir.empty() || path.starts_with("/")) return path;
        return config_.asset_base_dir + "/" + path;
    }

    bool material_in_scene(const std::string& name) const {
        for (const auto& r : scene_.rooms)
            if (r.floor_material == name) return true;
        for (const auto& w : scene_.walls)
            if (w.material == name) return true;
        return false;
    }

    Rgba floor_color(const Room& room) const {
        const MaterialEntry* mat = materials_.find(room.floor_material);
        return mat ? mat->rgba : Rgba{128, 128, 128, 255};
    }

    Rgba object_color(const SceneObject& obj) const {
        const AssetEntry* asset = assets_.find(obj.asset_id);
        return asset ? asset->dominant_rgba : Rgba{128, 128, 128, 255};
    }

    double footprint_radius(const SceneObject& obj) const {
        Vec2 c = polygon_centroid(obj.footprint);
        double r = 0.0;
        for (const auto& p : obj.footprint) r = std::max(r, distance(c, p));
        return r;
    }

    Vec2 wall_dir(const Wall& wall) const {
        return normalized(wall.segment_end - wall.segment_start);
    }

    void paint_door_glyph(Canvas& canvas, const Door& door) const {
        const Wall* wall = scene_.find_wall(door.wall_id);
        Vec2 dir = wall ? wall_dir(*wall) : Vec2{1, 0};
        Vec2 pos{door.position.x, door.position.y};
        Vec2 a = pos - dir * 0.45;
        Vec2 b = pos + dir * 0.45;
        canvas.stroke_segment(a, b, config_.style.door_glyph,
                              wall ? wall->width * 1.5 : 0.15,
                              config_.style.min_stroke_px + 2);
        if (door.open) {
            double start = std::atan2(dir.y, dir.x) * 180.0 / M_PI;
            canvas.stroke_arc(a, 0.9, start, 90.0, config_.style.door_glyph,
                              config_.style.min_stroke_px);
        }
    }

    void paint_window_glyph(Canvas& canvas, const Window& window) const {
        const Wall* wall = scene_.find_wall(window.wall_id);
        Vec2 dir = wall ? wall_dir(*wall) : Vec2{1, 0};
        Vec2 normal{-dir.y, dir.x};
        Vec2 pos{window.position.x, window.position.y};
        double off = (wall ? wall->width : 0.1) * 0.75;
        // Double line across the wall opening.
        canvas.stroke_segment(pos - dir * 0.45 + normal * off,
                              pos + dir * 0.45 + normal * off,
                              config_.style.window_glyph, 0.0,
                              config_.style.min_stroke_px);
        canvas.stroke_segment(pos - dir * 0.45 - normal * off,
                              pos + dir * 0.45 - normal * off,
                              config_.style.window_glyph, 0.0,
                              config_.style.min_stroke_px);
    }

    // Shared plan painter: floors, walls, openings, object footprints.
    // `only_room` limits object/opening drawing when set.
    void paint_plan(Canvas& canvas, const Room* only_room) const {
        for (const auto& room : scene_.rooms)
            canvas.fill_polygon(room.polygon, floor_color(room));
        for (const auto& wall : scene_.walls)
            canvas.stroke_segment(wall.segment_start, wall.segment_end,
                                  config_.style.wall_stroke, wall.width,
                                  config_.style.min_stroke_px);
        for (const auto& door : scene_.doors) paint_door_glyph(canvas, door);
        for (const auto& window : scene_.windows)
            paint_window_glyph(canvas, window);
        for (const auto& obj : scene_.objects) {
            if (only_room && obj.room_id != only_room->id) continue;
            canvas.fill_polygon(obj.footprint, object_color(obj));
        }
    }

    void paint_labels(Canvas& canvas) const {
        for (const auto& obj : scene_.objects)
            canvas.draw_label(polygon_centroid(obj.footprint), obj.id,
                              config_.style.label_color);
    }

    // Elevation view along the object's facing direction; neighbors within
    // 2 m keep their context.
    ImageBuffer frontview(const std::string& id) const {
        const SceneObject* target = scene_.find_object(id);
        if (!target) throw UnknownIdError("no object named '" + id + "'");

        double rad = target->rotation * M_PI / 180.0;
        Vec2 facing{std::sin(rad), std::cos(rad)};
        Vec2 right{facing.y, -facing.x};
        Vec2 origin = polygon_centroid(target->footprint);

        struct Panel {
            double u_center;
            double half_width;
            double z0;
            double height;
            Rgba color;
            std::string id;
            bool is_target;
        };
        std::vector<Panel> panels;
        auto add_panel = [&](const SceneObject& obj, bool is_target) {
            Vec2 c = polygon_centroid(obj.footprint);
            double u = dot(c - origin, right);
            double lo = 1e18, hi = -1e18;
            for (const auto& p : obj.footprint) {
                double pu = dot(p - origin, right);
                lo = std::min(lo, pu);
                hi = std::max(hi, pu);
            }
            const AssetEntry* asset = assets_.find(obj.asset_id);
            double h = asset ? asset->height : 1.0;
            panels.push_back({u, (hi - lo) / 2.0, obj.position.z, h,
                              object_color(obj), obj.id, is_target});
        };
        for (const auto& obj : scene_.objects) {
            if (obj.id == id) continue;
            if (distance(polygon_centroid(obj.footprint), origin) <= 2.0)
                add_panel(obj, false);
        }
        add_panel(*target, true);  // target painted last, on top

        const Panel& t = panels.back();
        // Frame centered on the target's elevation centroid.
        Vec2 frame_center{t.u_center, t.z0 + t.height / 2.0};
        BBox box;
        for (const auto& p : panels) {
            box.expand(Vec2{p.u_center - p.half_width, p.z0});
            box.expand(Vec2{p.u_center + p.half_width, p.z0 + p.height});
        }
        // Keep the target centered: frame extent is symmetric about it.
        double extent = 0.5;
        for (const auto& p : panels) {
            extent = std::max(extent, std::abs(p.u_center - p.half_width -
                                               frame_center.x));
            extent = std::max(extent, std::abs(p.u_center + p.half_width -
                                               frame_center.x));
            extent = std::max(extent, std::abs(p.z0 - frame_center.y));
            extent = std::max(extent,
                              std::abs(p.z0 + p.height - frame_center.y));
        }
        extent *= 1.1;
        Canvas canvas(config_.resolution, config_.resolution, frame_center,
                      config_.resolution / (2.0 * extent),
                      config_.style.background);
        for (const auto& p : panels) {
            Polygon rect = box_to_polygon(
                {p.u_center - p.half_width, p.z0},
                {p.u_center + p.half_width, p.z0 + p.height});
            canvas.fill_polygon(rect, p.color);
            if (p.is_target)
                canvas.stroke_polygon(rect, config_.style.label_color, 0.0,
                                      config_.style.min_stroke_px);
        }
        canvas.draw_label({t.u_center, t.z0 + t.height + extent * 0.05}, id,
                          config_.style.label_color);
        canvas.image().label = "frontview " + id;
        return canvas.image();
    }

    // Wall plane elevation: material fill, openings, wall-mounted objects.
    // Freestanding objects are omitted entirely.
    ImageBuffer wall_elevation(const std::string& id) const {
        const Wall* wall = scene_.find_wall(id);
        if (!wall) throw UnknownIdError("no wall named '" + id + "'");
        double len = distance(wall->segment_start, wall->segment_end);
        Vec2 dir = wall_dir(*wall);

        BBox frame;
        frame.expand(Vec2{0, 0});
        frame.expand(Vec2{len, wall->height});
        Canvas canvas = Canvas::framed(frame, config_.resolution, 0.05,
                                       config_.style.background);

        const MaterialEntry* mat = materials_.find(wall->material);
        Rgba fill = mat ? mat->rgba : Rgba{128, 128, 128, 255};
        canvas.fill_polygon(box_to_polygon({0, 0}, {len, wall->height}), fill);

        auto project_u = [&](const Vec3& pos) {
            return dot(Vec2{pos.x, pos.y} - wall->segment_start, dir);
        };
        for (const auto& door : scene_.doors) {
            if (door.wall_id != id) continue;
            const AssetEntry* asset = assets_.find(door.asset_id);
            double w = asset ? asset->width : 1.0;
            double h = asset ? asset->height : 2.1;
            double u = project_u(door.position);
            canvas.fill_polygon(box_to_polygon({u - w / 2, 0}, {u + w / 2, h}),
                                config_.style.door_glyph);
        }
        for (const auto& window : scene_.windows) {
            if (window.wall_id != id) continue;
            const AssetEntry* asset = assets_.find(window.asset_id);
            double w = asset ? asset->width : 1.2;
            double h = asset ? asset->height : 1.4;
            double u = project_u(window.position);
            double z0 = window.position.z;
            canvas.fill_polygon(
                box_to_polygon({u - w / 2, z0 - h / 2}, {u + w / 2, z0 + h / 2}),
                config_.style.window_glyph);
        }
        for (const auto& obj : scene_.objects) {
            if (!obj.wall_mounted) continue;
            Vec2 c = polygon_centroid(obj.footprint);
            if (point_segment_distance(c, wall->segment_start,
                                       wall->segment_end) > 0.5)
                continue;
            const AssetEntry* asset = assets_.find(obj.asset_id);
            double w = asset ? asset->width : 0.5;
            double h = asset ? asset->height : 0.5;
            double u = dot(c - wall->segment_start, dir);
            double z0 = obj.position.z;
            canvas.fill_polygon(
                box_to_polygon({u - w / 2, z0 - h / 2}, {u + w / 2, z0 + h / 2}),
                object_color(obj));
        }
        canvas.image().label = "wall_scene " + id;
        return canvas.image();
    }

    ImageBuffer box_projection(double width_m, double height_m, Rgba color,
                               const std::string& label) const {
        int res = config_.resolution;
        double margin = 0.10;
        double scale = std::min(res * (1.0 - margin) / width_m,
                                res * (1.0 - margin) / height_m);
        int w_px = std::max(1, static_cast<int>(std::lround(width_m * scale)));
        int h_px = std::max(1, static_cast<int>(std::lround(height_m * scale)));
        ImageBuffer img(res, res, config_.style.background, label);
        int x0 = (res - w_px) / 2;
        int y0 = (res - h_px) / 2;
        for (int y = y0; y < y0 + h_px; ++y)
            for (int x = x0; x < x0 + w_px; ++x) img.set(x, y, color);
        draw_text(img, 2, 2, label, config_.style.label_color);
        return img;
    }

    BBox member_bbox(const std::string& id) const {
        BBox box;
        if (const SceneObject* obj = scene_.find_object(id)) {
            box = polygon_bbox(obj->footprint);
        } else if (const Wall* wall = scene_.find_wall(id)) {
            box.expand(wall->segment_start);
            box.expand(wall->segment_end);
        } else if (const Door* door = scene_.find_door(id)) {
            box.expand(Vec2{door->position.x - 0.5, door->position.y - 0.5});
            box.expand(Vec2{door->position.x + 0.5, door->position.y + 0.5});
        } else if (const Window* window = scene_.find_window(id)) {
            box.expand(Vec2{window->position.x - 0.5, window->position.y - 0.5});
            box.expand(Vec2{window->position.x + 0.5, window->position.y + 0.5});
        } else {
            throw UnknownIdError("no component named '" + id + "'");
        }
        return box;
    }

    void paint_member(Canvas& canvas, const std::string& id) const {
        if (const SceneObject* obj = scene_.find_object(id)) {
            canvas.fill_polygon(obj->footprint, object_color(*obj));
        } else if (const Wall* wall = scene_.find_wall(id)) {
            canvas.stroke_segment(wall->segment_start, wall->segment_end,
                                  config_.style.wall_stroke, wall->width,
                                  config_.style.min_stroke_px);
        } else if (const Door* door = scene_.find_door(id)) {
            paint_door_glyph(canvas, *door);
        } else if (const Window* window = scene_.find_window(id)) {
            paint_window_glyph(canvas, *window);
        } else {
            throw UnknownIdError("no component named '" + id + "'");
        }
    }

    const Scene& scene_;
    const MaterialRegistry& materials_;
    const AssetRegistry& assets_;
    RenderConfig config_;
};

}  // namespace scenejudge
