#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenejudge/geometry.hpp"

namespace scenejudge {

using Rgba = std::array<std::uint8_t, 4>;

enum class WallDirection { North, South, East, West };

struct Room {
    std::string id;
    Polygon polygon;  // meters, plan view
    std::string floor_material;
};

struct Wall {
    std::string id;
    std::vector<std::string> room_ids;  // 1 or 2 rooms
    Vec2 segment_start;
    Vec2 segment_end;
    double height = 0.0;  // meters
    double width = 0.0;   // thickness, meters
    std::string material;
    WallDirection direction = WallDirection::North;
};

struct Door {
    std::string id;
    std::string asset_id;
    std::vector<std::string> room_ids;
    std::string wall_id;
    Vec3 position;
    bool open = false;
};

struct Window {
    std::string id;
    std::string asset_id;
    std::vector<std::string> room_ids;
    std::string wall_id;
    Vec3 position;
};

struct SceneObject {
    std::string id;
    std::string asset_id;
    std::string room_id;
    Vec3 position;
    double rotation = 0.0;  // degrees about vertical axis, [0, 360)
    Polygon footprint;      // boxes are normalized to 4-vertex polygons at load
    bool wall_mounted = false;
};

// Scene is immutable after construction; tools only ever read it.
struct Scene {
    std::string scene_id;
    std::vector<Room> rooms;
    std::vector<Wall> walls;
    std::vector<Door> doors;
    std::vector<Window> windows;
    std::vector<SceneObject> objects;
    std::string material_registry_ref;
    std::string asset_registry_ref;

    const Room* find_room(const std::string& id) const {
        for (const auto& r : rooms)
            if (r.id == id) return &r;
        return nullptr;
    }
    const Wall* find_wall(const std::string& id) const {
        for (const auto& w : walls)
            if (w.id == id) return &w;
        return nullptr;
    }
    const Door* find_door(const std::string& id) const {
        for (const auto& d : doors)
            if (d.id == id) return &d;
        return nullptr;
    }
    const Window* find_window(const std::string& id) const {
        for (const auto& w : windows)
            if (w.id == id) return &w;
        return nullptr;
    }
    const SceneObject* find_object(const std::string& id) const {
        for (const auto& o : objects)
            if (o.id == id) return &o;
        return nullptr;
    }
};

struct MaterialEntry {
    Rgba rgba{0, 0, 0, 255};
    std::optional<std::string> texture_path;
};

struct MaterialRegistry {
    std::map<std::string, MaterialEntry> entries;

    const MaterialEntry* find(const std::string& name) const {
        auto it = entries.find(name);
        return it == entries.end() ? nullptr : &it->second;
    }
};

struct AssetEntry {
    std::string type_label;
    Rgba dominant_rgba{128, 128, 128, 255};
    double width = 0.0;   // meters
    double depth = 0.0;
    double height = 0.0;
    std::vector<std::string> thumbnail_paths;
};

struct AssetRegistry {
    std::map<std::string, AssetEntry> entries;

    const AssetEntry* find(const std::string& id) const {
        auto it = entries.find(id);
        return it == entries.end() ? nullptr : &it->second;
    }
};

inline std::string to_string(WallDirection d) {
    switch (d) {
        case WallDirection::North: return "north";
        case WallDirection::South: return "south";
        case WallDirection::East: return "east";
        case WallDirection::West: return "west";
    }
    return "north";
}

}  // namespace scenejudge
