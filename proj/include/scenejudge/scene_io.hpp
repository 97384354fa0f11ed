#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenejudge/errors.hpp"
#include "scenejudge/scene.hpp"

namespace scenejudge {

using Json = nlohmann::ordered_json;

struct Violation {
    enum class Category { Reference, Geometry, Schema };
    Category category = Category::Schema;
    std::string entity_id;
    std::string rule;
};

namespace detail {

inline const Json& require_field(const Json& obj, const std::string& key,
                                 const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) {
        throw SchemaError("missing field '" + path + "." + key + "'");
    }
    return obj.at(key);
}

inline std::string require_string(const Json& obj, const std::string& key,
                                  const std::string& path) {
    const Json& v = require_field(obj, key, path);
    if (!v.is_string())
        throw SchemaError("field '" + path + "." + key + "' must be a string");
    return v.get<std::string>();
}

inline double require_number(const Json& obj, const std::string& key,
                             const std::string& path) {
    const Json& v = require_field(obj, key, path);
    if (!v.is_number())
        throw SchemaError("field '" + path + "." + key + "' must be a number");
    return v.get<double>();
}

inline bool require_bool(const Json& obj, const std::string& key,
                         const std::string& path) {
    const Json& v = require_field(obj, key, path);
    if (!v.is_boolean())
        throw SchemaError("field '" + path + "." + key + "' must be a boolean");
    return v.get<bool>();
}

inline Vec2 parse_vec2(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw SchemaError("'" + path + "' must be a [x, y] number pair");
    return {v[0].get<double>(), v[1].get<double>()};
}

inline Vec3 parse_vec3(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3)
        throw SchemaError("'" + path + "' must be a [x, y, z] number triple");
    for (const auto& c : v)
        if (!c.is_number())
            throw SchemaError("'" + path + "' must be a [x, y, z] number triple");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

inline Polygon parse_polygon(const Json& v, const std::string& path) {
    if (!v.is_array()) throw SchemaError("'" + path + "' must be an array");
    Polygon poly;
    for (size_t i = 0; i < v.size(); ++i)
        poly.push_back(parse_vec2(v[i], path + "[" + std::to_string(i) + "]"));
    return poly;
}

inline std::vector<std::string> parse_string_list(const Json& v,
                                                  const std::string& path) {
    if (!v.is_array()) throw SchemaError("'" + path + "' must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string())
            throw SchemaError("'" + path + "' must contain strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

inline WallDirection parse_direction(const std::string& s,
                                     const std::string& path) {
    if (s == "north") return WallDirection::North;
    if (s == "south") return WallDirection::South;
    if (s == "east") return WallDirection::East;
    if (s == "west") return WallDirection::West;
    throw SchemaError("'" + path + ".direction' must be one of "
                      "north/south/east/west, got '" + s + "'");
}

inline Rgba parse_rgba(const Json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 4)
        throw SchemaError("'" + path + "' must be a 4-element rgba array");
    Rgba c;
    for (size_t i = 0; i < 4; ++i) {
        if (!v[i].is_number_integer() || v[i].get<int>() < 0 ||
            v[i].get<int>() > 255)
            throw SchemaError("'" + path + "' components must be 0..255");
        c[i] = static_cast<std::uint8_t>(v[i].get<int>());
    }
    return c;
}

}  // namespace detail

// Violations are data, not errors: parse_scene maps them to exceptions,
// callers probing hand-built scenes read the list directly.
inline std::vector<Violation> validate_scene(
    const Scene& scene, const MaterialRegistry* materials = nullptr) {
    std::vector<Violation> out;
    auto add = [&](Violation::Category cat, const std::string& id,
                   const std::string& rule) {
        out.push_back({cat, id, rule});
    };

    std::map<std::string, int> id_count;
    for (const auto& r : scene.rooms) id_count[r.id]++;
    for (const auto& w : scene.walls) id_count[w.id]++;
    for (const auto& d : scene.doors) id_count[d.id]++;
    for (const auto& w : scene.windows) id_count[w.id]++;
    for (const auto& o : scene.objects) id_count[o.id]++;
    for (const auto& [id, n] : id_count)
        if (n > 1)
            add(Violation::Category::Reference, id,
                "id '" + id + "' is used by " + std::to_string(n) + " entities");

    for (const auto& r : scene.rooms) {
        if (r.polygon.size() < 3)
            add(Violation::Category::Geometry, r.id,
                "room polygon needs >= 3 vertices");
        else if (!polygon_is_simple(r.polygon))
            add(Violation::Category::Geometry, r.id,
                "room polygon is self-intersecting");
        if (materials && !materials->find(r.floor_material))
            add(Violation::Category::Reference, r.id,
                "floor material '" + r.floor_material + "' not in registry");
    }

    for (const auto& w : scene.walls) {
        if (w.room_ids.empty() || w.room_ids.size() > 2)
            add(Violation::Category::Reference, w.id,
                "wall must reference 1 or 2 rooms");
        for (const auto& rid : w.room_ids)
            if (!scene.find_room(rid))
                add(Violation::Category::Reference, w.id,
                    "wall '" + w.id + "' references missing room '" + rid + "'");
        if (w.height <= 0)
            add(Violation::Category::Geometry, w.id, "wall height must be > 0");
        if (w.width <= 0)
            add(Violation::Category::Geometry, w.id, "wall width must be > 0");
        if (w.segment_start == w.segment_end)
            add(Violation::Category::Geometry, w.id,
                "wall segment endpoints coincide");
        if (materials && !materials->find(w.material))
            add(Violation::Category::Reference, w.id,
                "wall material '" + w.material + "' not in registry");
    }

    auto check_opening = [&](const std::string& id, const std::string& wall_id,
                             const std::vector<std::string>& room_ids,
                             const Vec3& position, const char* kind) {
        const Wall* host = scene.find_wall(wall_id);
        if (!host) {
            add(Violation::Category::Reference, id,
                std::string(kind) + " '" + id + "' references missing wall '" +
                    wall_id + "'");
        } else {
            double d = point_segment_distance({position.x, position.y},
                                              host->segment_start,
                                              host->segment_end);
            if (d > 0.5)
                add(Violation::Category::Geometry, id,
                    std::string(kind) + " lies " + std::to_string(d) +
                        " m from its host wall (max 0.5)");
        }
        for (const auto& rid : room_ids)
            if (!scene.find_room(rid))
                add(Violation::Category::Reference, id,
                    std::string(kind) + " '" + id +
                        "' references missing room '" + rid + "'");
    };
    for (const auto& d : scene.doors)
        check_opening(d.id, d.wall_id, d.room_ids, d.position, "door");
    for (const auto& w : scene.windows)
        check_opening(w.id, w.wall_id, w.room_ids, w.position, "window");

    for (const auto& o : scene.objects) {
        if (!scene.find_room(o.room_id))
            add(Violation::Category::Reference, o.id,
                "object '" + o.id + "' references missing room '" + o.room_id +
                    "'");
        if (o.rotation < 0.0 || o.rotation >= 360.0)
            add(Violation::Category::Geometry, o.id,
                "object rotation must lie in [0, 360)");
        if (o.footprint.size() < 3 || polygon_area(o.footprint) <= 0.0)
            add(Violation::Category::Geometry, o.id,
                "object footprint must have positive area");
    }
    return out;
}

inline Scene parse_scene(const std::string& document) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(std::string("malformed scene document: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("scene document must be an object");
    if (!doc.contains("schema_version") ||
        !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != 1)
        throw SchemaError("scene document requires schema_version: 1");

    using namespace detail;
    Scene scene;
    scene.scene_id = require_string(doc, "scene_id", "$");
    scene.material_registry_ref =
        doc.contains("material_registry") && doc["material_registry"].is_string()
            ? doc["material_registry"].get<std::string>()
            : "";
    scene.asset_registry_ref =
        doc.contains("asset_registry") && doc["asset_registry"].is_string()
            ? doc["asset_registry"].get<std::string>()
            : "";

    for (const auto& key : {"rooms", "walls", "doors", "windows", "objects"})
        if (!doc.contains(key) || !doc[key].is_array())
            throw SchemaError(std::string("'$.") + key + "' must be an array");

    size_t i = 0;
    for (const auto& j : doc["rooms"]) {
        std::string path = "rooms[" + std::to_string(i++) + "]";
        Room r;
        r.id = require_string(j, "id", path);
        r.polygon = parse_polygon(require_field(j, "polygon", path),
                                  path + ".polygon");
        r.floor_material = require_string(j, "floor_material", path);
        scene.rooms.push_back(std::move(r));
    }
    i = 0;
    for (const auto& j : doc["walls"]) {
        std::string path = "walls[" + std::to_string(i++) + "]";
        Wall w;
        w.id = require_string(j, "id", path);
        w.room_ids = parse_string_list(require_field(j, "room_ids", path),
                                       path + ".room_ids");
        const Json& seg = require_field(j, "segment", path);
        if (!seg.is_array() || seg.size() != 2)
            throw SchemaError("'" + path + ".segment' must hold two endpoints");
        w.segment_start = parse_vec2(seg[0], path + ".segment[0]");
        w.segment_end = parse_vec2(seg[1], path + ".segment[1]");
        w.height = require_number(j, "height", path);
        w.width = require_number(j, "width", path);
        w.material = require_string(j, "material", path);
        w.direction = parse_direction(require_string(j, "direction", path), path);
        scene.walls.push_back(std::move(w));
    }
    i = 0;
    for (const auto& j : doc["doors"]) {
        std::string path = "doors[" + std::to_string(i++) + "]";
        Door d;
        d.id = require_string(j, "id", path);
        d.asset_id = require_string(j, "asset_id", path);
        d.room_ids = parse_string_list(require_field(j, "room_ids", path),
                                       path + ".room_ids");
        d.wall_id = require_string(j, "wall_id", path);
        d.position = parse_vec3(require_field(j, "position", path),
                                path + ".position");
        d.open = require_bool(j, "open", path);
        scene.doors.push_back(std::move(d));
    }
    i = 0;
    for (const auto& j : doc["windows"]) {
        std::string path = "windows[" + std::to_string(i++) + "]";
        Window w;
        w.id = require_string(j, "id", path);
        w.asset_id = require_string(j, "asset_id", path);
        w.room_ids = parse_string_list(require_field(j, "room_ids", path),
                                       path + ".room_ids");
        w.wall_id = require_string(j, "wall_id", path);
        w.position = parse_vec3(require_field(j, "position", path),
                                path + ".position");
        scene.windows.push_back(std::move(w));
    }
    i = 0;
    for (const auto& j : doc["objects"]) {
        std::string path = "objects[" + std::to_string(i++) + "]";
        SceneObject o;
        o.id = require_string(j, "id", path);
        o.asset_id = require_string(j, "asset_id", path);
        o.room_id = require_string(j, "room_id", path);
        o.position = parse_vec3(require_field(j, "position", path),
                                path + ".position");
        o.rotation = require_number(j, "rotation", path);
        if (j.contains("footprint")) {
            o.footprint = parse_polygon(j["footprint"], path + ".footprint");
        } else if (j.contains("footprint_box")) {
            const Json& b = j["footprint_box"];
            Vec2 min = parse_vec2(require_field(b, "min", path + ".footprint_box"),
                                  path + ".footprint_box.min");
            Vec2 max = parse_vec2(require_field(b, "max", path + ".footprint_box"),
                                  path + ".footprint_box.max");
            o.footprint = box_to_polygon(min, max);
        } else {
            throw SchemaError("'" + path +
                              "' needs a footprint or footprint_box");
        }
        o.wall_mounted = j.contains("wall_mounted")
                             ? require_bool(j, "wall_mounted", path)
                             : false;
        scene.objects.push_back(std::move(o));
    }

    auto violations = validate_scene(scene);
    if (!violations.empty()) {
        const Violation& v = violations.front();
        if (v.category == Violation::Category::Reference)
            throw ReferenceError(v.rule);
        throw GeometryError(v.rule);
    }
    return scene;
}

inline Json footprint_to_json(const Polygon& poly) {
    Json arr = Json::array();
    for (const auto& p : poly) arr.push_back(Json::array({p.x, p.y}));
    return arr;
}

inline Json serialize_scene_json(const Scene& scene) {
    Json doc;
    doc["schema_version"] = 1;
    doc["scene_id"] = scene.scene_id;
    doc["rooms"] = Json::array();
    for (const auto& r : scene.rooms) {
        Json j;
        j["id"] = r.id;
        j["polygon"] = footprint_to_json(r.polygon);
        j["floor_material"] = r.floor_material;
        doc["rooms"].push_back(j);
    }
    doc["walls"] = Json::array();
    for (const auto& w : scene.walls) {
        Json j;
        j["id"] = w.id;
        j["room_ids"] = w.room_ids;
        j["segment"] = Json::array({Json::array({w.segment_start.x, w.segment_start.y}),
                                    Json::array({w.segment_end.x, w.segment_end.y})});
        j["height"] = w.height;
        j["width"] = w.width;
        j["material"] = w.material;
        j["direction"] = to_string(w.direction);
        doc["walls"].push_back(j);
    }
    doc["doors"] = Json::array();
    for (const auto& d : scene.doors) {
        Json j;
        j["id"] = d.id;
        j["asset_id"] = d.asset_id;
        j["room_ids"] = d.room_ids;
        j["position"] = Json::array({d.position.x, d.position.y, d.position.z});
        j["wall_id"] = d.wall_id;
        j["open"] = d.open;
        doc["doors"].push_back(j);
    }
    doc["windows"] = Json::array();
    for (const auto& w : scene.windows) {
        Json j;
        j["id"] = w.id;
        j["asset_id"] = w.asset_id;
        j["room_ids"] = w.room_ids;
        j["position"] = Json::array({w.position.x, w.position.y, w.position.z});
        j["wall_id"] = w.wall_id;
        doc["windows"].push_back(j);
    }
    doc["objects"] = Json::array();
    for (const auto& o : scene.objects) {
        Json j;
        j["id"] = o.id;
        j["asset_id"] = o.asset_id;
        j["room_id"] = o.room_id;
        j["position"] = Json::array({o.position.x, o.position.y, o.position.z});
        j["rotation"] = o.rotation;
        j["footprint"] = footprint_to_json(o.footprint);
        j["wall_mounted"] = o.wall_mounted;
        doc["objects"].push_back(j);
    }
    if (!scene.material_registry_ref.empty())
        doc["material_registry"] = scene.material_registry_ref;
    if (!scene.asset_registry_ref.empty())
        doc["asset_registry"] = scene.asset_registry_ref;
    return doc;
}

inline std::string serialize_scene(const Scene& scene) {
    return serialize_scene_json(scene).dump(2);
}

// FNV-1a over the canonical serialization; used by purity tests.
inline std::uint64_t scene_hash(const Scene& scene) {
    std::string s = serialize_scene(scene);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline MaterialRegistry parse_material_registry(const std::string& document) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(std::string("malformed material registry: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("materials") ||
        !doc["materials"].is_object())
        throw SchemaError("material registry requires a 'materials' object");
    MaterialRegistry reg;
    for (const auto& [name, j] : doc["materials"].items()) {
        if (name.empty())
            throw SchemaError("material names must be non-empty");
        MaterialEntry e;
        e.rgba = detail::parse_rgba(detail::require_field(j, "rgba", name),
                                    name + ".rgba");
        if (e.rgba[3] == 0)
            throw SchemaError("material '" + name + "' has zero alpha");
        if (j.contains("texture_path") && j["texture_path"].is_string())
            e.texture_path = j["texture_path"].get<std::string>();
        reg.entries[name] = std::move(e);
    }
    return reg;
}

inline AssetRegistry parse_asset_registry(const std::string& document) {
    Json doc;
    try {
        doc = Json::parse(document);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(std::string("malformed asset registry: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("assets") || !doc["assets"].is_object())
        throw SchemaError("asset registry requires an 'assets' object");
    AssetRegistry reg;
    for (const auto& [id, j] : doc["assets"].items()) {
        AssetEntry e;
        e.type_label = detail::require_string(j, "type_label", id);
        e.dominant_rgba = detail::parse_rgba(
            detail::require_field(j, "dominant_rgba", id), id + ".dominant_rgba");
        const Json& dims = detail::require_field(j, "dimensions", id);
        if (!dims.is_array() || dims.size() != 3)
            throw SchemaError("asset '" + id +
                              "' dimensions must be [width, depth, height]");
        e.width = dims[0].get<double>();
        e.depth = dims[1].get<double>();
        e.height = dims[2].get<double>();
        if (e.width <= 0 || e.depth <= 0 || e.height <= 0)
            throw SchemaError("asset '" + id +
                              "' dimensions must be strictly positive");
        if (j.contains("thumbnail_paths"))
            e.thumbnail_paths = detail::parse_string_list(
                j["thumbnail_paths"], id + ".thumbnail_paths");
        reg.entries[id] = std::move(e);
    }
    return reg;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Scene load_scene_file(const std::string& path) {
    return parse_scene(read_file(path));
}

inline MaterialRegistry load_material_registry(const std::string& path) {
    return parse_material_registry(read_file(path));
}

inline AssetRegistry load_asset_registry(const std::string& path) {
    return parse_asset_registry(read_file(path));
}

}  // namespace scenejudge
