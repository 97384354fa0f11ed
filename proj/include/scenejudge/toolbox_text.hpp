#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenejudge/errors.hpp"
#include "scenejudge/scene.hpp"
#include "scenejudge/scene_io.hpp"
#include "scenejudge/tool_registry.hpp"

namespace scenejudge {

// The 10 textual tools are bindings of these two queries with a fixed
// ComponentKind. Records serialize with the same field names as the scene
// document, so list -> info -> prompt round-trips losslessly.

namespace detail {

template <typename T>
bool belongs_to_room(const T& entity, const std::string& room_id) {
    for (const auto& rid : entity.room_ids)
        if (rid == room_id) return true;
    return false;
}

inline bool belongs_to_room(const SceneObject& o, const std::string& room_id) {
    return o.room_id == room_id;
}

}  // namespace detail

// kind=room ignores room_ids and returns all rooms under the "" key.
inline std::map<std::string, std::vector<std::string>> list_components(
    const Scene& scene, ComponentKind kind,
    const std::optional<std::vector<std::string>>& room_ids = std::nullopt) {
    std::map<std::string, std::vector<std::string>> out;
    if (kind == ComponentKind::Room) {
        auto& all = out[""];
        for (const auto& r : scene.rooms) all.push_back(r.id);
        return out;
    }

    std::vector<std::string> rooms;
    if (room_ids) {
        for (const auto& rid : *room_ids) {
            if (!scene.find_room(rid))
                throw UnknownRoomError("no room named '" + rid + "'");
            rooms.push_back(rid);
        }
    } else {
        for (const auto& r : scene.rooms) rooms.push_back(r.id);
    }

    auto collect = [&](const auto& entities) {
        for (const auto& rid : rooms) {
            auto& ids = out[rid];
            for (const auto& e : entities)
                if (detail::belongs_to_room(e, rid)) ids.push_back(e.id);
        }
    };
    switch (kind) {
        case ComponentKind::Wall: collect(scene.walls); break;
        case ComponentKind::Door: collect(scene.doors); break;
        case ComponentKind::Window: collect(scene.windows); break;
        case ComponentKind::Object: collect(scene.objects); break;
        case ComponentKind::Room: break;
    }
    return out;
}

namespace detail {

inline std::optional<ComponentKind> kind_of_id(const Scene& scene,
                                               const std::string& id) {
    if (scene.find_room(id)) return ComponentKind::Room;
    if (scene.find_wall(id)) return ComponentKind::Wall;
    if (scene.find_door(id)) return ComponentKind::Door;
    if (scene.find_window(id)) return ComponentKind::Window;
    if (scene.find_object(id)) return ComponentKind::Object;
    return std::nullopt;
}

inline Json room_record(const Room& r) {
    Json j;
    j["id"] = r.id;
    j["polygon"] = footprint_to_json(r.polygon);
    j["floor_material"] = r.floor_material;
    return j;
}

inline Json wall_record(const Wall& w) {
    Json j;
    j["id"] = w.id;
    j["room_ids"] = w.room_ids;
    j["segment"] = Json::array({Json::array({w.segment_start.x, w.segment_start.y}),
                                Json::array({w.segment_end.x, w.segment_end.y})});
    j["height"] = w.height;
    j["width"] = w.width;
    j["material"] = w.material;
    j["direction"] = to_string(w.direction);
    return j;
}

inline Json door_record(const Door& d) {
    Json j;
    j["id"] = d.id;
    j["asset_id"] = d.asset_id;
    j["room_ids"] = d.room_ids;
    j["wall_id"] = d.wall_id;
    j["position"] = Json::array({d.position.x, d.position.y, d.position.z});
    j["open"] = d.open;
    return j;
}

inline Json window_record(const Window& w) {
    Json j;
    j["id"] = w.id;
    j["asset_id"] = w.asset_id;
    j["room_ids"] = w.room_ids;
    j["wall_id"] = w.wall_id;
    j["position"] = Json::array({w.position.x, w.position.y, w.position.z});
    return j;
}

inline Json object_record(const SceneObject& o) {
    Json j;
    j["id"] = o.id;
    j["asset_id"] = o.asset_id;
    j["room_id"] = o.room_id;
    j["position"] = Json::array({o.position.x, o.position.y, o.position.z});
    j["rotation"] = o.rotation;
    j["footprint"] = footprint_to_json(o.footprint);
    j["wall_mounted"] = o.wall_mounted;
    return j;
}

}  // namespace detail

inline std::map<std::string, Json> get_component_info(
    const Scene& scene, ComponentKind kind, const std::vector<std::string>& ids) {
    std::map<std::string, Json> out;
    for (const auto& id : ids) {
        auto actual = detail::kind_of_id(scene, id);
        if (!actual) throw UnknownIdError("no component named '" + id + "'");
        if (*actual != kind)
            throw KindMismatchError("'" + id + "' is a " + to_string(*actual) +
                                    ", not a " + to_string(kind));
        switch (kind) {
            case ComponentKind::Room:
                out[id] = detail::room_record(*scene.find_room(id));
                break;
            case ComponentKind::Wall:
                out[id] = detail::wall_record(*scene.find_wall(id));
                break;
            case ComponentKind::Door:
                out[id] = detail::door_record(*scene.find_door(id));
                break;
            case ComponentKind::Window:
                out[id] = detail::window_record(*scene.find_window(id));
                break;
            case ComponentKind::Object:
                out[id] = detail::object_record(*scene.find_object(id));
                break;
        }
    }
    return out;
}

}  // namespace scenejudge
