#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scenejudge/errors.hpp"

namespace scenejudge {

enum class ComponentKind { Room, Wall, Door, Window, Object };

inline std::string to_string(ComponentKind k) {
    switch (k) {
        case ComponentKind::Room: return "room";
        case ComponentKind::Wall: return "wall";
        case ComponentKind::Door: return "door";
        case ComponentKind::Window: return "window";
        case ComponentKind::Object: return "object";
    }
    return "room";
}

inline const std::vector<ComponentKind>& all_component_kinds() {
    static const std::vector<ComponentKind> kinds = {
        ComponentKind::Room, ComponentKind::Wall, ComponentKind::Door,
        ComponentKind::Window, ComponentKind::Object};
    return kinds;
}

enum class ToolCategory {
    EnvironmentInteraction,
    TextualReasoning,
    MultimodalReasoning,
};

inline std::string to_string(ToolCategory c) {
    switch (c) {
        case ToolCategory::EnvironmentInteraction: return "environment_interaction";
        case ToolCategory::TextualReasoning: return "textual_reasoning";
        case ToolCategory::MultimodalReasoning: return "multimodal_reasoning";
    }
    return "textual_reasoning";
}

enum class OutputKind { TextRecord, ImageSet };

// Selector prompt family; one argument-selection template per family.
enum class ToolFamily {
    IdListGeneration,
    InfoRetrieval,
    SceneComponentVisual,
    ObjectVisual,
    SpatialRelation,
};

struct ArgSpec {
    std::string name;
    enum class Type { String, StringList, TupleList } type;
    bool required = true;
};

struct ToolSpec {
    std::string name;
    ToolCategory category;
    OutputKind output_kind;
    ToolFamily family;
    std::vector<ArgSpec> args;
    // Set for the generic list/info bindings.
    std::optional<ComponentKind> kind;
};

inline const std::vector<ToolSpec>& tool_registry() {
    using T = ArgSpec::Type;
    static const std::vector<ToolSpec> registry = [] {
        std::vector<ToolSpec> r;
        auto list_tool = [&](const std::string& name, ComponentKind kind,
                             bool takes_rooms) {
            ToolSpec s{name, ToolCategory::TextualReasoning,
                       OutputKind::TextRecord, ToolFamily::IdListGeneration,
                       {}, kind};
            if (takes_rooms) s.args = {{"room_ids", T::StringList, false}};
            r.push_back(std::move(s));
        };
        auto info_tool = [&](const std::string& name, ComponentKind kind) {
            r.push_back({name, ToolCategory::TextualReasoning,
                         OutputKind::TextRecord, ToolFamily::InfoRetrieval,
                         {{"ids", T::StringList, true}}, kind});
        };
        list_tool("get_room_list", ComponentKind::Room, false);
        info_tool("get_room_info", ComponentKind::Room);
        list_tool("get_wall_list", ComponentKind::Wall, true);
        info_tool("get_wall_info", ComponentKind::Wall);
        list_tool("get_door_list", ComponentKind::Door, true);
        info_tool("get_door_info", ComponentKind::Door);
        list_tool("get_window_list", ComponentKind::Window, true);
        info_tool("get_window_info", ComponentKind::Window);
        list_tool("get_object_list", ComponentKind::Object, true);
        info_tool("get_object_info", ComponentKind::Object);

        auto env = [&](const std::string& name, ToolFamily family,
                       std::vector<ArgSpec> args) {
            r.push_back({name, ToolCategory::EnvironmentInteraction,
                         OutputKind::ImageSet, family, std::move(args),
                         std::nullopt});
        };
        env("get_topdown_scene", ToolFamily::SceneComponentVisual, {});
        env("get_topdown_room", ToolFamily::SceneComponentVisual,
            {{"room_id", T::String, true}});
        env("get_frontview_object", ToolFamily::ObjectVisual,
            {{"object_ids", T::StringList, true}});
        env("get_wall_scene", ToolFamily::SceneComponentVisual,
            {{"wall_ids", T::StringList, true}});
        env("get_topdown_object", ToolFamily::ObjectVisual,
            {{"object_ids", T::StringList, true}});
        env("get_material_image", ToolFamily::SceneComponentVisual,
            {{"material_names", T::StringList, true}});
        env("get_multiview_rendered_object", ToolFamily::ObjectVisual,
            {{"object_ids", T::StringList, true}});
        env("get_spatial_relation", ToolFamily::SpatialRelation,
            {{"id_tuples", T::TupleList, true}});

        // Multimodal tools consume ids plus prior image outputs; argument
        // selection treats them as information retrieval.
        r.push_back({"get_object_match", ToolCategory::MultimodalReasoning,
                     OutputKind::TextRecord, ToolFamily::InfoRetrieval,
                     {{"object_ids", T::StringList, true}}, std::nullopt});
        r.push_back({"get_property_description", ToolCategory::MultimodalReasoning,
                     OutputKind::TextRecord, ToolFamily::InfoRetrieval,
                     {{"subject_ids", T::StringList, true},
                      {"metadata", T::String, false}},
                     std::nullopt});
        r.push_back({"get_property_verification", ToolCategory::MultimodalReasoning,
                     OutputKind::TextRecord, ToolFamily::InfoRetrieval,
                     {{"subject_id", T::String, true},
                      {"instruction_fragment", T::String, true}},
                     std::nullopt});
        return r;
    }();
    return registry;
}

inline const ToolSpec* find_tool(const std::string& name) {
    for (const auto& s : tool_registry())
        if (s.name == name) return &s;
    return nullptr;
}

inline const ToolSpec& require_tool(const std::string& name) {
    const ToolSpec* s = find_tool(name);
    if (!s) throw UnknownToolError("no tool named '" + name + "'");
    return *s;
}

}  // namespace scenejudge
