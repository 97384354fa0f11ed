#pragma once

#include <map>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "scenejudge/errors.hpp"
#include "scenejudge/tool_registry.hpp"

namespace scenejudge {

// Every template demands a fenced ```json answer block; free prose may
// surround it but only the block is parsed.
struct PromptTemplate {
    std::string id;
    std::string body;  // {{name}} placeholders
    bool expects_images = false;
};

inline const std::string kAnswerContract =
    "\n\nAnswer with a single fenced block:\n```json\n<answer>\n```\n";

inline const std::string kRepairSuffix =
    "\n\nYour previous reply could not be parsed. Reply again with ONLY the "
    "fenced ```json block in the required shape.";

inline const std::map<std::string, PromptTemplate>& prompt_registry() {
    static const std::map<std::string, PromptTemplate> registry = [] {
        std::map<std::string, PromptTemplate> r;
        auto add = [&](const std::string& id, bool images,
                       const std::string& body) {
            r[id] = {id, body + kAnswerContract, images};
        };

        add("constraint_identification", false,
            "You are checking a 3D indoor scene against a written scene "
            "description.\n\nDescription:\n{{instruction}}\n\nBreak the "
            "description into atomic requirements. Rewrite each requirement "
            "so it is self-contained: inline any cross-references so the "
            "sentence stands alone (\"the bed in the room with the red floor "
            "is white\"). Keep the original order.\n\nThe answer is a JSON "
            "array of objects with a \"text\" field.");

        add("constraint_classification", false,
            "Classify one scene requirement into exactly one category:\n"
            "- floor_layout: spatial layout of rooms, walls, doors, and "
            "windows\n- material_selection: visual appearance of floors and "
            "walls\n- object_selection: appearance of objects, including "
            "doors and windows\n- object_placement: object placement and "
            "rotation within the scene\n\nRequirement:\n{{constraint}}\n\n"
            "The answer is a JSON object {\"type\": \"<category>\"}.");

        add("planning", false,
            "Plan which scene-inspection tools to run to verify one "
            "requirement.\n\nRequirement ({{constraint_type}}):\n"
            "{{constraint}}\n\nAllowed tools:\n{{allowed_tools}}\n\nFindings "
            "from earlier requirements (reuse them; do not re-verify what "
            "they already settle):\n{{prior_explanations}}\n\nProduce a "
            "directed acyclic plan. Nodes may depend on earlier nodes whose "
            "output they need.\n\nThe answer is a JSON object "
            "{\"rationale\": str, \"nodes\": [{\"node_id\": str, \"tool\": "
            "str, \"depends_on\": [str]}]}.");

        auto selector = [&](const std::string& id, const std::string& blurb) {
            add(id, false,
                "Choose concrete arguments for one tool invocation.\n\n"
                "Tool: {{tool}} (" + blurb + ")\nArgument schema: "
                "{{argument_schema}}\n\nRequirement:\n{{constraint}}\n\nPlan "
                "rationale:\n{{rationale}}\n\nOutputs of dependency nodes:\n"
                "{{prior_outputs}}\n\nFindings from earlier requirements:\n"
                "{{prior_explanations}}\n\nThe answer is a JSON object "
                "mapping argument names to values.");
        };
        selector("argument_selector_id_list",
                 "lists scene-component ids, optionally limited to rooms");
        selector("argument_selector_info",
                 "retrieves full records or derived descriptions for ids");
        selector("argument_selector_scene_visual",
                 "renders rooms, walls, or materials");
        selector("argument_selector_object_visual",
                 "renders specific objects");
        selector("argument_selector_spatial",
                 "renders isolated groups of components together");

        auto validation = [&](const std::string& id, const std::string& focus) {
            add(id, true,
                "Decide whether the scene satisfies one requirement about " +
                focus + ".\n\nRequirement:\n{{constraint}}\n\nTool outputs "
                "gathered for this requirement:\n{{tool_outputs}}\n\nFindings "
                "from earlier requirements:\n{{prior_explanations}}\n\n"
                "Attached images show the rendered evidence. Judge strictly: "
                "the requirement holds only if the evidence shows it.\n\nThe "
                "answer is a JSON object {\"valid\": bool, \"explanation\": "
                "str}.");
        };
        validation("validation_FL",
                   "the spatial layout of rooms, walls, doors, and windows");
        validation("validation_MS", "floor and wall materials");
        validation("validation_OS", "the appearance of objects");
        validation("validation_OP", "object placement and rotation");

        add("object_match", true,
            "The attached images show rendered views of one scene object "
            "(id: {{object_id}}). Name its object type with a single "
            "word or short phrase.\n\nThe answer is a JSON object "
            "{\"type\": str}.");

        add("property_description", true,
            "Describe the visual properties of subject {{subject_id}} from "
            "the attached rendered images.\nOptional metadata:\n{{metadata}}"
            "\n\nReport at least color, shape, and material, plus your "
            "reasoning.\n\nThe answer is a JSON object {\"attributes\": "
            "{\"color\": str, \"shape\": str, \"material\": str, ...}, "
            "\"reasoning\": str}.");

        add("property_verification_stage1", false,
            "A requirement mentions subject {{subject_id}}:\n"
            "{{instruction_fragment}}\n\nList the visual attributes that "
            "must be checked to verify it (e.g. color, pattern, texture). "
            "List only attributes the requirement actually constrains.\n\n"
            "The answer is a JSON object {\"checklist\": [str]}.");

        add("property_verification_stage2", true,
            "Inspect the attached images of subject {{subject_id}} and "
            "report the value of each attribute in this checklist: "
            "{{checklist}}\n\nThe answer is a JSON object {\"attributes\": "
            "{<attribute>: str}, \"reasoning\": str}.");

        add("vlm_judge_baseline", true,
            "The attached four images show a 3D indoor scene from four "
            "corner perspectives.\n\nRequirement:\n{{constraint}}\n\nDoes "
            "the scene satisfy the requirement?\n\nThe answer is a JSON "
            "object {\"valid\": bool, \"explanation\": str}.");

        return r;
    }();
    return registry;
}

inline const PromptTemplate& require_template(const std::string& id) {
    const auto& reg = prompt_registry();
    auto it = reg.find(id);
    if (it == reg.end())
        throw PreconditionError("no prompt template named '" + id + "'");
    return it->second;
}

inline std::string selector_template_for(ToolFamily family) {
    switch (family) {
        case ToolFamily::IdListGeneration: return "argument_selector_id_list";
        case ToolFamily::InfoRetrieval: return "argument_selector_info";
        case ToolFamily::SceneComponentVisual:
            return "argument_selector_scene_visual";
        case ToolFamily::ObjectVisual: return "argument_selector_object_visual";
        case ToolFamily::SpatialRelation: return "argument_selector_spatial";
    }
    return "argument_selector_info";
}

inline std::string render_template(const PromptTemplate& tmpl,
                                   const std::map<std::string, std::string>& variables) {
    std::string out = tmpl.body;
    std::set<std::string> seen;
    size_t pos = 0;
    while ((pos = out.find("{{", pos)) != std::string::npos) {
        size_t end = out.find("}}", pos);
        if (end == std::string::npos) break;
        std::string name = out.substr(pos + 2, end - pos - 2);
        auto it = variables.find(name);
        if (it == variables.end())
            throw PreconditionError("template '" + tmpl.id +
                                    "' placeholder '{{" + name +
                                    "}}' has no bound variable");
        out.replace(pos, end - pos + 2, it->second);
        pos += it->second.size();
        seen.insert(name);
    }
    return out;
}

}  // namespace scenejudge
