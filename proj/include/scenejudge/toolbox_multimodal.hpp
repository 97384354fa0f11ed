#pragma once

#include <map>
#include <string>
#include <vector>

#include "scenejudge/errors.hpp"
#include "scenejudge/gateway.hpp"

namespace scenejudge {

struct PropertyReport {
    std::string subject_id;
    std::map<std::string, std::string> attributes;
    std::string reasoning;
};

// Vision tools that turn rendered images into text via the gateway.
// One gateway call per subject; all of a subject's views go in that call.
class MultimodalToolbox {
public:
    explicit MultimodalToolbox(ModelGateway& gateway) : gateway_(gateway) {}

    std::map<std::string, std::string> get_object_match(
        const std::map<std::string, std::vector<ImageBuffer>>& images) {
        if (images.empty())
            throw EmptyInputError("get_object_match needs at least one object");
        std::map<std::string, std::string> labels;
        for (const auto& [object_id, views] : images) {
            if (views.empty())
                throw EmptyInputError("no images for object '" + object_id + "'");
            ChatRequest req;
            req.template_id = "object_match";
            req.variables = {{"object_id", object_id}};
            req.images = views;
            Json answer = gateway_.chat(req);
            std::string label = answer.value("type", "");
            if (label.empty())
                throw ParseError("empty type label for object '" + object_id + "'");
            labels[object_id] = label;
        }
        return labels;
    }

    std::map<std::string, PropertyReport> get_property_description(
        const std::vector<std::string>& subject_ids,
        const std::map<std::string, std::vector<ImageBuffer>>& images,
        const std::string& metadata = "") {
        if (subject_ids.empty())
            throw EmptyInputError("get_property_description needs subjects");
        std::map<std::string, PropertyReport> reports;
        for (const auto& id : subject_ids) {
            auto it = images.find(id);
            if (it == images.end() || it->second.empty())
                throw EmptyInputError("no images for subject '" + id + "'");
            ChatRequest req;
            req.template_id = "property_description";
            req.variables = {{"subject_id", id}, {"metadata", metadata}};
            req.images = it->second;
            Json answer = gateway_.chat(req);
            PropertyReport report;
            report.subject_id = id;
            report.reasoning = answer.value("reasoning", "");
            if (answer.contains("attributes"))
                for (const auto& [key, value] : answer["attributes"].items())
                    report.attributes[key] =
                        value.is_string() ? value.get<std::string>() : value.dump();
            for (const char* required : {"color", "shape", "material"})
                if (!report.attributes.count(required))
                    throw ParseError("description of '" + id +
                                     "' is missing attribute '" + required + "'");
            reports[id] = std::move(report);
        }
        return reports;
    }

    // Stage 1 reads the instruction fragment only; stage 2 sees the images
    // and must answer exactly the stage-1 checklist.
    PropertyReport get_property_verification(
        const std::string& subject_id, const std::vector<ImageBuffer>& images,
        const std::string& instruction_fragment) {
        if (instruction_fragment.empty())
            throw EmptyInputError("instruction fragment is empty");
        if (images.empty())
            throw EmptyInputError("no images for subject '" + subject_id + "'");

        ChatRequest stage1;
        stage1.template_id = "property_verification_stage1";
        stage1.variables = {{"subject_id", subject_id},
                            {"instruction_fragment", instruction_fragment}};
        Json listed = gateway_.chat(stage1);
        std::vector<std::string> checklist;
        if (listed.contains("checklist"))
            for (const auto& item : listed["checklist"])
                if (item.is_string() && !item.get<std::string>().empty())
                    checklist.push_back(item.get<std::string>());
        if (checklist.empty())
            throw ChecklistEmptyError("no checkable attributes in fragment '" +
                                      instruction_fragment + "'");

        ChatRequest stage2;
        stage2.template_id = "property_verification_stage2";
        stage2.variables = {{"subject_id", subject_id},
                            {"checklist", Json(checklist).dump()}};
        stage2.images = images;
        Json answer = gateway_.chat(stage2);

        PropertyReport report;
        report.subject_id = subject_id;
        report.reasoning = answer.value("reasoning", "");
        Json attrs = answer.value("attributes", Json::object());
        for (const auto& key : checklist) {
            if (!attrs.contains(key))
                throw ParseError("stage-2 answer omits checklist attribute '" +
                                 key + "'");
            report.attributes[key] = attrs[key].is_string()
                                         ? attrs[key].get<std::string>()
                                         : attrs[key].dump();
        }
        return report;
    }

private:
    ModelGateway& gateway_;
};

}  // namespace scenejudge
