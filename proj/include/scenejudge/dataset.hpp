#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "scenejudge/errors.hpp"
#include "scenejudge/pipeline.hpp"
#include "scenejudge/scene_io.hpp"

namespace scenejudge {

// Benchmark bundle layout under one directory:
//   instructions.jsonl   one {"id", "text"} record per line
//   annotations.jsonl    typed constraints per instruction
//   scenes/<id>.json     one gold scene per instruction
//   labels.jsonl         optional human labels ("holistic" or constraint id)
//   plans.jsonl          optional gold tool plans keyed by constraint id
// Every record carries schema_version 1.
struct BenchmarkBundle {
    std::vector<Instruction> instructions;
    std::map<std::string, std::vector<Constraint>> annotations;
    std::map<std::string, std::string> gold_scene_paths;
    std::map<std::string, Scene> gold_scenes;
    // (instruction_id, constraint_id | "holistic") -> human verdict
    std::map<std::pair<std::string, std::string>, bool> human_labels;
    std::map<std::string, ToolPlan> gold_plans;

    struct Stats {
        size_t instruction_count = 0;
        size_t constraint_count = 0;
        double mean_constraints = 0.0;
        double mean_rooms = 0.0;
    } stats;

    const Instruction* find_instruction(const std::string& id) const {
        for (const auto& i : instructions)
            if (i.id == id) return &i;
        return nullptr;
    }
};

namespace detail {

inline std::vector<Json> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::vector<Json> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json record = Json::parse(line, nullptr, false);
        if (record.is_discarded())
            throw SchemaError(path + ":" + std::to_string(line_no) +
                              ": not a JSON record");
        if (record.value("schema_version", 0) != 1)
            throw SchemaError(path + ":" + std::to_string(line_no) +
                              ": schema_version must be 1");
        records.push_back(std::move(record));
    }
    return records;
}

inline std::string require_string(const Json& record, const char* field,
                                  const std::string& where) {
    if (!record.contains(field) || !record[field].is_string() ||
        record[field].get<std::string>().empty())
        throw SchemaError(where + ": missing or empty '" + field + "'");
    return record[field].get<std::string>();
}

}  // namespace detail

inline BenchmarkBundle load_bundle(const std::string& directory) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(directory))
        throw LayoutError("'" + directory + "' is not a directory");
    for (const char* required : {"instructions.jsonl", "annotations.jsonl"})
        if (!fs::exists(fs::path(directory) / required))
            throw LayoutError("bundle is missing " + std::string(required));
    if (!fs::is_directory(fs::path(directory) / "scenes"))
        throw LayoutError("bundle is missing the scenes/ directory");

    BenchmarkBundle bundle;
    for (const auto& record :
         detail::read_jsonl(directory + "/instructions.jsonl")) {
        Instruction instruction;
        instruction.id = detail::require_string(record, "id", "instructions");
        instruction.text = detail::require_string(record, "text",
                                                  "instruction '" +
                                                      instruction.id + "'");
        if (bundle.find_instruction(instruction.id))
            throw SchemaError("duplicate instruction id '" + instruction.id +
                              "'");
        bundle.instructions.push_back(std::move(instruction));
    }

    for (const auto& record :
         detail::read_jsonl(directory + "/annotations.jsonl")) {
        std::string iid =
            detail::require_string(record, "instruction_id", "annotations");
        const Instruction* instruction = bundle.find_instruction(iid);
        if (!instruction)
            throw ReferenceError("annotation references unknown instruction '" +
                                 iid + "'");
        if (!record.contains("constraints") || !record["constraints"].is_array())
            throw SchemaError("annotation for '" + iid +
                              "' has no constraint array");
        std::set<std::string> seen;
        for (const auto& entry : record["constraints"]) {
            Constraint c;
            c.id = detail::require_string(entry, "id", "constraint in '" + iid +
                                                           "'");
            if (!seen.insert(c.id).second)
                throw SchemaError("duplicate constraint id '" + c.id +
                                  "' in '" + iid + "'");
            c.text = detail::require_string(entry, "text",
                                            "constraint '" + c.id + "'");
            c.ctype = parse_constraint_type(
                detail::require_string(entry, "ctype", "constraint '" + c.id +
                                                           "'"));
            if (entry.contains("source_span")) {
                const auto& span = entry["source_span"];
                if (!span.is_array() || span.size() != 2)
                    throw SchemaError("constraint '" + c.id +
                                      "': source_span must be [start, end]");
                size_t start = span[0].get<size_t>(), end = span[1].get<size_t>();
                if (start > end || end > instruction->text.size())
                    throw SchemaError("constraint '" + c.id +
                                      "': span lies outside the instruction");
                c.source_span = {start, end};
            }
            bundle.annotations[iid].push_back(std::move(c));
        }
    }

    for (const auto& instruction : bundle.instructions) {
        std::string path = directory + "/scenes/" + instruction.id + ".json";
        if (!fs::exists(path))
            throw LayoutError("no gold scene for instruction '" +
                              instruction.id + "' (expected " + path + ")");
        Scene scene = load_scene_file(path);
        auto violations = validate_scene(scene);
        if (!violations.empty())
            throw GeometryError("gold scene '" + instruction.id +
                                "' fails validation: " + violations[0].rule);
        bundle.gold_scene_paths[instruction.id] = path;
        bundle.gold_scenes[instruction.id] = std::move(scene);
    }

    if (fs::exists(fs::path(directory) / "labels.jsonl")) {
        for (const auto& record :
             detail::read_jsonl(directory + "/labels.jsonl")) {
            std::string iid =
                detail::require_string(record, "instruction_id", "labels");
            if (!bundle.find_instruction(iid))
                throw ReferenceError("label references unknown instruction '" +
                                     iid + "'");
            std::string cid =
                detail::require_string(record, "constraint_id", "labels");
            if (cid != "holistic") {
                bool known = false;
                for (const auto& c : bundle.annotations[iid])
                    if (c.id == cid) known = true;
                if (!known)
                    throw ReferenceError("label references unknown constraint '" +
                                         cid + "' of '" + iid + "'");
            }
            if (!record.contains("value") || !record["value"].is_boolean())
                throw SchemaError("label for '" + iid + "/" + cid +
                                  "' needs a boolean value");
            bundle.human_labels[{iid, cid}] = record["value"].get<bool>();
        }
    }

    if (fs::exists(fs::path(directory) / "plans.jsonl")) {
        for (const auto& record :
             detail::read_jsonl(directory + "/plans.jsonl")) {
            std::string cid =
                detail::require_string(record, "constraint_id", "plans");
            if (!record.contains("plan"))
                throw SchemaError("plan record '" + cid + "' has no plan");
            bundle.gold_plans[cid] = plan_from_json(record["plan"], cid);
        }
    }

    bundle.stats.instruction_count = bundle.instructions.size();
    size_t rooms = 0;
    for (const auto& [iid, constraints] : bundle.annotations)
        bundle.stats.constraint_count += constraints.size();
    for (const auto& [iid, scene] : bundle.gold_scenes)
        rooms += scene.rooms.size();
    if (!bundle.instructions.empty()) {
        bundle.stats.mean_constraints =
            double(bundle.stats.constraint_count) / bundle.instructions.size();
        bundle.stats.mean_rooms = double(rooms) / bundle.instructions.size();
    }
    return bundle;
}

// Complexity buckets by constraint count: 2-7 simple, 8-12 moderate,
// above 12 complex. Degenerate counts below 2 fall in simple.
inline std::map<std::string, std::vector<std::string>> bucket_by_complexity(
    const BenchmarkBundle& bundle) {
    std::map<std::string, std::vector<std::string>> buckets = {
        {"simple", {}}, {"moderate", {}}, {"complex", {}}};
    for (const auto& instruction : bundle.instructions) {
        size_t count = 0;
        auto it = bundle.annotations.find(instruction.id);
        if (it != bundle.annotations.end()) count = it->second.size();
        if (count <= 7) buckets["simple"].push_back(instruction.id);
        else if (count <= 12) buckets["moderate"].push_back(instruction.id);
        else buckets["complex"].push_back(instruction.id);
    }
    return buckets;
}

}  // namespace scenejudge
