#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "scenejudge/dataset.hpp"
#include "scenejudge/errors.hpp"
#include "scenejudge/gateway.hpp"
#include "scenejudge/http_backend.hpp"
#include "scenejudge/metrics.hpp"
#include "scenejudge/pipeline.hpp"
#include "scenejudge/png_io.hpp"

namespace scenejudge {

struct RunConfig {
    std::string backend = "mock";  // remote | local | mock
    std::string model;
    std::string mock_script;
    double temperature = 0.0;
    int resolution = 1200;
    std::string dump_images_dir;
    int parallel = 4;
    std::string out_path;
    std::string transcript_path;
};

inline Json config_snapshot(const RunConfig& config) {
    Json j;
    j["backend"] = config.backend;
    j["model"] = config.model;
    j["temperature"] = config.temperature;
    j["resolution"] = config.resolution;
    j["parallel"] = config.parallel;
    if (!config.mock_script.empty()) j["mock_script"] = config.mock_script;
    return j;
}

inline std::shared_ptr<ModelGateway> make_gateway(const RunConfig& config) {
    if (config.parallel < 1)
        throw PreconditionError("parallelism must be >= 1");
    GatewayConfig gw;
    gw.model = config.model;
    gw.max_parallel = config.parallel;
    gw.transcript_path = config.transcript_path;
    std::shared_ptr<Backend> backend;
    if (config.backend == "mock") {
        gw.profile = mock_profile();
        backend = config.mock_script.empty()
                      ? std::make_shared<MockBackend>()
                      : MockBackend::from_script_file(config.mock_script);
    } else if (config.backend == "local") {
        gw.profile = local_profile();
        gw.embed_mock_key = false;
        backend = std::make_shared<HttpBackend>(config.model);
    } else if (config.backend == "remote") {
        gw.profile = remote_profile();
        gw.embed_mock_key = false;
        backend = std::make_shared<HttpBackend>(config.model);
    } else {
        throw PreconditionError("backend must be remote, local, or mock");
    }
    return std::make_shared<ModelGateway>(backend, gw);
}

// Registries live next to the scene file unless the document names them.
inline MaterialRegistry materials_for(const Scene& scene,
                                      const std::string& scene_path) {
    namespace fs = std::filesystem;
    fs::path base = fs::path(scene_path).parent_path();
    fs::path ref = scene.material_registry_ref.empty()
                       ? base / "materials.json"
                       : base / scene.material_registry_ref;
    if (fs::exists(ref)) return load_material_registry(ref.string());
    return {};
}

inline AssetRegistry assets_for(const Scene& scene,
                                const std::string& scene_path) {
    namespace fs = std::filesystem;
    fs::path base = fs::path(scene_path).parent_path();
    fs::path ref = scene.asset_registry_ref.empty()
                       ? base / "assets.json"
                       : base / scene.asset_registry_ref;
    if (fs::exists(ref)) return load_asset_registry(ref.string());
    return {};
}

namespace detail {

inline void write_json_file(const std::string& path, const Json& value) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << value.dump(2) << "\n";
}

inline std::vector<Constraint> read_constraint_file(const std::string& path,
                                                    const std::string& iid) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::vector<Constraint> constraints;
    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Json record = Json::parse(line, nullptr, false);
        if (record.is_discarded())
            throw SchemaError("constraint file '" + path +
                              "' has a non-JSON line");
        // Either a bundle annotations line or a bare constraint record.
        if (record.contains("constraints")) {
            if (!iid.empty() && record.value("instruction_id", "") != iid)
                continue;
            for (const auto& entry : record["constraints"]) {
                Constraint c;
                c.id = entry.at("id").get<std::string>();
                c.text = entry.at("text").get<std::string>();
                c.ctype = parse_constraint_type(
                    entry.at("ctype").get<std::string>());
                constraints.push_back(std::move(c));
            }
        } else {
            Constraint c;
            c.id = record.at("id").get<std::string>();
            c.text = record.at("text").get<std::string>();
            if (record.contains("ctype"))
                c.ctype = parse_constraint_type(
                    record["ctype"].get<std::string>());
            constraints.push_back(std::move(c));
        }
    }
    return constraints;
}

inline std::string args_hash(const Json& args) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : args.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace detail

// Dispatch table for the image-producing tools, used by cmd_render.
inline std::map<std::string, std::vector<ImageBuffer>> render_tool_images(
    const RenderToolbox& render, const std::string& tool, const Json& args) {
    auto list = [&](const char* key) {
        std::vector<std::string> out;
        for (const auto& v : args.at(key)) out.push_back(v.get<std::string>());
        return out;
    };
    std::map<std::string, std::vector<ImageBuffer>> groups;
    if (tool == "get_topdown_scene") {
        groups["scene"] = {render.get_topdown_scene()};
    } else if (tool == "get_topdown_room") {
        std::string room = args.at("room_id").get<std::string>();
        groups[room] = {render.get_topdown_room(room)};
    } else if (tool == "get_frontview_object") {
        for (auto& [id, img] : render.get_frontview_object(list("object_ids")))
            groups[id] = {std::move(img)};
    } else if (tool == "get_wall_scene") {
        for (auto& [id, img] : render.get_wall_scene(list("wall_ids")))
            groups[id] = {std::move(img)};
    } else if (tool == "get_topdown_object") {
        groups = render.get_topdown_object(list("object_ids"));
    } else if (tool == "get_material_image") {
        for (auto& [name, img] :
             render.get_material_image(list("material_names")))
            groups[name] = {std::move(img)};
    } else if (tool == "get_multiview_rendered_object") {
        groups = render.get_multiview_rendered_object(list("object_ids"));
    } else if (tool == "get_spatial_relation") {
        std::vector<std::vector<std::string>> tuples;
        for (const auto& t : args.at("id_tuples")) {
            std::vector<std::string> tuple;
            for (const auto& v : t) tuple.push_back(v.get<std::string>());
            tuples.push_back(std::move(tuple));
        }
        for (auto& [tuple, img] : render.get_spatial_relation(tuples)) {
            std::string key;
            for (const auto& id : tuple) key += (key.empty() ? "" : "+") + id;
            groups[key] = {std::move(img)};
        }
    } else {
        throw UnknownToolError("'" + tool + "' does not produce images");
    }
    return groups;
}

inline int cmd_evaluate(const std::string& scene_path,
                        const std::string& instruction_text,
                        const std::string& constraints_path,
                        const RunConfig& config, std::ostream& out) {
    Scene scene = load_scene_file(scene_path);
    MaterialRegistry materials = materials_for(scene, scene_path);
    AssetRegistry assets = assets_for(scene, scene_path);
    auto gateway = make_gateway(config);

    PipelineConfig pcfg;
    pcfg.render.resolution = config.resolution;
    pcfg.render.asset_base_dir =
        std::filesystem::path(scene_path).parent_path().string();
    Pipeline pipeline(scene, materials, assets, *gateway, pcfg);

    std::vector<Constraint> constraints;
    if (!constraints_path.empty())
        constraints = detail::read_constraint_file(constraints_path, "");

    Instruction instruction{"cli", instruction_text};
    Json report_json;
    try {
        EvaluationReport report =
            pipeline.evaluate_scene(instruction, constraints);
        report_json = report_to_json(report);
    } catch (const EvaluationAborted& aborted) {
        report_json = aborted.partial;
        report_json["aborted"] = std::string(aborted.what());
        report_json["config"] = config_snapshot(config);
        if (!config.out_path.empty())
            detail::write_json_file(config.out_path, report_json);
        throw;
    }
    report_json["config"] = config_snapshot(config);
    if (!config.out_path.empty())
        detail::write_json_file(config.out_path, report_json);
    if (!config.dump_images_dir.empty()) {
        std::filesystem::create_directories(config.dump_images_dir);
        RenderToolbox render(scene, materials, assets, pcfg.render);
        write_png((std::filesystem::path(config.dump_images_dir) /
                   (scene.scene_id + "__overview.png"))
                      .string(),
                  render.get_topdown_scene());
    }

    out << "scene: " << scene.scene_id << "\n";
    for (const auto& entry : report_json["constraints"])
        out << "  [" << (entry.value("valid", false) ? "valid" : "INVALID")
            << "] " << entry["text"].get<std::string>() << "\n";
    out << "holistic: "
        << (report_json["holistic_valid"].get<bool>() ? "valid" : "invalid")
        << "\n";
    return 0;
}

inline int cmd_bench(const std::string& bundle_dir,
                     const std::string& scenes_dir, const RunConfig& config,
                     std::ostream& out) {
    namespace fs = std::filesystem;
    BenchmarkBundle bundle = load_bundle(bundle_dir);
    auto gateway = make_gateway(config);

    std::vector<EvaluationReport> reports;
    std::map<std::string, bool> holistic_by_instruction;
    for (const auto& instruction : bundle.instructions) {
        fs::path scene_path = fs::path(scenes_dir) / (instruction.id + ".json");
        EvaluationReport report;
        report.instruction_id = instruction.id;
        if (!fs::exists(scene_path)) {
            // No scene produced for this instruction: scored as a
            // holistic failure rather than aborting the whole run.
            out << "missing scene for " << instruction.id << "\n";
            report.holistic_valid = false;
            report.constraints = bundle.annotations[instruction.id];
            for (const auto& c : report.constraints)
                report.judgments.push_back(
                    {c.id, false, "no scene produced", {}});
        } else {
            Scene scene = load_scene_file(scene_path.string());
            MaterialRegistry materials =
                materials_for(scene, scene_path.string());
            AssetRegistry assets = assets_for(scene, scene_path.string());
            PipelineConfig pcfg;
            pcfg.render.resolution = config.resolution;
            Pipeline pipeline(scene, materials, assets, *gateway, pcfg);
            report = pipeline.evaluate_scene(instruction,
                                             bundle.annotations[instruction.id]);
        }
        holistic_by_instruction[instruction.id] = report.holistic_valid;
        reports.push_back(std::move(report));
    }

    SuccessRates rates = success_rates(reports);
    Json result;
    result["schema_version"] = 1;
    result["config"] = config_snapshot(config);
    result["holistic_sr"] = rates.holistic_sr;
    Json partial;
    partial["Floor Layout"] =
        rates.partial_by_type.count(ConstraintType::FloorLayout)
            ? rates.partial_by_type[ConstraintType::FloorLayout]
            : 0.0;
    partial["Material Selection"] =
        rates.partial_by_type.count(ConstraintType::MaterialSelection)
            ? rates.partial_by_type[ConstraintType::MaterialSelection]
            : 0.0;
    partial["Object Selection"] =
        rates.partial_by_type.count(ConstraintType::ObjectSelection)
            ? rates.partial_by_type[ConstraintType::ObjectSelection]
            : 0.0;
    partial["Object Placement"] =
        rates.partial_by_type.count(ConstraintType::ObjectPlacement)
            ? rates.partial_by_type[ConstraintType::ObjectPlacement]
            : 0.0;
    partial["Avg."] = rates.partial_avg;
    result["partial_sr"] = partial;

    Json buckets;
    for (const auto& [name, ids] : bucket_by_complexity(bundle)) {
        if (ids.empty()) continue;
        long valid = 0;
        for (const auto& id : ids)
            if (holistic_by_instruction[id]) ++valid;
        buckets[name] = double(valid) / ids.size();
    }
    result["holistic_sr_by_complexity"] = buckets;

    if (!config.out_path.empty())
        detail::write_json_file(config.out_path, result);
    out << result.dump(2) << "\n";
    return 0;
}

inline int cmd_agree(const std::string& reports_dir,
                     const std::string& labels_path, const RunConfig& config,
                     std::ostream& out) {
    namespace fs = std::filesystem;
    std::map<std::pair<std::string, std::string>, bool> labels;
    for (const auto& record : detail::read_jsonl(labels_path))
        labels[{record.at("instruction_id").get<std::string>(),
                record.at("constraint_id").get<std::string>()}] =
            record.at("value").get<bool>();

    std::vector<LabeledPair> holistic, partial;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(reports_dir))
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        Json report = Json::parse(read_file(file.string()));
        std::string iid = report.value("instruction_id", "");
        auto h = labels.find({iid, "holistic"});
        if (h != labels.end())
            holistic.push_back({report.value("holistic_valid", false),
                                h->second, LabelUnit::Instruction, {}});
        for (const auto& entry : report.value("constraints", Json::array())) {
            if (!entry.contains("valid")) continue;
            auto l = labels.find({iid, entry.value("id", "")});
            if (l == labels.end()) continue;
            partial.push_back({entry["valid"].get<bool>(), l->second,
                               LabelUnit::Constraint, {}});
        }
    }
    if (holistic.empty() && partial.empty())
        throw EmptyInputError("no report verdicts matched the labels");

    auto block = [](const std::vector<LabeledPair>& pairs) {
        Json j;
        if (pairs.empty()) return j;
        BinaryPrf prf = binary_prf(pairs);
        j["F1"] = prf.macro.f1;
        j["Recall"] = prf.macro.recall;
        j["Precision"] = prf.macro.precision;
        try {
            j["Cohen's kappa"] = cohen_kappa(pairs);
        } catch (const DegenerateMarginalsError&) {
            j["Cohen's kappa"] = nullptr;
        }
        j["pairs"] = pairs.size();
        return j;
    };
    Json result;
    result["schema_version"] = 1;
    result["config"] = config_snapshot(config);
    result["holistic"] = block(holistic);
    result["partial"] = block(partial);
    if (!config.out_path.empty())
        detail::write_json_file(config.out_path, result);
    out << result.dump(2) << "\n";
    return 0;
}

inline int cmd_plan_score(const std::string& predicted_path,
                          const std::string& gold_path,
                          const RunConfig& config, std::ostream& out) {
    auto load_plans = [](const std::string& path) {
        std::map<std::string, ToolPlan> plans;
        for (const auto& record : detail::read_jsonl(path)) {
            std::string cid = record.at("constraint_id").get<std::string>();
            plans[cid] = plan_from_json(record.at("plan"), cid);
        }
        return plans;
    };
    auto predicted = load_plans(predicted_path);
    auto gold = load_plans(gold_path);

    std::vector<PlanPair> pairs;
    double ged_sum = 0.0;
    for (const auto& [cid, gold_plan] : gold) {
        auto it = predicted.find(cid);
        if (it == predicted.end())
            throw ReferenceError("no predicted plan for constraint '" + cid +
                                 "'");
        PlanPair pair;
        pair.predicted = it->second;
        pair.gold = gold_plan;
        ged_sum += graph_edit_distance(pair.predicted, pair.gold);
        pairs.push_back(std::move(pair));
    }
    if (pairs.empty()) throw EmptyInputError("gold plan file is empty");

    Json result;
    result["schema_version"] = 1;
    result["config"] = config_snapshot(config);
    result["Tool F1"] = tool_f1(pairs);
    result["GED"] = ged_sum / pairs.size();
    try {
        result["Argument F1"] = argument_f1(pairs);
    } catch (const NoMatchedToolsError&) {
        result["Argument F1"] = nullptr;
    }
    if (!config.out_path.empty())
        detail::write_json_file(config.out_path, result);
    out << result.dump(2) << "\n";
    return 0;
}

inline int cmd_render(const std::string& scene_path, const std::string& tool,
                      const Json& args, const std::string& out_dir,
                      const RunConfig& config, std::ostream& out) {
    namespace fs = std::filesystem;
    Scene scene = load_scene_file(scene_path);
    MaterialRegistry materials = materials_for(scene, scene_path);
    AssetRegistry assets = assets_for(scene, scene_path);
    RenderConfig rcfg;
    rcfg.resolution = config.resolution;
    rcfg.asset_base_dir = fs::path(scene_path).parent_path().string();
    RenderToolbox render(scene, materials, assets, rcfg);

    require_tool(tool);
    auto groups = render_tool_images(render, tool, args);
    fs::create_directories(out_dir);
    std::string hash = detail::args_hash(args);
    int written = 0;
    for (const auto& [key, images] : groups) {
        std::string safe_key = key;
        for (char& c : safe_key)
            if (c == '/' || c == '|' || c == ' ') c = '_';
        for (size_t i = 0; i < images.size(); ++i) {
            std::string name = tool + "__" + hash;
            if (groups.size() > 1 || images.size() > 1)
                name += "__" + safe_key + "_" + std::to_string(i);
            fs::path target = fs::path(out_dir) / (name + ".png");
            write_png(target.string(), images[i]);
            out << target.string() << "\n";
            ++written;
        }
    }
    out << written << " image(s) written\n";
    return 0;
}

// Error-code to exit-status mapping shared by every subcommand. Exit
// status reflects run integrity only; verdicts live in the report.
inline int exit_code_for(const Error& e) {
    const std::string& code = e.code();
    if (code == "syntax_error" || code == "schema_error") return 2;
    if (code == "reference_error" || code == "geometry_error") return 3;
    if (code == "io_error" || code == "layout_error") return 4;
    if (code == "gateway_error" || code == "parse_error") return 5;
    return 1;
}

inline int report_error_and_exit_code(const std::exception& e,
                                      std::ostream& err) {
    Json record;
    record["error"] = "internal";
    record["message"] = e.what();
    if (const Error* known = dynamic_cast<const Error*>(&e))
        record["error"] = known->code();
    err << record.dump() << "\n";
    if (const Error* known = dynamic_cast<const Error*>(&e))
        return exit_code_for(*known);
    return 1;
}

}  // namespace scenejudge
