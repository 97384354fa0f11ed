#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "scenejudge/errors.hpp"
#include "scenejudge/gateway.hpp"
#include "scenejudge/tool_registry.hpp"
#include "scenejudge/toolbox_multimodal.hpp"
#include "scenejudge/toolbox_render.hpp"
#include "scenejudge/toolbox_text.hpp"

namespace scenejudge {

enum class ConstraintType {
    FloorLayout,
    MaterialSelection,
    ObjectSelection,
    ObjectPlacement,
};

inline std::string to_string(ConstraintType t) {
    switch (t) {
        case ConstraintType::FloorLayout: return "floor_layout";
        case ConstraintType::MaterialSelection: return "material_selection";
        case ConstraintType::ObjectSelection: return "object_selection";
        case ConstraintType::ObjectPlacement: return "object_placement";
    }
    return "floor_layout";
}

inline ConstraintType parse_constraint_type(const std::string& s) {
    if (s == "floor_layout") return ConstraintType::FloorLayout;
    if (s == "material_selection") return ConstraintType::MaterialSelection;
    if (s == "object_selection") return ConstraintType::ObjectSelection;
    if (s == "object_placement") return ConstraintType::ObjectPlacement;
    throw ParseError("'" + s + "' is not a constraint type");
}

inline const std::vector<ConstraintType>& all_constraint_types() {
    static const std::vector<ConstraintType> types = {
        ConstraintType::FloorLayout, ConstraintType::MaterialSelection,
        ConstraintType::ObjectSelection, ConstraintType::ObjectPlacement};
    return types;
}

struct Instruction {
    std::string id;
    std::string text;
};

struct Constraint {
    std::string id;
    std::string text;
    std::optional<ConstraintType> ctype;
    // Character range into the source instruction, when annotated.
    std::optional<std::pair<size_t, size_t>> source_span;
};

struct PlanNode {
    std::string node_id;
    std::string tool;
    std::vector<std::string> depends_on;
    // Fixture plans may pin arguments; the selector is skipped for them.
    std::optional<Json> preset_args;
};

struct ToolPlan {
    std::string constraint_id;
    std::vector<PlanNode> nodes;
    std::string rationale;
};

struct ToolOutput {
    std::string node_id;
    std::string tool;
    Json payload;
    std::map<std::string, std::vector<ImageBuffer>> image_groups;
    std::optional<std::string> error;
    bool skipped = false;

    bool ok() const { return !error.has_value(); }
};

struct ConstraintJudgment {
    std::string constraint_id;
    bool valid = false;
    std::string explanation;
    std::vector<std::string> evidence;
};

struct EvaluationReport {
    std::string instruction_id;
    std::string scene_id;
    std::vector<Constraint> constraints;
    std::vector<ConstraintJudgment> judgments;
    bool holistic_valid = false;
    std::string transcripts_ref;
    std::map<std::string, ToolPlan> plans;  // by constraint id
};

// Tools a plan may use for a given constraint category. List/info tools
// are always allowed for argument grounding.
inline const std::set<std::string>& allowed_tools(ConstraintType t) {
    static const std::map<ConstraintType, std::set<std::string>> table = [] {
        std::set<std::string> base;
        for (const auto& spec : tool_registry())
            if (spec.family == ToolFamily::IdListGeneration ||
                (spec.family == ToolFamily::InfoRetrieval &&
                 spec.category == ToolCategory::TextualReasoning))
                base.insert(spec.name);
        auto with = [&](std::initializer_list<const char*> extra) {
            std::set<std::string> s = base;
            for (const char* name : extra) s.insert(name);
            return s;
        };
        std::map<ConstraintType, std::set<std::string>> m;
        m[ConstraintType::FloorLayout] =
            with({"get_topdown_scene", "get_topdown_room", "get_topdown_object"});
        m[ConstraintType::MaterialSelection] =
            with({"get_material_image", "get_wall_scene",
                  "get_property_description", "get_property_verification"});
        m[ConstraintType::ObjectSelection] =
            with({"get_multiview_rendered_object", "get_frontview_object",
                  "get_object_match", "get_property_description",
                  "get_property_verification"});
        m[ConstraintType::ObjectPlacement] =
            with({"get_topdown_scene", "get_topdown_room", "get_topdown_object",
                  "get_spatial_relation", "get_frontview_object"});
        return m;
    }();
    return table.at(t);
}

// Structural and allow-list problems; an empty result means executable.
inline std::vector<std::string> validate_plan(const ToolPlan& plan,
                                              ConstraintType ctype) {
    std::vector<std::string> problems;
    if (plan.nodes.empty()) problems.push_back("plan has no nodes");
    const auto& allowed = allowed_tools(ctype);
    std::set<std::string> ids;
    for (const auto& node : plan.nodes) {
        if (node.node_id.empty()) problems.push_back("node with empty id");
        if (!ids.insert(node.node_id).second)
            problems.push_back("duplicate node id '" + node.node_id + "'");
        if (!find_tool(node.tool))
            problems.push_back("unknown tool '" + node.tool + "'");
        else if (!allowed.count(node.tool))
            problems.push_back("tool '" + node.tool + "' is not allowed for " +
                               to_string(ctype));
    }
    for (const auto& node : plan.nodes)
        for (const auto& dep : node.depends_on)
            if (!ids.count(dep))
                problems.push_back("node '" + node.node_id +
                                   "' depends on unknown node '" + dep + "'");

    // Kahn's algorithm; leftovers mean a cycle.
    std::map<std::string, int> indegree;
    std::map<std::string, std::vector<std::string>> dependents;
    for (const auto& node : plan.nodes) {
        indegree[node.node_id] += 0;
        for (const auto& dep : node.depends_on)
            if (ids.count(dep)) {
                ++indegree[node.node_id];
                dependents[dep].push_back(node.node_id);
            }
    }
    std::vector<std::string> ready;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) ready.push_back(id);
    size_t visited = 0;
    while (!ready.empty()) {
        std::string id = ready.back();
        ready.pop_back();
        ++visited;
        for (const auto& next : dependents[id])
            if (--indegree[next] == 0) ready.push_back(next);
    }
    if (visited < indegree.size()) problems.push_back("plan contains a cycle");
    return problems;
}

inline Json plan_to_json(const ToolPlan& plan) {
    Json j;
    j["constraint_id"] = plan.constraint_id;
    j["rationale"] = plan.rationale;
    j["nodes"] = Json::array();
    for (const auto& node : plan.nodes) {
        Json n;
        n["node_id"] = node.node_id;
        n["tool"] = node.tool;
        n["depends_on"] = node.depends_on;
        if (node.preset_args) n["args"] = *node.preset_args;
        j["nodes"].push_back(std::move(n));
    }
    return j;
}

inline ToolPlan plan_from_json(const Json& j, const std::string& constraint_id) {
    ToolPlan plan;
    plan.constraint_id = constraint_id;
    if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array())
        throw ParseError("plan payload has no node array");
    plan.rationale = j.value("rationale", "");
    for (const auto& n : j["nodes"]) {
        PlanNode node;
        node.node_id = n.value("node_id", "");
        node.tool = n.value("tool", "");
        if (n.contains("depends_on"))
            for (const auto& d : n["depends_on"])
                node.depends_on.push_back(d.get<std::string>());
        if (n.contains("args")) node.preset_args = n["args"];
        plan.nodes.push_back(std::move(node));
    }
    return plan;
}

inline Json report_to_json(const EvaluationReport& report) {
    Json j;
    j["schema_version"] = 1;
    j["instruction_id"] = report.instruction_id;
    j["scene_id"] = report.scene_id;
    j["holistic_valid"] = report.holistic_valid;
    j["constraints"] = Json::array();
    for (size_t i = 0; i < report.constraints.size(); ++i) {
        const Constraint& c = report.constraints[i];
        Json entry;
        entry["id"] = c.id;
        entry["text"] = c.text;
        entry["ctype"] = c.ctype ? to_string(*c.ctype) : "unclassified";
        if (i < report.judgments.size()) {
            entry["valid"] = report.judgments[i].valid;
            entry["explanation"] = report.judgments[i].explanation;
            entry["evidence"] = report.judgments[i].evidence;
        }
        j["constraints"].push_back(std::move(entry));
    }
    j["plans"] = Json::object();
    for (const auto& [cid, plan] : report.plans)
        j["plans"][cid] = plan_to_json(plan);
    j["transcripts_ref"] = report.transcripts_ref;
    return j;
}

// Raised when a multi-constraint run dies mid-way; carries everything
// judged so far.
struct EvaluationAborted : Error {
    Json partial;
    EvaluationAborted(const std::string& cause, Json partial_report)
        : Error("evaluation_aborted", cause), partial(std::move(partial_report)) {}
};

namespace detail {

inline ImageBuffer rotate90(const ImageBuffer& img) {
    ImageBuffer out(img.height, img.width);
    out.label = img.label;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            out.set(img.height - 1 - y, x, img.at(x, y));
    return out;
}

}  // namespace detail

struct PipelineConfig {
    RenderConfig render;
    bool parallel_tools = true;
    int plan_attempts = 3;
    int argument_attempts = 3;
};

// Four-step evaluation loop: constraints are judged one at a time with
// earlier explanations threaded forward; only tool nodes parallelize.
class Pipeline {
public:
    Pipeline(const Scene& scene, const MaterialRegistry& materials,
             const AssetRegistry& assets, ModelGateway& gateway,
             PipelineConfig config = {})
        : scene_(scene),
          gateway_(gateway),
          config_(std::move(config)),
          render_(scene, materials, assets, config_.render),
          multimodal_(gateway) {}

    std::vector<Constraint> identify_constraints(const Instruction& instruction) {
        if (instruction.text.empty())
            throw PreconditionError("instruction text is empty");
        ChatRequest req;
        req.template_id = "constraint_identification";
        req.variables = {{"instruction", instruction.text}};
        Json answer = gateway_.chat(req);
        if (!answer.is_array())
            throw ParseError("constraint identification must return an array");
        std::vector<Constraint> constraints;
        for (const auto& item : answer) {
            std::string text = item.is_string() ? item.get<std::string>()
                                                : item.value("text", "");
            if (text.empty())
                throw ParseError("constraint entry without text");
            Constraint c;
            c.id = "c" + std::to_string(constraints.size() + 1);
            c.text = text;
            constraints.push_back(std::move(c));
        }
        if (constraints.empty())
            throw ParseError("instruction yielded no constraints");
        return constraints;
    }

    ConstraintType classify_constraint(const std::string& text) {
        if (text.empty()) throw PreconditionError("constraint text is empty");
        ChatRequest req;
        req.template_id = "constraint_classification";
        req.variables = {{"constraint", text}};
        Json answer = gateway_.chat(req);
        return parse_constraint_type(answer.value("type", ""));
    }

    ToolPlan plan_tools(const Constraint& constraint,
                        const std::vector<ConstraintJudgment>& priors) {
        if (!constraint.ctype)
            throw PreconditionError("constraint '" + constraint.id +
                                    "' has no type; classify it first");
        std::string allowed;
        for (const auto& name : allowed_tools(*constraint.ctype))
            allowed += "- " + name + "\n";

        ChatRequest req;
        req.template_id = "planning";
        req.variables = {{"constraint_type", to_string(*constraint.ctype)},
                         {"constraint", constraint.text},
                         {"allowed_tools", allowed},
                         {"prior_explanations", priors_text(priors)}};
        std::vector<std::string> problems;
        for (int attempt = 0; attempt < config_.plan_attempts; ++attempt) {
            Json answer = gateway_.chat(req);
            ToolPlan plan;
            try {
                plan = plan_from_json(answer, constraint.id);
            } catch (const ParseError& e) {
                problems = {e.what()};
                continue;
            }
            problems = validate_plan(plan, *constraint.ctype);
            if (problems.empty()) return plan;
        }
        std::string detail;
        for (const auto& p : problems) detail += p + "; ";
        throw PlanInvalidError("no valid plan after " +
                               std::to_string(config_.plan_attempts) +
                               " attempts: " + detail);
    }

    Json select_arguments(const PlanNode& node, const Constraint& constraint,
                          const ToolPlan& plan,
                          const std::map<std::string, ToolOutput>& prior_outputs,
                          const std::vector<ConstraintJudgment>& priors) {
        const ToolSpec& spec = require_tool(node.tool);
        if (node.preset_args) {
            if (auto problem = argument_problem(spec, *node.preset_args))
                throw ArgumentInvalidError("pinned arguments for '" +
                                           node.node_id + "': " + *problem);
            return *node.preset_args;
        }
        if (spec.args.empty()) return Json::object();

        Json schema = Json::array();
        for (const auto& arg : spec.args) {
            Json a;
            a["name"] = arg.name;
            a["type"] = arg.type == ArgSpec::Type::String       ? "string"
                        : arg.type == ArgSpec::Type::StringList ? "string list"
                                                                : "id tuple list";
            a["required"] = arg.required;
            schema.push_back(std::move(a));
        }

        std::string outputs_text;
        for (const auto& dep : node.depends_on) {
            auto it = prior_outputs.find(dep);
            if (it == prior_outputs.end())
                throw PreconditionError("dependency '" + dep +
                                        "' has not executed");
            outputs_text += dep + " (" + it->second.tool + "): " +
                            (it->second.ok() ? it->second.payload.dump()
                                             : "error: " + *it->second.error) +
                            "\n";
        }
        if (outputs_text.empty()) outputs_text = "(none)";

        ChatRequest req;
        req.template_id = selector_template_for(spec.family);
        req.variables = {{"tool", node.tool},
                         {"argument_schema", schema.dump()},
                         {"constraint", constraint.text},
                         {"rationale", plan.rationale},
                         {"prior_outputs", outputs_text},
                         {"prior_explanations", priors_text(priors)}};
        std::optional<std::string> problem;
        for (int attempt = 0; attempt < config_.argument_attempts; ++attempt) {
            Json args = gateway_.chat(req);
            problem = argument_problem(spec, args);
            if (!problem) return args;
        }
        throw ArgumentInvalidError("no valid arguments for node '" +
                                   node.node_id + "' (" + node.tool +
                                   ") after " +
                                   std::to_string(config_.argument_attempts) +
                                   " attempts: " + *problem);
    }

    std::map<std::string, ToolOutput> execute_plan(
        const ToolPlan& plan, const Constraint& constraint,
        const std::vector<ConstraintJudgment>& priors) {
        if (!constraint.ctype)
            throw PreconditionError("constraint must be typed before execution");
        {
            auto problems = validate_plan(plan, *constraint.ctype);
            if (!problems.empty())
                throw PlanInvalidError("refusing to execute: " + problems[0]);
        }

        std::map<std::string, ToolOutput> results;
        std::mutex results_mutex;
        std::set<std::string> done;
        while (done.size() < plan.nodes.size()) {
            // A wave is every node whose dependencies are all settled.
            std::vector<const PlanNode*> wave;
            for (const auto& node : plan.nodes) {
                if (done.count(node.node_id)) continue;
                bool ready = true;
                for (const auto& dep : node.depends_on)
                    if (!done.count(dep)) ready = false;
                if (ready) wave.push_back(&node);
            }

            auto run_one = [&](const PlanNode& node) {
                ToolOutput out = run_node(node, constraint, plan, results, priors);
                std::lock_guard<std::mutex> lock(results_mutex);
                results[node.node_id] = std::move(out);
            };
            if (config_.parallel_tools && wave.size() > 1) {
                std::vector<std::thread> threads;
                for (const PlanNode* node : wave)
                    threads.emplace_back([&, node] { run_one(*node); });
                for (auto& t : threads) t.join();
            } else {
                for (const PlanNode* node : wave) run_one(*node);
            }
            for (const PlanNode* node : wave) done.insert(node->node_id);
        }
        return results;
    }

    ConstraintJudgment validate_constraint(
        const Constraint& constraint, const ToolPlan& plan,
        const std::map<std::string, ToolOutput>& outputs,
        const std::vector<ConstraintJudgment>& priors) {
        if (!constraint.ctype)
            throw PreconditionError("constraint must be typed before validation");
        ConstraintJudgment judgment;
        judgment.constraint_id = constraint.id;
        for (const auto& node : plan.nodes)
            judgment.evidence.push_back(node.node_id);

        bool any_usable = false;
        std::string outputs_text;
        std::vector<ImageBuffer> images;
        for (const auto& node : plan.nodes) {
            const ToolOutput& out = outputs.at(node.node_id);
            if (out.ok()) {
                any_usable = true;
                outputs_text += node.node_id + " (" + node.tool + "): " +
                                out.payload.dump() + "\n";
                for (const auto& [key, group] : out.image_groups)
                    for (const auto& img : group) {
                        images.push_back(img);
                        if (images.back().label.empty())
                            images.back().label = key;
                    }
            } else {
                outputs_text += node.node_id + " (" + node.tool +
                                "): error: " + *out.error + "\n";
            }
        }
        if (!any_usable) {
            judgment.valid = false;
            judgment.explanation =
                "cannot verify the constraint: every planned tool failed (" +
                outputs_text + ")";
            return judgment;
        }
        // The validator always sees at least an overview image.
        if (images.empty()) images.push_back(render_.get_topdown_scene());

        ChatRequest req;
        req.template_id = validation_template(*constraint.ctype);
        req.variables = {{"constraint", constraint.text},
                         {"tool_outputs", outputs_text},
                         {"prior_explanations", priors_text(priors)}};
        req.images = std::move(images);
        Json answer = gateway_.chat(req);
        if (!answer.contains("valid") || !answer["valid"].is_boolean())
            throw ParseError("validation answer lacks a boolean 'valid'");
        judgment.valid = answer["valid"].get<bool>();
        judgment.explanation = answer.value("explanation", "");
        if (judgment.explanation.empty())
            throw ParseError("validation answer lacks an explanation");
        return judgment;
    }

    // Pre-annotated constraints skip Step 1 (benchmark mode); untyped
    // entries are still classified.
    EvaluationReport evaluate_scene(const Instruction& instruction,
                                    std::vector<Constraint> constraints = {}) {
        EvaluationReport report;
        report.instruction_id = instruction.id;
        report.scene_id = scene_.scene_id;
        report.transcripts_ref = gateway_.config().transcript_path;
        try {
            if (constraints.empty())
                constraints = identify_constraints(instruction);
            for (auto& c : constraints)
                if (!c.ctype) c.ctype = classify_constraint(c.text);
            report.constraints = constraints;

            for (const auto& constraint : constraints) {
                ToolPlan plan = plan_tools(constraint, report.judgments);
                auto outputs = execute_plan(plan, constraint, report.judgments);
                ConstraintJudgment judgment = validate_constraint(
                    constraint, plan, outputs, report.judgments);
                report.plans[constraint.id] = std::move(plan);
                report.judgments.push_back(std::move(judgment));
            }
        } catch (const std::exception& e) {
            report.holistic_valid = false;
            throw EvaluationAborted(e.what(), report_to_json(report));
        }
        report.holistic_valid = true;
        for (const auto& j : report.judgments)
            report.holistic_valid = report.holistic_valid && j.valid;
        return report;
    }

    // Whole-scene judge over four rotated overview images; one vote per
    // sample, ties break to false.
    EvaluationReport run_vlm_judge_baseline(
        const Instruction& instruction, int samples = 3,
        std::vector<Constraint> constraints = {}) {
        if (samples < 1) throw PreconditionError("samples must be >= 1");
        EvaluationReport report;
        report.instruction_id = instruction.id;
        report.scene_id = scene_.scene_id;
        report.transcripts_ref = gateway_.config().transcript_path;
        if (constraints.empty())
            constraints = identify_constraints(instruction);
        report.constraints = constraints;

        std::vector<ImageBuffer> views;
        views.push_back(render_.get_topdown_scene());
        for (int i = 1; i < 4; ++i)
            views.push_back(detail::rotate90(views.back()));
        for (int i = 0; i < 4; ++i)
            views[i].label = "corner_" + std::to_string(i + 1);

        report.holistic_valid = true;
        for (const auto& constraint : constraints) {
            int yes = 0;
            std::string explanation;
            for (int s = 1; s <= samples; ++s) {
                ChatRequest req;
                req.template_id = "vlm_judge_baseline";
                req.variables = {{"constraint", constraint.text},
                                 {"sample", std::to_string(s)}};
                req.images = views;
                Json answer = gateway_.chat(req);
                if (answer.value("valid", false)) ++yes;
                explanation = answer.value("explanation", explanation);
            }
            ConstraintJudgment judgment;
            judgment.constraint_id = constraint.id;
            judgment.valid = 2 * yes > samples;
            judgment.explanation = explanation.empty()
                                       ? "majority vote over samples"
                                       : explanation;
            report.holistic_valid = report.holistic_valid && judgment.valid;
            report.judgments.push_back(std::move(judgment));
        }
        return report;
    }

    const RenderToolbox& renderer() const { return render_; }

private:
    static std::string priors_text(const std::vector<ConstraintJudgment>& priors) {
        if (priors.empty()) return "(none)";
        std::string out;
        for (const auto& j : priors)
            out += j.constraint_id + " (" + (j.valid ? "valid" : "invalid") +
                   "): " + j.explanation + "\n";
        return out;
    }

    static std::string validation_template(ConstraintType t) {
        switch (t) {
            case ConstraintType::FloorLayout: return "validation_FL";
            case ConstraintType::MaterialSelection: return "validation_MS";
            case ConstraintType::ObjectSelection: return "validation_OS";
            case ConstraintType::ObjectPlacement: return "validation_OP";
        }
        return "validation_FL";
    }

    // nullopt means the arguments are usable as given.
    std::optional<std::string> argument_problem(const ToolSpec& spec,
                                                const Json& args) const {
        if (!args.is_object()) return "arguments must be a JSON object";
        for (const auto& [key, value] : args.items()) {
            const ArgSpec* arg = nullptr;
            for (const auto& a : spec.args)
                if (a.name == key) arg = &a;
            if (!arg) return "unexpected argument '" + key + "'";
            switch (arg->type) {
                case ArgSpec::Type::String:
                    if (!value.is_string()) return "'" + key + "' must be a string";
                    break;
                case ArgSpec::Type::StringList:
                    if (!value.is_array()) return "'" + key + "' must be a list";
                    for (const auto& v : value)
                        if (!v.is_string())
                            return "'" + key + "' must hold strings";
                    break;
                case ArgSpec::Type::TupleList:
                    if (!value.is_array()) return "'" + key + "' must be a list";
                    for (const auto& t : value) {
                        if (!t.is_array() || t.size() < 2)
                            return "'" + key + "' tuples need >= 2 members";
                        for (const auto& v : t)
                            if (!v.is_string())
                                return "'" + key + "' tuples hold id strings";
                    }
                    break;
            }
        }
        for (const auto& a : spec.args)
            if (a.required && !args.contains(a.name))
                return "missing required argument '" + a.name + "'";
        return grounding_problem(spec, args);
    }

    // Ids must resolve against the scene; material names against the
    // registry the renderer was built with.
    std::optional<std::string> grounding_problem(const ToolSpec& spec,
                                                 const Json& args) const {
        auto exists = [&](const std::string& id) {
            return detail::kind_of_id(scene_, id).has_value();
        };
        auto check_ids = [&](const Json& list, std::optional<ComponentKind> kind)
            -> std::optional<std::string> {
            for (const auto& v : list) {
                std::string id = v.get<std::string>();
                auto actual = detail::kind_of_id(scene_, id);
                if (!actual) return "'" + id + "' is not in the scene";
                if (kind && *actual != *kind)
                    return "'" + id + "' is a " + to_string(*actual) + ", not a " +
                           to_string(*kind);
            }
            return std::nullopt;
        };
        for (const auto& [key, value] : args.items()) {
            std::optional<std::string> problem;
            if (key == "ids") {
                problem = check_ids(value, spec.kind);
            } else if (key == "room_ids") {
                problem = check_ids(value, ComponentKind::Room);
            } else if (key == "room_id") {
                problem = check_ids(Json::array({value}), ComponentKind::Room);
            } else if (key == "wall_ids") {
                problem = check_ids(value, ComponentKind::Wall);
            } else if (key == "object_ids") {
                problem = check_ids(value, ComponentKind::Object);
            } else if (key == "subject_ids") {
                for (const auto& v : value)
                    if (!exists(v.get<std::string>()))
                        problem = "'" + v.get<std::string>() +
                                  "' is not in the scene";
            } else if (key == "subject_id") {
                if (!exists(value.get<std::string>()))
                    problem = "'" + value.get<std::string>() +
                              "' is not in the scene";
            } else if (key == "id_tuples") {
                for (const auto& t : value)
                    for (const auto& v : t)
                        if (!exists(v.get<std::string>()))
                            problem = "'" + v.get<std::string>() +
                                      "' is not in the scene";
            }
            if (problem) return problem;
        }
        return std::nullopt;
    }

    ToolOutput run_node(const PlanNode& node, const Constraint& constraint,
                        const ToolPlan& plan,
                        const std::map<std::string, ToolOutput>& results,
                        const std::vector<ConstraintJudgment>& priors) {
        ToolOutput out;
        out.node_id = node.node_id;
        out.tool = node.tool;
        for (const auto& dep : node.depends_on) {
            const ToolOutput& upstream = results.at(dep);
            if (!upstream.ok()) {
                out.skipped = true;
                out.error = "skipped: dependency '" + dep + "' failed";
                return out;
            }
        }
        try {
            Json args = select_arguments(node, constraint, plan, results, priors);
            invoke_tool(node, args, results, out);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        return out;
    }

    void invoke_tool(const PlanNode& node, const Json& args,
                     const std::map<std::string, ToolOutput>& results,
                     ToolOutput& out) {
        const ToolSpec& spec = require_tool(node.tool);
        auto string_list = [&](const std::string& key) {
            std::vector<std::string> v;
            if (args.contains(key))
                for (const auto& s : args[key]) v.push_back(s.get<std::string>());
            return v;
        };
        // Rendered views produced by dependency nodes, keyed by subject.
        auto dep_images = [&]() {
            std::map<std::string, std::vector<ImageBuffer>> groups;
            for (const auto& dep : node.depends_on) {
                const ToolOutput& upstream = results.at(dep);
                for (const auto& [key, imgs] : upstream.image_groups)
                    for (const auto& img : imgs) groups[key].push_back(img);
            }
            return groups;
        };

        if (spec.category == ToolCategory::TextualReasoning) {
            if (spec.family == ToolFamily::IdListGeneration) {
                std::optional<std::vector<std::string>> rooms;
                if (args.contains("room_ids")) rooms = string_list("room_ids");
                out.payload = Json(list_components(scene_, *spec.kind, rooms));
            } else {
                out.payload =
                    Json(get_component_info(scene_, *spec.kind, string_list("ids")));
            }
            return;
        }

        if (spec.category == ToolCategory::EnvironmentInteraction) {
            if (node.tool == "get_topdown_scene") {
                out.image_groups["scene"] = {render_.get_topdown_scene()};
            } else if (node.tool == "get_topdown_room") {
                std::string room = args.at("room_id").get<std::string>();
                out.image_groups[room] = {render_.get_topdown_room(room)};
            } else if (node.tool == "get_frontview_object") {
                for (auto& [id, img] :
                     render_.get_frontview_object(string_list("object_ids")))
                    out.image_groups[id] = {std::move(img)};
            } else if (node.tool == "get_wall_scene") {
                for (auto& [id, img] :
                     render_.get_wall_scene(string_list("wall_ids")))
                    out.image_groups[id] = {std::move(img)};
            } else if (node.tool == "get_topdown_object") {
                out.image_groups =
                    render_.get_topdown_object(string_list("object_ids"));
            } else if (node.tool == "get_material_image") {
                for (auto& [name, img] :
                     render_.get_material_image(string_list("material_names")))
                    out.image_groups[name] = {std::move(img)};
            } else if (node.tool == "get_multiview_rendered_object") {
                out.image_groups = render_.get_multiview_rendered_object(
                    string_list("object_ids"));
            } else {  // get_spatial_relation
                std::vector<std::vector<std::string>> tuples;
                for (const auto& t : args.at("id_tuples")) {
                    std::vector<std::string> tuple;
                    for (const auto& v : t) tuple.push_back(v.get<std::string>());
                    tuples.push_back(std::move(tuple));
                }
                for (auto& [tuple, img] : render_.get_spatial_relation(tuples)) {
                    std::string key;
                    for (const auto& id : tuple)
                        key += (key.empty() ? "" : "+") + id;
                    out.image_groups[key] = {std::move(img)};
                }
            }
            Json index = Json::object();
            for (const auto& [key, imgs] : out.image_groups)
                index[key] = imgs.size();
            out.payload = Json{{"images", index}};
            return;
        }

        // Multimodal tools read the views their dependencies rendered.
        auto groups = dep_images();
        auto views_for = [&](const std::string& id) {
            auto it = groups.find(id);
            if (it == groups.end() || it->second.empty())
                throw EmptyInputError("no rendered views for '" + id +
                                      "' among this node's dependencies");
            return it->second;
        };
        if (node.tool == "get_object_match") {
            std::map<std::string, std::vector<ImageBuffer>> subjects;
            for (const auto& id : string_list("object_ids"))
                subjects[id] = views_for(id);
            out.payload = Json(multimodal_.get_object_match(subjects));
        } else if (node.tool == "get_property_description") {
            auto ids = string_list("subject_ids");
            std::map<std::string, std::vector<ImageBuffer>> subjects;
            for (const auto& id : ids) subjects[id] = views_for(id);
            Json payload = Json::object();
            for (auto& [id, report] : multimodal_.get_property_description(
                     ids, subjects, args.value("metadata", ""))) {
                payload[id] = Json{{"attributes", report.attributes},
                                   {"reasoning", report.reasoning}};
            }
            out.payload = std::move(payload);
        } else {  // get_property_verification
            std::string id = args.at("subject_id").get<std::string>();
            PropertyReport report = multimodal_.get_property_verification(
                id, views_for(id),
                args.at("instruction_fragment").get<std::string>());
            out.payload = Json{{"subject_id", id},
                               {"attributes", report.attributes},
                               {"reasoning", report.reasoning}};
        }
    }

    const Scene& scene_;
    ModelGateway& gateway_;
    PipelineConfig config_;
    RenderToolbox render_;
    MultimodalToolbox multimodal_;
};

}  // namespace scenejudge
