#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "scenejudge/pipeline.hpp"

using namespace scenejudge;

namespace {

std::string fenced(const std::string& body) {
    return "```json\n" + body + "\n```";
}

const Scene& fixture_scene() {
    static Scene scene =
        load_scene_file(std::string(SJ_FIXTURE_DIR) + "/scene_three_rooms.json");
    return scene;
}

const MaterialRegistry& fixture_materials() {
    static MaterialRegistry reg =
        load_material_registry(std::string(SJ_FIXTURE_DIR) + "/materials.json");
    return reg;
}

const AssetRegistry& fixture_assets() {
    static AssetRegistry reg =
        load_asset_registry(std::string(SJ_FIXTURE_DIR) + "/assets.json");
    return reg;
}

PipelineConfig small_config(bool parallel = true) {
    PipelineConfig config;
    config.render.resolution = 335;
    config.parallel_tools = parallel;
    return config;
}

PlanNode pinned(const std::string& id, const std::string& tool, Json args,
                std::vector<std::string> deps = {}) {
    PlanNode node;
    node.node_id = id;
    node.tool = tool;
    node.depends_on = std::move(deps);
    node.preset_args = std::move(args);
    return node;
}

}  // namespace

TEST_CASE("constraint classification maps phrases to the four types") {
    auto mock = std::make_shared<MockBackend>();
    auto entry = [&](const std::string& text, const std::string& type) {
        mock->script("constraint_classification", {{"constraint", text}},
                     fenced(R"({"type": ")" + type + R"("})"));
    };
    entry("The kitchen connects to the hallway through a door", "floor_layout");
    entry("The floor is dark oak", "material_selection");
    entry("The lamp sits on the desk", "object_placement");
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());

    CHECK(pipe.classify_constraint(
              "The kitchen connects to the hallway through a door") ==
          ConstraintType::FloorLayout);
    CHECK(pipe.classify_constraint("The floor is dark oak") ==
          ConstraintType::MaterialSelection);
    CHECK(pipe.classify_constraint("The lamp sits on the desk") ==
          ConstraintType::ObjectPlacement);
    CHECK_THROWS_AS(pipe.classify_constraint(""), PreconditionError);
}

TEST_CASE("constraint identification rewrites cross-references") {
    auto mock = std::make_shared<MockBackend>();
    mock->script(
        "constraint_identification",
        {{"instruction", "A bedroom with a red floor. A white bed in it."}},
        fenced(R"([{"text": "The bedroom has a red floor"},
                   {"text": "The bed in the bedroom with the red floor is white"}])"));
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());

    auto constraints = pipe.identify_constraints(
        {"i1", "A bedroom with a red floor. A white bed in it."});
    REQUIRE(constraints.size() == 2);
    CHECK(constraints[0].id == "c1");
    CHECK(constraints[1].text ==
          "The bed in the bedroom with the red floor is white");
    CHECK_THROWS_AS(pipe.identify_constraints({"i2", ""}), PreconditionError);
}

TEST_CASE("allow lists keep irrelevant tools out of plans") {
    for (ConstraintType t : all_constraint_types()) {
        const auto& allowed = allowed_tools(t);
        // Grounding tools are available everywhere.
        CHECK(allowed.count("get_room_list") == 1);
        CHECK(allowed.count("get_object_info") == 1);
    }
    CHECK(allowed_tools(ConstraintType::ObjectPlacement)
              .count("get_spatial_relation") == 1);
    CHECK(allowed_tools(ConstraintType::FloorLayout)
              .count("get_spatial_relation") == 0);
    CHECK(allowed_tools(ConstraintType::MaterialSelection)
              .count("get_material_image") == 1);
    CHECK(allowed_tools(ConstraintType::ObjectSelection)
              .count("get_material_image") == 0);
    CHECK(allowed_tools(ConstraintType::ObjectSelection)
              .count("get_multiview_rendered_object") == 1);
}

TEST_CASE("plan validation catches structural defects") {
    ToolPlan plan;
    plan.constraint_id = "c1";
    plan.nodes.push_back(pinned("a", "get_room_list", Json::object()));

    SECTION("valid single node") {
        CHECK(validate_plan(plan, ConstraintType::FloorLayout).empty());
    }
    SECTION("unknown tool") {
        plan.nodes.push_back(pinned("b", "get_teleporter", Json::object()));
        auto problems = validate_plan(plan, ConstraintType::FloorLayout);
        REQUIRE_FALSE(problems.empty());
        CHECK(problems[0].find("get_teleporter") != std::string::npos);
    }
    SECTION("off the allow list") {
        plan.nodes.push_back(
            pinned("b", "get_spatial_relation", Json::object()));
        CHECK_FALSE(validate_plan(plan, ConstraintType::FloorLayout).empty());
        CHECK(validate_plan(plan, ConstraintType::ObjectPlacement).empty());
    }
    SECTION("unknown dependency") {
        plan.nodes[0].depends_on = {"ghost"};
        CHECK_FALSE(validate_plan(plan, ConstraintType::FloorLayout).empty());
    }
    SECTION("cycle") {
        plan.nodes.push_back(
            pinned("b", "get_room_info", Json::object(), {"c"}));
        plan.nodes.push_back(
            pinned("c", "get_room_info", Json::object(), {"b"}));
        auto problems = validate_plan(plan, ConstraintType::FloorLayout);
        bool cyclic = false;
        for (const auto& p : problems)
            if (p.find("cycle") != std::string::npos) cyclic = true;
        CHECK(cyclic);
    }
    SECTION("empty plan") {
        plan.nodes.clear();
        CHECK_FALSE(validate_plan(plan, ConstraintType::FloorLayout).empty());
    }
}

TEST_CASE("planning accepts a valid scripted plan") {
    auto mock = std::make_shared<MockBackend>();
    MockBackend::SubstringRule rule;
    rule.template_id = "planning";
    rule.contains = {{"constraint", "The bed faces the lamp"}};
    rule.responses = {fenced(
        R"({"rationale": "list then render",
            "nodes": [{"node_id": "n1", "tool": "get_object_list"},
                      {"node_id": "n2", "tool": "get_object_info",
                       "depends_on": ["n1"]},
                      {"node_id": "n3", "tool": "get_spatial_relation",
                       "depends_on": ["n2"]}]})")};
    mock->script_contains(rule);
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());

    Constraint c{"c1", "The bed faces the lamp",
                 ConstraintType::ObjectPlacement};
    ToolPlan plan = pipe.plan_tools(c, {});
    REQUIRE(plan.nodes.size() == 3);
    CHECK(plan.nodes[2].depends_on == std::vector<std::string>{"n2"});
    CHECK(plan.constraint_id == "c1");

    Constraint untyped{"c2", "something", std::nullopt};
    CHECK_THROWS_AS(pipe.plan_tools(untyped, {}), PreconditionError);
}

TEST_CASE("persistent cyclic plans exhaust the retry budget") {
    auto mock = std::make_shared<MockBackend>();
    MockBackend::SubstringRule rule;
    rule.template_id = "planning";
    rule.responses = {fenced(
        R"({"rationale": "r",
            "nodes": [{"node_id": "a", "tool": "get_room_list",
                       "depends_on": ["b"]},
                      {"node_id": "b", "tool": "get_room_info",
                       "depends_on": ["a"]}]})")};
    mock->script_contains(rule);
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());

    Constraint c{"c1", "anything", ConstraintType::FloorLayout};
    CHECK_THROWS_AS(pipe.plan_tools(c, {}), PlanInvalidError);
    CHECK(gateway.transcripts().size() == 3);  // one per attempt
}

TEST_CASE("a bad first plan is repaired by a later attempt") {
    auto mock = std::make_shared<MockBackend>();
    MockBackend::SubstringRule rule;
    rule.template_id = "planning";
    rule.responses = {
        fenced(R"({"rationale": "r", "nodes": [{"node_id": "a",
                   "tool": "get_spatial_relation"}]})"),  // off-list for FL
        fenced(R"({"rationale": "r", "nodes": [{"node_id": "a",
                   "tool": "get_topdown_scene"}]})")};
    mock->script_contains(rule);
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());

    Constraint c{"c1", "rooms are adjacent", ConstraintType::FloorLayout};
    ToolPlan plan = pipe.plan_tools(c, {});
    REQUIRE(plan.nodes.size() == 1);
    CHECK(plan.nodes[0].tool == "get_topdown_scene");
}

TEST_CASE("argument selection grounds ids against prior outputs") {
    auto mock = std::make_shared<MockBackend>();
    MockBackend::SubstringRule rule;
    rule.template_id = "argument_selector_info";
    rule.contains = {{"constraint", "the bed is white"}};
    rule.responses = {fenced(R"({"ids": ["bed|0"]})")};
    mock->script_contains(rule);
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());

    ToolPlan plan;
    plan.constraint_id = "c1";
    plan.rationale = "inspect the bed";
    plan.nodes.push_back(
        pinned("n1", "get_object_list", Json{{"room_ids", {"bedroom|1"}}}));
    PlanNode info;
    info.node_id = "n2";
    info.tool = "get_object_info";
    info.depends_on = {"n1"};
    plan.nodes.push_back(info);

    Constraint c{"c1", "the bed is white", ConstraintType::ObjectSelection};
    std::map<std::string, ToolOutput> priors;
    ToolOutput listed;
    listed.node_id = "n1";
    listed.tool = "get_object_list";
    listed.payload = Json{{"bedroom|1", {"bed|0", "lamp|2"}}};
    priors["n1"] = listed;

    Json args = pipe.select_arguments(info, c, plan, priors, {});
    CHECK(args == Json{{"ids", {"bed|0"}}});
    // The selector saw the dependency's output.
    CHECK(gateway.transcripts().back().prompt.find("lamp|2") !=
          std::string::npos);
}

TEST_CASE("ungrounded selector answers become ArgumentInvalidError") {
    auto mock = std::make_shared<MockBackend>();
    MockBackend::SubstringRule rule;
    rule.template_id = "argument_selector_info";
    rule.responses = {fenced(R"({"ids": ["ghost|9"]})")};
    mock->script_contains(rule);
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());

    ToolPlan plan;
    plan.constraint_id = "c1";
    PlanNode node;
    node.node_id = "n1";
    node.tool = "get_object_info";
    plan.nodes.push_back(node);
    Constraint c{"c1", "x", ConstraintType::ObjectSelection};
    CHECK_THROWS_AS(pipe.select_arguments(node, c, plan, {}, {}),
                    ArgumentInvalidError);
    CHECK(gateway.transcripts().size() == 3);  // selector retries
}

TEST_CASE("zero-argument nodes skip the selector entirely") {
    ModelGateway gateway(std::make_shared<MockBackend>());
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    ToolPlan plan;
    PlanNode node;
    node.node_id = "n1";
    node.tool = "get_topdown_scene";
    plan.nodes.push_back(node);
    Constraint c{"c1", "x", ConstraintType::FloorLayout};
    CHECK(pipe.select_arguments(node, c, plan, {}, {}) == Json::object());
    CHECK(gateway.transcripts().empty());
}

TEST_CASE("pinned arguments are validated but never sent to the model") {
    ModelGateway gateway(std::make_shared<MockBackend>());
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    ToolPlan plan;
    Constraint c{"c1", "x", ConstraintType::ObjectSelection};

    PlanNode good = pinned("n1", "get_object_info", Json{{"ids", {"bed|0"}}});
    plan.nodes.push_back(good);
    CHECK(pipe.select_arguments(good, c, plan, {}, {}) ==
          Json{{"ids", {"bed|0"}}});

    PlanNode bad = pinned("n2", "get_object_info", Json{{"ids", {"wall|2"}}});
    CHECK_THROWS_AS(pipe.select_arguments(bad, c, plan, {}, {}),
                    ArgumentInvalidError);
    CHECK(gateway.transcripts().empty());
}

namespace {

ToolPlan diamond_plan(bool break_left = false) {
    ToolPlan plan;
    plan.constraint_id = "c1";
    plan.rationale = "pinned fixture plan";
    plan.nodes.push_back(
        pinned("a", "get_object_list", Json{{"room_ids", {"bedroom|1"}}}));
    plan.nodes.push_back(pinned(
        "b", "get_object_info",
        break_left ? Json{{"ids", {"ghost|9"}}} : Json{{"ids", {"bed|0"}}},
        {"a"}));
    plan.nodes.push_back(
        pinned("c", "get_object_info", Json{{"ids", {"lamp|2"}}}, {"a"}));
    plan.nodes.push_back(pinned(
        "d", "get_spatial_relation",
        Json{{"id_tuples",
              Json::array({Json::array({"bed|0", "lamp|2"})})}},
        {"b", "c"}));
    return plan;
}

}  // namespace

TEST_CASE("diamond plans execute every node and join at the sink") {
    ModelGateway gateway(std::make_shared<MockBackend>());
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    Constraint c{"c1", "bed and lamp", ConstraintType::ObjectPlacement};

    auto results = pipe.execute_plan(diamond_plan(), c, {});
    REQUIRE(results.size() == 4);
    for (const auto& id : {"a", "b", "c", "d"}) CHECK(results.at(id).ok());
    CHECK(results.at("d").image_groups.count("bed|0+lamp|2") == 1);
    CHECK(results.at("b").payload.contains("bed|0"));
}

TEST_CASE("a failed node skips its dependents but not its siblings") {
    ModelGateway gateway(std::make_shared<MockBackend>());
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    Constraint c{"c1", "bed and lamp", ConstraintType::ObjectPlacement};

    auto results = pipe.execute_plan(diamond_plan(true), c, {});
    CHECK(results.at("a").ok());
    CHECK_FALSE(results.at("b").ok());
    CHECK(results.at("c").ok());  // sibling unaffected
    CHECK(results.at("d").skipped);
    CHECK(results.at("d").error->find("b") != std::string::npos);
}

TEST_CASE("sequential and parallel schedulers agree") {
    Constraint c{"c1", "bed and lamp", ConstraintType::ObjectPlacement};
    ModelGateway g1(std::make_shared<MockBackend>());
    ModelGateway g2(std::make_shared<MockBackend>());
    Pipeline parallel(fixture_scene(), fixture_materials(), fixture_assets(),
                      g1, small_config(true));
    Pipeline sequential(fixture_scene(), fixture_materials(), fixture_assets(),
                        g2, small_config(false));

    auto a = parallel.execute_plan(diamond_plan(), c, {});
    auto b = sequential.execute_plan(diamond_plan(), c, {});
    REQUIRE(a.size() == b.size());
    for (const auto& [id, out] : a) {
        const ToolOutput& other = b.at(id);
        CHECK(out.payload == other.payload);
        REQUIRE(out.image_groups.size() == other.image_groups.size());
        for (const auto& [key, imgs] : out.image_groups) {
            REQUIRE(other.image_groups.count(key) == 1);
            REQUIRE(imgs.size() == other.image_groups.at(key).size());
            for (size_t i = 0; i < imgs.size(); ++i)
                CHECK(image_hash(imgs[i]) ==
                      image_hash(other.image_groups.at(key)[i]));
        }
    }
}

TEST_CASE("validation judges from evidence and prior context") {
    auto mock = std::make_shared<MockBackend>();
    MockBackend::SubstringRule rule;
    rule.template_id = "validation_OP";
    rule.contains = {{"constraint", "bed and lamp"}};
    rule.responses = {fenced(
        R"({"valid": false, "explanation": "the lamp is across the room"})")};
    mock->script_contains(rule);
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    Constraint c{"c1", "bed and lamp", ConstraintType::ObjectPlacement};

    ToolPlan plan = diamond_plan();
    auto outputs = pipe.execute_plan(plan, c, {});
    ConstraintJudgment j = pipe.validate_constraint(c, plan, outputs, {});
    CHECK_FALSE(j.valid);
    CHECK(j.explanation == "the lamp is across the room");
    CHECK(j.evidence == std::vector<std::string>{"a", "b", "c", "d"});
    // The image evidence rode along with the call.
    CHECK(gateway.transcripts().back().image_count > 0);
}

TEST_CASE("all-failed evidence yields an invalid verdict without a model call") {
    ModelGateway gateway(std::make_shared<MockBackend>());
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    Constraint c{"c1", "x", ConstraintType::ObjectSelection};

    ToolPlan plan;
    plan.constraint_id = "c1";
    plan.nodes.push_back(
        pinned("n1", "get_object_info", Json{{"ids", {"ghost|9"}}}));
    auto outputs = pipe.execute_plan(plan, c, {});
    REQUIRE_FALSE(outputs.at("n1").ok());

    ConstraintJudgment j = pipe.validate_constraint(c, plan, outputs, {});
    CHECK_FALSE(j.valid);
    CHECK(j.explanation.find("failed") != std::string::npos);
    CHECK(gateway.transcripts().empty());
}

namespace {

// Three pre-typed constraints with scripted verdicts; planning and
// validation both run through the mock.
std::shared_ptr<MockBackend> verdict_script(bool v1, bool v2, bool v3) {
    auto mock = std::make_shared<MockBackend>();
    MockBackend::SubstringRule plan_rule;
    plan_rule.template_id = "planning";
    plan_rule.responses = {fenced(
        R"({"rationale": "overview",
            "nodes": [{"node_id": "n1", "tool": "get_room_list"}]})")};
    mock->script_contains(plan_rule);
    // Explanations must not echo any constraint text: prior explanations
    // land in later prompts and would trip the wrong substring rule.
    auto verdict = [&](const std::string& text, const std::string& note,
                       bool v) {
        MockBackend::SubstringRule rule;
        rule.template_id = "validation_FL";
        rule.contains = {{"constraint", text}};
        rule.responses = {fenced(std::string(R"({"valid": )") +
                                 (v ? "true" : "false") +
                                 R"(, "explanation": ")" + note + R"("})")};
        mock->script_contains(rule);
    };
    verdict("first requirement", "verdict one", v1);
    verdict("second requirement", "verdict two", v2);
    verdict("third requirement", "verdict three", v3);
    return mock;
}

std::vector<Constraint> three_constraints() {
    return {{"c1", "first requirement", ConstraintType::FloorLayout},
            {"c2", "second requirement", ConstraintType::FloorLayout},
            {"c3", "third requirement", ConstraintType::FloorLayout}};
}

}  // namespace

TEST_CASE("holistic verdict is the AND over all constraint verdicts") {
    for (int mask = 0; mask < 8; ++mask) {
        bool v1 = mask & 1, v2 = mask & 2, v3 = mask & 4;
        ModelGateway gateway(verdict_script(v1, v2, v3));
        Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                      gateway, small_config());
        EvaluationReport report =
            pipe.evaluate_scene({"i1", "unused"}, three_constraints());
        REQUIRE(report.judgments.size() == 3);
        CHECK(report.judgments[0].valid == v1);
        CHECK(report.judgments[1].valid == v2);
        CHECK(report.judgments[2].valid == v3);
        CHECK(report.holistic_valid == (v1 && v2 && v3));
    }
}

TEST_CASE("later validations see only earlier explanations") {
    ModelGateway gateway(verdict_script(true, true, true));
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    pipe.evaluate_scene({"i1", "unused"}, three_constraints());

    std::vector<const Transcript*> validations;
    for (const auto& t : gateway.transcripts())
        if (t.template_id == "validation_FL") validations.push_back(&t);
    REQUIRE(validations.size() == 3);
    CHECK(validations[0]->prompt.find("verdict one") == std::string::npos);
    CHECK(validations[1]->prompt.find("verdict one") != std::string::npos);
    CHECK(validations[1]->prompt.find("verdict three") == std::string::npos);
    CHECK(validations[2]->prompt.find("verdict two") != std::string::npos);
}

TEST_CASE("scripted evaluations serialize to identical reports") {
    auto run = [] {
        ModelGateway gateway(verdict_script(true, false, true));
        Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                      gateway, small_config());
        return report_to_json(
                   pipe.evaluate_scene({"i1", "unused"}, three_constraints()))
            .dump(2);
    };
    CHECK(run() == run());
}

TEST_CASE("mid-run failures surface the partial report") {
    auto mock = verdict_script(true, true, true);
    // Planning succeeds, but constraint two's validation is unscripted
    // for this template id, so the gateway refuses it.
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    std::vector<Constraint> constraints = three_constraints();
    constraints[1].ctype = ConstraintType::MaterialSelection;  // validation_MS

    try {
        pipe.evaluate_scene({"i1", "unused"}, constraints);
        FAIL("expected EvaluationAborted");
    } catch (const EvaluationAborted& e) {
        // The first constraint's verdict survived.
        REQUIRE(e.partial["constraints"].size() == 3);
        CHECK(e.partial["constraints"][0]["valid"] == true);
        CHECK_FALSE(e.partial["constraints"][1].contains("valid"));
    }
}

TEST_CASE("the whole-scene judge majority-votes across samples") {
    auto mock = std::make_shared<MockBackend>();
    auto vote = [&](int sample, bool v) {
        mock->script("vlm_judge_baseline",
                     {{"constraint", "the bedroom has a bed"},
                      {"sample", std::to_string(sample)}},
                     fenced(std::string(R"({"valid": )") +
                            (v ? "true" : "false") +
                            R"(, "explanation": "looked at the corners"})"));
    };
    vote(1, true);
    vote(2, true);
    vote(3, false);
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());

    std::vector<Constraint> constraints = {
        {"c1", "the bedroom has a bed", std::nullopt}};
    EvaluationReport report =
        pipe.run_vlm_judge_baseline({"i1", "unused"}, 3, constraints);
    REQUIRE(report.judgments.size() == 1);
    CHECK(report.judgments[0].valid);  // 2 of 3
    CHECK(report.holistic_valid);
    // Four corner views per call.
    CHECK(gateway.transcripts().back().image_count == 4);
}

TEST_CASE("even vote splits are conservative") {
    auto mock = std::make_shared<MockBackend>();
    auto vote = [&](int sample, bool v) {
        mock->script("vlm_judge_baseline",
                     {{"constraint", "the kitchen is tiled"},
                      {"sample", std::to_string(sample)}},
                     fenced(std::string(R"({"valid": )") +
                            (v ? "true" : "false") +
                            R"(, "explanation": "e"})"));
    };
    vote(1, true);
    vote(2, false);
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    std::vector<Constraint> constraints = {
        {"c1", "the kitchen is tiled", std::nullopt}};
    EvaluationReport report =
        pipe.run_vlm_judge_baseline({"i1", "unused"}, 2, constraints);
    CHECK_FALSE(report.judgments[0].valid);
    CHECK_FALSE(report.holistic_valid);
}

TEST_CASE("single-sample baseline is a single-shot verdict") {
    auto mock = std::make_shared<MockBackend>();
    mock->script("vlm_judge_baseline",
                 {{"constraint", "the kitchen is tiled"}, {"sample", "1"}},
                 fenced(R"({"valid": true, "explanation": "tiles visible"})"));
    ModelGateway gateway(mock);
    Pipeline pipe(fixture_scene(), fixture_materials(), fixture_assets(),
                  gateway, small_config());
    std::vector<Constraint> constraints = {
        {"c1", "the kitchen is tiled", std::nullopt}};
    EvaluationReport report =
        pipe.run_vlm_judge_baseline({"i1", "unused"}, 1, constraints);
    CHECK(report.judgments[0].valid);
    CHECK(report.judgments[0].explanation == "tiles visible");
}
