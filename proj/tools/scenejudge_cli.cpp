#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "scenejudge/commands.hpp"

using namespace scenejudge;

namespace {

void add_common_flags(CLI::App* cmd, RunConfig& config) {
    cmd->add_option("--backend", config.backend,
                    "model backend: remote, local, or mock")
        ->check(CLI::IsMember({"remote", "local", "mock"}));
    cmd->add_option("--model", config.model, "model name for the backend");
    cmd->add_option("--mock-script", config.mock_script,
                    "scripted responses for the mock backend");
    cmd->add_option("--resolution", config.resolution,
                    "render resolution in pixels")
        ->check(CLI::IsMember({335, 1200}));
    cmd->add_option("--dump-images", config.dump_images_dir,
                    "directory for rendered image dumps");
    cmd->add_option("--parallel", config.parallel,
                    "ceiling on concurrent model calls")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", config.out_path, "report output path");
    cmd->add_option("--transcripts", config.transcript_path,
                    "JSONL transcript log path");
}

std::string read_instruction(const std::string& value) {
    // @path reads the instruction text from a file.
    if (!value.empty() && value[0] == '@') {
        std::ifstream in(value.substr(1));
        if (!in) throw IoError("cannot read '" + value.substr(1) + "'");
        return std::string(std::istreambuf_iterator<char>(in), {});
    }
    return value;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scene evaluation toolkit"};
    app.require_subcommand(1);

    RunConfig config;

    std::string scene_path, instruction, constraints_path;
    auto* evaluate = app.add_subcommand(
        "evaluate", "judge one scene against an instruction");
    evaluate->add_option("scene", scene_path, "scene JSON file")->required();
    evaluate->add_option("instruction", instruction,
                         "instruction text, or @file")
        ->required();
    evaluate->add_option("--constraints", constraints_path,
                         "pre-annotated constraints (skips extraction)");
    add_common_flags(evaluate, config);

    std::string bundle_dir, scenes_dir;
    auto* bench =
        app.add_subcommand("bench", "score a method's scenes on a bundle");
    bench->add_option("bundle", bundle_dir, "benchmark bundle directory")
        ->required();
    bench->add_option("scenes", scenes_dir, "directory of generated scenes")
        ->required();
    add_common_flags(bench, config);

    std::string reports_dir, labels_path;
    auto* agree = app.add_subcommand(
        "agree", "compare report verdicts with human labels");
    agree->add_option("reports", reports_dir, "directory of report JSON files")
        ->required();
    agree->add_option("labels", labels_path, "human labels JSONL")->required();
    add_common_flags(agree, config);

    std::string predicted_path, gold_path;
    auto* plan_score = app.add_subcommand(
        "plan-score", "score predicted tool plans against gold plans");
    plan_score->add_option("predicted", predicted_path, "predicted plans JSONL")
        ->required();
    plan_score->add_option("gold", gold_path, "gold plans JSONL")->required();
    add_common_flags(plan_score, config);

    std::string render_tool, render_args = "{}", render_out = ".";
    auto* render =
        app.add_subcommand("render", "run one image tool and write PNGs");
    render->add_option("scene", scene_path, "scene JSON file")->required();
    render->add_option("tool", render_tool, "image tool name")->required();
    render->add_option("--args", render_args, "tool arguments as JSON");
    render->add_option("--out-dir", render_out, "output directory");
    add_common_flags(render, config);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*evaluate)
            return cmd_evaluate(scene_path, read_instruction(instruction),
                                constraints_path, config, std::cout);
        if (*bench)
            return cmd_bench(bundle_dir, scenes_dir, config, std::cout);
        if (*agree)
            return cmd_agree(reports_dir, labels_path, config, std::cout);
        if (*plan_score)
            return cmd_plan_score(predicted_path, gold_path, config, std::cout);
        if (*render) {
            Json args = Json::parse(render_args, nullptr, false);
            if (args.is_discarded())
                throw SchemaError("--args is not valid JSON");
            return cmd_render(scene_path, render_tool, args, render_out,
                              config, std::cout);
        }
    } catch (const std::exception& e) {
        return report_error_and_exit_code(e, std::cerr);
    }
    return 1;
}
