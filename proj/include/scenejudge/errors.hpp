#pragma once

#include <stdexcept>
#include <string>

namespace scenejudge {

// Base class for every error the library raises. All errors carry a
// machine-readable code string used by the CLI for exit-status mapping.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define SJ_DEFINE_ERROR(NAME, CODE)                                   \
    class NAME : public Error {                                       \
    public:                                                           \
        explicit NAME(const std::string& message)                     \
            : Error(CODE, message) {}                                 \
    }

// scene_model
SJ_DEFINE_ERROR(SyntaxError, "syntax_error");
SJ_DEFINE_ERROR(SchemaError, "schema_error");
SJ_DEFINE_ERROR(ReferenceError, "reference_error");
SJ_DEFINE_ERROR(GeometryError, "geometry_error");

// toolboxes
SJ_DEFINE_ERROR(UnknownRoomError, "unknown_room");
SJ_DEFINE_ERROR(UnknownIdError, "unknown_id");
SJ_DEFINE_ERROR(KindMismatchError, "kind_mismatch");
SJ_DEFINE_ERROR(EmptySceneError, "empty_scene");
SJ_DEFINE_ERROR(UnknownMaterialError, "unknown_material");
SJ_DEFINE_ERROR(MaterialNotInSceneError, "material_not_in_scene");
SJ_DEFINE_ERROR(UnknownAssetError, "unknown_asset");
SJ_DEFINE_ERROR(UnknownToolError, "unknown_tool");

// gateway / multimodal
SJ_DEFINE_ERROR(GatewayError, "gateway_error");
SJ_DEFINE_ERROR(ParseError, "parse_error");
SJ_DEFINE_ERROR(EmptyInputError, "empty_input");
SJ_DEFINE_ERROR(ChecklistEmptyError, "checklist_empty");
SJ_DEFINE_ERROR(PreconditionError, "precondition");

// pipeline
SJ_DEFINE_ERROR(PlanInvalidError, "plan_invalid");
SJ_DEFINE_ERROR(ArgumentInvalidError, "argument_invalid");

// metrics
SJ_DEFINE_ERROR(DegenerateMarginalsError, "degenerate_marginals");
SJ_DEFINE_ERROR(SizeLimitError, "size_limit");
SJ_DEFINE_ERROR(NoMatchedToolsError, "no_matched_tools");

// dataset / cli
SJ_DEFINE_ERROR(LayoutError, "layout_error");
SJ_DEFINE_ERROR(IoError, "io_error");

#undef SJ_DEFINE_ERROR

}  // namespace scenejudge
