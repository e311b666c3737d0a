#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scenery/types.hpp"

namespace scenery {

class Node;
using NodePtr = std::shared_ptr<const Node>;

/// X3D field types in the supported subset. The enumerator order matches the
/// alternative order of FieldValue, so `FieldType(value.index())` is the type
/// of a value.
enum class FieldType : std::uint8_t {
    SFBool,
    SFInt32,
    SFFloat,
    SFTime,
    SFString,
    SFVec3f,
    SFRotation,
    SFColor,
    MFBool,
    MFInt32,
    MFFloat,
    MFTime,
    MFString,
    MFVec3f,
    MFRotation,
    MFColor,
    SFNode,
    MFNode,
};

inline constexpr std::size_t kFieldTypeCount = 18;

using FieldValue = std::variant<bool,
                                std::int32_t,
                                double,
                                Time,
                                std::string,
                                Vec3,
                                Rotation,
                                Color,
                                std::vector<bool>,
                                std::vector<std::int32_t>,
                                std::vector<double>,
                                std::vector<Time>,
                                std::vector<std::string>,
                                std::vector<Vec3>,
                                std::vector<Rotation>,
                                std::vector<Color>,
                                NodePtr,
                                std::vector<NodePtr>>;

static_assert(std::variant_size_v<FieldValue> == kFieldTypeCount);

inline FieldType type_of(const FieldValue& v) { return static_cast<FieldType>(v.index()); }

std::string_view to_string(FieldType t);

/// Event category used by the route compatibility table: the SF type, with
/// list forms reported as their MF counterpart.
bool is_list_type(FieldType t);

/// True for SFFloat/SFVec3f/SFColor and their list forms: single-precision
/// X3D types held at 6 significant digits in the model.
bool is_single_precision(FieldType t);

}  // namespace scenery
