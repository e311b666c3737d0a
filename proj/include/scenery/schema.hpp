#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "scenery/field_value.hpp"

namespace scenery {

enum class NodeKind : std::uint8_t {
    Transform,
    Group,
    StaticGroup,
    LOD,
    Inline,
    Shape,
    Appearance,
    Material,
    ImageTexture,
    Box,
    IndexedFaceSet,
    Coordinate,
    Viewpoint,
    NavigationInfo,
    Background,
    SpotLight,
    TimeSensor,
    TouchSensor,
    ProximitySensor,
    PositionInterpolator,
    OrientationInterpolator,
    ColorInterpolator,
    Sound,
    AudioClip,
    WorldInfo,
};

inline constexpr std::size_t kNodeKindCount = 25;

std::string_view to_string(NodeKind k);
std::optional<NodeKind> node_kind_from_string(std::string_view name);
std::span<const NodeKind> all_node_kinds();

enum class AccessType : std::uint8_t { InitializeOnly, InputOnly, OutputOnly, InputOutput };

std::string_view to_string(AccessType a);

struct FieldSpec {
    std::string_view name;
    FieldType type;
    AccessType access;
    FieldValue default_value;
    /// For SFNode/MFNode fields: kinds accepted as values.
    std::vector<NodeKind> accepts;

    bool settable() const { return access == AccessType::InitializeOnly || access == AccessType::InputOutput; }
    bool readable_event() const { return access == AccessType::OutputOnly || access == AccessType::InputOutput; }
    bool writable_event() const { return access == AccessType::InputOnly || access == AccessType::InputOutput; }
};

struct KindSchema {
    NodeKind kind;
    /// Grouping kinds own an ordered `children` list.
    bool grouping = false;
    /// May appear in a `children` list.
    bool child_node = true;
    /// containerField used when the node appears inside another node.
    std::string_view default_container = "children";
    std::vector<FieldSpec> fields;

    std::optional<std::size_t> index_of(std::string_view field) const;
    const FieldSpec* find(std::string_view field) const;
};

const KindSchema& schema_of(NodeKind k);

/// Resolve an event name as used in ROUTE statements. Accepts the bare field
/// name and, for inputOutput fields, the `set_` / `_changed` aliases.
/// `as_source` selects which alias applies.
const FieldSpec* resolve_event(NodeKind k, std::string_view name, bool as_source);

bool is_sensor(NodeKind k);
bool is_interpolator(NodeKind k);
bool is_bindable(NodeKind k);

}  // namespace scenery
