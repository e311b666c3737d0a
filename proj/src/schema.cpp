#include "scenery/schema.hpp"

#include <array>
#include <stdexcept>

#include "scenery/scene.hpp"

namespace scenery {

namespace {

constexpr std::array<std::string_view, kNodeKindCount> kKindNames = {
    "Transform",      "Group",          "StaticGroup",         "LOD",
    "Inline",         "Shape",          "Appearance",          "Material",
    "ImageTexture",   "Box",            "IndexedFaceSet",      "Coordinate",
    "Viewpoint",      "NavigationInfo", "Background",          "SpotLight",
    "TimeSensor",     "TouchSensor",    "ProximitySensor",     "PositionInterpolator",
    "OrientationInterpolator", "ColorInterpolator", "Sound",  "AudioClip",
    "WorldInfo",
};

constexpr std::array<std::string_view, kFieldTypeCount> kTypeNames = {
    "SFBool",  "SFInt32", "SFFloat",  "SFTime",   "SFString",   "SFVec3f",  "SFRotation", "SFColor",  "MFBool",
    "MFInt32", "MFFloat", "MFTime",   "MFString", "MFVec3f",    "MFRotation", "MFColor",  "SFNode",   "MFNode",
};

constexpr auto II = AccessType::InitializeOnly;
constexpr auto IN = AccessType::InputOnly;
constexpr auto OUT = AccessType::OutputOnly;
constexpr auto IO = AccessType::InputOutput;

FieldSpec f(std::string_view name, FieldType t, AccessType a, FieldValue def, std::vector<NodeKind> accepts = {}) {
    return FieldSpec{name, t, a, std::move(def), std::move(accepts)};
}

// Event-only fields still need a typed placeholder default.
FieldSpec ev(std::string_view name, FieldType t, AccessType a) {
    FieldValue v;
    switch (t) {
        case FieldType::SFBool: v = false; break;
        case FieldType::SFInt32: v = std::int32_t{0}; break;
        case FieldType::SFFloat: v = 0.0; break;
        case FieldType::SFTime: v = Time{}; break;
        case FieldType::SFVec3f: v = Vec3{}; break;
        case FieldType::SFRotation: v = Rotation{}; break;
        case FieldType::SFColor: v = Color{}; break;
        case FieldType::MFInt32: v = std::vector<std::int32_t>{}; break;
        default: throw std::logic_error("unsupported event placeholder");
    }
    return FieldSpec{name, t, a, std::move(v), {}};
}

using FT = FieldType;
using NK = NodeKind;

std::vector<KindSchema> build_table() {
    std::vector<KindSchema> t(kNodeKindCount);
    auto def = [&](NK k) -> KindSchema& {
        auto& s = t[static_cast<std::size_t>(k)];
        s.kind = k;
        return s;
    };
    const NodePtr null_node;

    {
        auto& s = def(NK::Transform);
        s.grouping = true;
        s.fields = {
            f("center", FT::SFVec3f, IO, Vec3{}),
            f("rotation", FT::SFRotation, IO, Rotation{}),
            f("scale", FT::SFVec3f, IO, Vec3{1, 1, 1}),
            f("scaleOrientation", FT::SFRotation, IO, Rotation{}),
            f("translation", FT::SFVec3f, IO, Vec3{}),
        };
    }
    def(NK::Group).grouping = true;
    def(NK::StaticGroup).grouping = true;
    {
        auto& s = def(NK::LOD);
        s.grouping = true;
        s.fields = {
            f("center", FT::SFVec3f, II, Vec3{}),
            f("range", FT::MFFloat, II, std::vector<double>{}),
            ev("level_changed", FT::SFInt32, OUT),
        };
    }
    def(NK::Inline).fields = {
        f("load", FT::SFBool, IO, true),
        f("url", FT::MFString, IO, std::vector<std::string>{}),
    };
    def(NK::Shape).fields = {
        f("appearance", FT::SFNode, IO, null_node, {NK::Appearance}),
        f("geometry", FT::SFNode, IO, null_node, {NK::Box, NK::IndexedFaceSet}),
    };
    {
        auto& s = def(NK::Appearance);
        s.child_node = false;
        s.default_container = "appearance";
        s.fields = {
            f("material", FT::SFNode, IO, null_node, {NK::Material}),
            f("texture", FT::SFNode, IO, null_node, {NK::ImageTexture}),
        };
    }
    {
        auto& s = def(NK::Material);
        s.child_node = false;
        s.default_container = "material";
        s.fields = {
            f("ambientIntensity", FT::SFFloat, IO, 0.2),
            f("diffuseColor", FT::SFColor, IO, Color{0.8, 0.8, 0.8}),
            f("emissiveColor", FT::SFColor, IO, Color{}),
            f("shininess", FT::SFFloat, IO, 0.2),
            f("specularColor", FT::SFColor, IO, Color{}),
            f("transparency", FT::SFFloat, IO, 0.0),
        };
    }
    {
        auto& s = def(NK::ImageTexture);
        s.child_node = false;
        s.default_container = "texture";
        s.fields = {
            f("repeatS", FT::SFBool, II, true),
            f("repeatT", FT::SFBool, II, true),
            f("url", FT::MFString, IO, std::vector<std::string>{}),
        };
    }
    {
        auto& s = def(NK::Box);
        s.child_node = false;
        s.default_container = "geometry";
        s.fields = {
            f("size", FT::SFVec3f, II, Vec3{2, 2, 2}),
            f("solid", FT::SFBool, II, true),
        };
    }
    {
        auto& s = def(NK::IndexedFaceSet);
        s.child_node = false;
        s.default_container = "geometry";
        s.fields = {
            f("ccw", FT::SFBool, II, true),
            f("convex", FT::SFBool, II, true),
            f("coord", FT::SFNode, IO, null_node, {NK::Coordinate}),
            f("coordIndex", FT::MFInt32, II, std::vector<std::int32_t>{}),
            f("creaseAngle", FT::SFFloat, II, 0.0),
            f("solid", FT::SFBool, II, true),
            ev("set_coordIndex", FT::MFInt32, IN),
        };
    }
    {
        auto& s = def(NK::Coordinate);
        s.child_node = false;
        s.default_container = "coord";
        s.fields = {f("point", FT::MFVec3f, IO, std::vector<Vec3>{})};
    }
    def(NK::Viewpoint).fields = {
        f("centerOfRotation", FT::SFVec3f, IO, Vec3{}),
        f("description", FT::SFString, IO, std::string{}),
        f("fieldOfView", FT::SFFloat, IO, 0.7854),
        f("jump", FT::SFBool, IO, true),
        f("orientation", FT::SFRotation, IO, Rotation{}),
        f("position", FT::SFVec3f, IO, Vec3{0, 0, 10}),
        ev("set_bind", FT::SFBool, IN),
        ev("bindTime", FT::SFTime, OUT),
        ev("isBound", FT::SFBool, OUT),
    };
    def(NK::NavigationInfo).fields = {
        f("avatarSize", FT::MFFloat, IO, std::vector<double>{0.25, 1.6, 0.75}),
        f("headlight", FT::SFBool, IO, true),
        f("speed", FT::SFFloat, IO, 1.0),
        f("type", FT::MFString, IO, std::vector<std::string>{"EXAMINE", "ANY"}),
        ev("set_bind", FT::SFBool, IN),
        ev("bindTime", FT::SFTime, OUT),
        ev("isBound", FT::SFBool, OUT),
    };
    def(NK::Background).fields = {
        f("groundAngle", FT::MFFloat, IO, std::vector<double>{}),
        f("groundColor", FT::MFColor, IO, std::vector<Color>{}),
        f("skyAngle", FT::MFFloat, IO, std::vector<double>{}),
        f("skyColor", FT::MFColor, IO, std::vector<Color>{Color{}}),
        ev("set_bind", FT::SFBool, IN),
        ev("bindTime", FT::SFTime, OUT),
        ev("isBound", FT::SFBool, OUT),
    };
    def(NK::SpotLight).fields = {
        f("ambientIntensity", FT::SFFloat, IO, 0.0),
        f("attenuation", FT::SFVec3f, IO, Vec3{1, 0, 0}),
        f("beamWidth", FT::SFFloat, IO, 0.7854),
        f("color", FT::SFColor, IO, Color{1, 1, 1}),
        f("cutOffAngle", FT::SFFloat, IO, 1.5708),
        f("direction", FT::SFVec3f, IO, Vec3{0, 0, -1}),
        f("intensity", FT::SFFloat, IO, 1.0),
        f("location", FT::SFVec3f, IO, Vec3{}),
        f("on", FT::SFBool, IO, true),
        f("radius", FT::SFFloat, IO, 100.0),
    };
    def(NK::TimeSensor).fields = {
        f("cycleInterval", FT::SFTime, IO, Time{1.0}),
        f("enabled", FT::SFBool, IO, true),
        f("loop", FT::SFBool, IO, false),
        f("startTime", FT::SFTime, IO, Time{}),
        f("stopTime", FT::SFTime, IO, Time{}),
        ev("cycleTime", FT::SFTime, OUT),
        ev("fraction_changed", FT::SFFloat, OUT),
        ev("isActive", FT::SFBool, OUT),
        ev("time", FT::SFTime, OUT),
    };
    def(NK::TouchSensor).fields = {
        f("description", FT::SFString, IO, std::string{}),
        f("enabled", FT::SFBool, IO, true),
        ev("isActive", FT::SFBool, OUT),
        ev("isOver", FT::SFBool, OUT),
        ev("touchTime", FT::SFTime, OUT),
    };
    def(NK::ProximitySensor).fields = {
        f("center", FT::SFVec3f, IO, Vec3{}),
        f("enabled", FT::SFBool, IO, true),
        f("size", FT::SFVec3f, IO, Vec3{}),
        ev("enterTime", FT::SFTime, OUT),
        ev("exitTime", FT::SFTime, OUT),
        ev("isActive", FT::SFBool, OUT),
        ev("orientation_changed", FT::SFRotation, OUT),
        ev("position_changed", FT::SFVec3f, OUT),
    };
    def(NK::PositionInterpolator).fields = {
        f("key", FT::MFFloat, IO, std::vector<double>{}),
        f("keyValue", FT::MFVec3f, IO, std::vector<Vec3>{}),
        ev("set_fraction", FT::SFFloat, IN),
        ev("value_changed", FT::SFVec3f, OUT),
    };
    def(NK::OrientationInterpolator).fields = {
        f("key", FT::MFFloat, IO, std::vector<double>{}),
        f("keyValue", FT::MFRotation, IO, std::vector<Rotation>{}),
        ev("set_fraction", FT::SFFloat, IN),
        ev("value_changed", FT::SFRotation, OUT),
    };
    def(NK::ColorInterpolator).fields = {
        f("key", FT::MFFloat, IO, std::vector<double>{}),
        f("keyValue", FT::MFColor, IO, std::vector<Color>{}),
        ev("set_fraction", FT::SFFloat, IN),
        ev("value_changed", FT::SFColor, OUT),
    };
    def(NK::Sound).fields = {
        f("direction", FT::SFVec3f, IO, Vec3{0, 0, 1}),
        f("intensity", FT::SFFloat, IO, 1.0),
        f("location", FT::SFVec3f, IO, Vec3{}),
        f("maxBack", FT::SFFloat, IO, 10.0),
        f("maxFront", FT::SFFloat, IO, 10.0),
        f("minBack", FT::SFFloat, IO, 1.0),
        f("minFront", FT::SFFloat, IO, 1.0),
        f("priority", FT::SFFloat, IO, 0.0),
        f("source", FT::SFNode, IO, null_node, {NK::AudioClip}),
        f("spatialize", FT::SFBool, II, true),
    };
    {
        auto& s = def(NK::AudioClip);
        s.child_node = false;
        s.default_container = "source";
        s.fields = {
            f("description", FT::SFString, IO, std::string{}),
            f("loop", FT::SFBool, IO, false),
            f("pitch", FT::SFFloat, IO, 1.0),
            f("startTime", FT::SFTime, IO, Time{}),
            f("stopTime", FT::SFTime, IO, Time{}),
            f("url", FT::MFString, IO, std::vector<std::string>{}),
            ev("duration_changed", FT::SFTime, OUT),
            ev("isActive", FT::SFBool, OUT),
        };
    }
    def(NK::WorldInfo).fields = {
        f("info", FT::MFString, II, std::vector<std::string>{}),
        f("title", FT::SFString, II, std::string{}),
    };
    return t;
}

const std::vector<KindSchema>& table() {
    static const std::vector<KindSchema> t = build_table();
    return t;
}

}  // namespace

std::string_view to_string(NodeKind k) { return kKindNames.at(static_cast<std::size_t>(k)); }

std::string_view to_string(FieldType t) { return kTypeNames.at(static_cast<std::size_t>(t)); }

std::string_view to_string(AccessType a) {
    switch (a) {
        case AccessType::InitializeOnly: return "initializeOnly";
        case AccessType::InputOnly: return "inputOnly";
        case AccessType::OutputOnly: return "outputOnly";
        case AccessType::InputOutput: return "inputOutput";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == name) return static_cast<NodeKind>(i);
    return std::nullopt;
}

std::span<const NodeKind> all_node_kinds() {
    static const auto kinds = [] {
        std::array<NodeKind, kNodeKindCount> a{};
        for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<NodeKind>(i);
        return a;
    }();
    return kinds;
}

bool is_list_type(FieldType t) {
    return t >= FieldType::MFBool && t <= FieldType::MFColor;
}

bool is_single_precision(FieldType t) {
    switch (t) {
        case FieldType::SFFloat:
        case FieldType::SFVec3f:
        case FieldType::SFColor:
        case FieldType::MFFloat:
        case FieldType::MFVec3f:
        case FieldType::MFColor:
            return true;
        default:
            return false;
    }
}

std::optional<std::size_t> KindSchema::index_of(std::string_view field) const {
    for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i].name == field) return i;
    return std::nullopt;
}

const FieldSpec* KindSchema::find(std::string_view field) const {
    auto i = index_of(field);
    return i ? &fields[*i] : nullptr;
}

const KindSchema& schema_of(NodeKind k) { return table().at(static_cast<std::size_t>(k)); }

const FieldSpec* resolve_event(NodeKind k, std::string_view name, bool as_source) {
    const auto& s = schema_of(k);
    if (const auto* spec = s.find(name)) {
        if (as_source ? spec->readable_event() : spec->writable_event()) return spec;
        return nullptr;
    }
    if (as_source && name.ends_with("_changed")) {
        const auto* spec = s.find(name.substr(0, name.size() - 8));
        if (spec && spec->access == AccessType::InputOutput) return spec;
    }
    if (!as_source && name.starts_with("set_")) {
        const auto* spec = s.find(name.substr(4));
        if (spec && spec->access == AccessType::InputOutput) return spec;
    }
    return nullptr;
}

bool is_sensor(NodeKind k) {
    return k == NodeKind::TimeSensor || k == NodeKind::TouchSensor || k == NodeKind::ProximitySensor;
}

bool is_interpolator(NodeKind k) {
    return k == NodeKind::PositionInterpolator || k == NodeKind::OrientationInterpolator ||
           k == NodeKind::ColorInterpolator;
}

bool is_bindable(NodeKind k) {
    return k == NodeKind::Viewpoint || k == NodeKind::NavigationInfo || k == NodeKind::Background;
}

}  // namespace scenery
