#include "scenery/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace scenery {

double canonical_single(double v) {
    if (!std::isfinite(v)) throw SchemaError("BAD_VALUE", "non-finite real");
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    float out = 0.0f;
    if (std::from_chars(buf, res.ptr, out).ec != std::errc{}) {
        if (std::abs(v) < 1.0) return std::signbit(v) ? -0.0 : 0.0;  // below the smallest float
        throw SchemaError("BAD_VALUE", "real outside single-precision range");
    }
    return static_cast<double>(out);
}

namespace {

Vec3 canonical(const Vec3& v) { return {canonical_single(v.x), canonical_single(v.y), canonical_single(v.z)}; }

Color canonical(const Color& c) {
    return {canonical_single(c.r()), canonical_single(c.g()), canonical_single(c.b())};
}

void check_node_kind(const FieldSpec& spec, const NodePtr& n) {
    if (!n) return;
    if (std::find(spec.accepts.begin(), spec.accepts.end(), n->kind()) == spec.accepts.end())
        throw SchemaError("SFNODE_KIND", std::string(to_string(n->kind())) + " is not accepted by field '" +
                                             std::string(spec.name) + "'");
}

FieldValue canonicalise(const FieldSpec& spec, FieldValue v) {
    switch (spec.type) {
        case FieldType::SFFloat: return canonical_single(std::get<double>(v));
        case FieldType::SFVec3f: return canonical(std::get<Vec3>(v));
        case FieldType::SFColor: return canonical(std::get<Color>(v));
        case FieldType::SFTime:
            if (!std::isfinite(std::get<Time>(v).seconds)) throw SchemaError("BAD_VALUE", "non-finite time");
            return v;
        case FieldType::MFFloat:
            for (auto& x : std::get<std::vector<double>>(v)) x = canonical_single(x);
            return v;
        case FieldType::MFVec3f:
            for (auto& x : std::get<std::vector<Vec3>>(v)) x = canonical(x);
            return v;
        case FieldType::MFColor:
            for (auto& x : std::get<std::vector<Color>>(v)) x = canonical(x);
            return v;
        case FieldType::MFTime:
            for (auto& x : std::get<std::vector<Time>>(v))
                if (!std::isfinite(x.seconds)) throw SchemaError("BAD_VALUE", "non-finite time");
            return v;
        case FieldType::SFNode:
            check_node_kind(spec, std::get<NodePtr>(v));
            return v;
        case FieldType::MFNode:
            for (const auto& n : std::get<std::vector<NodePtr>>(v)) check_node_kind(spec, n);
            return v;
        default:
            return v;
    }
}

}  // namespace

Node& Node::set(std::string_view field, FieldValue value) {
    if (is_use()) throw SchemaError("USE_HAS_FIELDS", "USE node '" + use_ + "' cannot carry fields");
    const auto& s = schema();
    auto idx = s.index_of(field);
    if (!idx)
        throw SchemaError("UNKNOWN_FIELD", std::string(to_string(kind_)) + " has no field '" + std::string(field) + "'");
    const auto& spec = s.fields[*idx];
    if (!spec.settable())
        throw SchemaError("FIELD_ACCESS", std::string(to_string(kind_)) + "." + std::string(field) + " is " +
                                              std::string(to_string(spec.access)));
    if (type_of(value) != spec.type)
        throw SchemaError("FIELD_TYPE", std::string(to_string(kind_)) + "." + std::string(field) + " expects " +
                                            std::string(to_string(spec.type)) + ", got " +
                                            std::string(to_string(type_of(value))));
    value = canonicalise(spec, std::move(value));
    const auto id = static_cast<std::uint8_t>(*idx);
    auto it = std::lower_bound(fields_.begin(), fields_.end(), id,
                               [](const FieldEntry& e, std::uint8_t k) { return e.id < k; });
    if (it != fields_.end() && it->id == id)
        it->value = std::move(value);
    else
        fields_.insert(it, FieldEntry{id, std::move(value)});
    return *this;
}

const FieldValue* Node::find(std::string_view field) const {
    auto idx = schema().index_of(field);
    if (!idx) return nullptr;
    for (const auto& e : fields_)
        if (e.id == *idx) return &e.value;
    return nullptr;
}

const FieldValue& Node::get(std::string_view field) const {
    const auto& s = schema();
    auto idx = s.index_of(field);
    if (!idx)
        throw SchemaError("UNKNOWN_FIELD", std::string(to_string(kind_)) + " has no field '" + std::string(field) + "'");
    for (const auto& e : fields_)
        if (e.id == *idx) return e.value;
    return s.fields[*idx].default_value;
}

Node& Node::add_child(Node child) { return add_child(make_node(std::move(child))); }

Node& Node::add_child(NodePtr child) {
    if (is_use()) throw SchemaError("USE_HAS_FIELDS", "USE node '" + use_ + "' cannot have children");
    if (!schema().grouping)
        throw SchemaError("CHILDREN_NOT_ALLOWED", std::string(to_string(kind_)) + " is not a grouping node");
    children_.push_back(std::move(child));
    return *this;
}

Node Node::with_kind(NodeKind kind) const {
    Node n = *this;
    n.kind_ = kind;
    return n;
}

std::map<std::string, const Node*, std::less<>> def_table(const SceneGraph& scene) {
    std::map<std::string, const Node*, std::less<>> t;
    for_each_node(scene, [&](const Node& n) {
        if (!n.is_use() && !n.def_name().empty()) t.emplace(n.def_name(), &n);
    });
    return t;
}

}  // namespace scenery
