#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "scenery/field_value.hpp"
#include "scenery/schema.hpp"

namespace scenery {

/// Thrown when a field assignment violates the per-kind schema.
class SchemaError : public std::invalid_argument {
public:
    SchemaError(std::string code, const std::string& what)
        : std::invalid_argument(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct FieldEntry {
    std::uint8_t id;  // index into schema_of(kind).fields
    FieldValue value;
};

/// One node of the scene graph. Only explicitly assigned fields are stored
/// (sorted by schema index); everything else reads as the schema default.
/// A node built with `Node::use` is a USE reference: it carries the target's
/// kind and name and nothing else.
class Node {
public:
    explicit Node(NodeKind kind) : kind_(kind) {}

    static Node use(NodeKind kind, std::string target) {
        Node n(kind);
        n.use_ = std::move(target);
        return n;
    }

    NodeKind kind() const { return kind_; }
    const KindSchema& schema() const { return schema_of(kind_); }

    const std::string& def_name() const { return def_; }
    Node& set_def(std::string name) {
        def_ = std::move(name);
        return *this;
    }

    bool is_use() const { return !use_.empty(); }
    const std::string& use_name() const { return use_; }

    /// Assign a field. Checks name, access and type against the schema and
    /// canonicalises single-precision values to 6 significant digits.
    /// Throws SchemaError.
    Node& set(std::string_view field, FieldValue value);

    const FieldValue* find(std::string_view field) const;
    /// Explicit value or schema default. Throws SchemaError for unknown names.
    const FieldValue& get(std::string_view field) const;

    template <class T>
    const T& get_as(std::string_view field) const {
        return std::get<T>(get(field));
    }

    std::span<const FieldEntry> fields() const { return fields_; }

    Node& add_child(Node child);
    Node& add_child(NodePtr child);
    std::span<const NodePtr> children() const { return children_; }
    void set_children(std::vector<NodePtr> children) { children_ = std::move(children); }

    /// Cheap kind change used by StaticGroup promotion.
    Node with_kind(NodeKind kind) const;

private:
    NodeKind kind_;
    std::string def_;
    std::string use_;
    std::vector<FieldEntry> fields_;
    std::vector<NodePtr> children_;
};

inline NodePtr make_node(Node n) { return std::make_shared<const Node>(std::move(n)); }

struct Route {
    std::string from_node;
    std::string from_field;
    std::string to_node;
    std::string to_field;
    friend bool operator==(const Route&, const Route&) = default;
};

/// IMPORT statement: exposes a DEF from an Inline's scene under a local name.
struct Import {
    std::string inline_def;
    std::string imported_def;
    std::string as_name;
    friend bool operator==(const Import&, const Import&) = default;
};

struct SceneGraph {
    std::vector<NodePtr> roots;
    std::vector<Route> routes;
    std::vector<Import> imports;
    /// profile, version, component:<name>, title, generator, ...
    std::map<std::string, std::string> meta;
};

/// Round a real to the 6-significant-digit single-precision value the model
/// holds for SFFloat-family fields.
double canonical_single(double v);

/// DEF name -> node, in document order. Later duplicates are ignored.
std::map<std::string, const Node*, std::less<>> def_table(const SceneGraph& scene);

/// Visit every node in preorder, including SFNode/MFNode field values. USE
/// nodes are visited as themselves (not expanded).
template <class F>
void for_each_node(const Node& n, F&& f) {
    f(n);
    for (const auto& e : n.fields()) {
        if (auto p = std::get_if<NodePtr>(&e.value)) {
            if (*p) for_each_node(**p, f);
        } else if (auto l = std::get_if<std::vector<NodePtr>>(&e.value)) {
            for (const auto& c : *l)
                if (c) for_each_node(*c, f);
        }
    }
    for (const auto& c : n.children()) for_each_node(*c, f);
}

template <class F>
void for_each_node(const SceneGraph& s, F&& f) {
    for (const auto& r : s.roots) for_each_node(*r, f);
}

}  // namespace scenery
