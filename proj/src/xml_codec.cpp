#include <algorithm>
#include <map>
#include <set>

#include "scenery/lexical.hpp"
#include "scenery/validate.hpp"
#include "scenery/xml.hpp"
#include "xml_reader.hpp"

namespace scenery {

namespace {

constexpr std::string_view kDefaultProfile = "Immersive";
constexpr std::string_view kDefaultVersion = "3.3";

bool ignorable_root_attribute(std::string_view n) {
    return n.starts_with("xmlns") || n.starts_with("xsd:") || n.starts_with("xml:");
}

class SceneReader {
public:
    explicit SceneReader(const xml::Element& root) : root_(root) { collect_defs(root); }

    ParseResult run() {
        ParseResult out;
        SceneGraph scene;
        if (root_.name != "X3D") {
            diag(root_.line, root_.column, "MISSING_ROOT", "document element must be <X3D>, found <" + root_.name + ">");
            out.diagnostics = std::move(diags_);
            return out;
        }
        for (const auto& a : root_.attributes) {
            if (a.name == "profile" || a.name == "version")
                scene.meta[a.name] = a.value;
            else if (!ignorable_root_attribute(a.name))
                diag(a.line, a.column, "UNKNOWN_ATTRIBUTE", "<X3D> has no attribute '" + a.name + "'");
        }
        const xml::Element* body = nullptr;
        for (const auto& c : root_.children) {
            if (c.name == "head") {
                head(c, scene);
            } else if (c.name == "Scene") {
                if (body) diag(c.line, c.column, "XML_MALFORMED", "more than one <Scene>");
                body = &c;
            } else {
                diag(c.line, c.column, "UNSUPPORTED_ELEMENT", "unsupported element <" + c.name + "> in <X3D>");
            }
        }
        if (!body) {
            diag(root_.line, root_.column, "MISSING_ROOT", "<X3D> has no <Scene>");
        } else {
            for (const auto& c : body->children) {
                if (statement(c)) continue;
                if (auto n = node(c)) {
                    if (!(*n)->schema().child_node)
                        diag(c.line, c.column, "BAD_CONTAINER", "<" + c.name + "> cannot appear at scene level");
                    scene.roots.push_back(std::move(*n));
                }
            }
        }
        check_statements(scene);
        out.diagnostics = std::move(diags_);
        if (out.diagnostics.empty()) out.scene = std::move(scene);
        return out;
    }

private:
    void diag(int line, int col, std::string code, std::string msg) {
        diags_.push_back({line, col, std::move(code), std::move(msg)});
    }

    void collect_defs(const xml::Element& e) {
        if (auto d = e.attribute("DEF")) all_defs_.insert(d->value);
        for (const auto& c : e.children) collect_defs(c);
    }

    void head(const xml::Element& h, SceneGraph& scene) {
        for (const auto& c : h.children) {
            if (c.name == "meta") {
                auto n = c.attribute("name");
                auto v = c.attribute("content");
                if (!n || !v) {
                    diag(c.line, c.column, "MISSING_ATTRIBUTE", "<meta> needs name and content");
                    continue;
                }
                scene.meta[n->value] = v->value;
            } else if (c.name == "component") {
                auto n = c.attribute("name");
                auto l = c.attribute("level");
                if (!n || !l) {
                    diag(c.line, c.column, "MISSING_ATTRIBUTE", "<component> needs name and level");
                    continue;
                }
                scene.meta["component:" + n->value] = l->value;
            } else {
                diag(c.line, c.column, "UNSUPPORTED_ELEMENT", "unsupported element <" + c.name + "> in <head>");
            }
        }
    }

    /// ROUTE / IMPORT; returns false for anything else.
    bool statement(const xml::Element& e) {
        SceneGraph& scene = statements_;
        auto get = [&](const char* name, std::string& out) {
            if (auto a = e.attribute(name)) {
                out = a->value;
                return true;
            }
            diag(e.line, e.column, "MISSING_ATTRIBUTE", "<" + e.name + "> needs attribute '" + name + "'");
            return false;
        };
        auto no_extras = [&](std::initializer_list<std::string_view> allowed) {
            for (const auto& a : e.attributes)
                if (std::find(allowed.begin(), allowed.end(), a.name) == allowed.end())
                    diag(a.line, a.column, "UNKNOWN_ATTRIBUTE", "<" + e.name + "> has no attribute '" + a.name + "'");
            if (!e.children.empty())
                diag(e.line, e.column, "XML_MALFORMED", "<" + e.name + "> cannot have child elements");
        };
        if (e.name == "ROUTE") {
            Route r;
            bool ok = get("fromNode", r.from_node) & get("fromField", r.from_field) & get("toNode", r.to_node) &
                      get("toField", r.to_field);
            no_extras({"fromNode", "fromField", "toNode", "toField"});
            if (ok) {
                scene.routes.push_back(std::move(r));
                route_pos_.push_back({e.line, e.column});
            }
            return true;
        }
        if (e.name == "IMPORT") {
            Import im;
            bool ok = get("inlineDEF", im.inline_def) & get("importedDEF", im.imported_def);
            if (auto as = e.attribute("AS")) im.as_name = as->value;
            else im.as_name = im.imported_def;
            no_extras({"inlineDEF", "importedDEF", "AS"});
            if (ok) {
                scene.imports.push_back(std::move(im));
                import_pos_.push_back({e.line, e.column});
            }
            return true;
        }
        return false;
    }

    std::optional<NodePtr> node(const xml::Element& e) {
        auto kind = node_kind_from_string(e.name);
        if (!kind) {
            diag(e.line, e.column, "UNSUPPORTED_ELEMENT", "unsupported element <" + e.name + ">");
            return std::nullopt;
        }
        if (auto use = e.attribute("USE")) return use_node(e, *kind, *use);

        Node n(*kind);
        std::string def;
        for (const auto& a : e.attributes) {
            if (a.name == "containerField") continue;
            if (a.name == "DEF") {
                def = a.value;
                if (def.empty()) diag(a.line, a.column, "BAD_VALUE", "empty DEF name");
                else if (!defined_.emplace(def, *kind).second)
                    diag(a.line, a.column, "DUPLICATE_DEF", "DEF name '" + def + "' is already defined");
                n.set_def(def);
                continue;
            }
            const auto* spec = n.schema().find(a.name);
            if (!spec || spec->type == FieldType::SFNode || spec->type == FieldType::MFNode) {
                diag(a.line, a.column, "UNKNOWN_FIELD", e.name + " has no field '" + a.name + "'");
                continue;
            }
            if (!spec->settable()) {
                diag(a.line, a.column, "FIELD_ACCESS",
                     e.name + "." + a.name + " is " + std::string(to_string(spec->access)) + " and cannot be set");
                continue;
            }
            try {
                n.set(a.name, parse_value(spec->type, a.value));
            } catch (const SchemaError& err) {
                diag(a.line, a.column, err.code(), e.name + "." + a.name + ": " + err.what());
            }
        }

        if (!def.empty()) ancestors_.push_back(def);
        std::map<std::string, std::vector<NodePtr>> node_fields;
        for (const auto& c : e.children) {
            if (c.name == "ROUTE" || c.name == "IMPORT") {
                statement(c);
                continue;
            }
            auto child = node(c);
            if (!child) continue;
            const auto& ck = (*child)->schema();
            std::string container(ck.default_container);
            if (auto cf = c.attribute("containerField")) container = cf->value;
            if (container == "children") {
                if (!n.schema().grouping) {
                    diag(c.line, c.column, "CHILDREN_NOT_ALLOWED", e.name + " cannot contain <" + c.name + ">");
                } else if (!ck.child_node) {
                    diag(c.line, c.column, "BAD_CONTAINER", "<" + c.name + "> cannot be a child of " + e.name);
                } else {
                    n.add_child(std::move(*child));
                }
                continue;
            }
            const auto* spec = n.schema().find(container);
            if (!spec || (spec->type != FieldType::SFNode && spec->type != FieldType::MFNode)) {
                diag(c.line, c.column, "BAD_CONTAINER", e.name + " has no node field '" + container + "'");
                continue;
            }
            if (std::find(spec->accepts.begin(), spec->accepts.end(), (*child)->kind()) == spec->accepts.end()) {
                diag(c.line, c.column, "SFNODE_KIND", "<" + c.name + "> is not accepted by " + e.name + "." + container);
                continue;
            }
            auto& slot = node_fields[container];
            if (spec->type == FieldType::SFNode && !slot.empty()) {
                diag(c.line, c.column, "DUPLICATE_FIELD", e.name + "." + container + " is given twice");
                continue;
            }
            slot.push_back(std::move(*child));
        }
        if (!def.empty()) ancestors_.pop_back();

        for (auto& [name, nodes] : node_fields) {
            const auto* spec = n.schema().find(name);
            if (spec->type == FieldType::SFNode)
                n.set(name, nodes.front());
            else
                n.set(name, std::move(nodes));
        }
        return make_node(std::move(n));
    }

    std::optional<NodePtr> use_node(const xml::Element& e, NodeKind kind, const xml::Attribute& use) {
        for (const auto& a : e.attributes)
            if (a.name != "USE" && a.name != "containerField")
                diag(a.line, a.column, "USE_WITH_FIELDS", "USE element cannot also set '" + a.name + "'");
        if (!e.children.empty()) diag(e.line, e.column, "USE_WITH_FIELDS", "USE element cannot have children");
        auto it = defined_.find(use.value);
        if (it == defined_.end()) {
            if (all_defs_.count(use.value))
                diag(use.line, use.column, "USE_BEFORE_DEF", "USE '" + use.value + "' precedes its DEF");
            else
                diag(use.line, use.column, "USE_UNRESOLVED", "USE '" + use.value + "' has no matching DEF");
            return std::nullopt;
        }
        if (it->second != kind) {
            diag(use.line, use.column, "USE_KIND_MISMATCH",
                 "USE '" + use.value + "' names a " + std::string(to_string(it->second)) + ", not a " + e.name);
            return std::nullopt;
        }
        if (std::find(ancestors_.begin(), ancestors_.end(), use.value) != ancestors_.end()) {
            diag(use.line, use.column, "USE_CYCLE", "USE '" + use.value + "' refers to its own ancestor");
            return std::nullopt;
        }
        return make_node(Node::use(kind, use.value));
    }

    void check_statements(SceneGraph& scene) {
        scene.routes = std::move(statements_.routes);
        scene.imports = std::move(statements_.imports);
        if (!diags_.empty()) return;
        auto issues = check_routes(scene);
        for (std::size_t i = 0; i < issues.routes.size(); ++i)
            for (const auto& is : issues.routes[i])
                diag(route_pos_[i].first, route_pos_[i].second, is.code, is.message);
        for (std::size_t i = 0; i < issues.imports.size(); ++i)
            for (const auto& is : issues.imports[i])
                diag(import_pos_[i].first, import_pos_[i].second, is.code, is.message);
    }

    const xml::Element& root_;
    std::set<std::string, std::less<>> all_defs_;
    std::map<std::string, NodeKind, std::less<>> defined_;
    std::vector<std::string> ancestors_;
    std::vector<ParseDiagnostic> diags_;
    std::vector<std::pair<int, int>> route_pos_;
    std::vector<std::pair<int, int>> import_pos_;
    SceneGraph statements_;  // ROUTE/IMPORT in document order
};

// ---------------------------------------------------------------------------

std::string escape_attr(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '\'': out += "&apos;"; break;
            case '\n': out += "&#10;"; break;
            case '\r': out += "&#13;"; break;
            case '\t': out += "&#9;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

class Writer {
public:
    std::string run(const SceneGraph& scene) {
        out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        auto meta = [&](const char* key, std::string_view fallback) {
            auto it = scene.meta.find(key);
            return it == scene.meta.end() ? std::string(fallback) : it->second;
        };
        out_ += "<X3D profile='" + escape_attr(meta("profile", kDefaultProfile)) + "' version='" +
                escape_attr(meta("version", kDefaultVersion)) + "'>\n";
        std::string head;
        for (const auto& [k, v] : scene.meta)
            if (k.starts_with("component:"))
                head += "    <component name='" + escape_attr(k.substr(10)) + "' level='" + escape_attr(v) + "'/>\n";
        for (const auto& [k, v] : scene.meta)
            if (k != "profile" && k != "version" && !k.starts_with("component:"))
                head += "    <meta name='" + escape_attr(k) + "' content='" + escape_attr(v) + "'/>\n";
        if (!head.empty()) out_ += "  <head>\n" + head + "  </head>\n";
        out_ += "  <Scene>\n";
        for (const auto& r : scene.roots) node(*r, 2, "children");
        for (const auto& im : scene.imports)
            out_ += "    <IMPORT inlineDEF='" + escape_attr(im.inline_def) + "' importedDEF='" +
                    escape_attr(im.imported_def) + "' AS='" + escape_attr(im.as_name) + "'/>\n";
        for (const auto& r : scene.routes)
            out_ += "    <ROUTE fromNode='" + escape_attr(r.from_node) + "' fromField='" + escape_attr(r.from_field) +
                    "' toNode='" + escape_attr(r.to_node) + "' toField='" + escape_attr(r.to_field) + "'/>\n";
        out_ += "  </Scene>\n</X3D>\n";
        return std::move(out_);
    }

private:
    void node(const Node& n, int depth, std::string_view container) {
        const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
        const auto& s = n.schema();
        out_ += indent + "<" + std::string(to_string(n.kind()));
        std::string tail;
        if (container != s.default_container) tail = " containerField='" + std::string(container) + "'";
        if (n.is_use()) {
            out_ += " USE='" + escape_attr(n.use_name()) + "'" + tail + "/>\n";
            return;
        }
        if (!n.def_name().empty()) out_ += " DEF='" + escape_attr(n.def_name()) + "'";
        bool has_elements = !n.children().empty();
        for (const auto& e : n.fields()) {
            const auto& spec = s.fields[e.id];
            if (spec.type == FieldType::SFNode) {
                has_elements |= std::get<NodePtr>(e.value) != nullptr;
                continue;
            }
            if (spec.type == FieldType::MFNode) {
                has_elements |= !std::get<std::vector<NodePtr>>(e.value).empty();
                continue;
            }
            out_ += " " + std::string(spec.name) + "='" + escape_attr(format_value(e.value)) + "'";
        }
        out_ += tail;
        if (!has_elements) {
            out_ += "/>\n";
            return;
        }
        out_ += ">\n";
        for (const auto& e : n.fields()) {
            const auto& spec = s.fields[e.id];
            if (auto p = std::get_if<NodePtr>(&e.value)) {
                if (*p) node(**p, depth + 1, spec.name);
            } else if (auto l = std::get_if<std::vector<NodePtr>>(&e.value)) {
                for (const auto& c : *l)
                    if (c) node(*c, depth + 1, spec.name);
            }
        }
        for (const auto& c : n.children()) node(*c, depth + 1, "children");
        out_ += indent + "</" + std::string(to_string(n.kind())) + ">\n";
    }

    std::string out_;
};

}  // namespace

ParseResult parse_xml(std::string_view bytes) {
    auto doc = xml::read(bytes);
    if (auto err = std::get_if<xml::Error>(&doc)) {
        ParseResult r;
        r.diagnostics.push_back({err->line, err->column, "XML_MALFORMED", err->message});
        return r;
    }
    return SceneReader(std::get<xml::Element>(doc)).run();
}

std::string serialize_xml(const SceneGraph& scene) { return Writer().run(scene); }

}  // namespace scenery
