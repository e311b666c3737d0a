#include "scenery/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace scenery {

bool ValidationReport::has_error(std::string_view code) const {
    return std::any_of(errors.begin(), errors.end(), [&](const Issue& i) { return i.code == code; });
}

namespace {

std::string describe(const Node& n) {
    std::string s(to_string(n.kind()));
    if (n.is_use()) s += " USE '" + n.use_name() + "'";
    else if (!n.def_name().empty()) s += " '" + n.def_name() + "'";
    return s;
}

class Validator {
public:
    explicit Validator(const SceneGraph& scene) : scene_(scene), defs_(def_table(scene)) {
        for (const auto& r : scene.routes) {
            route_sources_.insert(r.from_node);
            route_targets_.insert(r.to_node);
        }
    }

    ValidationReport run() {
        for (std::size_t i = 0; i < scene_.roots.size(); ++i) {
            const auto& root = *scene_.roots[i];
            if (!root.schema().child_node)
                error("CHILD_KIND", "/" + std::to_string(i), describe(root) + " cannot appear at scene level");
            walk(root, "/" + std::to_string(i), false);
        }
        auto ri = check_routes(scene_);
        for (auto& list : ri.routes)
            for (auto& issue : list) report_.errors.push_back(std::move(issue));
        for (auto& list : ri.imports)
            for (auto& issue : list) report_.errors.push_back(std::move(issue));
        return std::move(report_);
    }

private:
    void error(std::string code, std::string path, std::string msg) {
        report_.errors.push_back({std::move(code), std::move(path), std::move(msg)});
    }
    void warning(std::string code, std::string path, std::string msg) {
        report_.warnings.push_back({std::move(code), std::move(path), std::move(msg)});
    }

    void walk(const Node& n, const std::string& path, bool under_static) {
        if (n.is_use()) {
            check_use(n, path, under_static);
            return;
        }
        if (!n.def_name().empty()) {
            if (!seen_.emplace(n.def_name(), n.kind()).second)
                error("DUPLICATE_DEF", path, "DEF name '" + n.def_name() + "' is already defined");
        }
        check_fields(n, path);
        check_kind_rules(n, path);
        if (under_static) check_static(n, path);

        if (!n.def_name().empty()) ancestors_.push_back(n.def_name());
        for (const auto& e : n.fields()) {
            const auto& spec = n.schema().fields[e.id];
            std::string fpath = path + "." + std::string(spec.name);
            if (auto p = std::get_if<NodePtr>(&e.value)) {
                if (*p) walk(**p, fpath, under_static);
            } else if (auto l = std::get_if<std::vector<NodePtr>>(&e.value)) {
                for (std::size_t i = 0; i < l->size(); ++i)
                    if ((*l)[i]) walk(*(*l)[i], fpath + "[" + std::to_string(i) + "]", under_static);
            }
        }
        if (!n.children().empty() && !n.schema().grouping)
            error("CHILDREN_NOT_ALLOWED", path, describe(n) + " is not a grouping node");
        const bool child_static = under_static || n.kind() == NodeKind::StaticGroup;
        for (std::size_t i = 0; i < n.children().size(); ++i) {
            const auto& c = *n.children()[i];
            std::string cpath = path + "/" + std::to_string(i);
            if (!c.schema().child_node)
                error("CHILD_KIND", cpath, describe(c) + " cannot appear in a children list");
            walk(c, cpath, child_static);
        }
        if (!n.def_name().empty()) ancestors_.pop_back();
    }

    void check_use(const Node& n, const std::string& path, bool under_static) {
        const auto& name = n.use_name();
        auto seen = seen_.find(name);
        if (seen == seen_.end()) {
            if (defs_.count(name))
                error("USE_BEFORE_DEF", path, "USE '" + name + "' precedes its DEF");
            else
                error("USE_UNRESOLVED", path, "USE '" + name + "' has no matching DEF");
            return;
        }
        if (seen->second != n.kind())
            error("USE_KIND_MISMATCH", path,
                  "USE '" + name + "' is " + std::string(to_string(n.kind())) + " but the DEF is " +
                      std::string(to_string(seen->second)));
        if (std::find(ancestors_.begin(), ancestors_.end(), name) != ancestors_.end()) {
            error("USE_CYCLE", path, "USE '" + name + "' refers to its own ancestor");
            return;
        }
        if (under_static) {
            auto it = defs_.find(name);
            if (it != defs_.end()) {
                std::set<const Node*> visiting;
                check_static_expansion(*it->second, path + "->" + name, visiting);
            }
        }
    }

    void check_static_expansion(const Node& n, const std::string& path, std::set<const Node*>& visiting) {
        if (n.is_use()) {
            auto it = defs_.find(n.use_name());
            if (it == defs_.end() || !visiting.insert(it->second).second) return;
            check_static_expansion(*it->second, path + "->" + n.use_name(), visiting);
            visiting.erase(it->second);
            return;
        }
        check_static(n, path);
        for (std::size_t i = 0; i < n.children().size(); ++i)
            check_static_expansion(*n.children()[i], path + "/" + std::to_string(i), visiting);
    }

    void check_static(const Node& n, const std::string& path) {
        if (is_sensor(n.kind()) || is_interpolator(n.kind()))
            error("STATIC_DYNAMIC_NODE", path, describe(n) + " lies beneath a StaticGroup");
        if (!n.def_name().empty()) {
            if (route_targets_.count(n.def_name()))
                error("STATIC_ROUTE_TARGET", path, "route target " + describe(n) + " lies beneath a StaticGroup");
            if (route_sources_.count(n.def_name()))
                error("STATIC_ROUTE_SOURCE", path, "route source " + describe(n) + " lies beneath a StaticGroup");
        }
    }

    void check_fields(const Node& n, const std::string& path) {
        const auto& s = n.schema();
        for (const auto& e : n.fields()) {
            if (e.id >= s.fields.size()) {
                error("UNKNOWN_FIELD", path, describe(n) + " carries an unknown field id");
                continue;
            }
            const auto& spec = s.fields[e.id];
            if (!spec.settable())
                error("FIELD_ACCESS", path, std::string(spec.name) + " is " + std::string(to_string(spec.access)));
            if (type_of(e.value) != spec.type) {
                error("FIELD_TYPE", path, std::string(spec.name) + " expects " + std::string(to_string(spec.type)));
                continue;
            }
            auto accepts = [&](const NodePtr& p) {
                return !p || std::find(spec.accepts.begin(), spec.accepts.end(), p->kind()) != spec.accepts.end();
            };
            if (auto p = std::get_if<NodePtr>(&e.value); p && !accepts(*p))
                error("SFNODE_KIND", path, describe(**p) + " not accepted by " + std::string(spec.name));
        }
    }

    void check_kind_rules(const Node& n, const std::string& path) {
        switch (n.kind()) {
            case NodeKind::LOD: {
                const auto& range = n.get_as<std::vector<double>>("range");
                for (std::size_t i = 0; i < range.size(); ++i) {
                    if (range[i] < 0.0) error("LOD_RANGE_VALUE", path, "LOD range values must be non-negative");
                    if (i > 0 && range[i] < range[i - 1])
                        error("LOD_RANGE_ORDER", path, "LOD ranges must be sorted ascending");
                }
                if (!range.empty() && n.children().size() != range.size() + 1)
                    error("LOD_CHILD_COUNT", path,
                          "LOD with " + std::to_string(range.size()) + " ranges needs " +
                              std::to_string(range.size() + 1) + " children, has " +
                              std::to_string(n.children().size()));
                break;
            }
            case NodeKind::PositionInterpolator:
                check_track(n, path, n.get_as<std::vector<Vec3>>("keyValue").size());
                break;
            case NodeKind::OrientationInterpolator:
                check_track(n, path, n.get_as<std::vector<Rotation>>("keyValue").size());
                break;
            case NodeKind::ColorInterpolator:
                check_track(n, path, n.get_as<std::vector<Color>>("keyValue").size());
                break;
            case NodeKind::TimeSensor:
                if (!(n.get_as<Time>("cycleInterval").seconds > 0.0))
                    error("TIME_CYCLE", path, "cycleInterval must be positive");
                break;
            case NodeKind::ProximitySensor: {
                const auto& s = n.get_as<Vec3>("size");
                if (s.x < 0 || s.y < 0 || s.z < 0) error("PROXIMITY_SIZE", path, "size components must be >= 0");
                break;
            }
            case NodeKind::Box: {
                const auto& s = n.get_as<Vec3>("size");
                if (!(s.x > 0 && s.y > 0 && s.z > 0)) error("BOX_SIZE", path, "Box size components must be > 0");
                break;
            }
            case NodeKind::IndexedFaceSet: {
                const auto& coord = n.get_as<NodePtr>("coord");
                if (!coord || coord->is_use()) break;
                const auto count = static_cast<std::int64_t>(coord->get_as<std::vector<Vec3>>("point").size());
                for (auto i : n.get_as<std::vector<std::int32_t>>("coordIndex")) {
                    if (i < -1 || i >= count) {
                        error("IFS_INDEX", path, "coordIndex " + std::to_string(i) + " outside [-1, " +
                                                     std::to_string(count) + ")");
                        break;
                    }
                }
                break;
            }
            case NodeKind::Material:
                for (auto name : {"ambientIntensity", "shininess", "transparency"}) {
                    double v = n.get_as<double>(name);
                    if (v < 0.0 || v > 1.0) error("MATERIAL_RANGE", path, std::string(name) + " must lie in [0, 1]");
                }
                break;
            case NodeKind::Inline:
                if (n.get_as<std::vector<std::string>>("url").empty())
                    warning("INLINE_NO_URL", path, "Inline has no url");
                break;
            default:
                break;
        }
    }

    void check_track(const Node& n, const std::string& path, std::size_t values) {
        const auto& key = n.get_as<std::vector<double>>("key");
        if (key.size() != values)
            error("INTERP_KEY_COUNT", path,
                  "key has " + std::to_string(key.size()) + " entries, keyValue has " + std::to_string(values));
        for (std::size_t i = 0; i < key.size(); ++i) {
            if (key[i] < 0.0 || key[i] > 1.0) {
                error("INTERP_KEY_RANGE", path, "keys must lie in [0, 1]");
                break;
            }
        }
        for (std::size_t i = 1; i < key.size(); ++i) {
            if (key[i] < key[i - 1]) {
                error("INTERP_KEY_ORDER", path, "keys must be non-decreasing");
                break;
            }
        }
    }

    const SceneGraph& scene_;
    std::map<std::string, const Node*, std::less<>> defs_;
    std::set<std::string, std::less<>> route_sources_;
    std::set<std::string, std::less<>> route_targets_;
    std::map<std::string, NodeKind, std::less<>> seen_;
    std::vector<std::string> ancestors_;
    ValidationReport report_;
};

}  // namespace

RouteIssues check_routes(const SceneGraph& scene) {
    RouteIssues out;
    const auto defs = def_table(scene);
    std::set<std::string, std::less<>> imported;

    out.imports.resize(scene.imports.size());
    for (std::size_t i = 0; i < scene.imports.size(); ++i) {
        const auto& im = scene.imports[i];
        const std::string path = "IMPORT[" + std::to_string(i) + "]";
        auto& issues = out.imports[i];
        auto it = defs.find(im.inline_def);
        if (it == defs.end() || it->second->kind() != NodeKind::Inline)
            issues.push_back({"IMPORT_UNRESOLVED", path, "'" + im.inline_def + "' is not a DEF'd Inline"});
        if (im.imported_def.empty() || im.as_name.empty())
            issues.push_back({"IMPORT_UNRESOLVED", path, "IMPORT needs importedDEF and AS names"});
        if (defs.count(im.as_name) || !imported.insert(im.as_name).second)
            issues.push_back({"IMPORT_NAME_CLASH", path, "name '" + im.as_name + "' is already in use"});
    }

    out.routes.resize(scene.routes.size());
    for (std::size_t i = 0; i < scene.routes.size(); ++i) {
        const auto& r = scene.routes[i];
        const std::string path = "ROUTE[" + std::to_string(i) + "]";
        auto& issues = out.routes[i];
        const FieldSpec* ends[2] = {nullptr, nullptr};
        bool checkable = true;
        for (int side = 0; side < 2; ++side) {
            const std::string& node = side == 0 ? r.from_node : r.to_node;
            const std::string& field = side == 0 ? r.from_field : r.to_field;
            auto it = defs.find(node);
            if (it == defs.end()) {
                if (!imported.count(node))
                    issues.push_back({"ROUTE_UNRESOLVED_NODE", path, "no DEF named '" + node + "'"});
                checkable = false;
                continue;
            }
            const Node& n = *it->second;
            ends[side] = resolve_event(n.kind(), field, side == 0);
            if (!ends[side]) {
                const bool exists = resolve_event(n.kind(), field, side != 0) != nullptr;
                issues.push_back({exists ? "ROUTE_ACCESS" : "ROUTE_UNKNOWN_FIELD", path,
                                  std::string(to_string(n.kind())) + " '" + node + "' has no " +
                                      (side == 0 ? "output" : "input") + " event '" + field + "'"});
                checkable = false;
            }
        }
        if (checkable && ends[0]->type != ends[1]->type)
            issues.push_back({"ROUTE_TYPE_MISMATCH", path,
                              std::string(to_string(ends[0]->type)) + " cannot be routed to " +
                                  std::string(to_string(ends[1]->type))});
    }
    return out;
}

ValidationReport validate(const SceneGraph& scene) { return Validator(scene).run(); }

}  // namespace scenery
