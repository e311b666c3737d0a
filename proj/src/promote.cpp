#include "scenery/promote.hpp"

#include <map>
#include <set>
#include <stdexcept>

#include "scenery/validate.hpp"

namespace scenery {

namespace {

class Promoter {
public:
    explicit Promoter(const SceneGraph& scene) : defs_(def_table(scene)) {
        for (const auto& r : scene.routes) {
            routed_.insert(r.from_node);
            routed_.insert(r.to_node);
        }
        for (const auto& im : scene.imports) routed_.insert(im.inline_def);
        for_each_node(scene, [&](const Node& n) {
            if (n.is_use()) use_sites_[n.use_name()].push_back(&n);
        });
    }

    NodePtr rebuild(const NodePtr& p) {
        const Node& n = *p;
        if (n.is_use() || !n.schema().grouping) return p;
        std::vector<NodePtr> kids;
        bool changed = false;
        for (const auto& c : n.children()) {
            kids.push_back(rebuild(c));
            changed |= kids.back() != c;
        }
        const bool promote = n.kind() == NodeKind::Group && eligible(n);
        if (!changed && !promote) return p;
        Node copy = promote ? n.with_kind(NodeKind::StaticGroup) : n;
        copy.set_children(std::move(kids));
        return make_node(std::move(copy));
    }

private:
    struct Scan {
        bool dynamic = false;
        std::set<std::string> defs;
        std::set<const Node*> uses;
        std::set<const Node*> expanding;
    };

    bool eligible(const Node& group) {
        Scan scan;
        walk(group, scan);
        if (scan.dynamic) return false;
        for (const auto& name : scan.defs) {
            auto it = use_sites_.find(name);
            if (it == use_sites_.end()) continue;
            for (const Node* site : it->second)
                if (!scan.uses.count(site)) return false;
        }
        return true;
    }

    void walk(const Node& n, Scan& scan) {
        if (scan.dynamic) return;
        if (n.is_use()) {
            scan.uses.insert(&n);
            if (routed_.count(n.use_name())) {
                scan.dynamic = true;
                return;
            }
            auto it = defs_.find(n.use_name());
            if (it == defs_.end() || !scan.expanding.insert(it->second).second) return;
            walk_content(*it->second, scan);
            scan.expanding.erase(it->second);
            return;
        }
        if (!n.def_name().empty()) {
            scan.defs.insert(n.def_name());
            if (routed_.count(n.def_name())) {
                scan.dynamic = true;
                return;
            }
        }
        walk_content(n, scan);
    }

    void walk_content(const Node& n, Scan& scan) {
        const auto k = n.kind();
        if (is_sensor(k) || is_interpolator(k) || is_bindable(k) || k == NodeKind::Inline) {
            scan.dynamic = true;
            return;
        }
        if (!n.is_use() && !n.def_name().empty() && routed_.count(n.def_name())) {
            scan.dynamic = true;
            return;
        }
        for (const auto& e : n.fields()) {
            if (auto p = std::get_if<NodePtr>(&e.value)) {
                if (*p) walk(**p, scan);
            } else if (auto l = std::get_if<std::vector<NodePtr>>(&e.value)) {
                for (const auto& c : *l)
                    if (c) walk(*c, scan);
            }
        }
        for (const auto& c : n.children()) walk(*c, scan);
    }

    std::map<std::string, const Node*, std::less<>> defs_;
    std::set<std::string, std::less<>> routed_;
    std::map<std::string, std::vector<const Node*>, std::less<>> use_sites_;
};

}  // namespace

SceneGraph promote_static_groups(const SceneGraph& scene) {
    auto report = validate(scene);
    if (!report.ok())
        throw std::invalid_argument("cannot promote a scene with validation errors (first: " +
                                    report.errors.front().code + " at " + report.errors.front().path + ")");
    Promoter p(scene);
    SceneGraph out = scene;
    for (auto& r : out.roots) r = p.rebuild(r);
    return out;
}

}  // namespace scenery
