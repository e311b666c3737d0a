#include "scenery/stats.hpp"

#include <algorithm>

namespace scenery {

int SceneStats::total_nodes() const {
    int total = 0;
    for (const auto& [_, n] : node_count_by_kind) total += n;
    return total;
}

namespace {

class Counter {
public:
    Counter(const InlineResolver& resolver, SceneStats& out) : resolver_(resolver), out_(out) {}

    void scene(const SceneGraph& s) {
        auto defs = def_table(s);
        defs_.push_back(&defs);
        for (const auto& r : s.roots) node(*r);
        defs_.pop_back();
    }

private:
    void node(const Node& n) {
        if (n.is_use()) {
            auto it = defs_.back()->find(n.use_name());
            if (it == defs_.back()->end() || std::count(expanding_.begin(), expanding_.end(), it->second)) return;
            expanding_.push_back(it->second);
            node(*it->second);
            expanding_.pop_back();
            return;
        }
        ++out_.node_count_by_kind[std::string(to_string(n.kind()))];
        switch (n.kind()) {
            case NodeKind::Shape: ++out_.shape_count; break;
            case NodeKind::ImageTexture: ++out_.image_texture_count; break;
            case NodeKind::AudioClip: ++out_.audio_clip_count; break;
            case NodeKind::Inline:
                ++out_.inline_count;
                expand_inline(n);
                break;
            default: break;
        }
        for (const auto& e : n.fields()) {
            if (auto p = std::get_if<NodePtr>(&e.value)) {
                if (*p) node(**p);
            } else if (auto l = std::get_if<std::vector<NodePtr>>(&e.value)) {
                for (const auto& c : *l)
                    if (c) node(*c);
            }
        }
        for (const auto& c : n.children()) node(*c);
    }

    void expand_inline(const Node& n) {
        const auto& urls = n.get_as<std::vector<std::string>>("url");
        if (!n.get_as<bool>("load")) return;
        for (const auto& url : urls) {
            if (std::find(inline_stack_.begin(), inline_stack_.end(), url) != inline_stack_.end()) {
                out_.warnings.push_back("INLINE_CYCLE " + url);
                return;
            }
            std::shared_ptr<const SceneGraph> s = resolver_ ? resolver_(url) : nullptr;
            if (!s) continue;
            inline_stack_.push_back(url);
            scene(*s);
            inline_stack_.pop_back();
            return;
        }
        out_.warnings.push_back("INLINE_MISSING " + (urls.empty() ? std::string("<no url>") : urls.front()));
    }

    const InlineResolver& resolver_;
    SceneStats& out_;
    std::vector<const std::map<std::string, const Node*, std::less<>>*> defs_;
    std::vector<const Node*> expanding_;
    std::vector<std::string> inline_stack_;
};

}  // namespace

SceneStats scene_stats(const SceneGraph& scene, const InlineResolver& resolver) {
    SceneStats out;
    Counter(resolver, out).scene(scene);
    return out;
}

}  // namespace scenery
