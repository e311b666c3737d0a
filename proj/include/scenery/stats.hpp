#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "scenery/scene.hpp"

namespace scenery {

/// Maps an Inline url to its scene, or nullptr when it cannot be loaded.
using InlineResolver = std::function<std::shared_ptr<const SceneGraph>(const std::string& url)>;

struct SceneStats {
    int shape_count = 0;
    int image_texture_count = 0;
    int audio_clip_count = 0;
    int inline_count = 0;
    std::map<std::string, int> node_count_by_kind;
    std::vector<std::string> warnings;

    int total_nodes() const;
    friend bool operator==(const SceneStats&, const SceneStats&) = default;
};

/// Counts nodes with every resolvable Inline expanded. A USE adds its target
/// (with its whole subtree) once per instantiation site. Inlines that fail to
/// resolve contribute nothing and add a warning.
SceneStats scene_stats(const SceneGraph& scene, const InlineResolver& resolver = {});

}  // namespace scenery
