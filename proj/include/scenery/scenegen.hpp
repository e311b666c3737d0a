#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenery/stats.hpp"

namespace scenery {

struct GenParams {
    int car_count = 2;
    int building_count = 12;
    /// Coordinate points per train-section face mesh; also scales the ground
    /// grid, the station canopy and the Georgia keyframe count.
    int mesh_density = 500;
    bool include_debug_backdrop = false;
    bool include_debug_camera_cube = false;
    Vec3 savannah_offset{0, -500, 0};

    /// Throws std::invalid_argument.
    void check() const;
};

/// Range of the LOD wrapping each scene's content in the composite.
inline constexpr double kSceneLodRange = 240.0;

struct ViewpointInfo {
    std::string def;          // qualified as the runtime addresses it
    std::string description;  // display label, e.g. "Georgia Overhead"
    bool animated = false;    // position or orientation is a route target
};

struct InterpolatorInfo {
    std::string def;
    NodeKind kind;
    std::size_t keys = 0;
    std::vector<std::string> targets;  // "Node.field"
};

/// A hinge between two train sections. `point` is given in the shared
/// coordinates of both sections (the rear section's rotation center).
struct Coupling {
    std::string front;
    std::string rear;
    Vec3 point;
};

struct SceneManifest {
    std::string file;
    /// Every scene-graph file involved, this one first.
    std::vector<std::string> files;
    /// Expected scene_stats with all inlines expanded.
    SceneStats stats;
    std::vector<ViewpointInfo> viewpoints;
    /// Routes across the expanded scene (each inlined file counted once per Inline).
    std::size_t route_count = 0;
    std::vector<InterpolatorInfo> interpolators;
    std::vector<Coupling> couplings;

    int static_viewpoints() const;
    int animated_viewpoints() const;
};

struct GeneratedScene {
    SceneGraph scene;
    SceneManifest manifest;
    /// Inlined files by url (the main scene is not included).
    std::map<std::string, std::shared_ptr<const SceneGraph>> files;

    InlineResolver resolver() const;
};

GeneratedScene generate_georgia(const GenParams& p);
GeneratedScene generate_savannah(const GenParams& p);
/// Georgia at the origin with the Savannah scene inlined at the offset; both
/// wrapped in LODs whose far child is empty.
GeneratedScene generate_composite(const GenParams& p);

GeneratedScene generate_train_engine(const GenParams& p);
GeneratedScene generate_train_car(const GenParams& p);
GeneratedScene generate_station(const GenParams& p);
GeneratedScene generate_backdrop(const GenParams& p);

struct CorpusEntry {
    std::string label;  // "Georgia Scene", "Train Engine", ...
    std::string file;   // "Georgia.x3d", ...
    GeneratedScene generated;
    std::size_t xml_bytes = 0;
    std::size_t target_bytes = 0;
    int mesh_density = 0;
    bool within_window = false;  // xml_bytes within +-25% of target_bytes
};

/// The five bench artifacts, each sized by bisecting mesh_density (at most
/// 20 steps) towards its reference XML size.
std::vector<CorpusEntry> generate_bench_corpus(const GenParams& p);

nlohmann::ordered_json manifest_json(const SceneManifest& m);

}  // namespace scenery
