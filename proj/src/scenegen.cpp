#include "scenery/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "scenery/xml.hpp"

namespace scenery {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrainCycle = 40.0;
constexpr double kSunCycle = 12.0;
const Vec3 kLodCenter{0, 50, 0};

using Strings = std::vector<std::string>;

void merge(SceneStats& into, const SceneStats& from) {
    into.shape_count += from.shape_count;
    into.image_texture_count += from.image_texture_count;
    into.audio_clip_count += from.audio_clip_count;
    into.inline_count += from.inline_count;
    for (const auto& [k, n] : from.node_count_by_kind) into.node_count_by_kind[k] += n;
    into.warnings.insert(into.warnings.end(), from.warnings.begin(), from.warnings.end());
}

// Builds one file while keeping the manifest in step with what it creates.
class Builder {
public:
    explicit Builder(std::string file) {
        out_.manifest.file = file;
        out_.manifest.files = {std::move(file)};
    }

    Node node(NodeKind k) {
        auto& s = out_.manifest.stats;
        ++s.node_count_by_kind[std::string(to_string(k))];
        if (k == NodeKind::Shape) ++s.shape_count;
        if (k == NodeKind::ImageTexture) ++s.image_texture_count;
        if (k == NodeKind::AudioClip) ++s.audio_clip_count;
        if (k == NodeKind::Inline) ++s.inline_count;
        return Node(k);
    }

    Node def(NodeKind k, std::string name) {
        Node n = node(k);
        n.set_def(std::move(name));
        return n;
    }

    Node inline_of(const GeneratedScene& g, const std::string& def = {}) {
        Node n = node(NodeKind::Inline);
        if (!def.empty()) n.set_def(def);
        n.set("url", Strings{g.manifest.file});
        absorb(g, def);
        return n;
    }

    NodePtr use_inline(const GeneratedScene& g, const std::string& def) {
        node(NodeKind::Inline);
        merge(out_.manifest.stats, g.manifest.stats);
        return make_node(Node::use(NodeKind::Inline, def));
    }

    void route(std::string from, std::string ff, std::string to, std::string tf) {
        out_.scene.routes.push_back({std::move(from), std::move(ff), std::move(to), std::move(tf)});
        ++out_.manifest.route_count;
    }

    void viewpoint(std::string def, std::string description, bool animated) {
        out_.manifest.viewpoints.push_back({std::move(def), std::move(description), animated});
    }

    void interpolator(std::string def, NodeKind kind, std::size_t keys, Strings targets) {
        out_.manifest.interpolators.push_back({std::move(def), kind, keys, std::move(targets)});
    }

    void coupling(std::string front, std::string rear, Vec3 point) {
        out_.manifest.couplings.push_back({std::move(front), std::move(rear), point});
    }

    GeneratedScene& out() { return out_; }

    GeneratedScene finish(std::vector<NodePtr> roots, std::string title) {
        out_.scene.roots = std::move(roots);
        out_.scene.meta["profile"] = "Immersive";
        out_.scene.meta["version"] = "3.3";
        out_.scene.meta["title"] = std::move(title);
        return std::move(out_);
    }

private:
    void absorb(const GeneratedScene& g, const std::string& def) {
        auto& m = out_.manifest;
        merge(m.stats, g.manifest.stats);
        m.route_count += g.manifest.route_count;
        const std::string prefix = def.empty() ? "" : def + ".";
        for (auto v : g.manifest.viewpoints) {
            v.def = prefix + v.def;
            m.viewpoints.push_back(std::move(v));
        }
        for (auto i : g.manifest.interpolators) {
            i.def = prefix + i.def;
            for (auto& t : i.targets) t = prefix + t;
            m.interpolators.push_back(std::move(i));
        }
        for (const auto& f : g.manifest.files)
            if (std::find(m.files.begin(), m.files.end(), f) == m.files.end()) m.files.push_back(f);
        out_.files.emplace(g.manifest.file, std::make_shared<const SceneGraph>(g.scene));
        for (const auto& [url, s] : g.files) out_.files.emplace(url, s);
    }

    GeneratedScene out_;
};

Rotation yaw(double a) { return Rotation({0, 1, 0}, a); }

NodePtr box_shape(Builder& b, Vec3 size, Color diffuse, const std::string& texture = {}) {
    Node shape = b.node(NodeKind::Shape);
    Node app = b.node(NodeKind::Appearance);
    app.set("material", make_node(b.node(NodeKind::Material).set("diffuseColor", diffuse)));
    if (!texture.empty()) app.set("texture", make_node(b.node(NodeKind::ImageTexture).set("url", Strings{texture})));
    shape.set("appearance", make_node(std::move(app)));
    shape.set("geometry", make_node(b.node(NodeKind::Box).set("size", size)));
    return make_node(std::move(shape));
}

struct Mesh {
    std::vector<Vec3> points;
    std::vector<std::int32_t> index;
};

NodePtr mesh_shape(Builder& b, const Mesh& m, Color diffuse, const std::string& texture = {}, double shininess = 0.2) {
    Node shape = b.node(NodeKind::Shape);
    Node app = b.node(NodeKind::Appearance);
    Node mat = b.node(NodeKind::Material);
    mat.set("diffuseColor", diffuse).set("shininess", shininess).set("specularColor", Color(0.4, 0.4, 0.4));
    app.set("material", make_node(std::move(mat)));
    if (!texture.empty()) app.set("texture", make_node(b.node(NodeKind::ImageTexture).set("url", Strings{texture})));
    shape.set("appearance", make_node(std::move(app)));
    Node ifs = b.node(NodeKind::IndexedFaceSet);
    ifs.set("coord", make_node(b.node(NodeKind::Coordinate).set("point", m.points)));
    ifs.set("coordIndex", m.index).set("solid", false).set("creaseAngle", 0.5);
    shape.set("geometry", make_node(std::move(ifs)));
    return make_node(std::move(shape));
}

void quads(Mesh& m, int rows, int cols, bool wrap) {
    const int span = wrap ? cols : cols - 1;
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < span; ++c) {
            const int c1 = (c + 1) % cols;
            m.index.insert(m.index.end(), {r * cols + c, r * cols + c1, (r + 1) * cols + c1, (r + 1) * cols + c, -1});
        }
}

// Prism side mesh along x with an elliptic profile (arc a0..a1), about
// `density` points in total.
Mesh extrusion(double x0, double x1, double cy, double ry, double rz, int density, double a0 = 0,
               double a1 = 2 * kPi) {
    const bool closed = a1 - a0 >= 2 * kPi - 1e-12;
    const int per_ring = std::max(4, static_cast<int>(std::lround(std::sqrt(static_cast<double>(density)))));
    const int rings = std::max(2, density / per_ring);
    Mesh m;
    for (int r = 0; r < rings; ++r) {
        const double x = x0 + (x1 - x0) * r / (rings - 1);
        for (int j = 0; j < per_ring; ++j) {
            const double t = a0 + (a1 - a0) * j / (closed ? per_ring : per_ring - 1);
            m.points.push_back({x, cy + ry * std::sin(t), rz * std::cos(t)});
        }
    }
    quads(m, rings, per_ring, closed);
    return m;
}

Mesh grid(double w, double d, int density, double relief) {
    const int nx = std::max(2, static_cast<int>(std::lround(std::sqrt(density * w / d))));
    const int nz = std::max(2, density / nx);
    Mesh m;
    for (int i = 0; i < nz; ++i)
        for (int j = 0; j < nx; ++j) {
            const double x = -w / 2 + w * j / (nx - 1);
            const double z = -d / 2 + d * i / (nz - 1);
            m.points.push_back({x, relief * std::sin(x / 23.0) * std::cos(z / 17.0), z});
        }
    quads(m, nz, nx, false);
    return m;
}

Mesh quad(double x0, double z0, double x1, double z1, double y) {
    return {{{x0, y, z0}, {x1, y, z0}, {x1, y, z1}, {x0, y, z1}}, {0, 3, 2, 1, -1}};
}

std::vector<double> uniform_keys(int n) {
    std::vector<double> k;
    for (int j = 0; j < n; ++j) k.push_back(static_cast<double>(j) / (n - 1));
    return k;
}

Node position_interpolator(Builder& b, const std::string& def, const std::vector<double>& keys,
                           const std::vector<Vec3>& values, Strings targets) {
    b.interpolator(def, NodeKind::PositionInterpolator, keys.size(), std::move(targets));
    Node n = b.def(NodeKind::PositionInterpolator, def);
    n.set("key", keys).set("keyValue", values);
    return n;
}

Node orientation_interpolator(Builder& b, const std::string& def, const std::vector<double>& keys,
                              const std::vector<Rotation>& values, Strings targets) {
    b.interpolator(def, NodeKind::OrientationInterpolator, keys.size(), std::move(targets));
    Node n = b.def(NodeKind::OrientationInterpolator, def);
    n.set("key", keys).set("keyValue", values);
    return n;
}

// Drive `targets` ("Node.field") from an interpolator fed by `timer`.
void wire(Builder& b, const std::string& timer, const std::string& interp, const Strings& targets) {
    b.route(timer, "fraction_changed", interp, "set_fraction");
    for (const auto& t : targets) {
        const auto dot = t.find('.');
        b.route(interp, "value_changed", t.substr(0, dot), t.substr(dot + 1));
    }
}

Node viewpoint(Builder& b, const std::string& def, const std::string& description, Vec3 position,
               Rotation orientation, bool animated) {
    b.viewpoint(def, description, animated);
    Node v = b.def(NodeKind::Viewpoint, def);
    v.set("description", description).set("position", position).set("orientation", orientation);
    return v;
}

// Looking along +-z-horizontal direction d = (dx, dz).
double facing(double dx, double dz) { return std::atan2(-dx, -dz); }

Node background(Builder& b) {
    Node bg = b.node(NodeKind::Background);
    bg.set("skyColor", std::vector<Color>{Color(0.2, 0.4, 0.85), Color(0.55, 0.72, 0.95), Color(1, 1, 1)});
    bg.set("skyAngle", std::vector<double>{0.9, 1.5708});
    bg.set("groundColor", std::vector<Color>{Color(1, 1, 1)});
    return bg;
}

Node navigation_info(Builder& b) {
    Node n = b.node(NodeKind::NavigationInfo);
    n.set("type", Strings{"EXAMINE", "ANY"}).set("speed", 4.0);
    return n;
}

Node world_info(Builder& b, const std::string& title) {
    Node n = b.node(NodeKind::WorldInfo);
    n.set("title", title);
    return n;
}

struct MenuEntry {
    std::string sensor;
    Color color;
    std::string picture_def;  // non-empty: textured picture shape under a DEF
    std::string texture;
};

// ProximitySensor plus a HUD Transform that follows the viewer.
void hud(Builder& b, std::vector<NodePtr>& out, const std::string& prefix, Vec3 center, Vec3 size,
         const std::vector<MenuEntry>& entries) {
    Node prox = b.def(NodeKind::ProximitySensor, prefix + "Proximity");
    prox.set("center", center).set("size", size);
    out.push_back(make_node(std::move(prox)));
    Node menu = b.def(NodeKind::Transform, prefix + "Menu");
    menu.set("translation", Vec3{0.32, 0.2, -1});
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        Node item = b.node(NodeKind::Transform);
        item.set("translation", Vec3{0, -0.055 * static_cast<double>(k), 0});
        item.add_child(b.def(NodeKind::TouchSensor, e.sensor).set("description", e.sensor));
        if (!e.picture_def.empty()) {
            Node pic = b.node(NodeKind::Shape);
            pic.set_def(e.picture_def);
            Node app = b.node(NodeKind::Appearance);
            app.set("material", make_node(b.node(NodeKind::Material).set("diffuseColor", e.color)));
            app.set("texture", make_node(b.node(NodeKind::ImageTexture).set("url", Strings{e.texture})));
            pic.set("appearance", make_node(std::move(app)));
            pic.set("geometry", make_node(b.node(NodeKind::Box).set("size", Vec3{0.16, 0.045, 0.004})));
            item.add_child(std::move(pic));
        } else {
            item.add_child(box_shape(b, {0.16, 0.045, 0.004}, e.color));
        }
        menu.add_child(std::move(item));
    }
    Node h = b.def(NodeKind::Transform, prefix + "Hud");
    h.add_child(std::move(menu));
    out.push_back(make_node(std::move(h)));
    b.route(prefix + "Proximity", "position_changed", prefix + "Hud", "set_translation");
    b.route(prefix + "Proximity", "orientation_changed", prefix + "Hud", "set_rotation");
}

// ------------------------------------------------------------------ Georgia

Vec3 georgia_path(double u) { return {-140 + 280 * u, 0, -90 + 180 * u + 40 * std::sin(2 * kPi * u)}; }

double georgia_heading(double u) {
    const double dx = 280;
    const double dz = 180 + 80 * kPi * std::cos(2 * kPi * u);
    return std::atan2(-dz, dx);
}

double georgia_length() {
    double len = 0;
    for (int i = 0; i < 2000; ++i) {
        const Vec3 a = georgia_path(i / 2000.0), b = georgia_path((i + 1) / 2000.0);
        len += (b - a).norm();
    }
    return len;
}

int georgia_keys(const GenParams& p) { return std::max(4, p.mesh_density / 25); }

void georgia_content(Builder& b, const GenParams& p, const GeneratedScene& engine, const GeneratedScene& car,
                     const GeneratedScene* backdrop, bool savannah_entry, std::vector<NodePtr>& out) {
    const int k = georgia_keys(p);
    const auto keys = uniform_keys(k);
    const double length = georgia_length();

    out.push_back(make_node(world_info(b, "Georgia")));
    out.push_back(make_node(navigation_info(b)));
    out.push_back(make_node(background(b)));

    // viewpoints; the overhead comes first so it is bound on load
    out.push_back(make_node(viewpoint(b, "GeorgiaOverhead", "Georgia Overhead", {0, 240, 0},
                                      Rotation({1, 0, 0}, -kPi / 2), false)));
    const Vec3 ground_eye{10, 1.7, 20};
    out.push_back(make_node(viewpoint(b, "GeorgiaGroundLevel", "Georgia Ground Level", ground_eye,
                                      yaw(facing(georgia_path(0).x - ground_eye.x, georgia_path(0).z - ground_eye.z)),
                                      true)));
    out.push_back(make_node(viewpoint(b, "GeorgiaEngineLevel", "Georgia Engine Level", georgia_path(0) + Vec3{0, 4.5, 0},
                                      yaw(georgia_heading(0) - kPi / 2), true)));
    out.push_back(make_node(viewpoint(b, "GeorgiaMovingCamera", "Georgia Moving Camera",
                                      georgia_path(0) + Vec3{30, 12, 0}, yaw(facing(-30, 0)), true)));

    // map
    Node map = b.node(NodeKind::Group);
    map.add_child(mesh_shape(b, quad(-160, -110, 160, 110, -0.05), Color(1, 1, 1), "georgia_map.png"));
    for (double u : {0.0, 1.0}) {
        Node city = b.node(NodeKind::Transform);
        city.set("translation", georgia_path(u) + Vec3{0, 1, 0});
        city.add_child(box_shape(b, {6, 2, 6}, Color(0.7, 0.1, 0.1)));
        map.add_child(std::move(city));
    }
    out.push_back(make_node(std::move(map)));

    // sun
    Node sun = b.def(NodeKind::SpotLight, "Sun");
    sun.set("location", georgia_path(0.5) + Vec3{0, 60, 0})
        .set("direction", Vec3{0, -1, 0})
        .set("radius", 300.0)
        .set("cutOffAngle", 1.2)
        .set("beamWidth", 0.9)
        .set("color", Color(1, 1, 0));
    out.push_back(make_node(std::move(sun)));
    Node sun_clock = b.def(NodeKind::TimeSensor, "SunClock");
    sun_clock.set("cycleInterval", Time{kSunCycle}).set("loop", true);
    out.push_back(make_node(std::move(sun_clock)));
    Node sun_color = b.def(NodeKind::ColorInterpolator, "SunColor");
    sun_color.set("key", std::vector<double>{0, 0.5, 1})
        .set("keyValue", std::vector<Color>{Color(1, 1, 0), Color(1, 1, 1), Color(1, 1, 0)});
    b.interpolator("SunColor", NodeKind::ColorInterpolator, 3, {"Sun.color"});
    out.push_back(make_node(std::move(sun_color)));
    wire(b, "SunClock", "SunColor", {"Sun.color"});

    if (backdrop) {
        Node t = b.node(NodeKind::Transform);
        t.set("translation", georgia_path(0.5) + Vec3{0, 15, -40});
        t.add_child(b.inline_of(*backdrop));
        out.push_back(make_node(std::move(t)));
    }

    // train: one translated Transform, nested sections hinged at the couplings
    Node train = b.def(NodeKind::Transform, "Train");
    train.add_child(b.def(NodeKind::TouchSensor, "TrainTouch").set("description", "start the train"));
    std::vector<Node> sections;
    Node eng = b.def(NodeKind::Transform, "Engine");
    eng.add_child(b.inline_of(engine, "TrainBody"));
    sections.push_back(std::move(eng));
    std::vector<double> front_x{6.0};
    for (int i = 1; i <= p.car_count; ++i) {
        const double x = -6.5 - 11.0 * (i - 1);
        front_x.push_back(x);
        Node c = b.def(NodeKind::Transform, "Car" + std::to_string(i));
        c.set("center", Vec3{x, 0, 0});
        Node body = b.node(NodeKind::Transform);
        body.set("translation", Vec3{x - 5.5, 0, 0});
        if (i == 1) body.add_child(b.inline_of(car, "CarBody"));
        else body.add_child(b.use_inline(car, "CarBody"));
        c.add_child(std::move(body));
        sections.push_back(std::move(c));
        b.coupling(i == 1 ? "Engine" : "Car" + std::to_string(i - 1), "Car" + std::to_string(i), {x, 0, 0});
    }
    for (std::size_t i = sections.size() - 1; i > 0; --i) sections[i - 1].add_child(std::move(sections[i]));
    train.add_child(std::move(sections[0]));
    Node marker = b.def(NodeKind::Transform, "CameraMarker");
    if (p.include_debug_camera_cube) marker.add_child(box_shape(b, {2, 2, 2}, Color(1, 0, 0)));

    // animation
    Node timer = b.def(NodeKind::TimeSensor, "TrainPathTimer");
    timer.set("cycleInterval", Time{kTrainCycle});
    out.push_back(make_node(std::move(timer)));

    std::vector<Vec3> path, eye, cam;
    std::vector<Rotation> engine_turn, eye_turn, ground_turn, cam_turn;
    std::vector<std::vector<Rotation>> car_turn(static_cast<std::size_t>(p.car_count));
    for (double u : keys) {
        const Vec3 at = georgia_path(u);
        const double h = georgia_heading(u);
        path.push_back(at);
        engine_turn.push_back(yaw(h));
        double prev = h;
        for (int i = 1; i <= p.car_count; ++i) {
            const double lag = std::max(0.0, u - std::abs(front_x[static_cast<std::size_t>(i)] - 5.5) / length);
            const double hi = georgia_heading(lag);
            car_turn[static_cast<std::size_t>(i - 1)].push_back(yaw(hi - prev));
            prev = hi;
        }
        eye.push_back(at + Vec3{3 * std::cos(h), 4.5, -3 * std::sin(h)});
        eye_turn.push_back(yaw(h - kPi / 2));
        ground_turn.push_back(yaw(facing(at.x - ground_eye.x, at.z - ground_eye.z)));
        const double a = kPi * u;
        const Vec3 c = at + Vec3{30 * std::cos(a), 12, 30 * std::sin(a)};
        cam.push_back(c);
        cam_turn.push_back(yaw(facing(at.x - c.x, at.z - c.z)));
    }
    struct Drive {
        NodePtr node;
        std::string def;
        Strings targets;
    };
    std::vector<Drive> drives;
    auto pi = [&](const std::string& def, const std::vector<Vec3>& v, Strings t) {
        drives.push_back({make_node(position_interpolator(b, def, keys, v, t)), def, t});
    };
    auto oi = [&](const std::string& def, const std::vector<Rotation>& v, Strings t) {
        drives.push_back({make_node(orientation_interpolator(b, def, keys, v, t)), def, t});
    };
    pi("TrainPath", path, {"Train.translation"});
    oi("EngineTurn", engine_turn, {"Engine.rotation"});
    for (int i = 1; i <= p.car_count; ++i)
        oi("Car" + std::to_string(i) + "Turn", car_turn[static_cast<std::size_t>(i - 1)],
           {"Car" + std::to_string(i) + ".rotation"});
    pi("EngineEyePath", eye, {"GeorgiaEngineLevel.position"});
    oi("EngineEyeTurn", eye_turn, {"GeorgiaEngineLevel.orientation"});
    oi("GroundTurn", ground_turn, {"GeorgiaGroundLevel.orientation"});
    pi("CameraPath", cam, {"GeorgiaMovingCamera.position", "CameraMarker.translation"});
    oi("CameraTurn", cam_turn, {"GeorgiaMovingCamera.orientation", "CameraMarker.rotation"});
    for (auto& d : drives) out.push_back(d.node);
    out.push_back(make_node(std::move(train)));
    out.push_back(make_node(std::move(marker)));

    std::vector<MenuEntry> entries{
        {"MenuOverhead", Color(0.9, 0.9, 0.9), "", ""},
        {"MenuGroundLevel", Color(0.8, 0.8, 0.9), "", ""},
        {"MenuEngineLevel", Color(0.8, 0.9, 0.8), "", ""},
        {"MenuMovingCamera", Color(0.9, 0.8, 0.8), "", ""},
        {"MenuTrain", Color(1, 1, 1), "MenuTrainPicture", "menu_train.png"},
        {"MenuReset", Color(0.9, 0.3, 0.3), "", ""},
    };
    if (savannah_entry) entries.push_back({"MenuSavannah", Color(0.3, 0.5, 0.9), "", ""});
    hud(b, out, "Georgia", {0, 200, 0}, {800, 600, 800}, entries);

    b.route("TrainTouch", "touchTime", "TrainPathTimer", "set_startTime");
    b.route("MenuTrain", "touchTime", "TrainPathTimer", "set_startTime");
    b.route("MenuReset", "touchTime", "TrainPathTimer", "set_stopTime");
    for (const char* v : {"Overhead", "GroundLevel", "EngineLevel", "MovingCamera"})
        b.route(std::string("Menu") + v, "isActive", std::string("Georgia") + v, "set_bind");
    for (const auto& d : drives) wire(b, "TrainPathTimer", d.def, d.targets);
}

GenParams with_density(const GenParams& p, int d) {
    GenParams q = p;
    q.mesh_density = d;
    return q;
}

}  // namespace

// ------------------------------------------------------------------ params & manifest

void GenParams::check() const {
    if (car_count < 1) throw std::invalid_argument("car_count must be >= 1");
    if (building_count < 0) throw std::invalid_argument("building_count must be >= 0");
    if (mesh_density < 1) throw std::invalid_argument("mesh_density must be >= 1");
    if (!savannah_offset.finite() || savannah_offset.norm() <= 2 * kSceneLodRange)
        throw std::invalid_argument("savannah_offset must be longer than both LOD ranges together");
}

int SceneManifest::static_viewpoints() const {
    return static_cast<int>(std::count_if(viewpoints.begin(), viewpoints.end(), [](auto& v) { return !v.animated; }));
}

int SceneManifest::animated_viewpoints() const {
    return static_cast<int>(viewpoints.size()) - static_viewpoints();
}

InlineResolver GeneratedScene::resolver() const {
    auto files_copy = files;
    return [files_copy](const std::string& url) -> std::shared_ptr<const SceneGraph> {
        auto it = files_copy.find(url);
        return it == files_copy.end() ? nullptr : it->second;
    };
}

nlohmann::ordered_json manifest_json(const SceneManifest& m) {
    using J = nlohmann::ordered_json;
    J j;
    j["file"] = m.file;
    j["files"] = m.files;
    J s;
    s["shape_count"] = m.stats.shape_count;
    s["image_texture_count"] = m.stats.image_texture_count;
    s["audio_clip_count"] = m.stats.audio_clip_count;
    s["inline_count"] = m.stats.inline_count;
    s["total_nodes"] = m.stats.total_nodes();
    s["node_count_by_kind"] = m.stats.node_count_by_kind;
    j["stats"] = std::move(s);
    J vps = J::array();
    for (const auto& v : m.viewpoints)
        vps.push_back({{"def", v.def}, {"description", v.description}, {"animated", v.animated}});
    j["viewpoints"] = std::move(vps);
    j["static_viewpoints"] = m.static_viewpoints();
    j["animated_viewpoints"] = m.animated_viewpoints();
    j["route_count"] = m.route_count;
    J ints = J::array();
    for (const auto& i : m.interpolators)
        ints.push_back({{"def", i.def}, {"kind", std::string(to_string(i.kind))}, {"keys", i.keys}, {"targets", i.targets}});
    j["interpolators"] = std::move(ints);
    J cs = J::array();
    for (const auto& c : m.couplings)
        cs.push_back({{"front", c.front}, {"rear", c.rear}, {"point", {c.point.x, c.point.y, c.point.z}}});
    j["couplings"] = std::move(cs);
    return j;
}

// ------------------------------------------------------------------ component files

GeneratedScene generate_train_engine(const GenParams& p) {
    p.check();
    Builder b("TrainEngine.x3d");
    Node g = b.node(NodeKind::Group);
    g.add_child(mesh_shape(b, extrusion(-6, 6, 1.8, 1.3, 1.4, p.mesh_density), Color(0.75, 0.1, 0.1),
                           "engine_livery.png", 0.6));
    g.add_child(mesh_shape(b, extrusion(-5.8, -2.6, 3.4, 0.9, 1.25, p.mesh_density, 0, kPi), Color(0.2, 0.2, 0.25)));
    for (double x : {-4.5, -1.5, 1.5, 4.5}) {
        Node w = b.node(NodeKind::Transform);
        w.set("translation", Vec3{x, 0.45, 0});
        w.add_child(box_shape(b, {1.1, 0.9, 3.0}, Color(0.1, 0.1, 0.1)));
        g.add_child(std::move(w));
    }
    Node lamp = b.node(NodeKind::Transform);
    lamp.set("translation", Vec3{6.05, 2.2, 0});
    lamp.add_child(box_shape(b, {0.1, 0.4, 0.4}, Color(1, 1, 0.7)));
    g.add_child(std::move(lamp));
    return b.finish({make_node(std::move(g))}, "Train Engine");
}

GeneratedScene generate_train_car(const GenParams& p) {
    p.check();
    Builder b("TrainCar.x3d");
    Node g = b.node(NodeKind::Group);
    g.add_child(mesh_shape(b, extrusion(-5, 5, 1.8, 1.3, 1.4, p.mesh_density), Color(0.8, 0.8, 0.82),
                           "car_livery.png", 0.5));
    g.add_child(mesh_shape(b, extrusion(-5, 5, 3.0, 0.35, 1.3, p.mesh_density, 0, kPi), Color(0.3, 0.3, 0.35)));
    for (double x : {-3.5, 3.5}) {
        Node w = b.node(NodeKind::Transform);
        w.set("translation", Vec3{x, 0.45, 0});
        w.add_child(box_shape(b, {1.6, 0.9, 3.0}, Color(0.1, 0.1, 0.1)));
        g.add_child(std::move(w));
    }
    return b.finish({make_node(std::move(g))}, "Train Car");
}

GeneratedScene generate_station(const GenParams& p) {
    p.check();
    Builder b("Station.x3d");
    Node g = b.node(NodeKind::Group);
    Node platform = b.node(NodeKind::Transform);
    platform.set("translation", Vec3{0, 0.5, -14});
    platform.add_child(box_shape(b, {44, 1, 8}, Color(0.6, 0.6, 0.55), "platform.png"));
    g.add_child(std::move(platform));
    Node canopy = b.node(NodeKind::Transform);
    canopy.set("translation", Vec3{0, 0, -14});
    canopy.add_child(mesh_shape(b, extrusion(-20, 20, 4.5, 2.0, 4.2, p.mesh_density, 0, kPi), Color(0.35, 0.45, 0.4)));
    g.add_child(std::move(canopy));
    for (int i = 0; i < 6; ++i) {
        Node col = b.node(NodeKind::Transform);
        col.set("translation", Vec3{-17.5 + 7.0 * i, 2.5, -17});
        col.add_child(box_shape(b, {0.4, 4, 0.4}, Color(0.25, 0.25, 0.25)));
        g.add_child(std::move(col));
    }
    Node house = b.node(NodeKind::Transform);
    house.set("translation", Vec3{0, 5, -24});
    house.add_child(box_shape(b, {24, 10, 10}, Color(0.8, 0.65, 0.5), "station_facade.png"));
    g.add_child(std::move(house));
    return b.finish({make_node(std::move(g))}, "Train Station");
}

GeneratedScene generate_backdrop(const GenParams& p) {
    p.check();
    Builder b("WhiteRectangleBackdrop.x3d");
    Node g = b.node(NodeKind::Group);
    g.add_child(box_shape(b, {60, 30, 0.5}, Color(1, 1, 1), "white.png"));
    return b.finish({make_node(std::move(g))}, "White Rectangle Backdrop");
}

// ------------------------------------------------------------------ scenes

GeneratedScene generate_georgia(const GenParams& p) {
    p.check();
    const auto engine = generate_train_engine(p);
    const auto car = generate_train_car(p);
    std::optional<GeneratedScene> backdrop;
    if (p.include_debug_backdrop) backdrop = generate_backdrop(p);
    Builder b("Georgia.x3d");
    std::vector<NodePtr> roots;
    georgia_content(b, p, engine, car, backdrop ? &*backdrop : nullptr, false, roots);
    return b.finish(std::move(roots), "Georgia");
}

GeneratedScene generate_savannah(const GenParams& p) {
    p.check();
    const auto engine = generate_train_engine(p);
    const auto car = generate_train_car(p);
    const auto station = generate_station(p);
    Builder b("Savannah.x3d");
    std::vector<NodePtr> out;
    out.push_back(make_node(world_info(b, "Savannah")));
    out.push_back(make_node(navigation_info(b)));
    out.push_back(make_node(background(b)));

    constexpr int kKeys = 12;
    const auto u = uniform_keys(kKeys);
    std::vector<double> in_keys, out_keys;
    std::vector<Vec3> in_path, out_path, in_eye, out_eye;
    for (int j = 0; j < kKeys; ++j) {
        const double s = u[static_cast<std::size_t>(j)];
        in_keys.push_back(s * s);                    // widening key gaps: slowing down
        out_keys.push_back(1 - (1 - s) * (1 - s));  // narrowing key gaps: speeding up
        in_path.push_back({-150 + 150 * s, 0, -6});
        out_path.push_back({150 * s, 0, 6});
        in_eye.push_back(in_path.back() + Vec3{3, 4.5, 0});
        out_eye.push_back(out_path.back() + Vec3{3, 4.5, 0});
    }
    const Rotation along_x = yaw(-kPi / 2);
    out.push_back(make_node(viewpoint(b, "SavannahOverhead", "Savannah Overhead", {0, 200, 0},
                                      Rotation({1, 0, 0}, -kPi / 2), false)));
    out.push_back(make_node(viewpoint(b, "SavannahGroundLevel", "Savannah Ground Level", {-40, 1.7, 40},
                                      yaw(facing(40, -40)), false)));
    out.push_back(make_node(viewpoint(b, "SavannahTrainStation", "Savannah Train Station", {20, 3, -12},
                                      yaw(facing(-20, 6)), false)));
    out.push_back(
        make_node(viewpoint(b, "SavannahIncomingTrain", "Savannah Incoming Train", in_eye.front(), along_x, true)));
    out.push_back(
        make_node(viewpoint(b, "SavannahOutgoingTrain", "Savannah Outgoing Train", out_eye.front(), along_x, true)));

    Node ground = b.node(NodeKind::Group);
    ground.add_child(mesh_shape(b, grid(400, 300, p.mesh_density, 0.3), Color(0.55, 0.55, 0.5), "savannah_streets.png"));
    ground.add_child(mesh_shape(b, quad(-200, -60, 200, -40, 0.1), Color(0.2, 0.35, 0.6), "river.png"));
    out.push_back(make_node(std::move(ground)));

    Node blocks = b.node(NodeKind::Group);
    for (int i = 0; i < p.building_count; ++i) {
        const double w = 10 + (i * 7) % 9;
        const double h = 8 + (i * 13) % 17;
        const double d = 10 + (i * 5) % 7;
        const double side = (i / 6) % 2 == 0 ? 1.0 : -1.0;
        Node t = b.node(NodeKind::Transform);
        t.set("translation", Vec3{-100 + 40.0 * (i % 6), h / 2, side * (30 + 30.0 * (i / 12))});
        t.add_child(box_shape(b, {w, h, d}, Color(0.75, 0.6 + 0.03 * (i % 5), 0.5),
                              "facade_" + std::to_string(i % 6) + ".png"));
        blocks.add_child(std::move(t));
    }
    out.push_back(make_node(std::move(blocks)));
    out.push_back(make_node(b.inline_of(station, "StationInline")));

    auto train = [&](const std::string& name, const std::vector<Vec3>& path) {
        Node t = b.def(NodeKind::Transform, name);
        t.set("translation", path.front());
        t.add_child(b.inline_of(engine, name + "Engine"));
        Node c = b.node(NodeKind::Transform);
        c.set("translation", Vec3{-12, 0, 0});
        c.add_child(b.inline_of(car, name + "Car"));
        t.add_child(std::move(c));
        out.push_back(make_node(std::move(t)));
    };
    train("IncomingTrain", in_path);
    train("OutgoingTrain", out_path);

    for (const char* name : {"IncomingTimer", "OutgoingTimer"}) {
        Node timer = b.def(NodeKind::TimeSensor, name);
        timer.set("cycleInterval", Time{30.0});
        out.push_back(make_node(std::move(timer)));
    }
    out.push_back(make_node(position_interpolator(b, "IncomingPath", in_keys, in_path, {"IncomingTrain.translation"})));
    out.push_back(make_node(position_interpolator(b, "IncomingEyePath", in_keys, in_eye, {"SavannahIncomingTrain.position"})));
    out.push_back(make_node(position_interpolator(b, "OutgoingPath", out_keys, out_path, {"OutgoingTrain.translation"})));
    out.push_back(make_node(position_interpolator(b, "OutgoingEyePath", out_keys, out_eye, {"SavannahOutgoingTrain.position"})));

    Node sound = b.node(NodeKind::Sound);
    sound.set("location", Vec3{0, 5, 0}).set("minFront", 40.0).set("minBack", 40.0).set("maxFront", 250.0).set("maxBack", 250.0);
    Node clip = b.node(NodeKind::AudioClip);
    clip.set("description", "train, waterfront and city ambience").set("loop", true).set("url", Strings{"savannah_ambient.wav"});
    sound.set("source", make_node(std::move(clip)));
    out.push_back(make_node(std::move(sound)));

    hud(b, out, "Savannah", {0, 100, 0}, {600, 400, 600},
        {{"MenuSavOverhead", Color(0.9, 0.9, 0.9), "", ""},
         {"MenuSavGroundLevel", Color(0.8, 0.8, 0.9), "", ""},
         {"MenuSavTrainStation", Color(0.8, 0.9, 0.8), "", ""},
         {"MenuIncoming", Color(1, 1, 1), "MenuIncomingPicture", "menu_incoming.png"},
         {"MenuOutgoing", Color(1, 1, 1), "MenuOutgoingPicture", "menu_outgoing.png"}});
    b.route("MenuSavOverhead", "isActive", "SavannahOverhead", "set_bind");
    b.route("MenuSavGroundLevel", "isActive", "SavannahGroundLevel", "set_bind");
    b.route("MenuSavTrainStation", "isActive", "SavannahTrainStation", "set_bind");
    b.route("MenuIncoming", "touchTime", "IncomingTimer", "set_startTime");
    b.route("MenuIncoming", "isActive", "SavannahIncomingTrain", "set_bind");
    b.route("MenuOutgoing", "touchTime", "OutgoingTimer", "set_startTime");
    b.route("MenuOutgoing", "isActive", "SavannahOutgoingTrain", "set_bind");
    wire(b, "IncomingTimer", "IncomingPath", {"IncomingTrain.translation"});
    wire(b, "IncomingTimer", "IncomingEyePath", {"SavannahIncomingTrain.position"});
    wire(b, "OutgoingTimer", "OutgoingPath", {"OutgoingTrain.translation"});
    wire(b, "OutgoingTimer", "OutgoingEyePath", {"SavannahOutgoingTrain.position"});
    return b.finish(std::move(out), "Savannah");
}

GeneratedScene generate_composite(const GenParams& p) {
    p.check();
    const auto engine = generate_train_engine(p);
    const auto car = generate_train_car(p);
    const auto savannah = generate_savannah(p);
    std::optional<GeneratedScene> backdrop;
    if (p.include_debug_backdrop) backdrop = generate_backdrop(p);
    Builder b("Georgia.x3d");

    auto lod = [&](std::vector<NodePtr> content) {
        Node l = b.node(NodeKind::LOD);
        l.set("center", kLodCenter).set("range", std::vector<double>{kSceneLodRange});
        Node near = b.node(NodeKind::Group);
        near.set_children(std::move(content));
        l.add_child(std::move(near));
        l.add_child(b.node(NodeKind::Group));
        return l;
    };

    std::vector<NodePtr> georgia;
    georgia_content(b, p, engine, car, backdrop ? &*backdrop : nullptr, true, georgia);
    std::vector<NodePtr> roots;
    Node g = lod(std::move(georgia));
    g.set_def("GeorgiaLOD");
    roots.push_back(make_node(std::move(g)));
    Node below = b.node(NodeKind::Transform);
    below.set("translation", p.savannah_offset);
    Node s = lod({make_node(b.inline_of(savannah, "SavannahInline"))});
    s.set_def("SavannahLOD");
    below.add_child(std::move(s));
    roots.push_back(make_node(std::move(below)));

    b.out().scene.imports.push_back({"SavannahInline", "SavannahOverhead", "SavannahOverhead"});
    b.route("MenuSavannah", "isActive", "SavannahOverhead", "set_bind");
    return b.finish(std::move(roots), "Georgia");
}

// ------------------------------------------------------------------ bench corpus

std::vector<CorpusEntry> generate_bench_corpus(const GenParams& p) {
    p.check();
    struct Artifact {
        const char* label;
        std::size_t target;
        GeneratedScene (*gen)(const GenParams&);
    };
    const Artifact artifacts[] = {
        {"Georgia Scene", 11791, generate_composite},
        {"Savannah Scene", 98078, generate_savannah},
        {"Train Station", 54717, generate_station},
        {"Train Engine", 502209, generate_train_engine},
        {"Train Car", 391858, generate_train_car},
    };
    std::vector<CorpusEntry> out;
    for (const auto& a : artifacts) {
        CorpusEntry best;
        best.label = a.label;
        best.target_bytes = a.target;
        auto gauge = [&](int d) {
            CorpusEntry e;
            e.label = a.label;
            e.target_bytes = a.target;
            e.mesh_density = d;
            e.generated = a.gen(with_density(p, d));
            e.file = e.generated.manifest.file;
            e.xml_bytes = serialize_xml(e.generated.scene).size();
            auto gap = [&](const CorpusEntry& x) {
                return std::abs(static_cast<double>(x.xml_bytes) - static_cast<double>(x.target_bytes));
            };
            if (best.mesh_density == 0 || gap(e) < gap(best)) best = e;
            return e.xml_bytes;
        };
        // bracket, then bisect
        int lo = 1, hi = 64;
        if (gauge(lo) < a.target) {
            while (gauge(hi) < a.target && hi < (1 << 22)) {
                lo = hi;
                hi *= 4;
            }
            for (int step = 0; step < 20 && hi - lo > 1; ++step) {
                const int mid = lo + (hi - lo) / 2;
                const auto size = gauge(mid);
                if (size < a.target) lo = mid;
                else hi = mid;
                if (std::abs(static_cast<double>(size) - a.target) < 0.005 * a.target) break;
            }
        }
        best.within_window = std::abs(static_cast<double>(best.xml_bytes) - a.target) <= 0.25 * a.target;
        out.push_back(std::move(best));
    }
    return out;
}

}  // namespace scenery
