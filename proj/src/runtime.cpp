#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>

#include "scenery/runtime.hpp"

namespace scenery {

namespace {

constexpr double kNever = -std::numeric_limits<double>::infinity();
constexpr int kMaxInlineDepth = 16;

struct Rec {
    const Node* node = nullptr;
    int parent = -1;
    std::string name;
    std::map<std::string, FieldValue, std::less<>> live;

    // TimeSensor
    bool active = false;
    bool suppressed = false;  // authored start predates the run
    double cycle = -1;
    // LOD
    std::optional<std::size_t> level;
    // ProximitySensor
    ProximityState prox;
};

struct RtRoute {
    int from;
    std::string_view from_field;
    int to;
    const FieldSpec* to_spec;
};

struct Delivery {
    int to;
    const FieldSpec* spec;
    FieldValue value;
};

enum class Mode { Free, Follow, Transition };

}  // namespace

struct Simulation::Impl {
    SimConfig cfg;
    InlineResolver resolver;
    std::vector<std::shared_ptr<const SceneGraph>> scenes;  // keeps inlined scenes alive
    std::vector<Rec> recs;
    std::vector<std::vector<int>> children;
    std::map<std::string, int, std::less<>> by_name;
    std::vector<RtRoute> routes;
    std::map<std::pair<int, std::string_view>, std::vector<int>> by_source;
    std::vector<std::string> warnings;

    std::vector<int> time_sensors, lods, proximity, viewpoints;
    int initial_viewpoint = -1;
    std::map<NodeKind, int> bound;  // bindable kind -> record

    // viewer
    Mode mode = Mode::Free;
    ViewerPose viewer{{0, 0, 10}, {}};
    ViewerPose from;
    double t0 = 0.0;

    // clock
    bool started = false;
    double now = -1.0;
    std::uint64_t next_tick = 0;
    std::uint64_t stamp = 0;
    std::vector<std::uint64_t> fired;
    std::deque<Delivery> queue;
    std::uint64_t seq = 0;
    std::vector<TraceRecord>* out = nullptr;

    // ------------------------------------------------------------ loading

    void load(const SceneGraph& scene, const std::string& prefix, int parent, std::vector<std::string>& url_stack) {
        std::map<std::string, int, std::less<>> names;
        for (const auto& r : scene.roots) visit(*r, prefix, parent, names, url_stack);
        for (const auto& im : scene.imports) {
            auto it = names.find(im.inline_def);
            auto target = by_name.find((it == names.end() ? std::string("?") : recs[it->second].name) + "." +
                                       im.imported_def);
            if (it == names.end() || target == by_name.end()) {
                warnings.push_back("IMPORT_UNRESOLVED " + prefix + im.inline_def + "." + im.imported_def);
                continue;
            }
            names[im.as_name] = target->second;
            by_name.emplace(prefix + im.as_name, target->second);
        }
        for (const auto& r : scene.routes) {
            auto a = names.find(r.from_node);
            auto b = names.find(r.to_node);
            if (a == names.end() || b == names.end()) {
                warnings.push_back("ROUTE_UNRESOLVED " + prefix + r.from_node + "." + r.from_field + " -> " + prefix +
                                   r.to_node + "." + r.to_field);
                continue;
            }
            const auto* out_spec = resolve_event(recs[a->second].node->kind(), r.from_field, true);
            const auto* in_spec = resolve_event(recs[b->second].node->kind(), r.to_field, false);
            if (!out_spec || !in_spec || out_spec->type != in_spec->type) {
                warnings.push_back("ROUTE_INVALID " + prefix + r.from_node + "." + r.from_field);
                continue;
            }
            by_source[{a->second, out_spec->name}].push_back(static_cast<int>(routes.size()));
            routes.push_back({a->second, out_spec->name, b->second, in_spec});
        }
    }

    void visit(const Node& n, const std::string& prefix, int parent, std::map<std::string, int, std::less<>>& names,
               std::vector<std::string>& url_stack) {
        if (n.is_use()) return;  // shares the DEF's record
        const int id = static_cast<int>(recs.size());
        Rec r;
        r.node = &n;
        r.parent = parent;
        r.name = n.def_name().empty() ? "#" + std::to_string(id) : prefix + n.def_name();
        recs.push_back(std::move(r));
        children.emplace_back();
        if (parent >= 0) children[static_cast<std::size_t>(parent)].push_back(id);
        if (!n.def_name().empty()) {
            names.emplace(n.def_name(), id);
            by_name.emplace(recs[id].name, id);
        }
        switch (n.kind()) {
            case NodeKind::TimeSensor:
                time_sensors.push_back(id);
                recs[id].suppressed = !n.get_as<bool>("loop") && n.get_as<Time>("startTime").seconds <= 0.0;
                break;
            case NodeKind::LOD: lods.push_back(id); break;
            case NodeKind::ProximitySensor: proximity.push_back(id); break;
            case NodeKind::Viewpoint:
                viewpoints.push_back(id);
                if (initial_viewpoint < 0 && scenes.size() == 1) initial_viewpoint = id;
                break;
            default: break;
        }
        for (const auto& e : n.fields()) {
            if (auto p = std::get_if<NodePtr>(&e.value)) {
                if (*p) visit(**p, prefix, id, names, url_stack);
            } else if (auto l = std::get_if<std::vector<NodePtr>>(&e.value)) {
                for (const auto& c : *l)
                    if (c) visit(*c, prefix, id, names, url_stack);
            }
        }
        for (const auto& c : n.children()) visit(*c, prefix, id, names, url_stack);
        if (n.kind() == NodeKind::Inline && n.get_as<bool>("load")) expand_inline(id, url_stack);
    }

    void expand_inline(int id, std::vector<std::string>& url_stack) {
        const Node& n = *recs[id].node;
        for (const auto& url : n.get_as<std::vector<std::string>>("url")) {
            if (std::find(url_stack.begin(), url_stack.end(), url) != url_stack.end() ||
                url_stack.size() >= kMaxInlineDepth) {
                warnings.push_back("INLINE_CYCLE " + url);
                return;
            }
            auto scene = resolver ? resolver(url) : nullptr;
            if (!scene) continue;
            scenes.push_back(scene);
            url_stack.push_back(url);
            load(*scene, recs[id].name + ".", id, url_stack);
            url_stack.pop_back();
            return;
        }
        warnings.push_back("INLINE_MISSING " + recs[id].name);
    }

    // ------------------------------------------------------------ fields & geometry

    const FieldValue& get(int id, std::string_view field) const {
        const auto& r = recs[static_cast<std::size_t>(id)];
        auto it = r.live.find(field);
        return it != r.live.end() ? it->second : r.node->get(field);
    }

    template <class T>
    const T& get_as(int id, std::string_view field) const {
        return std::get<T>(get(id, field));
    }

    Matrix4 local(int id) const {
        if (recs[static_cast<std::size_t>(id)].node->kind() != NodeKind::Transform) return Matrix4::Identity();
        return transform_matrix(get_as<Vec3>(id, "translation"), get_as<Rotation>(id, "rotation"),
                                get_as<Vec3>(id, "scale"), get_as<Rotation>(id, "scaleOrientation"),
                                get_as<Vec3>(id, "center"));
    }

    Matrix4 world(int id) const {
        Matrix4 m = Matrix4::Identity();
        for (int r = id; r >= 0; r = recs[static_cast<std::size_t>(r)].parent) m = local(r) * m;
        return m;
    }

    ViewerPose viewpoint_pose(int id) const {
        const Matrix4 m = world(id);
        const auto p = transform_point(m, to_eigen(get_as<Vec3>(id, "position")));
        const auto q = rotation_of(m) * to_quaternion(get_as<Rotation>(id, "orientation"));
        return {from_eigen(p), from_quaternion(q)};
    }

    ViewerPose pose_at(double t) const {
        switch (mode) {
            case Mode::Free: return viewer;
            case Mode::Follow: return viewpoint_pose(bound.at(NodeKind::Viewpoint));
            case Mode::Transition: {
                const auto to = viewpoint_pose(bound.at(NodeKind::Viewpoint));
                const double s = std::clamp((t - t0) / cfg.transition_duration, 0.0, 1.0);
                if (s >= 1.0) return to;
                return {lerp(from.position, to.position, s), slerp(from.orientation, to.orientation, s)};
            }
        }
        return viewer;
    }

    // ------------------------------------------------------------ events

    void emit(int id, std::string_view field, FieldValue value) {
        const std::uint64_t s = seq++;
        if (out) out->push_back({now, s, recs[static_cast<std::size_t>(id)].name, std::string(field), value});
        auto it = by_source.find({id, field});
        if (it == by_source.end()) return;
        for (int ri : it->second) {
            if (fired[static_cast<std::size_t>(ri)] == stamp) continue;
            fired[static_cast<std::size_t>(ri)] = stamp;
            const auto& r = routes[static_cast<std::size_t>(ri)];
            queue.push_back({r.to, r.to_spec, value});
        }
    }

    void drain() {
        while (!queue.empty()) {
            Delivery d = std::move(queue.front());
            queue.pop_front();
            deliver(d.to, *d.spec, std::move(d.value));
        }
    }

    void deliver(int id, const FieldSpec& spec, FieldValue value) {
        const Node& n = *recs[static_cast<std::size_t>(id)].node;
        if (spec.name == "set_fraction") {
            interpolate(id, std::get<double>(value));
            return;
        }
        if (spec.name == "set_bind") {
            if (std::get<bool>(value)) bind(id);
            else unbind(id);
            return;
        }
        if (spec.access != AccessType::InputOutput) return;
        if (n.kind() == NodeKind::TimeSensor && spec.name == "startTime") recs[static_cast<std::size_t>(id)].suppressed = false;
        recs[static_cast<std::size_t>(id)].live[std::string(spec.name)] = value;
        emit(id, spec.name, std::move(value));
    }

    void interpolate(int id, double f) {
        const Node& n = *recs[static_cast<std::size_t>(id)].node;
        const auto& key = get_as<std::vector<double>>(id, "key");
        switch (n.kind()) {
            case NodeKind::PositionInterpolator: {
                KeyframeTrack<Vec3> t{key, get_as<std::vector<Vec3>>(id, "keyValue")};
                if (t.valid()) emit(id, "value_changed", interpolate_position(t, f));
                break;
            }
            case NodeKind::OrientationInterpolator: {
                KeyframeTrack<Rotation> t{key, get_as<std::vector<Rotation>>(id, "keyValue")};
                if (t.valid()) emit(id, "value_changed", interpolate_orientation(t, f));
                break;
            }
            case NodeKind::ColorInterpolator: {
                KeyframeTrack<Color> t{key, get_as<std::vector<Color>>(id, "keyValue")};
                if (t.valid()) emit(id, "value_changed", interpolate_color(t, f));
                break;
            }
            default: break;
        }
    }

    void bind(int id) {
        const NodeKind kind = recs[static_cast<std::size_t>(id)].node->kind();
        auto it = bound.find(kind);
        if (it != bound.end() && it->second == id) return;
        const ViewerPose current = pose_at(now);
        if (it != bound.end()) emit(it->second, "isBound", false);
        bound[kind] = id;
        emit(id, "isBound", true);
        emit(id, "bindTime", Time{now});
        if (kind != NodeKind::Viewpoint) return;
        from = current;
        t0 = now;
        mode = cfg.transition_duration > 0.0 ? Mode::Transition : Mode::Follow;
    }

    void unbind(int id) {
        const NodeKind kind = recs[static_cast<std::size_t>(id)].node->kind();
        auto it = bound.find(kind);
        if (it == bound.end() || it->second != id) return;
        if (kind == NodeKind::Viewpoint) {
            viewer = pose_at(now);
            mode = Mode::Free;
        }
        bound.erase(it);
        emit(id, "isBound", false);
    }

    // ------------------------------------------------------------ phases

    void script_event(const SimEvent& e) {
        switch (e.kind) {
            case SimEventKind::Advance: break;
            case SimEventKind::SetViewerPose:
                viewer = e.pose;
                mode = Mode::Free;
                break;
            case SimEventKind::BindViewpoint: {
                const int id = lookup(e.node);
                if (recs[static_cast<std::size_t>(id)].node->kind() != NodeKind::Viewpoint)
                    throw SimError("'" + e.node + "' is not a Viewpoint");
                bind(id);
                break;
            }
            case SimEventKind::Touch: touch(lookup(e.node), e.node); break;
            case SimEventKind::Reset: {
                if (!e.node.empty()) {
                    const int id = lookup(e.node);
                    if (recs[static_cast<std::size_t>(id)].node->kind() != NodeKind::TimeSensor)
                        throw SimError("'" + e.node + "' is not a TimeSensor");
                    reset(id);
                } else {
                    for (int id : time_sensors)
                        if (!get_as<bool>(id, "loop")) reset(id);
                }
                break;
            }
        }
        drain();
    }

    void touch(int id, const std::string& name) {
        std::vector<int> sensors;
        if (recs[static_cast<std::size_t>(id)].node->kind() == NodeKind::TouchSensor) {
            sensors.push_back(id);
        } else {
            for (int g = id; g >= 0 && sensors.empty(); g = recs[static_cast<std::size_t>(g)].parent)
                for (int c : children[static_cast<std::size_t>(g)])
                    if (recs[static_cast<std::size_t>(c)].node->kind() == NodeKind::TouchSensor && get_as<bool>(c, "enabled"))
                        sensors.push_back(c);
        }
        if (sensors.empty()) throw SimError("no TouchSensor senses '" + name + "'");
        for (int s : sensors) {
            if (!get_as<bool>(s, "enabled")) continue;
            emit(s, "isActive", true);
            emit(s, "touchTime", Time{now});
        }
    }

    void reset(int id) {
        recs[static_cast<std::size_t>(id)].live["stopTime"] = Time{now};
        emit(id, "fraction_changed", 0.0);
    }

    double effective_start(int id) const {
        return recs[static_cast<std::size_t>(id)].suppressed ? kNever : get_as<Time>(id, "startTime").seconds;
    }

    void time_sensor_phase() {
        for (int id : time_sensors) {
            auto& r = recs[static_cast<std::size_t>(id)];
            TimeSensorState st;
            st.cycle_interval = get_as<Time>(id, "cycleInterval").seconds;
            st.loop = get_as<bool>(id, "loop");
            st.start_time = effective_start(id);
            st.stop_time = get_as<Time>(id, "stopTime").seconds;
            st.enabled = get_as<bool>(id, "enabled");
            if (!(st.cycle_interval > 0.0)) continue;
            const auto sample = timesensor_fraction(st, now);
            const double temp = (now - st.start_time) / st.cycle_interval;
            const bool run_over = !st.loop && st.enabled && now >= st.start_time + st.cycle_interval &&
                                  !(st.stop_time > st.start_time && now >= st.stop_time);
            if (r.active && run_over) {
                emit(id, "fraction_changed", 1.0);
                emit(id, "time", Time{now});
                emit(id, "isActive", false);
                r.active = false;
            } else if (r.active && !sample.is_active) {
                emit(id, "isActive", false);
                r.active = false;
            } else if (sample.is_active && !run_over) {
                const double cycle = std::floor(temp);
                if (!r.active) {
                    r.active = true;
                    emit(id, "isActive", true);
                }
                if (cycle != r.cycle) {
                    r.cycle = cycle;
                    emit(id, "cycleTime", Time{now});
                }
                emit(id, "fraction_changed", sample.fraction);
                emit(id, "time", Time{now});
            }
            drain();
        }
    }

    void viewer_phase() {
        viewer = pose_at(now);
        if (mode == Mode::Transition && now >= t0 + cfg.transition_duration) mode = Mode::Follow;
        for (int id : lods) {
            auto& r = recs[static_cast<std::size_t>(id)];
            const auto level = select_lod_child(*r.node, viewer.position, world(id));
            if (!r.level || *r.level != level) {
                r.level = level;
                emit(id, "level_changed", static_cast<std::int32_t>(level));
                drain();
            }
        }
        for (int id : proximity) {
            auto events = update_proximity(*recs[static_cast<std::size_t>(id)].node, world(id),
                                           recs[static_cast<std::size_t>(id)].prox, viewer, now);
            for (auto& e : events) emit(id, e.field, std::move(e.value));
            drain();
        }
    }

    void process(double t, std::span<const SimEvent> events) {
        now = t;
        ++stamp;
        if (!started) {
            started = true;
            if (initial_viewpoint >= 0) {
                bound[NodeKind::Viewpoint] = initial_viewpoint;
                mode = Mode::Follow;
                emit(initial_viewpoint, "isBound", true);
                emit(initial_viewpoint, "bindTime", Time{now});
                drain();
            }
        }
        for (const auto& e : events) script_event(e);
        time_sensor_phase();
        viewer_phase();
    }

    // Earliest instant after `after` at which a sensor or transition changes state.
    double next_boundary(double after) const {
        double best = std::numeric_limits<double>::infinity();
        auto consider = [&](double t) {
            if (t > after && t < best) best = t;
        };
        for (int id : time_sensors) {
            if (!get_as<bool>(id, "enabled")) continue;
            const double start = effective_start(id);
            const double stop = get_as<Time>(id, "stopTime").seconds;
            const double cycle = get_as<Time>(id, "cycleInterval").seconds;
            consider(start);
            if (stop > start) consider(stop);
            if (!get_as<bool>(id, "loop") && std::isfinite(start)) consider(start + cycle);
        }
        if (mode == Mode::Transition) consider(t0 + cfg.transition_duration);
        return best;
    }

    int lookup(const std::string& name) const {
        auto it = by_name.find(name);
        if (it == by_name.end()) throw SimError("no node named '" + name + "'");
        return it->second;
    }
};

Simulation::Simulation(std::shared_ptr<const SceneGraph> scene, SimConfig config, InlineResolver resolver)
    : impl_(std::make_unique<Impl>()) {
    if (!(config.sample_rate > 0.0) || !std::isfinite(config.sample_rate))
        throw SimError("sample rate must be positive");
    if (!(config.transition_duration >= 0.0)) throw SimError("transition duration must be >= 0");
    impl_->cfg = config;
    impl_->resolver = std::move(resolver);
    impl_->scenes.push_back(scene);
    std::vector<std::string> stack;
    impl_->load(*scene, "", -1, stack);
    impl_->fired.assign(impl_->routes.size(), 0);
    if (impl_->initial_viewpoint >= 0) impl_->viewer = impl_->viewpoint_pose(impl_->initial_viewpoint);
}

Simulation::~Simulation() = default;
Simulation::Simulation(Simulation&&) noexcept = default;
Simulation& Simulation::operator=(Simulation&&) noexcept = default;

std::vector<TraceRecord> Simulation::step_to(double t, std::span<const SimEvent> script) {
    auto& m = *impl_;
    if (!std::isfinite(t) || (m.started && t < m.now)) throw SimError("time must not move backwards");
    double last = m.started ? m.now : -1.0;
    for (const auto& e : script) {
        if (!std::isfinite(e.at) || e.at < 0.0) throw SimError("script times must be finite and non-negative");
        if (e.at <= m.now && m.started) throw SimError("script event precedes the current time");
        if (e.at > t) throw SimError("script event lies beyond the step target");
        if (e.at < last) throw SimError("script events are out of order");
        last = e.at;
    }
    std::vector<TraceRecord> records;
    m.out = m.cfg.verbosity == TraceVerbosity::Full ? &records : nullptr;
    std::size_t next = 0;
    while (true) {
        const double after = m.started ? m.now : -1.0;
        double ts = static_cast<double>(m.next_tick) / m.cfg.sample_rate;
        if (next < script.size()) ts = std::min(ts, script[next].at);
        ts = std::min(ts, m.next_boundary(after));
        if (ts > t) break;
        std::size_t end = next;
        while (end < script.size() && script[end].at == ts) ++end;
        m.process(ts, script.subspan(next, end - next));
        next = end;
        while (static_cast<double>(m.next_tick) / m.cfg.sample_rate <= ts) ++m.next_tick;
    }
    m.out = nullptr;
    return records;
}

double Simulation::now() const { return impl_->now; }
ViewerPose Simulation::viewer() const { return impl_->viewer; }

std::string Simulation::bound_viewpoint() const {
    auto it = impl_->bound.find(NodeKind::Viewpoint);
    return it == impl_->bound.end() ? std::string() : impl_->recs[static_cast<std::size_t>(it->second)].name;
}

const FieldValue& Simulation::field(const std::string& node, const std::string& field) const {
    const int id = impl_->lookup(node);
    const auto& n = *impl_->recs[static_cast<std::size_t>(id)].node;
    if (!n.schema().find(field)) throw SimError(std::string(to_string(n.kind())) + " has no field '" + field + "'");
    return impl_->get(id, field);
}

Matrix4 Simulation::world_matrix(const std::string& node) const { return impl_->world(impl_->lookup(node)); }

std::optional<std::size_t> Simulation::lod_level(const std::string& node) const {
    return impl_->recs[static_cast<std::size_t>(impl_->lookup(node))].level;
}

ViewerPose Simulation::viewpoint_pose(const std::string& node) const {
    return impl_->viewpoint_pose(impl_->lookup(node));
}

std::vector<std::string> Simulation::viewpoints() const {
    std::vector<std::string> out;
    for (int id : impl_->viewpoints) out.push_back(impl_->recs[static_cast<std::size_t>(id)].name);
    return out;
}

const std::vector<std::string>& Simulation::warnings() const { return impl_->warnings; }
std::uint64_t Simulation::event_count() const { return impl_->seq; }

}  // namespace scenery
