#include "scenery/sim_io.hpp"

#include <cmath>

namespace scenery {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

double number(const json& j, const char* key, std::size_t line) {
    if (!j.contains(key) || !j[key].is_number())
        throw SimError("script line " + std::to_string(line) + ": '" + key + "' must be a number");
    return j[key].get<double>();
}

std::vector<double> numbers(const json& j, const char* key, std::size_t n, std::size_t line) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != n)
        throw SimError("script line " + std::to_string(line) + ": '" + key + "' must hold " + std::to_string(n) +
                       " numbers");
    std::vector<double> out;
    for (const auto& e : j[key]) {
        if (!e.is_number()) throw SimError("script line " + std::to_string(line) + ": '" + key + "' must be numeric");
        out.push_back(e.get<double>());
    }
    return out;
}

std::string text(const json& j, const char* key, std::size_t line) {
    if (!j.contains(key) || !j[key].is_string())
        throw SimError("script line " + std::to_string(line) + ": '" + key + "' must be a string");
    return j[key].get<std::string>();
}

ordered_json vec(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }
ordered_json rot(const Rotation& r) { return ordered_json::array({r.axis().x, r.axis().y, r.axis().z, r.angle()}); }

}  // namespace

std::vector<SimEvent> parse_script(std::string_view input) {
    std::vector<SimEvent> out;
    std::size_t line = 0;
    std::size_t pos = 0;
    while (pos <= input.size()) {
        auto nl = input.find('\n', pos);
        if (nl == std::string_view::npos) nl = input.size();
        const auto raw = input.substr(pos, nl - pos);
        pos = nl + 1;
        ++line;
        if (raw.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        json j = json::parse(raw, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw SimError("script line " + std::to_string(line) + ": not a JSON object");
        SimEvent e;
        e.at = number(j, "at", line);
        if (!std::isfinite(e.at) || e.at < 0.0)
            throw SimError("script line " + std::to_string(line) + ": 'at' must be finite and non-negative");
        const auto kind = text(j, "kind", line);
        if (kind == "touch") {
            e.kind = SimEventKind::Touch;
            e.node = text(j, "node", line);
        } else if (kind == "set_viewer_pose") {
            e.kind = SimEventKind::SetViewerPose;
            const auto p = numbers(j, "position", 3, line);
            const auto o = numbers(j, "orientation", 4, line);
            e.pose.position = {p[0], p[1], p[2]};
            try {
                e.pose.orientation = Rotation({o[0], o[1], o[2]}, o[3]);
            } catch (const std::invalid_argument& ex) {
                throw SimError("script line " + std::to_string(line) + ": " + ex.what());
            }
        } else if (kind == "bind_viewpoint") {
            e.kind = SimEventKind::BindViewpoint;
            e.node = text(j, j.contains("viewpoint") ? "viewpoint" : "node", line);
        } else if (kind == "reset") {
            e.kind = SimEventKind::Reset;
            if (j.contains("node")) e.node = text(j, "node", line);
        } else if (kind == "advance") {
            e.kind = SimEventKind::Advance;
        } else {
            throw SimError("script line " + std::to_string(line) + ": unknown kind '" + kind + "'");
        }
        if (!out.empty() && e.at < out.back().at)
            throw SimError("script line " + std::to_string(line) + ": events out of order");
        out.push_back(std::move(e));
    }
    return out;
}

SimConfig parse_config(std::string_view input) {
    json j = json::parse(input, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw SimError("config: not a JSON object");
    SimConfig c;
    for (const auto& [key, v] : j.items()) {
        if (key == "sample_rate" || key == "transition_duration") {
            if (!v.is_number()) throw SimError("config: '" + key + "' must be a number");
            (key == "sample_rate" ? c.sample_rate : c.transition_duration) = v.get<double>();
        } else if (key == "trace_verbosity") {
            const auto s = v.is_string() ? v.get<std::string>() : "";
            if (s == "full") c.verbosity = TraceVerbosity::Full;
            else if (s == "summary") c.verbosity = TraceVerbosity::Summary;
            else throw SimError("config: trace_verbosity must be \"full\" or \"summary\"");
        } else {
            throw SimError("config: unknown key '" + key + "'");
        }
    }
    if (!(c.sample_rate > 0.0)) throw SimError("config: sample_rate must be positive");
    if (!(c.transition_duration >= 0.0)) throw SimError("config: transition_duration must be >= 0");
    return c;
}

ordered_json value_json(const FieldValue& v) {
    return std::visit(
        [](const auto& x) -> ordered_json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Vec3>) return vec(x);
            else if constexpr (std::is_same_v<T, Rotation>) return rot(x);
            else if constexpr (std::is_same_v<T, Color>) return ordered_json::array({x.r(), x.g(), x.b()});
            else if constexpr (std::is_same_v<T, Time>) return x.seconds;
            else if constexpr (std::is_same_v<T, NodePtr> || std::is_same_v<T, std::vector<NodePtr>>) return nullptr;
            else if constexpr (std::is_same_v<T, std::vector<bool>>) {
                ordered_json a = ordered_json::array();
                for (bool b : x) a.push_back(b);
                return a;
            } else if constexpr (requires { x.begin(); } && !std::is_same_v<T, std::string>) {
                ordered_json a = ordered_json::array();
                for (const auto& e : x) a.push_back(value_json(FieldValue{e}));
                return a;
            } else return x;
        },
        v);
}

std::string trace_line(const TraceRecord& r) {
    ordered_json j;
    j["at"] = r.at;
    j["seq"] = r.seq;
    j["node"] = r.node;
    j["field"] = r.field;
    j["value"] = value_json(r.value);
    return j.dump();
}

std::string summary_line(const Simulation& sim) {
    ordered_json s;
    s["events"] = sim.event_count();
    s["now"] = sim.now();
    const auto v = sim.viewer();
    s["viewer"] = {{"position", vec(v.position)}, {"orientation", rot(v.orientation)}};
    s["bound_viewpoint"] = sim.bound_viewpoint();
    s["warnings"] = sim.warnings();
    ordered_json j;
    j["summary"] = std::move(s);
    return j.dump();
}

}  // namespace scenery
