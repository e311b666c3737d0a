#include <cmath>

#include "scenery/runtime.hpp"

namespace scenery {

TimeSensorSample timesensor_fraction(const TimeSensorState& s, double now) {
    TimeSensorSample out;
    const bool stopped = s.stop_time > s.start_time && now >= s.stop_time;
    if (!s.enabled || now < s.start_time || stopped) return out;
    const double temp = (now - s.start_time) / s.cycle_interval;
    if (!s.loop && temp >= 1.0) {
        if (temp == 1.0) {
            out.fraction = 1.0;
            out.terminating = true;
        }
        return out;
    }
    out.is_active = true;
    out.fraction = temp - std::floor(temp);
    return out;
}

std::size_t select_lod_child(const Node& lod, const Vec3& viewer_pos, const Matrix4& lod_world) {
    const auto n = lod.children().size();
    if (n == 0) return 0;
    const auto& range = lod.get_as<std::vector<double>>("range");
    const auto center = transform_point(lod_world, to_eigen(lod.get_as<Vec3>("center")));
    const double d = (to_eigen(viewer_pos) - center).norm();
    std::size_t i = 0;
    while (i < range.size() && d >= range[i]) ++i;
    return std::min(i, n - 1);
}

namespace {

ViewerPose to_local(const Matrix4& world, const ViewerPose& pose) {
    const Matrix4 inv = world.inverse();
    const auto p = transform_point(inv, to_eigen(pose.position));
    const auto q = rotation_of(world).conjugate() * to_quaternion(pose.orientation);
    return {from_eigen(p), from_quaternion(q)};
}

bool inside_box(const Node& sensor, const Vec3& p) {
    const auto& c = sensor.get_as<Vec3>("center");
    const auto& s = sensor.get_as<Vec3>("size");
    if (s.x <= 0 || s.y <= 0 || s.z <= 0) return false;
    return std::abs(p.x - c.x) <= s.x / 2 && std::abs(p.y - c.y) <= s.y / 2 && std::abs(p.z - c.z) <= s.z / 2;
}

}  // namespace

std::vector<ProximityEvent> update_proximity(const Node& sensor, const Matrix4& sensor_world, ProximityState& st,
                                             const ViewerPose& pose, double now) {
    std::vector<ProximityEvent> out;
    if (!sensor.get_as<bool>("enabled")) return out;
    const auto local = to_local(sensor_world, pose);
    const bool inside = inside_box(sensor, local.position);
    if (inside && !st.inside) {
        out.push_back({"enterTime", Time{now}});
        out.push_back({"isActive", true});
        out.push_back({"position_changed", local.position});
        out.push_back({"orientation_changed", local.orientation});
    } else if (inside) {
        if (!(local.position == st.position)) out.push_back({"position_changed", local.position});
        if (!(local.orientation == st.orientation)) out.push_back({"orientation_changed", local.orientation});
    } else if (st.inside) {
        out.push_back({"exitTime", Time{now}});
        out.push_back({"isActive", false});
    }
    st.inside = inside;
    if (inside) {
        st.position = local.position;
        st.orientation = local.orientation;
    }
    return out;
}

std::vector<ProximityEvent> evaluate_proximity(const Node& sensor, const Matrix4& sensor_world,
                                               const ViewerPose& prev, const ViewerPose& next, double now) {
    ProximityState st;
    update_proximity(sensor, sensor_world, st, prev, now);
    return update_proximity(sensor, sensor_world, st, next, now);
}

}  // namespace scenery
