#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "scenery/interpolate.hpp"
#include "scenery/stats.hpp"
#include "scenery/transform.hpp"

namespace scenery {

struct ViewerPose {
    Vec3 position;
    Rotation orientation;
};

// ---------------------------------------------------------------- sensors

struct TimeSensorState {
    double cycle_interval = 1.0;
    bool loop = false;
    double start_time = 0.0;
    double stop_time = 0.0;
    bool enabled = true;
    bool is_active = false;
};

struct TimeSensorSample {
    double fraction = 0.0;
    bool is_active = false;
    /// Non-looping run ends at this instant: fraction is exactly 1.0 and the
    /// sensor is inactive from here on.
    bool terminating = false;
};

/// active iff enabled && now >= start && (loop || now <= start + cycle) &&
/// (stop <= start || now < stop). fraction = frac((now - start) / cycle),
/// except 1.0 at the end of a non-looping run.
TimeSensorSample timesensor_fraction(const TimeSensorState& state, double now);

/// Child index chosen by an LOD for a viewer at `viewer_pos`: 0 when
/// d < range[0], i when range[i-1] <= d < range[i], the last child otherwise.
/// d is measured in world space to the LOD center.
std::size_t select_lod_child(const Node& lod, const Vec3& viewer_pos, const Matrix4& lod_world);

struct ProximityEvent {
    std::string field;
    FieldValue value;
};

struct ProximityState {
    bool inside = false;
    Vec3 position;
    Rotation orientation;
};

/// Advance one ProximitySensor to a new viewer pose. The box is axis-aligned
/// in the sensor's local frame and inclusive on its faces. Emits enterTime,
/// isActive, position_changed, orientation_changed on entry; changed
/// position/orientation while inside; exitTime and isActive on exit.
std::vector<ProximityEvent> update_proximity(const Node& sensor, const Matrix4& sensor_world, ProximityState& state,
                                             const ViewerPose& pose, double now);

/// Stateless form: events produced by moving from `prev` to `next`.
std::vector<ProximityEvent> evaluate_proximity(const Node& sensor, const Matrix4& sensor_world,
                                               const ViewerPose& prev, const ViewerPose& next, double now);

// ---------------------------------------------------------------- simulation

enum class SimEventKind { Touch, SetViewerPose, BindViewpoint, Reset, Advance };

struct SimEvent {
    double at = 0.0;
    SimEventKind kind = SimEventKind::Advance;
    /// Touch: any DEF (a TouchSensor or geometry under one); BindViewpoint:
    /// the Viewpoint; Reset: optional TimeSensor (empty = every non-looping
    /// TimeSensor).
    std::string node;
    ViewerPose pose;
};

struct TraceRecord {
    double at = 0.0;
    std::uint64_t seq = 0;
    std::string node;
    std::string field;
    FieldValue value;
};

enum class TraceVerbosity { Full, Summary };

struct SimConfig {
    double sample_rate = 30.0;
    double transition_duration = 2.0;
    TraceVerbosity verbosity = TraceVerbosity::Full;
};

class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deterministic headless event model. Every timestamp (sampling ticks,
/// script events and sensor boundary instants) runs: script events, then
/// TimeSensors, then the viewer/bindable update, LODs and ProximitySensors.
/// Each phase cascades to a fixpoint; a route delivers at most once per
/// timestamp. Inlines are expanded through `resolver`; nodes inside an
/// Inline DEF'd "I" are addressed as "I.Name".
class Simulation {
public:
    Simulation(std::shared_ptr<const SceneGraph> scene, SimConfig config = {}, InlineResolver resolver = {});
    ~Simulation();
    Simulation(Simulation&&) noexcept;
    Simulation& operator=(Simulation&&) noexcept;

    /// Process every timestamp up to and including `t`. Script events must
    /// be sorted, lie after the last processed timestamp (at or after 0 on
    /// the first call) and not after `t`. Throws SimError.
    std::vector<TraceRecord> step_to(double t, std::span<const SimEvent> script = {});

    /// Time of the last processed timestamp; negative before the first step.
    double now() const;
    ViewerPose viewer() const;
    /// DEF of the bound Viewpoint, empty when none is bound.
    std::string bound_viewpoint() const;

    /// Current value of a node field, including values delivered by routes.
    const FieldValue& field(const std::string& node, const std::string& field) const;
    /// World matrix of the coordinate system a node establishes, with live
    /// Transform values.
    Matrix4 world_matrix(const std::string& node) const;
    /// Currently selected child of an LOD (evaluated at the last timestamp).
    std::optional<std::size_t> lod_level(const std::string& node) const;
    /// World pose a Viewpoint presents right now.
    ViewerPose viewpoint_pose(const std::string& node) const;

    /// DEF names of every Viewpoint reachable in the expanded scene.
    std::vector<std::string> viewpoints() const;
    /// Problems found while loading (unresolved inlines or routes).
    const std::vector<std::string>& warnings() const;
    std::uint64_t event_count() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace scenery
