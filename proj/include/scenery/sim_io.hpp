#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scenery/runtime.hpp"

namespace scenery {

/// One JSON object per line:
///   {"at":1.0,"kind":"touch","node":"TrainBody"}
///   {"at":2,"kind":"set_viewer_pose","position":[0,1.6,10],"orientation":[0,1,0,0]}
///   {"at":3,"kind":"bind_viewpoint","viewpoint":"Overhead"}
///   {"at":4,"kind":"reset"}            (optional "node")
///   {"at":5,"kind":"advance"}
/// Blank lines are skipped. Throws SimError naming the line.
std::vector<SimEvent> parse_script(std::string_view text);

/// {"sample_rate":30,"transition_duration":2.0,"trace_verbosity":"full"|"summary"};
/// every key optional, unknown keys rejected.
SimConfig parse_config(std::string_view text);

nlohmann::ordered_json value_json(const FieldValue& v);
std::string trace_line(const TraceRecord& r);
std::string summary_line(const Simulation& sim);

}  // namespace scenery
