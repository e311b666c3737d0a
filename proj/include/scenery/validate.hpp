#pragma once

#include <string>
#include <vector>

#include "scenery/scene.hpp"

namespace scenery {

struct Issue {
    std::string code;
    std::string path;  // "/0/2/1", "/0/1.geometry", "ROUTE[3]", "IMPORT[0]"
    std::string message;
    friend bool operator==(const Issue&, const Issue&) = default;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    bool ok() const { return errors.empty(); }
    bool has_error(std::string_view code) const;
};

/// Schema, DEF/USE, route, LOD, interpolator and StaticGroup checks.
/// Never throws; issues are reported in document order, then routes, then
/// imports. Codes are listed in docs/schema.md.
ValidationReport validate(const SceneGraph& scene);

/// Route and IMPORT checks only (endpoint resolution, access, event types).
/// Element i of the result lists issues for routes[i]; imports follow in a
/// second vector. Shared with the XML parser so it can attach line numbers.
struct RouteIssues {
    std::vector<std::vector<Issue>> routes;
    std::vector<std::vector<Issue>> imports;
};
RouteIssues check_routes(const SceneGraph& scene);

}  // namespace scenery
