#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenery/scene.hpp"

namespace scenery {

struct ParseDiagnostic {
    int line = 0;
    int column = 0;
    std::string code;
    std::string message;
};

struct ParseResult {
    std::optional<SceneGraph> scene;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return scene.has_value(); }
};

/// Parse the X3D XML encoding restricted to the supported node table.
/// Comments and processing instructions are dropped. On any diagnostic the
/// result carries no scene.
ParseResult parse_xml(std::string_view bytes);

/// Canonical X3D XML: 2-space indent, single-quoted attributes in schema
/// order, only explicitly set fields, imports then routes after the nodes.
/// See docs/xml-form.md.
std::string serialize_xml(const SceneGraph& scene);

/// Structural equality: same kinds, DEF/USE names, effective field values
/// (reals within 1e-9 relative), children, routes and imports. Metadata is
/// not compared.
bool semantic_equal(const SceneGraph& a, const SceneGraph& b);

/// First difference found by semantic_equal, or nullopt when equal.
std::optional<std::string> semantic_diff(const SceneGraph& a, const SceneGraph& b);

}  // namespace scenery
