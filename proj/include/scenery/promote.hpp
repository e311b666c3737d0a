#pragma once

#include "scenery/scene.hpp"

namespace scenery {

/// Rewrite every Group whose subtree is provably static as a StaticGroup.
///
/// A Group qualifies when its subtree (USE references followed) holds no
/// sensor, interpolator, bindable node or Inline, no DEF that any ROUTE names,
/// and no DEF that is USEd from outside the subtree.
///
/// Throws std::invalid_argument when validate(scene) reports errors.
SceneGraph promote_static_groups(const SceneGraph& scene);

}  // namespace scenery
