#pragma once

#include <Eigen/Geometry>
#include <stdexcept>
#include <vector>

#include "scenery/scene.hpp"

namespace scenery {

using Matrix4 = Eigen::Matrix4d;

/// Child indices from the scene roots: {root index, child index, ...}.
/// Steps through a USE node continue into its DEF's children.
using NodePath = std::vector<std::size_t>;

inline Eigen::Vector3d to_eigen(const Vec3& v) { return {v.x, v.y, v.z}; }
inline Vec3 from_eigen(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }

Eigen::Quaterniond to_quaternion(const Rotation& r);
/// Axis-angle from a (not necessarily normalised) quaternion; angle in [0, pi].
/// Identity maps to axis (0,0,1), angle 0.
Rotation from_quaternion(Eigen::Quaterniond q);

/// X3D Transform composition: T * C * R * SR * S * -SR * -C.
Matrix4 transform_matrix(const Vec3& translation, const Rotation& rotation, const Vec3& scale,
                         const Rotation& scale_orientation, const Vec3& center);

/// Local matrix of a Transform node (identity for every other kind).
Matrix4 local_matrix(const Node& n);

Eigen::Vector3d transform_point(const Matrix4& m, const Eigen::Vector3d& p);

/// Maps the coordinate system established by the node at `path` to world
/// coordinates: the product of the Transform matrices along the path,
/// including the addressed node when it is itself a Transform.
/// Throws std::out_of_range for a path that does not address a node.
Matrix4 world_transform(const SceneGraph& scene, const NodePath& path);

/// Rotation part of an affine matrix without shear (scale is divided out).
Eigen::Quaterniond rotation_of(const Matrix4& m);

}  // namespace scenery
