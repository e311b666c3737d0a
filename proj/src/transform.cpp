#include "scenery/transform.hpp"

#include <cmath>
#include <string>

namespace scenery {

Eigen::Quaterniond to_quaternion(const Rotation& r) {
    return Eigen::Quaterniond(Eigen::AngleAxisd(r.angle(), to_eigen(r.axis())));
}

Rotation from_quaternion(Eigen::Quaterniond q) {
    q.normalize();
    if (q.w() < 0.0) q.coeffs() = -q.coeffs();
    const double s = q.vec().norm();
    if (s < 1e-15) return Rotation{};
    const double angle = 2.0 * std::atan2(s, q.w());
    return Rotation(from_eigen(q.vec() / s), angle);
}

Matrix4 transform_matrix(const Vec3& translation, const Rotation& rotation, const Vec3& scale,
                         const Rotation& scale_orientation, const Vec3& center) {
    using Eigen::Affine3d;
    Affine3d m = Affine3d::Identity();
    m.translate(to_eigen(translation));
    m.translate(to_eigen(center));
    m.rotate(to_quaternion(rotation));
    const auto so = to_quaternion(scale_orientation);
    m.rotate(so);
    m.scale(to_eigen(scale));
    m.rotate(so.inverse());
    m.translate(-to_eigen(center));
    return m.matrix();
}

Matrix4 local_matrix(const Node& n) {
    if (n.kind() != NodeKind::Transform) return Matrix4::Identity();
    return transform_matrix(n.get_as<Vec3>("translation"), n.get_as<Rotation>("rotation"), n.get_as<Vec3>("scale"),
                            n.get_as<Rotation>("scaleOrientation"), n.get_as<Vec3>("center"));
}

Eigen::Vector3d transform_point(const Matrix4& m, const Eigen::Vector3d& p) {
    return (m * p.homogeneous()).head<3>();
}

Matrix4 world_transform(const SceneGraph& scene, const NodePath& path) {
    if (path.empty()) throw std::out_of_range("empty node path");
    const auto defs = def_table(scene);
    auto resolve = [&](const Node* n) {
        if (n->is_use()) {
            auto it = defs.find(n->use_name());
            if (it == defs.end()) throw std::out_of_range("unresolved USE '" + n->use_name() + "' on path");
            return it->second;
        }
        return n;
    };

    if (path[0] >= scene.roots.size()) throw std::out_of_range("root index " + std::to_string(path[0]));
    const Node* n = resolve(scene.roots[path[0]].get());
    Matrix4 m = local_matrix(*n);
    for (std::size_t i = 1; i < path.size(); ++i) {
        if (path[i] >= n->children().size())
            throw std::out_of_range("child index " + std::to_string(path[i]) + " at depth " + std::to_string(i));
        n = resolve(n->children()[path[i]].get());
        m = m * local_matrix(*n);
    }
    return m;
}

Eigen::Quaterniond rotation_of(const Matrix4& m) {
    Eigen::Matrix3d r = m.topLeftCorner<3, 3>();
    for (int c = 0; c < 3; ++c) {
        const double n = r.col(c).norm();
        if (n > 0.0) r.col(c) /= n;
    }
    return Eigen::Quaterniond(r).normalized();
}

}  // namespace scenery
