#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace scenery {

/// Position or direction in scene units (meters).
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double norm() const { return std::sqrt(dot(*this)); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

/// Axis-angle rotation. The axis is unit length after construction; a
/// zero-length or non-finite axis is rejected.
class Rotation {
public:
    Rotation() = default;

    Rotation(Vec3 axis, double angle) : axis_(axis), angle_(angle) {
        if (!axis.finite() || !std::isfinite(angle))
            throw std::invalid_argument("rotation components must be finite");
        const double n2 = axis.dot(axis);
        if (n2 == 0.0)
            throw std::invalid_argument("rotation axis has zero length");
        // Leave already-unit axes bit-for-bit alone so reparsing is a fixpoint.
        if (std::abs(n2 - 1.0) > 1e-14)
            axis_ = axis * (1.0 / std::sqrt(n2));
    }

    const Vec3& axis() const { return axis_; }
    double angle() const { return angle_; }

    friend bool operator==(const Rotation&, const Rotation&) = default;

private:
    Vec3 axis_{0.0, 0.0, 1.0};
    double angle_ = 0.0;
};

/// RGB colour with every component in [0, 1].
class Color {
public:
    Color() = default;

    Color(double r, double g, double b) : r_(r), g_(g), b_(b) {
        if (!in_unit(r) || !in_unit(g) || !in_unit(b))
            throw std::invalid_argument("colour components must lie in [0, 1]");
    }

    double r() const { return r_; }
    double g() const { return g_; }
    double b() const { return b_; }

    friend bool operator==(const Color&, const Color&) = default;

private:
    static bool in_unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

    double r_ = 0.0;
    double g_ = 0.0;
    double b_ = 0.0;
};

/// SFTime value in seconds. Distinct from SFFloat so the two never mix in a
/// FieldValue.
struct Time {
    double seconds = 0.0;
    friend bool operator==(const Time&, const Time&) = default;
};

}  // namespace scenery
