#pragma once

#include <vector>

#include "scenery/types.hpp"

namespace scenery {

/// key/keyValue pair of an interpolator. Keys are non-decreasing and there is
/// one value per key.
template <class T>
struct KeyframeTrack {
    std::vector<double> keys;
    std::vector<T> values;

    bool valid() const {
        if (keys.empty() || keys.size() != values.size()) return false;
        for (std::size_t i = 1; i < keys.size(); ++i)
            if (keys[i] < keys[i - 1]) return false;
        return true;
    }
};

/// Piecewise linear; clamped to the first/last value outside the key range,
/// and exactly values[i] when f == keys[i] (the last of equal keys wins).
Vec3 interpolate_position(const KeyframeTrack<Vec3>& track, double f);

/// Slerp between bracketing rotations along the shorter arc.
Rotation interpolate_orientation(const KeyframeTrack<Rotation>& track, double f);

/// Linear in HSV with the hue taking the shorter way round. An achromatic
/// endpoint borrows the other endpoint's hue; two achromatic endpoints use 0.
Color interpolate_color(const KeyframeTrack<Color>& track, double f);

Vec3 lerp(const Vec3& a, const Vec3& b, double t);
Rotation slerp(const Rotation& a, const Rotation& b, double t);

struct Hsv {
    double h = 0.0;  // degrees in [0, 360)
    double s = 0.0;
    double v = 0.0;
};

Hsv rgb_to_hsv(const Color& c);
Color hsv_to_rgb(const Hsv& c);

}  // namespace scenery
