#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "scenery/types.hpp"

namespace scenery::fixtures {

// Largest i with keys[i] <= f, scanning from the back.
template <class T, class Mix>
inline T scan_oracle(const std::vector<double>& k, const std::vector<T>& v, double f, Mix mix) {
    if (f < k.front()) return v.front();
    for (std::size_t j = k.size(); j-- > 0;) {
        if (k[j] <= f) {
            if (k[j] == f || j + 1 == k.size()) return v[j];
            return mix(v[j], v[j + 1], (f - k[j]) / (k[j + 1] - k[j]));
        }
    }
    return v.front();
}

struct Quat {
    double w, x, y, z;
};

inline Quat quat(const Rotation& r) {
    const double h = r.angle() / 2;
    return {std::cos(h), r.axis().x * std::sin(h), r.axis().y * std::sin(h), r.axis().z * std::sin(h)};
}

// Angle between two orientations, numerically stable near zero.
inline double angle_between(const Quat& a, const Quat& b) {
    // conj(a) * b
    const double w = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    const double x = a.w * b.x - a.x * b.w - a.y * b.z + a.z * b.y;
    const double y = a.w * b.y + a.x * b.z - a.y * b.w - a.z * b.x;
    const double z = a.w * b.z - a.x * b.y + a.y * b.x - a.z * b.w;
    return 2 * std::atan2(std::sqrt(x * x + y * y + z * z), std::abs(w));
}

// f(n) = v - v s max(0, min(k, 4 - k, 1)), k = (n + h/60) mod 6
inline std::array<double, 3> hsv2rgb_oracle(double h, double s, double v) {
    auto f = [&](double n) {
        const double k = std::fmod(n + h / 60.0, 6.0);
        return v - v * s * std::max(0.0, std::min({k, 4 - k, 1.0}));
    };
    return {f(5), f(3), f(1)};
}

// Brute force: the hue on a 0.001° grid whose oracle colour is nearest, then refined.
inline std::array<double, 3> rgb2hsv_oracle(const Color& c) {
    const double v = std::max({c.r(), c.g(), c.b()});
    const double m = std::min({c.r(), c.g(), c.b()});
    const double s = v > 0 ? (v - m) / v : 0.0;
    if (s == 0) return {0, 0, v};
    auto err = [&](double h) {
        auto o = hsv2rgb_oracle(h, s, v);
        return std::abs(o[0] - c.r()) + std::abs(o[1] - c.g()) + std::abs(o[2] - c.b());
    };
    double best = 0;
    for (double h = 0; h < 360; h += 0.5)
        if (err(h) < err(best)) best = h;
    double lo = best - 0.5, hi = best + 0.5;
    for (int i = 0; i < 200; ++i) {
        const double a = lo + (hi - lo) / 3, b = hi - (hi - lo) / 3;
        (err(a) < err(b) ? hi : lo) = (err(a) < err(b) ? b : a);
    }
    double h = std::fmod((lo + hi) / 2 + 360.0, 360.0);
    return {h, s, v};
}

// Independent CRC-32 (reflected, poly 0xEDB88320).
inline std::uint32_t crc32_oracle(const std::uint8_t* p, std::size_t n) {
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < n; ++i) {
        c ^= p[i];
        for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
    }
    return ~c;
}

}  // namespace scenery::fixtures
