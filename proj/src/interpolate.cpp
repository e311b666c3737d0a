#include "scenery/interpolate.hpp"

#include <algorithm>
#include <cmath>

#include "scenery/transform.hpp"

namespace scenery {

namespace {

struct Span {
    std::size_t i;
    double t;      // position inside [keys[i], keys[i+1])
    bool exact;    // f lands on keys[i] or outside the key range
};

template <class T>
Span locate(const KeyframeTrack<T>& track, double f) {
    const auto& k = track.keys;
    if (std::isnan(f) || f < k.front()) return {0, 0.0, true};
    const auto i = static_cast<std::size_t>(std::upper_bound(k.begin(), k.end(), f) - k.begin() - 1);
    if (i + 1 == k.size() || k[i] == f) return {i, 0.0, true};
    return {i, (f - k[i]) / (k[i + 1] - k[i]), false};
}

double wrap_degrees(double h) {
    h = std::fmod(h, 360.0);
    if (h < 0) h += 360.0;
    return h == 360.0 ? 0.0 : h;
}

}  // namespace

Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

Rotation slerp(const Rotation& a, const Rotation& b, double t) {
    auto qa = to_quaternion(a);
    auto qb = to_quaternion(b);
    if (qa.dot(qb) < 0) qb.coeffs() = -qb.coeffs();
    return from_quaternion(qa.slerp(t, qb));
}

Vec3 interpolate_position(const KeyframeTrack<Vec3>& track, double f) {
    const auto s = locate(track, f);
    if (s.exact) return track.values[s.i];
    return lerp(track.values[s.i], track.values[s.i + 1], s.t);
}

Rotation interpolate_orientation(const KeyframeTrack<Rotation>& track, double f) {
    const auto s = locate(track, f);
    if (s.exact) return track.values[s.i];
    return slerp(track.values[s.i], track.values[s.i + 1], s.t);
}

Color interpolate_color(const KeyframeTrack<Color>& track, double f) {
    const auto s = locate(track, f);
    if (s.exact) return track.values[s.i];
    Hsv a = rgb_to_hsv(track.values[s.i]);
    Hsv b = rgb_to_hsv(track.values[s.i + 1]);
    const bool grey_a = a.s == 0.0;
    const bool grey_b = b.s == 0.0;
    if (grey_a && grey_b) a.h = b.h = 0.0;
    else if (grey_a) a.h = b.h;
    else if (grey_b) b.h = a.h;
    double dh = b.h - a.h;
    if (dh > 180.0) dh -= 360.0;
    if (dh < -180.0) dh += 360.0;
    Hsv m{wrap_degrees(a.h + dh * s.t), a.s + (b.s - a.s) * s.t, a.v + (b.v - a.v) * s.t};
    return hsv_to_rgb(m);
}

Hsv rgb_to_hsv(const Color& c) {
    const double mx = std::max({c.r(), c.g(), c.b()});
    const double mn = std::min({c.r(), c.g(), c.b()});
    const double d = mx - mn;
    Hsv out{0.0, mx == 0.0 ? 0.0 : d / mx, mx};
    if (d == 0.0) return out;
    double h;
    if (mx == c.r()) h = (c.g() - c.b()) / d;
    else if (mx == c.g()) h = 2.0 + (c.b() - c.r()) / d;
    else h = 4.0 + (c.r() - c.g()) / d;
    out.h = wrap_degrees(h * 60.0);
    return out;
}

Color hsv_to_rgb(const Hsv& c) {
    const double h = wrap_degrees(c.h) / 60.0;
    const double sector = std::floor(h);
    const double frac = h - sector;
    const double p = c.v * (1.0 - c.s);
    const double q = c.v * (1.0 - c.s * frac);
    const double t = c.v * (1.0 - c.s * (1.0 - frac));
    auto clamp = [](double x) { return std::clamp(x, 0.0, 1.0); };
    auto make = [&](double r, double g, double b) { return Color(clamp(r), clamp(g), clamp(b)); };
    switch (static_cast<int>(sector) % 6) {
        case 0: return make(c.v, t, p);
        case 1: return make(q, c.v, p);
        case 2: return make(p, c.v, t);
        case 3: return make(p, q, c.v);
        case 4: return make(t, p, c.v);
        default: return make(c.v, p, q);
    }
}

}  // namespace scenery
