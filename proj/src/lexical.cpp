#include "scenery/lexical.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "scenery/scene.hpp"

namespace scenery {

std::string format_single(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, static_cast<float>(v));
    return std::string(buf, res.ptr);
}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void bad(const std::string& msg) { throw SchemaError("BAD_VALUE", msg); }

bool is_sep(char c) { return c == ' ' || c == ',' || c == '\t' || c == '\n' || c == '\r'; }

/// Splits on runs of whitespace/commas.
class Tokens {
public:
    explicit Tokens(std::string_view s) : s_(s) {}

    bool next(std::string_view& out) {
        while (pos_ < s_.size() && is_sep(s_[pos_])) ++pos_;
        if (pos_ >= s_.size()) return false;
        const auto start = pos_;
        while (pos_ < s_.size() && !is_sep(s_[pos_])) ++pos_;
        out = s_.substr(start, pos_ - start);
        return true;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

double to_real(std::string_view t) {
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    double v = 0.0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
        bad("'" + std::string(t) + "' is not a finite number");
    return v;
}

std::int32_t to_int(std::string_view t) {
    if (!t.empty() && t.front() == '+') t.remove_prefix(1);
    std::int32_t v = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) bad("'" + std::string(t) + "' is not an SFInt32");
    return v;
}

bool to_bool(std::string_view t) {
    if (t == "true" || t == "TRUE") return true;
    if (t == "false" || t == "FALSE") return false;
    bad("'" + std::string(t) + "' is not a boolean");
}

std::vector<double> reals(std::string_view text) {
    std::vector<double> out;
    Tokens tk(text);
    std::string_view t;
    while (tk.next(t)) out.push_back(to_real(t));
    return out;
}

void require_count(const std::vector<double>& v, std::size_t n, const char* what) {
    if (v.size() != n) bad(std::string(what) + " needs " + std::to_string(n) + " numbers, got " + std::to_string(v.size()));
}

void require_multiple(const std::vector<double>& v, std::size_t n, const char* what) {
    if (v.size() % n != 0)
        bad(std::string(what) + " needs a multiple of " + std::to_string(n) + " numbers, got " + std::to_string(v.size()));
}

Rotation make_rotation(const double* p) {
    try {
        return Rotation({p[0], p[1], p[2]}, p[3]);
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
}

Color make_color(const double* p) {
    try {
        return Color(p[0], p[1], p[2]);
    } catch (const std::invalid_argument& e) {
        bad(e.what());
    }
}

std::vector<std::string> parse_mfstring(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    auto skip = [&] {
        while (i < s.size() && is_sep(s[i])) ++i;
    };
    skip();
    if (i < s.size() && s[i] != '"') {
        // Unquoted single value, as many authoring tools write url='file.x3d'.
        auto end = s.find_last_not_of(" \t\r\n");
        out.emplace_back(s.substr(i, end - i + 1));
        return out;
    }
    while (i < s.size()) {
        if (s[i] != '"') bad("MFString element must be double-quoted");
        ++i;
        std::string cur;
        bool closed = false;
        while (i < s.size()) {
            char c = s[i++];
            if (c == '\\') {
                if (i >= s.size()) bad("dangling escape in MFString");
                cur.push_back(s[i++]);
            } else if (c == '"') {
                closed = true;
                break;
            } else {
                cur.push_back(c);
            }
        }
        if (!closed) bad("unterminated MFString element");
        out.push_back(std::move(cur));
        skip();
    }
    return out;
}

std::string quote_mf(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

template <class T, class F>
std::string join(const std::vector<T>& v, const char* sep, F&& f) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += f(v[i]);
    }
    return out;
}

std::string vec3(const Vec3& v) { return format_single(v.x) + " " + format_single(v.y) + " " + format_single(v.z); }
std::string rot(const Rotation& r) {
    return format_double(r.axis().x) + " " + format_double(r.axis().y) + " " + format_double(r.axis().z) + " " +
           format_double(r.angle());
}
std::string col(const Color& c) { return format_single(c.r()) + " " + format_single(c.g()) + " " + format_single(c.b()); }

}  // namespace

std::string format_value(const FieldValue& v) {
    switch (type_of(v)) {
        case FieldType::SFBool: return std::get<bool>(v) ? "true" : "false";
        case FieldType::SFInt32: return std::to_string(std::get<std::int32_t>(v));
        case FieldType::SFFloat: return format_single(std::get<double>(v));
        case FieldType::SFTime: return format_double(std::get<Time>(v).seconds);
        case FieldType::SFString: return std::get<std::string>(v);
        case FieldType::SFVec3f: return vec3(std::get<Vec3>(v));
        case FieldType::SFRotation: return rot(std::get<Rotation>(v));
        case FieldType::SFColor: return col(std::get<Color>(v));
        case FieldType::MFBool: {
            const auto& l = std::get<std::vector<bool>>(v);
            std::string out;
            for (std::size_t i = 0; i < l.size(); ++i) out += (i ? " " : "") + std::string(l[i] ? "true" : "false");
            return out;
        }
        case FieldType::MFInt32:
            return join(std::get<std::vector<std::int32_t>>(v), " ", [](std::int32_t x) { return std::to_string(x); });
        case FieldType::MFFloat: return join(std::get<std::vector<double>>(v), " ", format_single);
        case FieldType::MFTime:
            return join(std::get<std::vector<Time>>(v), " ", [](Time t) { return format_double(t.seconds); });
        case FieldType::MFString: return join(std::get<std::vector<std::string>>(v), " ", quote_mf);
        case FieldType::MFVec3f: return join(std::get<std::vector<Vec3>>(v), ", ", vec3);
        case FieldType::MFRotation: return join(std::get<std::vector<Rotation>>(v), ", ", rot);
        case FieldType::MFColor: return join(std::get<std::vector<Color>>(v), ", ", col);
        case FieldType::SFNode:
        case FieldType::MFNode: break;
    }
    throw SchemaError("BAD_VALUE", "node values have no lexical form");
}

FieldValue parse_value(FieldType type, std::string_view text) {
    switch (type) {
        case FieldType::SFBool: {
            Tokens tk(text);
            std::string_view t, extra;
            if (!tk.next(t) || tk.next(extra)) bad("SFBool needs exactly one token");
            return to_bool(t);
        }
        case FieldType::SFInt32: {
            Tokens tk(text);
            std::string_view t, extra;
            if (!tk.next(t) || tk.next(extra)) bad("SFInt32 needs exactly one token");
            return to_int(t);
        }
        case FieldType::SFFloat: {
            auto v = reals(text);
            require_count(v, 1, "SFFloat");
            return v[0];
        }
        case FieldType::SFTime: {
            auto v = reals(text);
            require_count(v, 1, "SFTime");
            return Time{v[0]};
        }
        case FieldType::SFString: return std::string(text);
        case FieldType::SFVec3f: {
            auto v = reals(text);
            require_count(v, 3, "SFVec3f");
            return Vec3{v[0], v[1], v[2]};
        }
        case FieldType::SFRotation: {
            auto v = reals(text);
            require_count(v, 4, "SFRotation");
            return make_rotation(v.data());
        }
        case FieldType::SFColor: {
            auto v = reals(text);
            require_count(v, 3, "SFColor");
            return make_color(v.data());
        }
        case FieldType::MFBool: {
            std::vector<bool> out;
            Tokens tk(text);
            std::string_view t;
            while (tk.next(t)) out.push_back(to_bool(t));
            return out;
        }
        case FieldType::MFInt32: {
            std::vector<std::int32_t> out;
            Tokens tk(text);
            std::string_view t;
            while (tk.next(t)) out.push_back(to_int(t));
            return out;
        }
        case FieldType::MFFloat: return reals(text);
        case FieldType::MFTime: {
            std::vector<Time> out;
            for (double d : reals(text)) out.push_back(Time{d});
            return out;
        }
        case FieldType::MFString: return parse_mfstring(text);
        case FieldType::MFVec3f: {
            auto v = reals(text);
            require_multiple(v, 3, "MFVec3f");
            std::vector<Vec3> out;
            out.reserve(v.size() / 3);
            for (std::size_t i = 0; i < v.size(); i += 3) out.push_back({v[i], v[i + 1], v[i + 2]});
            return out;
        }
        case FieldType::MFRotation: {
            auto v = reals(text);
            require_multiple(v, 4, "MFRotation");
            std::vector<Rotation> out;
            for (std::size_t i = 0; i < v.size(); i += 4) out.push_back(make_rotation(&v[i]));
            return out;
        }
        case FieldType::MFColor: {
            auto v = reals(text);
            require_multiple(v, 3, "MFColor");
            std::vector<Color> out;
            for (std::size_t i = 0; i < v.size(); i += 3) out.push_back(make_color(&v[i]));
            return out;
        }
        case FieldType::SFNode:
        case FieldType::MFNode: break;
    }
    bad("node fields cannot be given as attributes");
}

}  // namespace scenery
