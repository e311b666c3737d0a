#include <cmath>

#include "scenery/lexical.hpp"
#include "scenery/xml.hpp"

namespace scenery {

namespace {

constexpr double kRelTol = 1e-9;

bool close(double a, double b) {
    if (a == b) return true;
    return std::abs(a - b) <= kRelTol * std::max(std::abs(a), std::abs(b));
}

bool close(const Vec3& a, const Vec3& b) { return close(a.x, b.x) && close(a.y, b.y) && close(a.z, b.z); }
bool close(const Rotation& a, const Rotation& b) { return close(a.axis(), b.axis()) && close(a.angle(), b.angle()); }
bool close(const Color& a, const Color& b) { return close(a.r(), b.r()) && close(a.g(), b.g()) && close(a.b(), b.b()); }
bool close(const Time& a, const Time& b) { return close(a.seconds, b.seconds); }

template <class T>
bool close_list(const std::vector<T>& a, const std::vector<T>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!close(a[i], b[i])) return false;
    return true;
}

class Comparer {
public:
    std::optional<std::string> scenes(const SceneGraph& a, const SceneGraph& b) {
        if (a.roots.size() != b.roots.size())
            return "root count " + std::to_string(a.roots.size()) + " vs " + std::to_string(b.roots.size());
        for (std::size_t i = 0; i < a.roots.size(); ++i)
            if (auto d = node(*a.roots[i], *b.roots[i], "/" + std::to_string(i))) return d;
        if (a.routes.size() != b.routes.size())
            return "route count " + std::to_string(a.routes.size()) + " vs " + std::to_string(b.routes.size());
        for (std::size_t i = 0; i < a.routes.size(); ++i)
            if (!(a.routes[i] == b.routes[i])) return "ROUTE[" + std::to_string(i) + "] differs";
        if (a.imports != b.imports) return "IMPORT statements differ";
        return std::nullopt;
    }

private:
    std::optional<std::string> node(const Node& a, const Node& b, const std::string& path) {
        if (a.kind() != b.kind())
            return path + ": kind " + std::string(to_string(a.kind())) + " vs " + std::string(to_string(b.kind()));
        if (a.is_use() != b.is_use() || a.use_name() != b.use_name())
            return path + ": USE '" + a.use_name() + "' vs '" + b.use_name() + "'";
        if (a.def_name() != b.def_name()) return path + ": DEF '" + a.def_name() + "' vs '" + b.def_name() + "'";
        if (a.is_use()) return std::nullopt;
        for (const auto& spec : a.schema().fields) {
            if (!spec.settable()) continue;
            const auto& va = a.get(spec.name);
            const auto& vb = b.get(spec.name);
            if (auto d = value(va, vb, path + "." + std::string(spec.name))) return d;
        }
        if (a.children().size() != b.children().size())
            return path + ": " + std::to_string(a.children().size()) + " vs " + std::to_string(b.children().size()) +
                   " children";
        for (std::size_t i = 0; i < a.children().size(); ++i)
            if (auto d = node(*a.children()[i], *b.children()[i], path + "/" + std::to_string(i))) return d;
        return std::nullopt;
    }

    std::optional<std::string> value(const FieldValue& a, const FieldValue& b, const std::string& path) {
        if (a.index() != b.index()) return path + ": type differs";
        bool same = true;
        switch (type_of(a)) {
            case FieldType::SFFloat: same = close(std::get<double>(a), std::get<double>(b)); break;
            case FieldType::SFTime: same = close(std::get<Time>(a), std::get<Time>(b)); break;
            case FieldType::SFVec3f: same = close(std::get<Vec3>(a), std::get<Vec3>(b)); break;
            case FieldType::SFRotation: same = close(std::get<Rotation>(a), std::get<Rotation>(b)); break;
            case FieldType::SFColor: same = close(std::get<Color>(a), std::get<Color>(b)); break;
            case FieldType::MFFloat:
                same = close_list(std::get<std::vector<double>>(a), std::get<std::vector<double>>(b));
                break;
            case FieldType::MFTime: same = close_list(std::get<std::vector<Time>>(a), std::get<std::vector<Time>>(b)); break;
            case FieldType::MFVec3f: same = close_list(std::get<std::vector<Vec3>>(a), std::get<std::vector<Vec3>>(b)); break;
            case FieldType::MFRotation:
                same = close_list(std::get<std::vector<Rotation>>(a), std::get<std::vector<Rotation>>(b));
                break;
            case FieldType::MFColor:
                same = close_list(std::get<std::vector<Color>>(a), std::get<std::vector<Color>>(b));
                break;
            case FieldType::SFNode: {
                const auto& na = std::get<NodePtr>(a);
                const auto& nb = std::get<NodePtr>(b);
                if (!na || !nb) {
                    same = !na && !nb;
                    break;
                }
                return node(*na, *nb, path);
            }
            case FieldType::MFNode: {
                const auto& la = std::get<std::vector<NodePtr>>(a);
                const auto& lb = std::get<std::vector<NodePtr>>(b);
                if (la.size() != lb.size()) return path + ": node count differs";
                for (std::size_t i = 0; i < la.size(); ++i)
                    if (auto d = node(*la[i], *lb[i], path + "[" + std::to_string(i) + "]")) return d;
                return std::nullopt;
            }
            default: same = a == b; break;
        }
        if (same) return std::nullopt;
        return path + ": '" + format_value(a) + "' vs '" + format_value(b) + "'";
    }
};

}  // namespace

std::optional<std::string> semantic_diff(const SceneGraph& a, const SceneGraph& b) { return Comparer().scenes(a, b); }

bool semantic_equal(const SceneGraph& a, const SceneGraph& b) { return !semantic_diff(a, b); }

}  // namespace scenery
