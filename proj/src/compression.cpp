#include "scenery/compression.hpp"

#include <json.hpp>

#include <algorithm>

namespace scenery {

namespace {

// round(num / den) half away from zero, den > 0
std::int64_t div_round(std::int64_t num, std::int64_t den) {
    if (num >= 0) return (2 * num + den) / (2 * den);
    return -((2 * -num + den) / (2 * den));
}

}  // namespace

CompressionReport compression_report(const std::vector<SizePair>& pairs) {
    CompressionReport r;
    std::int64_t sum = 0;
    for (const auto& p : pairs) {
        if (p.xml_bytes <= 0) throw std::invalid_argument(p.label + ": xml size must be positive");
        if (p.binary_bytes < 0) throw std::invalid_argument(p.label + ": binary size is negative");
        CompressionRow row{p.label, p.xml_bytes, p.binary_bytes, 0};
        row.reduction_hundredths = div_round((p.xml_bytes - p.binary_bytes) * 10000, p.xml_bytes);
        sum += row.reduction_hundredths;
        r.rows.push_back(std::move(row));
    }
    if (!r.rows.empty()) r.average_hundredths = div_round(sum, static_cast<std::int64_t>(r.rows.size()));
    return r;
}

std::string format_hundredths(std::int64_t h) {
    std::string sign = h < 0 ? "-" : "";
    const auto a = h < 0 ? -h : h;
    const auto frac = a % 100;
    return sign + std::to_string(a / 100) + "." + (frac < 10 ? "0" : "") + std::to_string(frac);
}

std::string with_thousands(std::int64_t v) {
    std::string digits = std::to_string(v < 0 ? -v : v);
    std::string out;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i > 0 && (digits.size() - i) % 3 == 0) out += ',';
        out += digits[i];
    }
    return (v < 0 ? "-" : "") + out;
}

std::string render_table(const CompressionReport& r) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"File Size (in bytes)", ".x3d", ".s3db", "% Reduction"});
    for (const auto& row : r.rows)
        cells.push_back({row.label, with_thousands(row.xml_bytes), with_thousands(row.binary_bytes),
                         format_hundredths(row.reduction_hundredths)});
    cells.push_back({"Average Reduction", "", "", format_hundredths(r.average_hundredths)});

    std::size_t w[4] = {0, 0, 0, 0};
    for (const auto& c : cells)
        for (int i = 0; i < 4; ++i) w[i] = std::max(w[i], c[i].size());
    auto line = [&](const std::vector<std::string>& c) {
        std::string s = c[0] + std::string(w[0] - c[0].size(), ' ');
        for (int i = 1; i < 4; ++i) s += " | " + std::string(w[i] - c[i].size(), ' ') + c[i];
        return s + "\n";
    };
    std::string rule = std::string(w[0], '-');
    for (int i = 1; i < 4; ++i) rule += "-+-" + std::string(w[i], '-');
    rule += "\n";

    std::string out = line(cells.front()) + rule;
    for (std::size_t i = 1; i + 1 < cells.size(); ++i) out += line(cells[i]);
    out += rule + line(cells.back());
    return out;
}

std::string render_json(const CompressionReport& r) {
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& row : r.rows) {
        nlohmann::ordered_json o;
        o["label"] = row.label;
        o["xml_bytes"] = row.xml_bytes;
        o["binary_bytes"] = row.binary_bytes;
        o["reduction_pct"] = row.reduction_pct();
        j["rows"].push_back(o);
    }
    j["average_reduction_pct"] = r.average_reduction_pct();
    return j.dump(2) + "\n";
}

}  // namespace scenery
