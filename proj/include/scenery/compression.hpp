#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scenery {

struct CompressionRow {
    std::string label;
    std::int64_t xml_bytes = 0;
    std::int64_t binary_bytes = 0;
    /// Reduction in hundredths of a percent, i.e. reduction_pct * 100 exactly.
    std::int64_t reduction_hundredths = 0;

    double reduction_pct() const { return static_cast<double>(reduction_hundredths) / 100.0; }
};

struct CompressionReport {
    std::vector<CompressionRow> rows;
    std::int64_t average_hundredths = 0;

    double average_reduction_pct() const { return static_cast<double>(average_hundredths) / 100.0; }
};

struct SizePair {
    std::string label;
    std::int64_t xml_bytes;
    std::int64_t binary_bytes;
};

/// Rounding is half away from zero, done in integer arithmetic so the
/// two-decimal results are exact. Throws std::invalid_argument when an xml
/// size is not positive or a binary size is negative.
CompressionReport compression_report(const std::vector<SizePair>& pairs);

/// Aligned text table: label, .x3d bytes, .s3db bytes, % reduction, with an
/// "Average Reduction" footer.
std::string render_table(const CompressionReport& r);

std::string render_json(const CompressionReport& r);

/// "59.22", "-3.05", "0.00"
std::string format_hundredths(std::int64_t h);

/// 502209 -> "502,209"
std::string with_thousands(std::int64_t v);

}  // namespace scenery
