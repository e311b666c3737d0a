#pragma once

#include <string>
#include <string_view>

#include "scenery/field_value.hpp"

namespace scenery {

/// X3D XML-encoding lexical form of a non-node field value. Single-precision
/// types print the shortest text that reads back to the same float; SFTime
/// and SFRotation print the shortest round-trip double. Tuples in list
/// values are separated by ", ".
std::string format_value(const FieldValue& v);

/// Parse an attribute value of the given (non-node) type. Runs of spaces and
/// commas separate numeric tokens. Throws SchemaError("BAD_VALUE", ...).
FieldValue parse_value(FieldType type, std::string_view text);

/// Shortest round-trip renderings.
std::string format_single(double v);
std::string format_double(double v);

}  // namespace scenery
