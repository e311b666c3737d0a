#pragma once

// Minimal non-validating XML reader: elements and attributes only. Comments,
// processing instructions, DOCTYPE and CDATA are skipped.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace scenery::xml {

struct Attribute {
    std::string name;
    std::string value;
    int line = 0;
    int column = 0;
};

struct Element {
    std::string name;
    int line = 0;
    int column = 0;
    std::vector<Attribute> attributes;
    std::vector<Element> children;

    const Attribute* attribute(std::string_view n) const {
        for (const auto& a : attributes)
            if (a.name == n) return &a;
        return nullptr;
    }
};

struct Error {
    int line = 0;
    int column = 0;
    std::string message;
};

std::variant<Element, Error> read(std::string_view text);

}  // namespace scenery::xml
