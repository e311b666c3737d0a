#include "xml_reader.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>

namespace scenery::xml {

namespace {

constexpr int kMaxDepth = 512;

struct Failure {
    std::size_t offset;
    std::string message;
};

class LineMap {
public:
    explicit LineMap(std::string_view s) : size_(s.size()) {
        starts_.push_back(0);
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] == '\n') starts_.push_back(i + 1);
    }

    std::pair<int, int> at(std::size_t offset) const {
        if (size_ > 0) offset = std::min(offset, size_ - 1);
        auto it = std::upper_bound(starts_.begin(), starts_.end(), offset);
        const auto line = static_cast<std::size_t>(it - starts_.begin());
        return {static_cast<int>(line), static_cast<int>(offset - starts_[line - 1] + 1)};
    }

private:
    std::vector<std::size_t> starts_;
    std::size_t size_;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.'; }

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

class Parser {
public:
    Parser(std::string_view s, const LineMap& lines) : s_(s), lines_(lines) {}

    Element document() {
        if (s_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
        std::optional<Element> root;
        while (true) {
            skip_space();
            if (pos_ >= s_.size()) break;
            if (starts("<?")) {
                skip_past("?>", "unterminated processing instruction");
            } else if (starts("<!--")) {
                skip_past("-->", "unterminated comment");
            } else if (starts("<!DOCTYPE")) {
                skip_doctype();
            } else if (s_[pos_] == '<') {
                if (root) fail(pos_, "content after the document element");
                root = element(0);
            } else {
                fail(pos_, "text outside the document element");
            }
        }
        if (!root) fail(pos_, "no document element");
        return std::move(*root);
    }

private:
    [[noreturn]] void fail(std::size_t at, std::string msg) { throw Failure{at, std::move(msg)}; }

    bool starts(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

    void skip_space() {
        while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
    }

    void skip_past(std::string_view end, const char* msg) {
        const auto start = pos_;
        auto i = s_.find(end, pos_ + 2);
        if (i == std::string_view::npos) fail(start, msg);
        pos_ = i + end.size();
    }

    void skip_doctype() {
        const auto start = pos_;
        int bracket = 0;
        for (pos_ += 9; pos_ < s_.size(); ++pos_) {
            char c = s_[pos_];
            if (c == '[') ++bracket;
            else if (c == ']') --bracket;
            else if (c == '>' && bracket <= 0) {
                ++pos_;
                return;
            }
        }
        fail(start, "unterminated DOCTYPE");
    }

    std::string name() {
        const auto start = pos_;
        if (pos_ >= s_.size() || !is_name_start(s_[pos_])) fail(pos_, "expected a name");
        while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    void set_pos(Element& e, std::size_t at) {
        auto [l, c] = lines_.at(at);
        e.line = l;
        e.column = c;
    }

    Element element(int depth) {
        if (depth > kMaxDepth) fail(pos_, "elements nested too deeply");
        Element e;
        set_pos(e, pos_);
        ++pos_;  // '<'
        e.name = name();
        while (true) {
            const bool had_space = pos_ < s_.size() && is_space(s_[pos_]);
            skip_space();
            if (pos_ >= s_.size()) fail(pos_, "unterminated start tag <" + e.name + ">");
            if (starts("/>")) {
                pos_ += 2;
                return e;
            }
            if (s_[pos_] == '>') {
                ++pos_;
                break;
            }
            if (!had_space) fail(pos_, "expected whitespace between attributes");
            e.attributes.push_back(attribute());
            const auto& added = e.attributes.back();
            for (std::size_t i = 0; i + 1 < e.attributes.size(); ++i)
                if (e.attributes[i].name == added.name)
                    throw Failure{attr_offset_, "duplicate attribute '" + added.name + "'"};
        }
        content(e, depth);
        return e;
    }

    Attribute attribute() {
        Attribute a;
        attr_offset_ = pos_;
        a.name = name();
        skip_space();
        if (pos_ >= s_.size() || s_[pos_] != '=') fail(pos_, "expected '=' after attribute '" + a.name + "'");
        ++pos_;
        skip_space();
        if (pos_ >= s_.size() || (s_[pos_] != '"' && s_[pos_] != '\'')) fail(pos_, "expected a quoted value");
        const char q = s_[pos_++];
        auto [l, c] = lines_.at(attr_offset_);
        a.line = l;
        a.column = c;
        while (true) {
            if (pos_ >= s_.size()) fail(attr_offset_, "unterminated attribute value");
            char ch = s_[pos_];
            if (ch == q) {
                ++pos_;
                break;
            }
            if (ch == '<') fail(pos_, "'<' in attribute value");
            if (ch == '&') {
                reference(a.value);
                continue;
            }
            a.value.push_back(is_space(ch) ? ' ' : ch);
            ++pos_;
        }
        return a;
    }

    void reference(std::string& out) {
        const auto start = pos_;
        auto semi = s_.find(';', pos_);
        if (semi == std::string_view::npos || semi - pos_ > 12) fail(start, "malformed entity reference");
        auto ent = s_.substr(pos_ + 1, semi - pos_ - 1);
        pos_ = semi + 1;
        if (ent == "lt") out.push_back('<');
        else if (ent == "gt") out.push_back('>');
        else if (ent == "amp") out.push_back('&');
        else if (ent == "quot") out.push_back('"');
        else if (ent == "apos") out.push_back('\'');
        else if (!ent.empty() && ent[0] == '#') {
            std::uint32_t cp = 0;
            const bool hex = ent.size() > 1 && ent[1] == 'x';
            auto digits = ent.substr(hex ? 2 : 1);
            if (digits.empty()) fail(start, "empty character reference");
            for (char c : digits) {
                int d = -1;
                if (c >= '0' && c <= '9') d = c - '0';
                else if (hex && c >= 'a' && c <= 'f') d = c - 'a' + 10;
                else if (hex && c >= 'A' && c <= 'F') d = c - 'A' + 10;
                if (d < 0) fail(start, "bad character reference");
                cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(d);
                if (cp > 0x10FFFF) fail(start, "character reference out of range");
            }
            if (cp == 0) fail(start, "character reference to NUL");
            append_utf8(out, cp);
        } else {
            fail(start, "unknown entity '&" + std::string(ent) + ";'");
        }
    }

    void content(Element& e, int depth) {
        while (true) {
            if (pos_ >= s_.size()) fail(pos_, "missing </" + e.name + ">");
            char c = s_[pos_];
            if (is_space(c)) {
                ++pos_;
            } else if (starts("<!--")) {
                skip_past("-->", "unterminated comment");
            } else if (starts("<![CDATA[")) {
                skip_past("]]>", "unterminated CDATA section");
            } else if (starts("<?")) {
                skip_past("?>", "unterminated processing instruction");
            } else if (starts("</")) {
                const auto at = pos_;
                pos_ += 2;
                auto closing = name();
                if (closing != e.name) fail(at, "</" + closing + "> does not close <" + e.name + ">");
                skip_space();
                if (pos_ >= s_.size() || s_[pos_] != '>') fail(pos_, "expected '>'");
                ++pos_;
                return;
            } else if (c == '<') {
                e.children.push_back(element(depth + 1));
            } else {
                fail(pos_, "unexpected text inside <" + e.name + ">");
            }
        }
    }

    std::string_view s_;
    const LineMap& lines_;
    std::size_t pos_ = 0;
    std::size_t attr_offset_ = 0;
};

}  // namespace

std::variant<Element, Error> read(std::string_view text) {
    LineMap lines(text);
    try {
        return Parser(text, lines).document();
    } catch (const Failure& f) {
        auto [l, c] = lines.at(f.offset);
        return Error{l, c, f.message};
    }
}

}  // namespace scenery::xml
