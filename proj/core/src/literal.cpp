#include "placelab/literal.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace placelab {

namespace {

bool is_word_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_word_char(char c) {
    return is_word_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) {
    return c >= '0' && c <= '9';
}

int hex_digit(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

void append_utf8(std::string& out, std::uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

struct Parser {
    std::string_view in;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw LiteralError(msg + " at offset " + std::to_string(at), at);
    }

    bool at_end() const { return pos >= in.size(); }

    char peek() const { return in[pos]; }

    void skip_ws() {
        while (!at_end()) {
            const char c = in[pos];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                ++pos;
            } else {
                break;
            }
        }
    }

    void expect(char c) {
        if (at_end()) {
            fail(std::string("expected '") + c + "'", pos);
        }
        if (in[pos] != c) {
            fail(std::string("expected '") + c + "'", pos);
        }
        ++pos;
    }

    LiteralValue parse_value() {
        skip_ws();
        if (at_end()) {
            fail("unexpected end of input", pos);
        }
        const char c = peek();
        if (c == '[') {
            return parse_list();
        }
        if (c == '(') {
            return parse_paren();
        }
        if (c == '{') {
            return parse_map();
        }
        if (c == '\'' || c == '"') {
            return LiteralValue::of(parse_string());
        }
        if (c == '+' || c == '-' || c == '.' || is_digit(c)) {
            return parse_number();
        }
        if (is_word_start(c)) {
            return parse_keyword();
        }
        fail("expected a literal value", pos);
    }

    LiteralValue parse_keyword() {
        const std::size_t start = pos;
        while (!at_end() && is_word_char(peek())) {
            ++pos;
        }
        const std::string_view word = in.substr(start, pos - start);
        if (word == "None") {
            return LiteralValue::null();
        }
        if (word == "True") {
            return LiteralValue::of(true);
        }
        if (word == "False") {
            return LiteralValue::of(false);
        }
        fail("'" + std::string(word) + "' is not a literal", start);
    }

    LiteralValue parse_number() {
        const std::size_t start = pos;
        bool negative = false;
        if (peek() == '+' || peek() == '-') {
            negative = peek() == '-';
            ++pos;
        }
        const std::size_t digits_start = pos;
        bool is_real = false;
        std::size_t mantissa_digits = 0;
        while (!at_end() && is_digit(peek())) {
            ++pos;
            ++mantissa_digits;
        }
        if (!at_end() && peek() == '.') {
            is_real = true;
            ++pos;
            while (!at_end() && is_digit(peek())) {
                ++pos;
                ++mantissa_digits;
            }
        }
        if (mantissa_digits == 0) {
            fail("malformed number", start);
        }
        if (!at_end() && (peek() == 'e' || peek() == 'E')) {
            is_real = true;
            ++pos;
            if (!at_end() && (peek() == '+' || peek() == '-')) {
                ++pos;
            }
            if (at_end() || !is_digit(peek())) {
                fail("malformed exponent", pos);
            }
            while (!at_end() && is_digit(peek())) {
                ++pos;
            }
        }
        const std::string_view body = in.substr(digits_start, pos - digits_start);
        if (is_real) {
            return LiteralValue::of(negative ? -real_value(body, start) : real_value(body, start));
        }
        // Parse the magnitude unsigned so the most negative int64 stays integral.
        std::uint64_t magnitude = 0;
        const auto res = std::from_chars(body.data(), body.data() + body.size(), magnitude);
        const std::uint64_t limit =
            negative ? 9223372036854775808ull : 9223372036854775807ull;
        if (res.ec == std::errc::result_out_of_range || magnitude > limit) {
            // Integers beyond 64 bits degrade to reals.
            const double d = real_value(body, start);
            return LiteralValue::of(negative ? -d : d);
        }
        if (res.ec != std::errc()) {
            fail("malformed number", start);
        }
        if (negative) {
            return LiteralValue::of(static_cast<std::int64_t>(-magnitude));
        }
        return LiteralValue::of(static_cast<std::int64_t>(magnitude));
    }

    double real_value(std::string_view body, std::size_t start) const {
        double d = 0.0;
        const auto res = std::from_chars(body.data(), body.data() + body.size(), d);
        if (res.ec == std::errc::result_out_of_range) {
            // strtod resolves overflow vs underflow (huge value vs zero).
            const std::string copy(body);
            return std::strtod(copy.c_str(), nullptr);
        }
        if (res.ec != std::errc()) {
            fail("malformed number", start);
        }
        return d;
    }

    std::string parse_string() {
        const char quote = peek();
        ++pos;
        std::string out;
        for (;;) {
            if (at_end() || peek() == '\n') {
                fail("unterminated string", pos);
            }
            char c = peek();
            if (c == quote) {
                ++pos;
                return out;
            }
            if (c != '\\') {
                out.push_back(c);
                ++pos;
                continue;
            }
            const std::size_t esc = pos;
            ++pos;
            if (at_end()) {
                fail("unterminated string", pos);
            }
            c = peek();
            ++pos;
            switch (c) {
                case '\\': out.push_back('\\'); break;
                case '\'': out.push_back('\''); break;
                case '"': out.push_back('"'); break;
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case 'b': out.push_back('\b'); break;
                case 'f': out.push_back('\f'); break;
                case 'v': out.push_back('\v'); break;
                case '0': out.push_back('\0'); break;
                case 'x': {
                    if (pos + 1 >= in.size()) {
                        fail("truncated \\x escape", esc);
                    }
                    const int hi = hex_digit(in[pos]);
                    const int lo = hex_digit(in[pos + 1]);
                    if (hi < 0 || lo < 0) {
                        fail("invalid \\x escape", esc);
                    }
                    out.push_back(static_cast<char>(hi * 16 + lo));
                    pos += 2;
                    break;
                }
                case 'u': {
                    if (pos + 3 >= in.size()) {
                        fail("truncated \\u escape", esc);
                    }
                    std::uint32_t cp = 0;
                    for (int k = 0; k < 4; ++k) {
                        const int d = hex_digit(in[pos + k]);
                        if (d < 0) {
                            fail("invalid \\u escape", esc);
                        }
                        cp = cp * 16 + static_cast<std::uint32_t>(d);
                    }
                    pos += 4;
                    append_utf8(out, cp);
                    break;
                }
                default:
                    // Unrecognized escapes keep the backslash, as Python does.
                    out.push_back('\\');
                    out.push_back(c);
                    break;
            }
        }
    }

    LiteralValue parse_list() {
        expect('[');
        LiteralValue::List items;
        skip_ws();
        if (!at_end() && peek() == ']') {
            ++pos;
            return LiteralValue::of(std::move(items));
        }
        for (;;) {
            items.push_back(parse_value());
            skip_ws();
            if (at_end()) {
                fail("expected ',' or ']'", pos);
            }
            if (peek() == ',') {
                ++pos;
                skip_ws();
                if (!at_end() && peek() == ']') {
                    ++pos;
                    return LiteralValue::of(std::move(items));
                }
                continue;
            }
            if (peek() == ']') {
                ++pos;
                return LiteralValue::of(std::move(items));
            }
            fail("expected ',' or ']'", pos);
        }
    }

    // Tuples decay to lists. A parenthesized single value without a
    // trailing comma is that value itself, as in Python.
    LiteralValue parse_paren() {
        expect('(');
        skip_ws();
        LiteralValue::List items;
        if (!at_end() && peek() == ')') {
            ++pos;
            return LiteralValue::of(std::move(items));
        }
        LiteralValue first = parse_value();
        skip_ws();
        if (at_end()) {
            fail("expected ',' or ')'", pos);
        }
        if (peek() == ')') {
            ++pos;
            return first;
        }
        if (peek() != ',') {
            fail("expected ',' or ')'", pos);
        }
        ++pos;
        items.push_back(std::move(first));
        for (;;) {
            skip_ws();
            if (at_end()) {
                fail("expected ',' or ')'", pos);
            }
            if (peek() == ')') {
                ++pos;
                return LiteralValue::of(std::move(items));
            }
            items.push_back(parse_value());
            skip_ws();
            if (at_end()) {
                fail("expected ',' or ')'", pos);
            }
            if (peek() == ')') {
                ++pos;
                return LiteralValue::of(std::move(items));
            }
            expect(',');
        }
    }

    LiteralValue parse_map() {
        expect('{');
        LiteralValue::Map entries;
        skip_ws();
        if (!at_end() && peek() == '}') {
            ++pos;
            return LiteralValue::of(std::move(entries));
        }
        for (;;) {
            skip_ws();
            if (at_end()) {
                fail("expected a mapping key", pos);
            }
            if (peek() != '\'' && peek() != '"') {
                fail("mapping key must be a string literal", pos);
            }
            std::string key = parse_string();
            skip_ws();
            expect(':');
            LiteralValue val = parse_value();
            upsert(entries, std::move(key), std::move(val));
            skip_ws();
            if (at_end()) {
                fail("expected ',' or '}'", pos);
            }
            if (peek() == ',') {
                ++pos;
                skip_ws();
                if (!at_end() && peek() == '}') {
                    ++pos;
                    return LiteralValue::of(std::move(entries));
                }
                continue;
            }
            if (peek() == '}') {
                ++pos;
                return LiteralValue::of(std::move(entries));
            }
            fail("expected ',' or '}'", pos);
        }
    }

    // Keeps entries key-sorted; a repeated key overwrites, as in Python.
    static void upsert(LiteralValue::Map& entries, std::string key, LiteralValue val) {
        const auto it = std::lower_bound(
            entries.begin(), entries.end(), key,
            [](const auto& entry, const std::string& k) { return entry.first < k; });
        if (it != entries.end() && it->first == key) {
            it->second = std::move(val);
        } else {
            entries.insert(it, {std::move(key), std::move(val)});
        }
    }
};

void render_to(const LiteralValue& v, std::string& out);

void render_string(const std::string& s, std::string& out) {
    out.push_back('\'');
    for (const char c : s) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\'': out += "\\'"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20 || c == '\x7f') {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\x%02x",
                                  static_cast<unsigned char>(c));
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('\'');
}

void render_real(double d, std::string& out) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, d);
    std::string_view text(buf, static_cast<std::size_t>(res.ptr - buf));
    out += text;
    // Keep the real/integer distinction through a round trip.
    if (text.find('.') == std::string_view::npos &&
        text.find('e') == std::string_view::npos &&
        text.find("inf") == std::string_view::npos &&
        text.find("nan") == std::string_view::npos) {
        out += ".0";
    }
}

void render_to(const LiteralValue& v, std::string& out) {
    if (v.is_null()) {
        out += "None";
    } else if (v.is_bool()) {
        out += v.as_bool() ? "True" : "False";
    } else if (v.is_int()) {
        out += std::to_string(v.as_int());
    } else if (v.is_real()) {
        render_real(v.as_real(), out);
    } else if (v.is_text()) {
        render_string(v.as_text(), out);
    } else if (v.is_list()) {
        out.push_back('[');
        const auto& items = v.as_list();
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            render_to(items[i], out);
        }
        out.push_back(']');
    } else {
        out.push_back('{');
        const auto& entries = v.as_map();
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (i > 0) {
                out += ", ";
            }
            render_string(entries[i].first, out);
            out += ": ";
            render_to(entries[i].second, out);
        }
        out.push_back('}');
    }
}

} // namespace

LiteralValue LiteralValue::of(Map m) {
    std::stable_sort(m.begin(), m.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    Map unique;
    unique.reserve(m.size());
    for (auto& entry : m) {
        if (!unique.empty() && unique.back().first == entry.first) {
            unique.back().second = std::move(entry.second);
        } else {
            unique.push_back(std::move(entry));
        }
    }
    return {{std::move(unique)}};
}

const LiteralValue* LiteralValue::find(std::string_view key) const {
    const auto& entries = as_map();
    const auto it = std::lower_bound(
        entries.begin(), entries.end(), key,
        [](const auto& entry, std::string_view k) { return entry.first < k; });
    if (it != entries.end() && it->first == key) {
        return &it->second;
    }
    return nullptr;
}

LiteralValue parse_literal(std::string_view text) {
    Parser p{text};
    LiteralValue v = p.parse_value();
    p.skip_ws();
    if (!p.at_end()) {
        p.fail("trailing characters after literal", p.pos);
    }
    return v;
}

std::string render(const LiteralValue& v) {
    std::string out;
    render_to(v, out);
    return out;
}

} // namespace placelab
