#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace placelab {

/// Syntax error raised by parse_literal, carrying the byte offset of the
/// offending character in the input.
class LiteralError : public std::runtime_error {
  public:
    LiteralError(const std::string& what, std::size_t offset)
        : std::runtime_error(what), offset_(offset) {}

    std::size_t offset() const { return offset_; }

  private:
    std::size_t offset_;
};

/// A parsed Python-style literal: None, booleans, integers, reals, strings,
/// lists (tuples decay to lists) and string-keyed mappings, arbitrarily
/// nested. Mappings are stored key-sorted with unique keys; lists preserve
/// source order.
struct LiteralValue {
    using List = std::vector<LiteralValue>;
    using Map = std::vector<std::pair<std::string, LiteralValue>>;

    std::variant<std::monostate, bool, std::int64_t, double, std::string, List, Map> value;

    bool operator==(const LiteralValue&) const = default;

    bool is_null() const { return std::holds_alternative<std::monostate>(value); }
    bool is_bool() const { return std::holds_alternative<bool>(value); }
    bool is_int() const { return std::holds_alternative<std::int64_t>(value); }
    bool is_real() const { return std::holds_alternative<double>(value); }
    bool is_text() const { return std::holds_alternative<std::string>(value); }
    bool is_list() const { return std::holds_alternative<List>(value); }
    bool is_map() const { return std::holds_alternative<Map>(value); }

    bool as_bool() const { return std::get<bool>(value); }
    std::int64_t as_int() const { return std::get<std::int64_t>(value); }
    double as_real() const { return std::get<double>(value); }
    const std::string& as_text() const { return std::get<std::string>(value); }
    const List& as_list() const { return std::get<List>(value); }
    const Map& as_map() const { return std::get<Map>(value); }

    /// Numeric view: integers widen to double. Throws std::bad_variant_access
    /// for non-numeric values.
    double as_number() const {
        if (is_int()) {
            return static_cast<double>(as_int());
        }
        return std::get<double>(value);
    }

    /// Pointer to the entry for `key`, or nullptr. Map lookups are O(log n).
    const LiteralValue* find(std::string_view key) const;

    static LiteralValue null() { return {}; }
    static LiteralValue of(bool b) { return {{b}}; }
    static LiteralValue of(std::int64_t i) { return {{i}}; }
    static LiteralValue of(double d) { return {{d}}; }
    static LiteralValue of(std::string s) { return {{std::move(s)}}; }
    static LiteralValue of(List l) { return {{std::move(l)}}; }
    /// Canonicalizes: entries are key-sorted, later duplicates win.
    static LiteralValue of(Map m);
};

/// Parse a single Python literal: None/True/False, integers, reals
/// (exponent forms included), single- or double-quoted strings with
/// backslash escapes, lists, tuples and mappings. Tuples are returned as
/// lists; mapping keys must be string literals. Surrounding whitespace is
/// allowed; anything after the literal is an error.
///
/// Throws LiteralError with the byte offset on malformed input and on
/// non-literal constructs (identifiers, calls).
LiteralValue parse_literal(std::string_view text);

/// Canonical serialization; parse_literal(render(v)) == v for any value
/// free of NaN/infinity. Strings come out single-quoted, mappings in key
/// order, reals in shortest round-trip form.
std::string render(const LiteralValue& v);

} // namespace placelab
