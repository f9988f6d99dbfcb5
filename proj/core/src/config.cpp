#include "placelab/config.hpp"

#include "placelab/errors.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

namespace placelab {

double TomlValue::as_number() const {
    if (is_int()) return static_cast<double>(std::get<std::int64_t>(value));
    if (is_real()) return std::get<double>(value);
    throw DataError("config value is not numeric");
}

namespace {

struct LineParser {
    std::string_view line;
    std::size_t pos = 0;
    int line_no;

    [[noreturn]] void fail(const std::string& msg) const {
        throw DataError("config line " + std::to_string(line_no) + ": " + msg);
    }
    void skip_ws() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    }
    bool at_end() {
        skip_ws();
        return pos >= line.size();
    }
    char peek() const { return line[pos]; }

    static bool is_bare_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
               c == '_' || c == '-';
    }

    std::string parse_bare_key() {
        skip_ws();
        std::size_t start = pos;
        while (pos < line.size() && is_bare_char(line[pos])) ++pos;
        if (pos == start) fail("expected a key");
        return std::string(line.substr(start, pos - start));
    }

    std::string parse_string() {
        ++pos; // opening quote
        std::string out;
        while (true) {
            if (pos >= line.size()) fail("unterminated string");
            char c = line[pos++];
            if (c == '"') return out;
            if (c != '\\') {
                out.push_back(c);
                continue;
            }
            if (pos >= line.size()) fail("dangling escape");
            char e = line[pos++];
            switch (e) {
            case '"': out.push_back('"'); break;
            case '\\': out.push_back('\\'); break;
            case 'n': out.push_back('\n'); break;
            case 't': out.push_back('\t'); break;
            case 'r': out.push_back('\r'); break;
            default: fail(std::string("unsupported escape '\\") + e + "'");
            }
        }
    }

    TomlValue parse_number() {
        std::size_t start = pos;
        while (pos < line.size() && (is_bare_char(line[pos]) || line[pos] == '+' ||
                                     line[pos] == '.')) {
            ++pos;
        }
        auto token = line.substr(start, pos - start);
        if (token.empty()) fail("expected a value");
        const char* first = token.data();
        const char* last = token.data() + token.size();
        std::int64_t i = 0;
        auto ri = std::from_chars(first, last, i);
        if (ri.ec == std::errc{} && ri.ptr == last) return {{i}};
        double d = 0.0;
        auto rd = std::from_chars(first[0] == '+' ? first + 1 : first, last, d);
        if (rd.ec == std::errc{} && rd.ptr == last) return {{d}};
        fail("cannot parse value '" + std::string(token) + "'");
    }

    TomlValue parse_value() {
        skip_ws();
        if (pos >= line.size()) fail("missing value");
        char c = peek();
        if (c == '"') return {{parse_string()}};
        if (c == '[') {
            ++pos;
            TomlValue::Array items;
            skip_ws();
            while (true) {
                if (pos >= line.size()) fail("unterminated array");
                if (peek() == ']') {
                    ++pos;
                    break;
                }
                items.push_back(parse_value());
                skip_ws();
                if (pos < line.size() && peek() == ',') {
                    ++pos;
                    skip_ws();
                    continue;
                }
                if (pos < line.size() && peek() == ']') {
                    ++pos;
                    break;
                }
                fail("expected ',' or ']' in array");
            }
            return {{std::move(items)}};
        }
        if (line.compare(pos, 4, "true") == 0 &&
            (pos + 4 >= line.size() || !is_bare_char(line[pos + 4]))) {
            pos += 4;
            return {{true}};
        }
        if (line.compare(pos, 5, "false") == 0 &&
            (pos + 5 >= line.size() || !is_bare_char(line[pos + 5]))) {
            pos += 5;
            return {{false}};
        }
        return parse_number();
    }
};

// Strips a #-comment that is not inside a double-quoted string.
std::string_view strip_comment(std::string_view line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c == '"' ) {
            if (in_string && i > 0 && line[i - 1] == '\\') continue;
            in_string = !in_string;
        } else if (c == '#' && !in_string) {
            return line.substr(0, i);
        }
    }
    return line;
}

} // namespace

TomlTable parse_toml(std::string_view text) {
    TomlTable table;
    std::string current;
    table[current];
    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view raw = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);

        LineParser p{strip_comment(raw), 0, line_no};
        if (p.at_end()) {
            if (start > text.size()) break;
            continue;
        }
        if (p.peek() == '[') {
            ++p.pos;
            current = p.parse_bare_key();
            p.skip_ws();
            if (p.pos >= p.line.size() || p.peek() != ']') p.fail("expected ']'");
            ++p.pos;
            if (!p.at_end()) p.fail("unexpected text after section header");
            table[current];
            continue;
        }
        std::string key = p.parse_bare_key();
        p.skip_ws();
        if (p.pos >= p.line.size() || p.peek() != '=') p.fail("expected '=' after key");
        ++p.pos;
        TomlValue value = p.parse_value();
        if (!p.at_end()) p.fail("unexpected text after value");
        auto [it, inserted] = table[current].emplace(std::move(key), std::move(value));
        if (!inserted) p.fail("duplicate key '" + it->first + "'");
        if (start > text.size()) break;
    }
    return table;
}

namespace {

int to_int(const TomlValue& v, const std::string& ctx) {
    if (!v.is_int()) throw DataError(ctx + " must be an integer");
    auto i = std::get<std::int64_t>(v.value);
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) {
        throw DataError(ctx + " out of range");
    }
    return static_cast<int>(i);
}

double to_real(const TomlValue& v, const std::string& ctx) {
    if (!v.is_int() && !v.is_real()) throw DataError(ctx + " must be a number");
    return v.as_number();
}

std::uint64_t to_seed(const TomlValue& v, const std::string& ctx) {
    if (!v.is_int()) throw DataError(ctx + " must be an integer");
    auto i = std::get<std::int64_t>(v.value);
    if (i < 0) throw DataError(ctx + " must be >= 0");
    return static_cast<std::uint64_t>(i);
}

} // namespace

RunConfig parse_run_config(std::string_view text) {
    TomlTable table = parse_toml(text);
    RunConfig config;
    bool seeds_given = false;

    for (const auto& [section, entries] : table) {
        if (section.empty()) {
            if (!entries.empty()) {
                throw DataError("config: top-level key '" + entries.begin()->first +
                                "' outside any section");
            }
            continue;
        }
        if (section == "ga") {
            for (const auto& [key, value] : entries) {
                std::string ctx = "config ga." + key;
                if (key == "population_size") config.ga.population_size = to_int(value, ctx);
                else if (key == "max_generations") config.ga.max_generations = to_int(value, ctx);
                else if (key == "stagnation_window") config.ga.stagnation_window = to_int(value, ctx);
                else if (key == "stagnation_epsilon") config.ga.stagnation_epsilon = to_real(value, ctx);
                else if (key == "crossover_rate") config.ga.crossover_rate = to_real(value, ctx);
                else if (key == "mutation_rate") config.ga.mutation_rate = to_real(value, ctx);
                else if (key == "tournament_size") config.ga.tournament_size = to_int(value, ctx);
                else if (key == "elitism_count") config.ga.elitism_count = to_int(value, ctx);
                else if (key == "infeasibility_lambda") config.ga.infeasibility_lambda = to_real(value, ctx);
                else if (key == "seed") config.ga.seed = to_seed(value, ctx);
                else throw DataError("config: unknown key ga." + key);
            }
        } else if (section == "weights") {
            for (const auto& [key, value] : entries) {
                std::string ctx = "config weights." + key;
                if (key == "w_energy") config.ga.weights.w_energy = to_real(value, ctx);
                else if (key == "w_sla") config.ga.weights.w_sla = to_real(value, ctx);
                else if (key == "w_mig") config.ga.weights.w_mig = to_real(value, ctx);
                else if (key == "w_time") config.ga.weights.w_time = to_real(value, ctx);
                else throw DataError("config: unknown key weights." + key);
            }
        } else if (section == "protocol") {
            for (const auto& [key, value] : entries) {
                std::string ctx = "config protocol." + key;
                if (key == "runs") {
                    config.protocol.runs = to_int(value, ctx);
                } else if (key == "seeds") {
                    if (!value.is_array()) throw DataError(ctx + " must be an array");
                    config.protocol.seeds.clear();
                    for (const auto& item : std::get<TomlValue::Array>(value.value)) {
                        config.protocol.seeds.push_back(to_seed(item, ctx + " entry"));
                    }
                    seeds_given = true;
                } else if (key == "strategies") {
                    if (!value.is_array()) throw DataError(ctx + " must be an array");
                    config.protocol.strategies.clear();
                    for (const auto& item : std::get<TomlValue::Array>(value.value)) {
                        if (!item.is_string()) throw DataError(ctx + " entries must be strings");
                        config.protocol.strategies.push_back(
                            parse_strategy(std::get<std::string>(item.value)));
                    }
                } else {
                    throw DataError("config: unknown key protocol." + key);
                }
            }
        } else if (section == "dynamic") {
            for (const auto& [key, value] : entries) {
                if (key == "threshold") {
                    config.threshold = to_real(value, "config dynamic.threshold");
                } else {
                    throw DataError("config: unknown key dynamic." + key);
                }
            }
        } else {
            throw DataError("config: unknown section [" + section + "]");
        }
    }

    if (!seeds_given) {
        config.protocol.seeds =
            ProtocolConfig::default_seeds(config.ga.seed, config.protocol.runs);
    }
    config.ga.validate();
    return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_run_config(buf.str());
}

} // namespace placelab
