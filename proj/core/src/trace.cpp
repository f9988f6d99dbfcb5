#include "placelab/trace.hpp"

#include "placelab/csv.hpp"
#include "placelab/errors.hpp"
#include "placelab/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

namespace placelab {

namespace {

constexpr std::string_view kSourceColumns[] = {
    "requested_cpus", "requested_memory",   "avg_cpus", "avg_memory",
    "cpu_usage_mean", "memory_usage_mean", "duration",
};

constexpr std::string_view kFeatureColumns[] = {
    "requested_cpus",        "requested_memory", "avg_cpus",
    "avg_memory",            "cpu_usage_mean",   "memory_usage_mean",
    "duration",              "cpu_utilization_ratio",
    "cpu_peak_ratio",        "memory_peak_ratio",
};

bool is_canonical_source(std::string_view name) {
    for (auto col : kSourceColumns) {
        if (col == name) return true;
    }
    return false;
}

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

bool parse_full_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

// Numbers stay numbers whether they arrive bare or as literals; anything
// non-finite or unparseable is treated as missing rather than an error.
TraceField classify_cell(std::string_view raw) {
    auto cell = trimmed(raw);
    if (cell.empty()) return std::monostate{};
    double num = 0.0;
    if (parse_full_double(cell, num)) {
        if (!std::isfinite(num)) return std::monostate{};
        return num;
    }
    try {
        LiteralValue lit = parse_literal(cell);
        if (lit.is_int()) return static_cast<double>(lit.as_int());
        if (lit.is_real()) {
            double v = lit.as_real();
            if (!std::isfinite(v)) return std::monostate{};
            return v;
        }
        return lit;
    } catch (const LiteralError&) {
        return std::monostate{};
    }
}

std::int64_t parse_timestamp(std::string_view raw, std::size_t ordinal) {
    auto cell = trimmed(raw);
    std::int64_t v = 0;
    auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec == std::errc{} && res.ptr == cell.data() + cell.size()) {
        return std::max<std::int64_t>(v, 0);
    }
    double d = 0.0;
    if (parse_full_double(cell, d) && std::isfinite(d) && d >= 0) {
        return static_cast<std::int64_t>(d);
    }
    return static_cast<std::int64_t>(ordinal);
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

} // namespace

std::span<const std::string_view> canonical_source_columns() { return kSourceColumns; }
std::span<const std::string_view> canonical_feature_columns() { return kFeatureColumns; }

const std::vector<double>& FeatureMatrix::column(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return columns[i];
    }
    throw DataError("feature matrix has no column '" + std::string(name) + "'");
}

void FeatureMatrix::validate() const {
    if (names.size() != columns.size()) {
        throw DataError("feature matrix: name/column count mismatch");
    }
    std::set<std::string_view> seen;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!seen.insert(names[i]).second) {
            throw DataError("feature matrix: duplicate column '" + names[i] + "'");
        }
        if (columns[i].size() != row_count) {
            throw DataError("feature matrix: column '" + names[i] + "' has wrong length");
        }
    }
}

void SynthSpec::validate() const {
    if (vm_count < 1) throw DataError("synth spec: vm_count must be >= 1");
    auto check = [](std::pair<double, double> r, const char* what) {
        if (!(r.first <= r.second)) {
            throw DataError(std::string("synth spec: empty ") + what + " range");
        }
    };
    check(cpu_demand_range, "cpu_demand");
    check(mem_demand_range, "mem_demand");
    check(duration_range, "duration");
    if (!(duration_range.first > 0)) {
        throw DataError("synth spec: durations must be positive");
    }
    if (missing_rate < 0 || missing_rate > 1) {
        throw DataError("synth spec: missing_rate must be in [0, 1]");
    }
}

std::vector<RawTraceRecord> load_trace(std::istream& source,
                                       std::span<const std::string> schema) {
    CsvTable table = read_csv(source);
    if (table.header.empty()) throw DataError("trace: missing header row");
    std::set<std::string_view> seen;
    for (const auto& name : table.header) {
        if (!seen.insert(name).second) {
            throw DataError("trace: duplicate column '" + name + "'");
        }
    }
    auto wanted = [&](const std::string& name) {
        if (schema.empty()) return true;
        return std::find(schema.begin(), schema.end(), name) != schema.end();
    };

    std::vector<RawTraceRecord> records;
    records.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        RawTraceRecord rec;
        rec.job_id = "row-" + std::to_string(r);
        rec.timestamp = static_cast<std::int64_t>(r);
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            const std::string& name = table.header[c];
            if (name == "job_id") {
                auto id = trimmed(row[c]);
                if (!id.empty()) rec.job_id = std::string(id);
                continue;
            }
            if (name == "timestamp") {
                rec.timestamp = parse_timestamp(row[c], r);
                continue;
            }
            if (!wanted(name)) continue;
            rec.fields[name] = classify_cell(row[c]);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

std::vector<RawTraceRecord> load_trace(const std::filesystem::path& path,
                                       std::span<const std::string> schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return load_trace(in, schema);
}

std::vector<RawTraceRecord> clean_records(std::vector<RawTraceRecord> records) {
    std::vector<RawTraceRecord> kept;
    kept.reserve(records.size());
    for (auto& rec : records) {
        bool any_canonical_number = false;
        for (auto col : kSourceColumns) {
            auto it = rec.fields.find(std::string(col));
            if (it != rec.fields.end() && is_number(it->second)) {
                any_canonical_number = true;
                break;
            }
        }
        if (any_canonical_number) kept.push_back(std::move(rec));
    }

    std::map<std::string, std::vector<double>> numbers;
    std::set<std::string> columns;
    std::set<std::string> has_literal;
    for (const auto& rec : kept) {
        for (const auto& [name, cell] : rec.fields) {
            columns.insert(name);
            if (is_number(cell)) {
                numbers[name].push_back(as_number(cell));
            } else if (!is_missing(cell)) {
                has_literal.insert(name);
            }
        }
    }

    std::map<std::string, double> medians;
    for (const auto& name : columns) {
        auto it = numbers.find(name);
        if (it != numbers.end()) {
            medians[name] = median_of(it->second);
            continue;
        }
        if (is_canonical_source(name)) {
            throw DataError("trace column '" + name + "' has no numeric values to impute from");
        }
        if (!has_literal.contains(name)) {
            throw DataError("trace column '" + name + "' is missing in every surviving row");
        }
    }

    for (auto& rec : kept) {
        for (auto& [name, cell] : rec.fields) {
            auto med = medians.find(name);
            if (med == medians.end()) continue;
            if (is_missing(cell) || (is_canonical_source(name) && !is_number(cell))) {
                cell = med->second;
            }
        }
    }
    return kept;
}

FeatureMatrix extract_features(const std::vector<RawTraceRecord>& records) {
    FeatureMatrix matrix;
    matrix.names.assign(kFeatureColumns, kFeatureColumns + std::size(kFeatureColumns));
    matrix.columns.assign(matrix.names.size(), {});
    matrix.row_count = records.size();
    for (auto& col : matrix.columns) col.reserve(records.size());

    auto source_value = [](const RawTraceRecord& rec, std::string_view name) {
        auto it = rec.fields.find(std::string(name));
        if (it == rec.fields.end() || !is_number(it->second)) {
            throw DataError("record '" + rec.job_id + "': missing canonical source column '" +
                            std::string(name) + "'");
        }
        return as_number(it->second);
    };
    auto ratio = [](double num, double den) { return den == 0.0 ? 0.0 : num / den; };

    for (const auto& rec : records) {
        double values[std::size(kSourceColumns)];
        for (std::size_t i = 0; i < std::size(kSourceColumns); ++i) {
            values[i] = source_value(rec, kSourceColumns[i]);
            matrix.columns[i].push_back(values[i]);
        }
        double requested_cpus = values[0];
        double requested_memory = values[1];
        double avg_cpus = values[2];
        double avg_memory = values[3];
        double cpu_usage_mean = values[4];
        matrix.columns[7].push_back(ratio(cpu_usage_mean, requested_cpus));
        matrix.columns[8].push_back(ratio(avg_cpus, requested_cpus));
        matrix.columns[9].push_back(ratio(avg_memory, requested_memory));
    }
    matrix.validate();
    return matrix;
}

FeatureMatrix minmax_normalize(FeatureMatrix matrix) {
    matrix.validate();
    for (auto& col : matrix.columns) {
        if (col.empty()) continue;
        auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
        double lo = *lo_it;
        double hi = *hi_it;
        if (lo == hi) {
            std::fill(col.begin(), col.end(), 0.0);
            continue;
        }
        for (auto& v : col) v = (v - lo) / (hi - lo);
    }
    return matrix;
}

std::vector<RawTraceRecord> synth_workload(const SynthSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    std::vector<RawTraceRecord> records;
    records.reserve(static_cast<std::size_t>(spec.vm_count));
    for (int i = 0; i < spec.vm_count; ++i) {
        RawTraceRecord rec;
        rec.job_id = "job-" + std::to_string(i + 1);
        rec.timestamp = static_cast<std::int64_t>(i) * 1'000'000;

        double req_cpu = rng.next_real(spec.cpu_demand_range.first, spec.cpu_demand_range.second);
        double req_mem = rng.next_real(spec.mem_demand_range.first, spec.mem_demand_range.second);
        double duration = rng.next_real(spec.duration_range.first, spec.duration_range.second);
        double avg_cpus = req_cpu * rng.next_real(0.2, 1.0);
        double avg_memory = req_mem * rng.next_real(0.2, 1.0);
        double cpu_usage_mean = req_cpu * rng.next_real(0.2, 0.9);
        double memory_usage_mean = req_mem * rng.next_real(0.2, 0.9);

        rec.fields["requested_cpus"] = req_cpu;
        rec.fields["requested_memory"] = req_mem;
        rec.fields["avg_cpus"] = avg_cpus;
        rec.fields["avg_memory"] = avg_memory;
        rec.fields["cpu_usage_mean"] = cpu_usage_mean;
        rec.fields["memory_usage_mean"] = memory_usage_mean;
        rec.fields["duration"] = duration;

        LiteralValue::Map resources;
        resources.emplace_back("cpus", LiteralValue::of(req_cpu));
        resources.emplace_back("mem", LiteralValue::of(req_mem));
        rec.fields["resources"] = LiteralValue::of(std::move(resources));

        if (spec.missing_rate > 0) {
            for (auto col : kSourceColumns) {
                if (rng.next_bool(spec.missing_rate)) {
                    rec.fields[std::string(col)] = std::monostate{};
                }
            }
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_trace_csv(std::span<const RawTraceRecord> records, std::ostream& out) {
    std::set<std::string> extra;
    std::set<std::string_view> canonical_present;
    for (const auto& rec : records) {
        for (const auto& [name, cell] : rec.fields) {
            if (is_canonical_source(name)) {
                canonical_present.insert(name);
            } else {
                extra.insert(name);
            }
        }
    }
    std::vector<std::string> header{"job_id", "timestamp"};
    for (auto col : kSourceColumns) {
        if (canonical_present.contains(col)) header.emplace_back(col);
    }
    header.insert(header.end(), extra.begin(), extra.end());
    write_csv_row(out, header);

    std::vector<std::string> row;
    for (const auto& rec : records) {
        row.clear();
        row.push_back(rec.job_id);
        row.push_back(std::to_string(rec.timestamp));
        for (std::size_t c = 2; c < header.size(); ++c) {
            auto it = rec.fields.find(header[c]);
            if (it == rec.fields.end() || is_missing(it->second)) {
                row.emplace_back();
            } else if (is_number(it->second)) {
                row.push_back(format_number(as_number(it->second)));
            } else {
                row.push_back(render(std::get<LiteralValue>(it->second)));
            }
        }
        write_csv_row(out, row);
    }
}

void write_trace_csv(std::span<const RawTraceRecord> records,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    write_trace_csv(records, out);
}

} // namespace placelab
