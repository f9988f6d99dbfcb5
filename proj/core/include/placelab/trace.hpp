#pragma once

#include "placelab/literal.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace placelab {

/// One cell of a trace row: absent, a plain number, or a parsed literal
/// (nested structures arrive as quoted literal strings).
using TraceField = std::variant<std::monostate, double, LiteralValue>;

inline bool is_missing(const TraceField& f) {
    return std::holds_alternative<std::monostate>(f);
}
inline bool is_number(const TraceField& f) { return std::holds_alternative<double>(f); }
inline double as_number(const TraceField& f) { return std::get<double>(f); }

struct RawTraceRecord {
    std::string job_id;
    std::int64_t timestamp = 0; // microseconds
    std::map<std::string, TraceField> fields;
};

struct FeatureMatrix {
    std::vector<std::string> names;
    std::vector<std::vector<double>> columns; // parallel to names
    std::size_t row_count = 0;

    const std::vector<double>& column(std::string_view name) const; // DataError if absent
    void validate() const;
};

struct SynthSpec {
    int vm_count = 50;
    std::pair<double, double> cpu_demand_range{0.8, 2.6};  // cores
    std::pair<double, double> mem_demand_range{2.0, 8.0};  // GiB
    std::pair<double, double> duration_range{60.0, 3600.0}; // seconds
    double missing_rate = 0.0;

    void validate() const;
};

/// The seven numeric columns a trace must provide.
std::span<const std::string_view> canonical_source_columns();
/// Those seven plus the three derived ratios, in output order.
std::span<const std::string_view> canonical_feature_columns();

/// CSV with mandatory header. An empty `schema` ingests every column; otherwise
/// only the named ones. Numeric cells become numbers, quoted literal cells
/// become LiteralValues, anything unparseable becomes missing. Columns named
/// job_id / timestamp feed the record identity instead of `fields`.
std::vector<RawTraceRecord> load_trace(std::istream& source,
                                       std::span<const std::string> schema = {});
std::vector<RawTraceRecord> load_trace(const std::filesystem::path& path,
                                       std::span<const std::string> schema = {});

/// Drop rows with no canonical numeric data at all, then impute remaining
/// holes with per-column medians (even count: mean of the middle two).
/// A canonical column with no numeric data anywhere is a DataError.
std::vector<RawTraceRecord> clean_records(std::vector<RawTraceRecord> records);

/// Ten canonical columns; ratios guard division by zero with 0.
FeatureMatrix extract_features(const std::vector<RawTraceRecord>& records);

/// Per column x' = (x - min) / (max - min); constant columns map to zeros.
FeatureMatrix minmax_normalize(FeatureMatrix matrix);

/// Deterministic synthetic trace rows for desk-scale experiments.
std::vector<RawTraceRecord> synth_workload(const SynthSpec& spec, std::uint64_t seed);

/// Write records in the same CSV shape load_trace reads.
void write_trace_csv(std::span<const RawTraceRecord> records, std::ostream& out);
void write_trace_csv(std::span<const RawTraceRecord> records,
                     const std::filesystem::path& path);

} // namespace placelab
