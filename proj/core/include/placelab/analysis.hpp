#pragma once

#include "placelab/datacenter.hpp"
#include "placelab/trace.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace placelab {

/// Pairwise Pearson coefficients; nullopt marks cells where either column has
/// zero variance.
struct CorrelationMatrix {
    std::vector<std::string> row_names;
    std::vector<std::string> col_names;
    std::vector<std::vector<std::optional<double>>> values; // [row][col]
};

/// r in [-1, 1], or nullopt when either input has zero variance.
/// Throws std::invalid_argument on length mismatch or n < 2.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

/// Rows = feature columns, cols = target columns, equal row counts required.
CorrelationMatrix correlation_matrix(const FeatureMatrix& features,
                                     const FeatureMatrix& targets);

void write_correlation_csv(const CorrelationMatrix& matrix, const std::filesystem::path& path);

/// Standalone SVG: blue(-1) -> white(0) -> red(+1) cells, axis labels, values
/// annotated to two decimals, zero-variance cells gray.
void export_heatmap_svg(const CorrelationMatrix& matrix, const std::filesystem::path& path);

/// Five metrics averaged over the runs of one strategy. Averaging makes the
/// count-valued metrics fractional, hence all-real fields.
struct MeanMetrics {
    double energy_kwh = 0.0;
    double sla_violation_pct = 0.0;
    double migrations = 0.0;
    double exec_time_s = 0.0;
    double active_pms = 0.0;
};

struct ComparisonRow {
    std::string strategy;
    MeanMetrics metrics;
    int runs_averaged = 1;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
};

MeanMetrics mean_of(std::span<const MetricsReport> reports);

/// Writes comparison.csv (one row per strategy, MetricsReport column order)
/// plus one bar-chart SVG per metric into out_dir. Returns the file names
/// written, comparison.csv first.
std::vector<std::filesystem::path> comparison_report(const ComparisonTable& table,
                                                     const std::filesystem::path& out_dir);

/// Per-VM attribution of the four target metrics under a placement, used to
/// correlate workload features against outcomes:
///   energy_kwh    - host energy share, split by the VM's cpu fraction
///   sla_pct       - 100 when the host breaches the SLA threshold, else 0
///   migrations    - 1 when the VM moved relative to `baseline`, else 0
///   exec_time_s   - the host's makespan (work / cpu capacity)
FeatureMatrix vm_target_matrix(const Instance& instance, const Placement& placement,
                               const Placement& baseline);

} // namespace placelab
