#pragma once

#include "placelab/analysis.hpp"
#include "placelab/datacenter.hpp"
#include "placelab/ga.hpp"
#include "placelab/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace placelab {

enum class Strategy { Ffd, Bfd, Ga, Random };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name); // case-insensitive; DataError otherwise

struct ProtocolConfig {
    int runs = 10;
    std::vector<std::uint64_t> seeds; // length == runs
    std::vector<Strategy> strategies{Strategy::Ffd, Strategy::Bfd, Strategy::Ga};

    static std::vector<std::uint64_t> default_seeds(std::uint64_t base, int runs);
    void validate() const; // also rejects duplicate seeds
};

struct RunRecord {
    int run_id = 0;
    Strategy strategy = Strategy::Ffd;
    std::uint64_t seed = 0;
    MetricsReport metrics;
    double wall_time_s = 0.0;
};

struct ProtocolResult {
    ComparisonTable table;         // one averaged row per strategy
    std::vector<RunRecord> runs;   // every individual run, protocol order
};

/// Uniform assignment passed through repair: the "before optimization" state.
Placement random_placement(const Instance& instance, Rng& rng);

/// Runs each strategy `runs` times (deterministic strategies once, replicated)
/// and averages the five metrics. Seeds index GA/RANDOM runs.
ProtocolResult run_protocol(const Instance& instance, const ProtocolConfig& protocol,
                            const GaConfig& ga_config);

/// True iff mean cpu demand moved by strictly more than `threshold`
/// relative to the previous mean. Throws on length mismatch or zero previous
/// mean.
bool detect_workload_change(std::span<const double> prev_demands,
                            std::span<const double> curr_demands, double threshold = 0.10);

struct Epoch {
    int index = 0;
    Instance instance;
    Placement placement;
    MetricsReport metrics;
    bool optimized = false;
};

/// Adaptive loop: epoch 0 always optimizes; later epochs re-optimize only when
/// detect_workload_change fires, otherwise the placement carries forward and
/// is re-evaluated against the new demands. epoch_demands[e] holds the per-VM
/// cpu demands of epoch e. Per-epoch GA seeds derive from ga_config.seed.
std::vector<Epoch> dynamic_loop(const std::vector<std::vector<double>>& epoch_demands,
                                const Instance& instance_template, const GaConfig& ga_config,
                                double threshold = 0.10);

/// One JSON object per line: run_id, strategy, seed, metrics.
void write_runs_jsonl(std::span<const RunRecord> runs, const std::filesystem::path& path);

/// epoch,optimized,energy_kwh,sla_pct,migrations,exec_time_s,active_pms
void write_epochs_csv(std::span<const Epoch> epochs, const std::filesystem::path& path);

} // namespace placelab
