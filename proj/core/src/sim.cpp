#include "placelab/sim.hpp"

#include "placelab/csv.hpp"
#include "placelab/errors.hpp"
#include "placelab/heuristics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace placelab {

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
    case Strategy::Ffd: return "ffd";
    case Strategy::Bfd: return "bfd";
    case Strategy::Ga: return "ga";
    case Strategy::Random: return "random";
    }
    throw std::logic_error("unknown strategy");
}

Strategy parse_strategy(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "ffd") return Strategy::Ffd;
    if (lower == "bfd") return Strategy::Bfd;
    if (lower == "ga") return Strategy::Ga;
    if (lower == "random") return Strategy::Random;
    throw DataError("unknown strategy '" + std::string(name) +
                    "' (expected ffd, bfd, ga or random)");
}

std::vector<std::uint64_t> ProtocolConfig::default_seeds(std::uint64_t base, int runs) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(std::max(runs, 0)));
    for (int i = 0; i < runs; ++i) seeds.push_back(base + static_cast<std::uint64_t>(i));
    return seeds;
}

void ProtocolConfig::validate() const {
    if (runs < 1) throw DataError("protocol: runs must be >= 1");
    if (seeds.size() != static_cast<std::size_t>(runs)) {
        throw DataError("protocol: need exactly one seed per run");
    }
    std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
    if (unique.size() != seeds.size()) throw DataError("protocol: seeds must be distinct");
    if (strategies.empty()) throw DataError("protocol: no strategies selected");
}

Placement random_placement(const Instance& instance, Rng& rng) {
    Placement p;
    p.assignment.resize(instance.vm_count());
    for (auto& gene : p.assignment) {
        gene = static_cast<std::int32_t>(rng.next_index(instance.pm_count()));
    }
    return repair(std::move(p), instance);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

ProtocolResult run_protocol(const Instance& instance, const ProtocolConfig& protocol,
                            const GaConfig& ga_config) {
    instance.validate();
    ga_config.validate();
    if (protocol.runs < 1) throw DataError("protocol: runs must be >= 1");
    if (protocol.seeds.size() != static_cast<std::size_t>(protocol.runs)) {
        throw DataError("protocol: need exactly one seed per run");
    }
    if (protocol.strategies.empty()) throw DataError("protocol: no strategies selected");

    ProtocolResult result;
    int run_id = 0;
    for (Strategy strategy : protocol.strategies) {
        std::vector<MetricsReport> reports;
        reports.reserve(static_cast<std::size_t>(protocol.runs));
        switch (strategy) {
        case Strategy::Ffd:
        case Strategy::Bfd: {
            auto t0 = std::chrono::steady_clock::now();
            Placement p = strategy == Strategy::Ffd ? ffd_place(instance) : bfd_place(instance);
            double wall = seconds_since(t0);
            MetricsReport m = evaluate(p, instance);
            for (int r = 0; r < protocol.runs; ++r) {
                reports.push_back(m);
                result.runs.push_back({run_id++, strategy, protocol.seeds[static_cast<std::size_t>(r)], m, wall});
            }
            break;
        }
        case Strategy::Ga: {
            for (int r = 0; r < protocol.runs; ++r) {
                GaConfig cfg = ga_config;
                cfg.seed = protocol.seeds[static_cast<std::size_t>(r)];
                GaResult ga = evolve(instance, cfg);
                reports.push_back(ga.metrics);
                result.runs.push_back({run_id++, strategy, cfg.seed, ga.metrics, ga.wall_time_s});
            }
            break;
        }
        case Strategy::Random: {
            for (int r = 0; r < protocol.runs; ++r) {
                std::uint64_t seed = protocol.seeds[static_cast<std::size_t>(r)];
                auto t0 = std::chrono::steady_clock::now();
                Rng rng(seed);
                Placement p = random_placement(instance, rng);
                double wall = seconds_since(t0);
                MetricsReport m = evaluate(p, instance);
                reports.push_back(m);
                result.runs.push_back({run_id++, strategy, seed, m, wall});
            }
            break;
        }
        }
        ComparisonRow row;
        row.strategy = std::string(to_string(strategy));
        row.metrics = mean_of(reports);
        row.runs_averaged = protocol.runs;
        result.table.rows.push_back(std::move(row));
    }
    return result;
}

bool detect_workload_change(std::span<const double> prev_demands,
                            std::span<const double> curr_demands, double threshold) {
    if (prev_demands.size() != curr_demands.size()) {
        throw std::invalid_argument("demand vectors differ in length");
    }
    if (prev_demands.empty()) throw std::invalid_argument("empty demand vectors");
    double prev_mean = 0.0;
    double curr_mean = 0.0;
    for (std::size_t i = 0; i < prev_demands.size(); ++i) {
        prev_mean += prev_demands[i];
        curr_mean += curr_demands[i];
    }
    prev_mean /= static_cast<double>(prev_demands.size());
    curr_mean /= static_cast<double>(curr_demands.size());
    if (prev_mean == 0.0) throw std::invalid_argument("previous mean demand is zero");
    return std::abs(curr_mean - prev_mean) / prev_mean > threshold;
}

std::vector<Epoch> dynamic_loop(const std::vector<std::vector<double>>& epoch_demands,
                                const Instance& instance_template, const GaConfig& ga_config,
                                double threshold) {
    if (epoch_demands.empty()) throw DataError("dynamic loop: empty demand timeline");
    instance_template.validate();
    ga_config.validate();

    auto with_demands = [&](const std::vector<double>& demands) {
        if (demands.size() != instance_template.vm_count()) {
            throw DataError("dynamic loop: demand vector length does not match VM count");
        }
        Instance inst = instance_template;
        for (std::size_t v = 0; v < demands.size(); ++v) {
            inst.vms[v].cpu_demand = demands[v];
        }
        inst.validate();
        return inst;
    };

    std::vector<Epoch> epochs;
    epochs.reserve(epoch_demands.size());
    for (std::size_t e = 0; e < epoch_demands.size(); ++e) {
        Instance inst = with_demands(epoch_demands[e]);
        Epoch epoch;
        epoch.index = static_cast<int>(e);
        if (e == 0) {
            GaResult ga = evolve(inst, ga_config);
            epoch.placement = std::move(ga.best);
            epoch.metrics = ga.metrics;
            epoch.optimized = true;
        } else {
            const Epoch& prev = epochs.back();
            bool drifted = detect_workload_change(epoch_demands[e - 1], epoch_demands[e],
                                                  threshold);
            if (drifted) {
                GaConfig cfg = ga_config;
                cfg.seed = ga_config.seed + static_cast<std::uint64_t>(e);
                GaResult ga = evolve(inst, cfg, &prev.placement);
                epoch.placement = std::move(ga.best);
                epoch.metrics = ga.metrics;
                epoch.optimized = true;
            } else {
                epoch.placement = prev.placement;
                epoch.metrics = evaluate(epoch.placement, inst, &prev.placement);
                epoch.optimized = false;
            }
        }
        epoch.instance = std::move(inst);
        epochs.push_back(std::move(epoch));
    }
    return epochs;
}

void write_runs_jsonl(std::span<const RunRecord> runs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    for (const auto& run : runs) {
        nlohmann::json line{
            {"run_id", run.run_id},
            {"strategy", std::string(to_string(run.strategy))},
            {"seed", run.seed},
            {"metrics",
             {{"energy_kwh", run.metrics.energy_kwh},
              {"sla_pct", run.metrics.sla_violation_pct},
              {"migrations", run.metrics.migrations},
              {"exec_time_s", run.metrics.exec_time_s},
              {"active_pms", run.metrics.active_pms}}},
        };
        out << line.dump() << '\n';
    }
}

void write_epochs_csv(std::span<const Epoch> epochs, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    out << "epoch,optimized,energy_kwh,sla_pct,migrations,exec_time_s,active_pms\n";
    for (const auto& epoch : epochs) {
        out << epoch.index << ',' << (epoch.optimized ? 1 : 0) << ','
            << format_number(epoch.metrics.energy_kwh) << ','
            << format_number(epoch.metrics.sla_violation_pct) << ','
            << epoch.metrics.migrations << ','
            << format_number(epoch.metrics.exec_time_s) << ','
            << epoch.metrics.active_pms << '\n';
    }
}

} // namespace placelab
