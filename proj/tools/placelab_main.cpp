#include "placelab/analysis.hpp"
#include "placelab/config.hpp"
#include "placelab/csv.hpp"
#include "placelab/datacenter.hpp"
#include "placelab/errors.hpp"
#include "placelab/ga.hpp"
#include "placelab/heuristics.hpp"
#include "placelab/literal.hpp"
#include "placelab/sim.hpp"
#include "placelab/synth.hpp"
#include "placelab/trace.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace placelab;
namespace fs = std::filesystem;

struct CommonArgs {
    std::string instance_path;
    std::string trace_path;
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int pms = 20;
};

RunConfig load_config(const CommonArgs& args) {
    RunConfig config;
    if (!args.config_path.empty()) config = load_run_config(args.config_path);
    if (args.seed) {
        config.ga.seed = *args.seed;
        config.protocol.seeds =
            ProtocolConfig::default_seeds(config.ga.seed, config.protocol.runs);
    }
    return config;
}

Instance load_input(const CommonArgs& args) {
    if (!args.instance_path.empty()) return load_instance_json(fs::path(args.instance_path));
    auto records = clean_records(load_trace(fs::path(args.trace_path)));
    return instance_from_records(records, make_fleet(args.pms));
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    fs::create_directories(dir);
    return dir;
}

void print_metrics_line(const std::string& label, const MetricsReport& m) {
    std::printf("%-8s energy %s kWh | sla %s%% | migrations %lld | exec %s s | active %d\n",
                label.c_str(), format_number(m.energy_kwh).c_str(),
                format_number(m.sla_violation_pct).c_str(),
                static_cast<long long>(m.migrations), format_number(m.exec_time_s).c_str(),
                m.active_pms);
}

int cmd_generate(int vms, int pms, std::uint64_t seed, double missing_rate,
                 const std::string& out) {
    auto dir = ensure_out_dir(out);
    SynthSpec spec;
    spec.vm_count = vms;
    spec.missing_rate = missing_rate;
    auto records = synth_workload(spec, seed);
    write_trace_csv(records, dir / "trace.csv");
    Instance inst = instance_from_records(clean_records(records), make_fleet(pms));
    save_instance_json(inst, dir / "instance.json");
    std::printf("wrote %s and %s (%zu VMs, %zu PMs)\n", (dir / "instance.json").c_str(),
                (dir / "trace.csv").c_str(), inst.vm_count(), inst.pm_count());
    return 0;
}

int cmd_run(const CommonArgs& args, const std::string& strategy_name) {
    RunConfig config = load_config(args);
    Instance inst = load_input(args);
    Strategy strategy = parse_strategy(strategy_name);
    auto dir = ensure_out_dir(args.out_dir);

    Placement placement;
    MetricsReport metrics;
    double wall = 0.0;
    switch (strategy) {
    case Strategy::Ffd:
    case Strategy::Bfd: {
        auto t0 = std::chrono::steady_clock::now();
        placement = strategy == Strategy::Ffd ? ffd_place(inst) : bfd_place(inst);
        wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        metrics = evaluate(placement, inst);
        break;
    }
    case Strategy::Ga: {
        GaResult result = evolve(inst, config.ga);
        placement = std::move(result.best);
        metrics = result.metrics;
        wall = result.wall_time_s;
        std::printf("ga: %d generations, best fitness %s\n", result.generations_run,
                    format_number(result.best_fitness).c_str());
        break;
    }
    case Strategy::Random: {
        auto t0 = std::chrono::steady_clock::now();
        Rng rng(config.ga.seed);
        placement = random_placement(inst, rng);
        wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        metrics = evaluate(placement, inst);
        break;
    }
    }

    {
        std::ofstream out(dir / "metrics.csv", std::ios::binary);
        if (!out) throw DataError("cannot open " + (dir / "metrics.csv").string());
        out << metrics_csv_header() << '\n'
            << metrics_csv_row(to_string(strategy), metrics) << '\n';
    }
    {
        nlohmann::json doc{{"strategy", std::string(to_string(strategy))},
                           {"assignment", placement.assignment}};
        std::ofstream out(dir / "placement.json", std::ios::binary);
        if (!out) throw DataError("cannot open " + (dir / "placement.json").string());
        out << doc.dump(2) << '\n';
    }
    print_metrics_line(std::string(to_string(strategy)), metrics);
    std::printf("wall time %.3f s; outputs in %s\n", wall, dir.c_str());
    return 0;
}

int cmd_compare(const CommonArgs& args, const std::string& strategies_csv,
                std::optional<int> runs) {
    RunConfig config = load_config(args);
    if (runs) {
        config.protocol.runs = *runs;
        config.protocol.seeds =
            ProtocolConfig::default_seeds(config.ga.seed, config.protocol.runs);
    }
    if (!strategies_csv.empty()) {
        config.protocol.strategies.clear();
        std::string token;
        for (char c : strategies_csv + ",") {
            if (c == ',') {
                if (!token.empty()) config.protocol.strategies.push_back(parse_strategy(token));
                token.clear();
            } else {
                token.push_back(c);
            }
        }
    }
    config.protocol.validate();

    Instance inst = load_input(args);
    auto dir = ensure_out_dir(args.out_dir);
    ProtocolResult result = run_protocol(inst, config.protocol, config.ga);
    comparison_report(result.table, dir);
    write_runs_jsonl(result.runs, dir / "runs.jsonl");

    for (const auto& row : result.table.rows) {
        std::printf("%-8s energy %s kWh | sla %s%% | migrations %s | exec %s s | active %s\n",
                    row.strategy.c_str(), format_number(row.metrics.energy_kwh).c_str(),
                    format_number(row.metrics.sla_violation_pct).c_str(),
                    format_number(row.metrics.migrations).c_str(),
                    format_number(row.metrics.exec_time_s).c_str(),
                    format_number(row.metrics.active_pms).c_str());
    }
    double wall = 0.0;
    for (const auto& run : result.runs) wall += run.wall_time_s;
    std::printf("%zu runs, %.3f s optimizer time; outputs in %s\n", result.runs.size(), wall,
                dir.c_str());
    return 0;
}

int cmd_correlate(const CommonArgs& args) {
    RunConfig config = load_config(args);
    auto records = clean_records(load_trace(fs::path(args.trace_path)));
    FeatureMatrix features = minmax_normalize(extract_features(records));
    Instance inst = instance_from_records(records, make_fleet(args.pms));
    auto dir = ensure_out_dir(args.out_dir);

    Placement placement = ffd_place(inst);
    Rng rng(config.ga.seed);
    Placement baseline = random_placement(inst, rng);
    FeatureMatrix targets = vm_target_matrix(inst, placement, baseline);

    CorrelationMatrix matrix = correlation_matrix(features, targets);
    write_correlation_csv(matrix, dir / "correlation.csv");
    export_heatmap_svg(matrix, dir / "heatmap.svg");
    std::printf("correlated %zu features x %zu targets over %zu rows; outputs in %s\n",
                matrix.row_names.size(), matrix.col_names.size(), features.row_count,
                dir.c_str());
    return 0;
}

int cmd_dynamic(const CommonArgs& args, int epochs, int drift_at, double drift_factor,
                std::optional<double> threshold) {
    RunConfig config = load_config(args);
    if (threshold) config.threshold = *threshold;
    Instance inst = load_input(args);
    auto dir = ensure_out_dir(args.out_dir);

    std::vector<double> base;
    base.reserve(inst.vm_count());
    for (const auto& vm : inst.vms) base.push_back(vm.cpu_demand);
    std::vector<std::vector<double>> timeline;
    timeline.reserve(static_cast<std::size_t>(epochs));
    for (int e = 0; e < epochs; ++e) {
        std::vector<double> demands = base;
        if (drift_at >= 0 && e >= drift_at) {
            for (auto& d : demands) d *= drift_factor;
        }
        timeline.push_back(std::move(demands));
    }

    auto result = dynamic_loop(timeline, inst, config.ga, config.threshold);
    write_epochs_csv(result, dir / "epochs.csv");

    double total_energy = 0.0;
    std::int64_t total_migrations = 0;
    int optimizations = 0;
    for (const auto& epoch : result) {
        total_energy += epoch.metrics.energy_kwh;
        total_migrations += epoch.metrics.migrations;
        optimizations += epoch.optimized ? 1 : 0;
        std::printf("epoch %d%s: ", epoch.index, epoch.optimized ? " (optimized)" : "");
        print_metrics_line("", epoch.metrics);
    }
    std::printf("%d epochs, %d optimizations, %s kWh total, %lld migrations; outputs in %s\n",
                epochs, optimizations, format_number(total_energy).c_str(),
                static_cast<long long>(total_migrations), dir.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"placement laboratory: trace ingestion, GA vs FFD/BFD placement, reporting"};
    app.require_subcommand(1);

    CommonArgs args;

    auto* generate = app.add_subcommand("generate", "emit a synthetic instance and trace");
    int gen_vms = 50;
    int gen_pms = 20;
    std::uint64_t gen_seed = 7;
    double gen_missing = 0.0;
    generate->add_option("--vms", gen_vms, "number of VMs")->check(CLI::PositiveNumber);
    generate->add_option("--pms", gen_pms, "number of PMs")->check(CLI::PositiveNumber);
    generate->add_option("--seed", gen_seed, "generator seed");
    generate->add_option("--missing-rate", gen_missing, "fraction of blanked numeric cells")
        ->check(CLI::Range(0.0, 1.0));
    generate->add_option("--out", args.out_dir, "output directory")->required();

    auto add_common = [&](CLI::App* cmd, bool trace_only) {
        if (!trace_only) {
            cmd->add_option("--instance", args.instance_path, "instance JSON file")
                ->check(CLI::ExistingFile);
        }
        cmd->add_option("--trace", args.trace_path, "workload trace CSV")
            ->check(CLI::ExistingFile);
        cmd->add_option("--config", args.config_path, "run configuration TOML")
            ->check(CLI::ExistingFile);
        cmd->add_option("--pms", args.pms, "fleet size when building from a trace")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", args.seed, "base seed override");
        cmd->add_option("--out", args.out_dir, "output directory")->required();
    };

    auto* run = app.add_subcommand("run", "place once with a single strategy");
    std::string run_strategy = "ga";
    run->add_option("--strategy", run_strategy, "ffd, bfd, ga or random");
    add_common(run, false);

    auto* compare = app.add_subcommand("compare", "multi-run strategy comparison");
    std::string cmp_strategies;
    std::optional<int> cmp_runs;
    compare->add_option("--strategies", cmp_strategies, "comma-separated strategy list");
    compare->add_option("--runs", cmp_runs, "runs per strategy")->check(CLI::PositiveNumber);
    add_common(compare, false);

    auto* correlate = app.add_subcommand("correlate", "feature/metric Pearson analysis");
    add_common(correlate, true);

    auto* dynamic = app.add_subcommand("dynamic", "adaptive re-optimization loop");
    int dyn_epochs = 5;
    int dyn_drift_at = 2;
    double dyn_drift_factor = 1.5;
    std::optional<double> dyn_threshold;
    dynamic->add_option("--epochs", dyn_epochs, "timeline length")->check(CLI::PositiveNumber);
    dynamic->add_option("--drift-at", dyn_drift_at, "epoch where demand jumps (-1: never)");
    dynamic->add_option("--drift-factor", dyn_drift_factor, "demand multiplier after the jump");
    dynamic->add_option("--threshold", dyn_threshold, "relative drift that triggers re-optimization");
    add_common(dynamic, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) {
            return cmd_generate(gen_vms, gen_pms, gen_seed, gen_missing, args.out_dir);
        }
        auto need_input = [&](bool trace_only) {
            if (trace_only) {
                if (args.trace_path.empty()) throw DataError("--trace is required");
            } else if (args.instance_path.empty() && args.trace_path.empty()) {
                throw DataError("either --instance or --trace is required");
            }
        };
        if (run->parsed()) {
            need_input(false);
            return cmd_run(args, run_strategy);
        }
        if (compare->parsed()) {
            need_input(false);
            return cmd_compare(args, cmp_strategies, cmp_runs);
        }
        if (correlate->parsed()) {
            need_input(true);
            return cmd_correlate(args);
        }
        if (dynamic->parsed()) {
            need_input(false);
            return cmd_dynamic(args, dyn_epochs, dyn_drift_at, dyn_drift_factor, dyn_threshold);
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 3;
    } catch (const LiteralError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
