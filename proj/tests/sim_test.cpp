#include "placelab/sim.hpp"

#include "placelab/errors.hpp"
#include "placelab/heuristics.hpp"
#include "placelab/synth.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "test_util.hpp"

using namespace placelab;

namespace {

std::filesystem::path fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() /
               ("placelab_" + tag + "_" + std::to_string(::getpid()));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

GaConfig quick_ga() {
    GaConfig config;
    config.population_size = 30;
    config.max_generations = 40;
    config.stagnation_window = 10;
    return config;
}

Instance small_instance() { return make_synthetic_instance(12, 6, 3); }

bool same_metrics(const MetricsReport& a, const MetricsReport& b) {
    return a.energy_kwh == b.energy_kwh && a.sla_violation_pct == b.sla_violation_pct &&
           a.migrations == b.migrations && a.exec_time_s == b.exec_time_s &&
           a.active_pms == b.active_pms;
}

} // namespace

TEST(StrategyNames, RoundTripAndParseErrors) {
    EXPECT_EQ(to_string(Strategy::Ffd), "ffd");
    EXPECT_EQ(to_string(Strategy::Bfd), "bfd");
    EXPECT_EQ(to_string(Strategy::Ga), "ga");
    EXPECT_EQ(to_string(Strategy::Random), "random");
    EXPECT_EQ(parse_strategy("ffd"), Strategy::Ffd);
    EXPECT_EQ(parse_strategy("GA"), Strategy::Ga);
    EXPECT_EQ(parse_strategy("Random"), Strategy::Random);
    EXPECT_THROW(parse_strategy("simulated-annealing"), DataError);
    EXPECT_THROW(parse_strategy(""), DataError);
}

TEST(ProtocolConfigValidate, SeedRules) {
    ProtocolConfig p;
    p.runs = 3;
    p.seeds = {1, 2, 3};
    EXPECT_NO_THROW(p.validate());

    p.seeds = {1, 2};
    EXPECT_THROW(p.validate(), DataError); // length != runs

    p.seeds = {1, 2, 2};
    EXPECT_THROW(p.validate(), DataError); // duplicates

    p.seeds = {1, 2, 3};
    p.runs = 0;
    EXPECT_THROW(p.validate(), DataError);

    p.runs = 3;
    p.strategies.clear();
    EXPECT_THROW(p.validate(), DataError);
}

TEST(ProtocolConfigValidate, DefaultSeedsAreConsecutive) {
    EXPECT_EQ(ProtocolConfig::default_seeds(7, 4),
              (std::vector<std::uint64_t>{7, 8, 9, 10}));
    EXPECT_EQ(ProtocolConfig::default_seeds(0, 1), (std::vector<std::uint64_t>{0}));
}

TEST(RandomPlacement, DeterministicRepairedAndInRange) {
    Instance inst = small_instance();
    Rng r1(5);
    Rng r2(5);
    Placement a = random_placement(inst, r1);
    Placement b = random_placement(inst, r2);
    EXPECT_EQ(a, b);
    ASSERT_EQ(a.size(), inst.vm_count());
    for (auto gene : a.assignment) {
        EXPECT_GE(gene, 0);
        EXPECT_LT(gene, static_cast<std::int32_t>(inst.pm_count()));
    }
    // the bundled fleet has plenty of headroom at this scale
    EXPECT_EQ(capacity_overflow(a, inst), 0.0);
}

TEST(RunProtocol, SingleRunEqualsDirectEvaluation) {
    Instance inst = small_instance();
    ProtocolConfig protocol;
    protocol.runs = 1;
    protocol.seeds = {11};
    protocol.strategies = {Strategy::Ffd, Strategy::Ga};
    GaConfig config = quick_ga();

    ProtocolResult result = run_protocol(inst, protocol, config);
    ASSERT_EQ(result.table.rows.size(), 2u);
    ASSERT_EQ(result.runs.size(), 2u);

    MetricsReport ffd = evaluate(ffd_place(inst), inst);
    EXPECT_EQ(result.table.rows[0].strategy, "ffd");
    EXPECT_EQ(result.table.rows[0].metrics.energy_kwh, ffd.energy_kwh);
    EXPECT_EQ(result.table.rows[0].metrics.active_pms, ffd.active_pms);

    GaConfig seeded = config;
    seeded.seed = 11;
    GaResult ga = evolve(inst, seeded);
    EXPECT_EQ(result.table.rows[1].strategy, "ga");
    EXPECT_EQ(result.table.rows[1].metrics.energy_kwh, ga.metrics.energy_kwh);
    EXPECT_TRUE(same_metrics(result.runs[1].metrics, ga.metrics));
}

TEST(RunProtocol, DeterministicStrategiesHaveZeroVariance) {
    Instance inst = small_instance();
    ProtocolConfig protocol;
    protocol.runs = 4;
    protocol.seeds = {1, 2, 3, 4};
    protocol.strategies = {Strategy::Ffd, Strategy::Bfd};

    ProtocolResult result = run_protocol(inst, protocol, quick_ga());
    ASSERT_EQ(result.runs.size(), 8u);
    for (std::size_t r = 1; r < 4; ++r) {
        EXPECT_TRUE(same_metrics(result.runs[r].metrics, result.runs[0].metrics));
        EXPECT_TRUE(same_metrics(result.runs[4 + r].metrics, result.runs[4].metrics));
    }
    // the average of identical reports reproduces them
    EXPECT_EQ(result.table.rows[0].metrics.energy_kwh, result.runs[0].metrics.energy_kwh);
}

TEST(RunProtocol, RunRecordsCarryProtocolOrder) {
    Instance inst = small_instance();
    ProtocolConfig protocol;
    protocol.runs = 2;
    protocol.seeds = {5, 9};
    protocol.strategies = {Strategy::Random, Strategy::Ga};

    ProtocolResult result = run_protocol(inst, protocol, quick_ga());
    ASSERT_EQ(result.runs.size(), 4u);
    for (std::size_t i = 0; i < result.runs.size(); ++i) {
        EXPECT_EQ(result.runs[i].run_id, static_cast<int>(i));
    }
    EXPECT_EQ(result.runs[0].strategy, Strategy::Random);
    EXPECT_EQ(result.runs[0].seed, 5u);
    EXPECT_EQ(result.runs[1].seed, 9u);
    EXPECT_EQ(result.runs[2].strategy, Strategy::Ga);
    EXPECT_EQ(result.table.rows[0].runs_averaged, 2);
}

TEST(RunProtocol, AveragesCommuteWithSeedReplication) {
    Instance inst = small_instance();
    GaConfig config = quick_ga();

    ProtocolConfig once;
    once.runs = 2;
    once.seeds = {3, 8};
    once.strategies = {Strategy::Ga, Strategy::Random};

    // duplicating every seed must leave the averaged table untouched
    ProtocolConfig twice;
    twice.runs = 4;
    twice.seeds = {3, 8, 3, 8};
    twice.strategies = once.strategies;

    ComparisonTable a = run_protocol(inst, once, config).table;
    ComparisonTable b = run_protocol(inst, twice, config).table;
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t r = 0; r < a.rows.size(); ++r) {
        EXPECT_EQ(a.rows[r].strategy, b.rows[r].strategy);
        // the doubled run list sums four terms instead of two, so low bits may move
        EXPECT_DOUBLE_EQ(a.rows[r].metrics.energy_kwh, b.rows[r].metrics.energy_kwh);
        EXPECT_DOUBLE_EQ(a.rows[r].metrics.sla_violation_pct,
                         b.rows[r].metrics.sla_violation_pct);
        EXPECT_DOUBLE_EQ(a.rows[r].metrics.migrations, b.rows[r].metrics.migrations);
        EXPECT_DOUBLE_EQ(a.rows[r].metrics.exec_time_s, b.rows[r].metrics.exec_time_s);
        EXPECT_DOUBLE_EQ(a.rows[r].metrics.active_pms, b.rows[r].metrics.active_pms);
    }
}

TEST(DetectWorkloadChange, RelativeMeanDriftWithStrictThreshold) {
    std::vector<double> base{1.0, 2.0, 3.0};
    EXPECT_FALSE(detect_workload_change(base, base, 0.10));

    std::vector<double> up20{1.2, 2.4, 3.6};
    EXPECT_TRUE(detect_workload_change(base, up20, 0.10));

    std::vector<double> down20{0.8, 1.6, 2.4};
    EXPECT_TRUE(detect_workload_change(base, down20, 0.10));

    // mean exactly at the threshold: strict comparison stays quiet
    // (quarters are exact in binary, so the ratio is exactly 0.25)
    std::vector<double> exactly{1.5, 2.5, 3.5};
    EXPECT_FALSE(detect_workload_change(base, exactly, 0.25));
    EXPECT_TRUE(detect_workload_change(base, exactly, 0.2499999));
}

TEST(DetectWorkloadChange, ArgumentErrors) {
    std::vector<double> a{1.0, 2.0};
    std::vector<double> b{1.0};
    EXPECT_THROW(detect_workload_change(a, b, 0.1), std::invalid_argument);
    EXPECT_THROW(detect_workload_change({}, {}, 0.1), std::invalid_argument);
    std::vector<double> zero{0.0, 0.0};
    EXPECT_THROW(detect_workload_change(zero, a, 0.1), std::invalid_argument);
}

TEST(DynamicLoop, ConstantTimelineOptimizesOnce) {
    Instance inst = small_instance();
    std::vector<double> demands;
    for (const auto& vm : inst.vms) demands.push_back(vm.cpu_demand);
    std::vector<std::vector<double>> timeline(4, demands);

    auto epochs = dynamic_loop(timeline, inst, quick_ga(), 0.10);
    ASSERT_EQ(epochs.size(), 4u);
    EXPECT_TRUE(epochs[0].optimized);
    for (std::size_t e = 1; e < epochs.size(); ++e) {
        EXPECT_FALSE(epochs[e].optimized);
        EXPECT_EQ(epochs[e].placement, epochs[0].placement);
        EXPECT_EQ(epochs[e].metrics.migrations, 0);
    }
}

TEST(DynamicLoop, InfiniteThresholdNeverReoptimizes) {
    Instance inst = small_instance();
    std::vector<double> demands;
    for (const auto& vm : inst.vms) demands.push_back(vm.cpu_demand);
    std::vector<std::vector<double>> timeline;
    for (int e = 0; e < 5; ++e) {
        std::vector<double> d = demands;
        for (auto& v : d) v *= (1.0 + 0.5 * e); // wild drift every epoch
        timeline.push_back(std::move(d));
    }

    auto epochs =
        dynamic_loop(timeline, inst, quick_ga(), std::numeric_limits<double>::infinity());
    int optimizations = 0;
    for (const auto& epoch : epochs) optimizations += epoch.optimized ? 1 : 0;
    EXPECT_EQ(optimizations, 1);
    for (std::size_t e = 1; e < epochs.size(); ++e) {
        EXPECT_EQ(epochs[e].placement, epochs[0].placement);
    }
}

TEST(DynamicLoop, JumpTriggersReoptimizationAndMigrationAccounting) {
    Instance inst = small_instance();
    std::vector<double> demands;
    for (const auto& vm : inst.vms) demands.push_back(vm.cpu_demand);

    std::vector<std::vector<double>> timeline;
    for (int e = 0; e < 5; ++e) {
        std::vector<double> d = demands;
        if (e >= 2) {
            for (auto& v : d) v *= 1.5; // one 50% jump at epoch 2
        }
        timeline.push_back(std::move(d));
    }

    auto epochs = dynamic_loop(timeline, inst, quick_ga(), 0.10);
    ASSERT_EQ(epochs.size(), 5u);
    int optimizations = 0;
    for (const auto& epoch : epochs) optimizations += epoch.optimized ? 1 : 0;
    EXPECT_EQ(optimizations, 2);
    EXPECT_TRUE(epochs[0].optimized);
    EXPECT_TRUE(epochs[2].optimized);

    // epoch instances carry the updated demands
    for (std::size_t e = 0; e < epochs.size(); ++e) {
        for (std::size_t v = 0; v < inst.vm_count(); ++v) {
            EXPECT_EQ(epochs[e].instance.vms[v].cpu_demand, timeline[e][v]);
        }
    }

    // reported migrations equal the placement-to-placement Hamming distances
    EXPECT_EQ(epochs[0].metrics.migrations, 0);
    std::int64_t reported = 0;
    std::int64_t recomputed = 0;
    for (std::size_t e = 1; e < epochs.size(); ++e) {
        reported += epochs[e].metrics.migrations;
        recomputed += migration_count(epochs[e - 1].placement, epochs[e].placement);
    }
    EXPECT_EQ(reported, recomputed);
}

TEST(DynamicLoop, InputErrors) {
    Instance inst = small_instance();
    EXPECT_THROW(dynamic_loop({}, inst, quick_ga(), 0.1), DataError);
    std::vector<std::vector<double>> short_demands{{1.0, 2.0}};
    EXPECT_THROW(dynamic_loop(short_demands, inst, quick_ga(), 0.1), DataError);
}

TEST(WriteRunsJsonl, OneObjectPerLineWithExactFields) {
    std::vector<RunRecord> runs;
    runs.push_back({0, Strategy::Ffd, 7, {1.5, 25.0, 0, 60.0, 4}, 0.001});
    runs.push_back({1, Strategy::Ga, 8, {0.75, 0.0, 12, 45.0, 2}, 0.5});

    auto dir = fresh_dir("jsonl");
    auto path = dir / "runs.jsonl";
    write_runs_jsonl(runs, path);

    std::ifstream in(path);
    std::string line;
    std::vector<nlohmann::json> docs;
    while (std::getline(in, line)) docs.push_back(nlohmann::json::parse(line));
    ASSERT_EQ(docs.size(), 2u);

    EXPECT_EQ(docs[0]["run_id"], 0);
    EXPECT_EQ(docs[0]["strategy"], "ffd");
    EXPECT_EQ(docs[0]["seed"], 7);
    EXPECT_EQ(docs[0]["metrics"]["energy_kwh"], 1.5);
    EXPECT_EQ(docs[0]["metrics"]["sla_pct"], 25.0);
    EXPECT_EQ(docs[0]["metrics"]["migrations"], 0);
    EXPECT_EQ(docs[0]["metrics"]["exec_time_s"], 60.0);
    EXPECT_EQ(docs[0]["metrics"]["active_pms"], 4);
    EXPECT_EQ(docs[1]["strategy"], "ga");

    // exactly these fields, nothing extra (wall time stays out of artifacts)
    for (const auto& doc : docs) {
        EXPECT_EQ(doc.size(), 4u);
        EXPECT_EQ(doc["metrics"].size(), 5u);
    }
    std::filesystem::remove_all(dir);
}

TEST(WriteEpochsCsv, HeaderAndOneRowPerEpoch) {
    Instance inst = small_instance();
    std::vector<double> demands;
    for (const auto& vm : inst.vms) demands.push_back(vm.cpu_demand);
    auto epochs = dynamic_loop({demands, demands}, inst, quick_ga(), 0.10);

    auto dir = fresh_dir("epochs");
    auto path = dir / "epochs.csv";
    write_epochs_csv(epochs, path);

    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "epoch,optimized,energy_kwh,sla_pct,migrations,exec_time_s,active_pms");
    int rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    EXPECT_EQ(rows, 2);
    std::filesystem::remove_all(dir);
}
