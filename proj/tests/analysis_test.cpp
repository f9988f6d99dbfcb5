#include "placelab/analysis.hpp"

#include "placelab/csv.hpp"
#include "placelab/datacenter.hpp"
#include "placelab/trace.hpp"

#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <random>
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

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void expect_well_formed_xml(const std::filesystem::path& path) {
    auto check = placelab::testing::run_command(
        "python3 -c \"import xml.etree.ElementTree as ET, sys; ET.parse(sys.argv[1])\" " +
        path.string());
    EXPECT_EQ(check.exit_code, 0) << check.output;
}

FeatureMatrix matrix_of(std::vector<std::string> names,
                        std::vector<std::vector<double>> columns) {
    FeatureMatrix m;
    m.names = std::move(names);
    m.columns = std::move(columns);
    m.row_count = m.columns.empty() ? 0 : m.columns[0].size();
    return m;
}

} // namespace

TEST(Pearson, PerfectCorrelationIsExactlyOne) {
    std::vector<double> x{1, 2, 3, 4};
    std::vector<double> y{3, 5, 7, 9};   // 2x + 1
    std::vector<double> z{1, -1, -3, -5}; // -2x + 3
    EXPECT_EQ(pearson(x, x), 1.0);
    EXPECT_EQ(pearson(x, y), 1.0);
    EXPECT_EQ(pearson(x, z), -1.0);
}

TEST(Pearson, TextbookExample) {
    std::vector<double> x{1, 2, 3};
    std::vector<double> y{1, 2, 4};
    auto r = pearson(x, y);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(*r, 0.98198, 1e-5);
}

TEST(Pearson, ZeroVarianceIsUndefined) {
    std::vector<double> flat{2, 2, 2};
    std::vector<double> x{1, 2, 3};
    EXPECT_FALSE(pearson(flat, x).has_value());
    EXPECT_FALSE(pearson(x, flat).has_value());
    EXPECT_FALSE(pearson(flat, flat).has_value());
}

TEST(Pearson, ArgumentErrors) {
    std::vector<double> x{1, 2, 3};
    std::vector<double> y{1, 2};
    EXPECT_THROW(pearson(x, y), std::invalid_argument);
    EXPECT_THROW(pearson(y, std::vector<double>{1}), std::invalid_argument);
    EXPECT_THROW(pearson(std::vector<double>{1}, std::vector<double>{1}),
                 std::invalid_argument);
}

TEST(Pearson, MatchesNaiveReferenceWithinTightTolerance) {
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    std::uniform_int_distribution<int> len(2, 60);
    for (int trial = 0; trial < 60; ++trial) {
        int n = len(gen);
        std::vector<double> x(n);
        std::vector<double> y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = dist(gen);
            y[i] = dist(gen);
        }
        auto r = pearson(x, y);
        ASSERT_TRUE(r.has_value());
        EXPECT_NEAR(*r, placelab::testing::reference_pearson(x, y), 1e-12);
    }
}

TEST(Pearson, SymmetricAndAffineInvariant) {
    std::mt19937 gen(29);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> x(12);
        std::vector<double> y(12);
        for (int i = 0; i < 12; ++i) {
            x[i] = dist(gen);
            y[i] = dist(gen);
        }
        auto xy = pearson(x, y);
        auto yx = pearson(y, x);
        ASSERT_TRUE(xy && yx);
        EXPECT_EQ(*xy, *yx);

        std::vector<double> scaled(12);
        for (int i = 0; i < 12; ++i) scaled[i] = 2.5 * x[i] + 7.0;
        EXPECT_NEAR(*pearson(scaled, y), *xy, 1e-12);

        for (int i = 0; i < 12; ++i) scaled[i] = -2.5 * x[i] + 7.0;
        EXPECT_NEAR(*pearson(scaled, y), -*xy, 1e-12);
    }
}

TEST(CorrelationMatrix, SelfCorrelationIsSymmetricWithUnitDiagonal) {
    SynthSpec spec;
    spec.vm_count = 50;
    FeatureMatrix f = minmax_normalize(extract_features(clean_records(synth_workload(spec, 2))));
    CorrelationMatrix m = correlation_matrix(f, f);
    ASSERT_EQ(m.row_names, f.names);
    ASSERT_EQ(m.col_names, f.names);
    for (std::size_t i = 0; i < m.row_names.size(); ++i) {
        ASSERT_TRUE(m.values[i][i].has_value());
        EXPECT_NEAR(*m.values[i][i], 1.0, 1e-12);
        for (std::size_t j = 0; j < m.col_names.size(); ++j) {
            ASSERT_EQ(m.values[i][j].has_value(), m.values[j][i].has_value());
            if (m.values[i][j]) {
                EXPECT_NEAR(*m.values[i][j], *m.values[j][i], 1e-12);
                EXPECT_LE(std::abs(*m.values[i][j]), 1.0);
            }
        }
    }
}

TEST(CorrelationMatrix, ConstantColumnsAreFlagged) {
    FeatureMatrix f = matrix_of({"varies", "flat"}, {{1, 2, 3}, {5, 5, 5}});
    CorrelationMatrix m = correlation_matrix(f, f);
    EXPECT_TRUE(m.values[0][0].has_value());
    EXPECT_FALSE(m.values[0][1].has_value());
    EXPECT_FALSE(m.values[1][0].has_value());
    EXPECT_FALSE(m.values[1][1].has_value());
}

TEST(CorrelationMatrix, FeatureByTargetShape) {
    SynthSpec spec;
    spec.vm_count = 40;
    Instance inst;
    auto records = clean_records(synth_workload(spec, 6));
    FeatureMatrix features = minmax_normalize(extract_features(records));

    FeatureMatrix targets = matrix_of({"t1", "t2", "t3", "t4"}, {{}, {}, {}, {}});
    std::mt19937 gen(6);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (auto& col : targets.columns) {
        for (std::size_t r = 0; r < features.row_count; ++r) col.push_back(dist(gen));
    }
    targets.row_count = features.row_count;

    CorrelationMatrix m = correlation_matrix(features, targets);
    EXPECT_EQ(m.row_names.size(), 10u);
    EXPECT_EQ(m.col_names.size(), 4u);
    ASSERT_EQ(m.values.size(), 10u);
    for (const auto& row : m.values) EXPECT_EQ(row.size(), 4u);

    FeatureMatrix short_targets = matrix_of({"t"}, {{1, 2}});
    EXPECT_THROW(correlation_matrix(features, short_targets), std::invalid_argument);
}

TEST(WriteCorrelationCsv, UndefinedCellsAreEmpty) {
    CorrelationMatrix m;
    m.row_names = {"f1", "f2"};
    m.col_names = {"t1", "t2"};
    m.values = {{0.5, std::nullopt}, {-0.25, 1.0}};

    auto dir = fresh_dir("corr_csv");
    auto path = dir / "correlation.csv";
    write_correlation_csv(m, path);
    EXPECT_EQ(slurp(path), "feature,t1,t2\nf1,0.5,\nf2,-0.25,1\n");
    std::filesystem::remove_all(dir);
}

TEST(ExportHeatmapSvg, WellFormedWithRampEndpointsAndFlaggedCells) {
    CorrelationMatrix m;
    m.row_names = {"f1", "f2"};
    m.col_names = {"t1", "t2"};
    m.values = {{1.0, std::nullopt}, {0.0, -1.0}};

    auto dir = fresh_dir("heatmap");
    auto path = dir / "heatmap.svg";
    export_heatmap_svg(m, path);
    expect_well_formed_xml(path);

    std::string svg = slurp(path);
    EXPECT_NE(svg.find("#b2182b"), std::string::npos); // full red at r = 1
    EXPECT_NE(svg.find("#2166ac"), std::string::npos); // full blue at r = -1
    EXPECT_NE(svg.find("#ffffff"), std::string::npos); // white at r = 0
    EXPECT_NE(svg.find("#bdbdbd"), std::string::npos); // gray undefined cell
    EXPECT_NE(svg.find("n/a"), std::string::npos);
    EXPECT_NE(svg.find("1.00"), std::string::npos); // two-decimal annotations
    EXPECT_NE(svg.find("-1.00"), std::string::npos);
    EXPECT_NE(svg.find(">f1<"), std::string::npos); // axis labels
    EXPECT_NE(svg.find(">t2<"), std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST(MeanOf, AveragesEveryField) {
    std::vector<MetricsReport> reports{
        {1.0, 10.0, 2, 100.0, 3},
        {3.0, 30.0, 4, 300.0, 5},
    };
    MeanMetrics m = mean_of(reports);
    EXPECT_DOUBLE_EQ(m.energy_kwh, 2.0);
    EXPECT_DOUBLE_EQ(m.sla_violation_pct, 20.0);
    EXPECT_DOUBLE_EQ(m.migrations, 3.0);
    EXPECT_DOUBLE_EQ(m.exec_time_s, 200.0);
    EXPECT_DOUBLE_EQ(m.active_pms, 4.0);

    EXPECT_THROW(mean_of({}), std::invalid_argument);
}

TEST(ComparisonReport, EmitsCsvAndOneChartPerMetric) {
    ComparisonTable table;
    table.rows.push_back({"ffd", {3.5, 90.0, 0.0, 120.0, 12.0}, 10});
    table.rows.push_back({"ga", {1.25, 0.0, 14.2, 80.0, 8.0}, 10});

    auto dir = fresh_dir("report");
    auto written = comparison_report(table, dir);
    ASSERT_EQ(written.size(), 6u);
    EXPECT_EQ(written[0].filename(), "comparison.csv");

    std::string csv = slurp(written[0]);
    EXPECT_EQ(csv,
              "strategy,energy_kwh,sla_pct,migrations,exec_time_s,active_pms\n"
              "ffd,3.5,90,0,120,12\n"
              "ga,1.25,0,14.2,80,8\n");

    std::vector<std::string> expected{"chart_energy_kwh.svg", "chart_sla_pct.svg",
                                      "chart_migrations.svg", "chart_exec_time_s.svg",
                                      "chart_active_pms.svg"};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(written[i + 1].filename(), expected[i]);
        ASSERT_TRUE(std::filesystem::exists(written[i + 1]));
        expect_well_formed_xml(written[i + 1]);
        std::string svg = slurp(written[i + 1]);
        EXPECT_NE(svg.find(">ffd<"), std::string::npos); // strategy labels under bars
        EXPECT_NE(svg.find(">ga<"), std::string::npos);
    }

    ComparisonTable empty;
    EXPECT_THROW(comparison_report(empty, dir), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST(ComparisonReport, SingleStrategyStillRenders) {
    ComparisonTable table;
    table.rows.push_back({"bfd", {2.0, 50.0, 1.0, 60.0, 4.0}, 1});
    auto dir = fresh_dir("report_single");
    auto written = comparison_report(table, dir);
    ASSERT_EQ(written.size(), 6u);
    for (const auto& path : written) EXPECT_TRUE(std::filesystem::exists(path));
    std::filesystem::remove_all(dir);
}

TEST(VmTargetMatrix, PerVmAttribution) {
    Instance inst;
    inst.vms = {{0, 6.0, 1.0, 100.0}, {1, 3.0, 1.0, 200.0}};
    inst.pms = {{0, 10.0, 32.0, 70.0, 250.0}, {1, 10.0, 32.0, 70.0, 250.0}};
    Placement placement{{0, 0}};
    Placement baseline{{0, 1}};

    FeatureMatrix m = vm_target_matrix(inst, placement, baseline);
    ASSERT_EQ(m.names, (std::vector<std::string>{"sla_pct", "migrations", "exec_time_s",
                                                 "energy_kwh"}));
    ASSERT_EQ(m.row_count, 2u);

    // host util 0.9 breaches the 0.8 threshold for both tenants
    EXPECT_EQ(m.column("sla_pct"), (std::vector<double>{100.0, 100.0}));
    // only vm 1 moved relative to the baseline
    EXPECT_EQ(m.column("migrations"), (std::vector<double>{0.0, 1.0}));
    // host work (100*6 + 200*3) / 10
    EXPECT_EQ(m.column("exec_time_s"), (std::vector<double>{120.0, 120.0}));
    // host energy 232 W * 1 h = 0.232 kWh, split 6:3
    double host_energy = (70.0 + 180.0 * 0.9) * 3600.0 / 3.6e6;
    EXPECT_DOUBLE_EQ(m.column("energy_kwh")[0], host_energy * (6.0 / 9.0));
    EXPECT_DOUBLE_EQ(m.column("energy_kwh")[1], host_energy * (3.0 / 9.0));
}

TEST(VmTargetMatrix, ZeroDemandSplitsEvenly) {
    Instance inst;
    inst.vms = {{0, 0.0, 1.0, 100.0}, {1, 0.0, 1.0, 100.0}};
    inst.pms = {{0, 10.0, 32.0, 70.0, 250.0}};
    FeatureMatrix m = vm_target_matrix(inst, {{0, 0}}, {{0, 0}});
    double host_energy = 70.0 * 3600.0 / 3.6e6; // idle draw, equal shares
    EXPECT_DOUBLE_EQ(m.column("energy_kwh")[0], host_energy / 2.0);
    EXPECT_DOUBLE_EQ(m.column("energy_kwh")[1], host_energy / 2.0);
}
