#include "placelab/analysis.hpp"

#include "placelab/csv.hpp"
#include "placelab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace placelab {

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("pearson: need at least two samples");
    auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double dx = x[i] - mx;
        double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(const FeatureMatrix& features,
                                     const FeatureMatrix& targets) {
    features.validate();
    targets.validate();
    if (features.row_count != targets.row_count) {
        throw std::invalid_argument("correlation_matrix: row count mismatch");
    }
    CorrelationMatrix matrix;
    matrix.row_names = features.names;
    matrix.col_names = targets.names;
    matrix.values.reserve(features.names.size());
    for (const auto& fcol : features.columns) {
        std::vector<std::optional<double>> row;
        row.reserve(targets.names.size());
        for (const auto& tcol : targets.columns) {
            row.push_back(pearson(fcol, tcol));
        }
        matrix.values.push_back(std::move(row));
    }
    return matrix;
}

void write_correlation_csv(const CorrelationMatrix& matrix,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    std::vector<std::string> row{"feature"};
    row.insert(row.end(), matrix.col_names.begin(), matrix.col_names.end());
    write_csv_row(out, row);
    for (std::size_t r = 0; r < matrix.row_names.size(); ++r) {
        row.clear();
        row.push_back(matrix.row_names[r]);
        for (const auto& cell : matrix.values[r]) {
            row.push_back(cell ? format_number(*cell) : std::string());
        }
        write_csv_row(out, row);
    }
}

namespace {

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string compact4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

// t in [0,1] between two RGB endpoints.
std::string lerp_color(int r0, int g0, int b0, int r1, int g1, int b1, double t) {
    auto mix = [t](int a, int b) {
        return static_cast<int>(std::lround(a + (b - a) * t));
    };
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", mix(r0, r1), mix(g0, g1), mix(b0, b1));
    return buf;
}

// Blue (-1) through white (0) to red (+1).
std::string ramp_color(double r) {
    if (r < 0) return lerp_color(255, 255, 255, 33, 102, 172, std::min(-r, 1.0));
    return lerp_color(255, 255, 255, 178, 24, 43, std::min(r, 1.0));
}

struct SvgDoc {
    std::string body;

    void open(int width, int height) {
        body += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        body += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
                "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
                std::to_string(width) + " " + std::to_string(height) + "\">\n";
        body += "<rect width=\"" + std::to_string(width) + "\" height=\"" +
                std::to_string(height) + "\" fill=\"white\"/>\n";
    }
    void rect(int x, int y, int w, int h, const std::string& fill) {
        body += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                "\" width=\"" + std::to_string(w) + "\" height=\"" + std::to_string(h) +
                "\" fill=\"" + fill + "\"/>\n";
    }
    void line(int x1, int y1, int x2, int y2, const std::string& stroke) {
        body += "<line x1=\"" + std::to_string(x1) + "\" y1=\"" + std::to_string(y1) +
                "\" x2=\"" + std::to_string(x2) + "\" y2=\"" + std::to_string(y2) +
                "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
    }
    void text(int x, int y, const std::string& content, const std::string& anchor,
              int size, const std::string& fill = "black",
              const std::string& transform = "") {
        body += "<text x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                "\" text-anchor=\"" + anchor + "\" font-family=\"sans-serif\" font-size=\"" +
                std::to_string(size) + "\" fill=\"" + fill + "\"";
        if (!transform.empty()) body += " transform=\"" + transform + "\"";
        body += ">" + xml_escape(content) + "</text>\n";
    }
    void close() { body += "</svg>\n"; }

    void save(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot open " + path.string() + " for writing");
        out << body;
    }
};

} // namespace

void export_heatmap_svg(const CorrelationMatrix& matrix, const std::filesystem::path& path) {
    const int cell_w = 64;
    const int cell_h = 30;
    const int left = 180;
    const int top = 140;
    auto rows = static_cast<int>(matrix.row_names.size());
    auto cols = static_cast<int>(matrix.col_names.size());
    int width = left + cols * cell_w + 30;
    int height = top + rows * cell_h + 30;

    SvgDoc svg;
    svg.open(width, height);
    for (int c = 0; c < cols; ++c) {
        int x = left + c * cell_w + cell_w / 2;
        int y = top - 10;
        svg.text(x, y, matrix.col_names[static_cast<std::size_t>(c)], "start", 12, "black",
                 "rotate(-45 " + std::to_string(x) + " " + std::to_string(y) + ")");
    }
    for (int r = 0; r < rows; ++r) {
        svg.text(left - 8, top + r * cell_h + cell_h / 2 + 4,
                 matrix.row_names[static_cast<std::size_t>(r)], "end", 12);
    }
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto& cell = matrix.values[static_cast<std::size_t>(r)]
                                            [static_cast<std::size_t>(c)];
            int x = left + c * cell_w;
            int y = top + r * cell_h;
            if (cell) {
                bool dark = std::abs(*cell) > 0.6;
                svg.rect(x, y, cell_w, cell_h, ramp_color(*cell));
                svg.text(x + cell_w / 2, y + cell_h / 2 + 4, fixed2(*cell), "middle", 11,
                         dark ? "white" : "black");
            } else {
                svg.rect(x, y, cell_w, cell_h, "#bdbdbd");
                svg.text(x + cell_w / 2, y + cell_h / 2 + 4, "n/a", "middle", 11);
            }
        }
    }
    svg.close();
    svg.save(path);
}

MeanMetrics mean_of(std::span<const MetricsReport> reports) {
    if (reports.empty()) throw std::invalid_argument("mean_of: no reports");
    MeanMetrics mean;
    for (const auto& m : reports) {
        mean.energy_kwh += m.energy_kwh;
        mean.sla_violation_pct += m.sla_violation_pct;
        mean.migrations += static_cast<double>(m.migrations);
        mean.exec_time_s += m.exec_time_s;
        mean.active_pms += static_cast<double>(m.active_pms);
    }
    auto n = static_cast<double>(reports.size());
    mean.energy_kwh /= n;
    mean.sla_violation_pct /= n;
    mean.migrations /= n;
    mean.exec_time_s /= n;
    mean.active_pms /= n;
    return mean;
}

namespace {

constexpr const char* kBarPalette[] = {"#4878cf", "#ee854a", "#6acc64", "#d65f5f", "#956cb4"};

void write_bar_chart(const ComparisonTable& table, const std::string& metric_name,
                     double (*get)(const MeanMetrics&), const std::filesystem::path& path) {
    const int width = 460;
    const int height = 320;
    const int left = 70;
    const int top = 40;
    const int plot_w = width - left - 20;
    const int plot_h = height - top - 70;

    double max_v = 0.0;
    for (const auto& row : table.rows) max_v = std::max(max_v, get(row.metrics));

    SvgDoc svg;
    svg.open(width, height);
    svg.text(width / 2, 22, metric_name, "middle", 14);
    for (int tick = 0; tick <= 4; ++tick) {
        double v = max_v * tick / 4.0;
        int y = top + plot_h - (max_v > 0 ? static_cast<int>(std::lround(plot_h * v / max_v)) : 0);
        if (tick > 0) svg.line(left, y, left + plot_w, y, "#dddddd");
        svg.text(left - 6, y + 4, compact4(v), "end", 10);
    }
    auto n = static_cast<int>(table.rows.size());
    int slot = n > 0 ? plot_w / n : plot_w;
    for (int i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        double v = get(row.metrics);
        int bar_h = max_v > 0 ? static_cast<int>(std::lround(plot_h * v / max_v)) : 0;
        int x = left + i * slot + slot / 5;
        int bar_w = slot * 3 / 5;
        int y = top + plot_h - bar_h;
        svg.rect(x, y, bar_w, bar_h, kBarPalette[i % 5]);
        svg.text(x + bar_w / 2, y - 5, compact4(v), "middle", 10);
        svg.text(x + bar_w / 2, top + plot_h + 18, row.strategy, "middle", 12);
    }
    svg.line(left, top, left, top + plot_h, "black");
    svg.line(left, top + plot_h, left + plot_w, top + plot_h, "black");
    svg.close();
    svg.save(path);
}

} // namespace

std::vector<std::filesystem::path> comparison_report(const ComparisonTable& table,
                                                     const std::filesystem::path& out_dir) {
    if (table.rows.empty()) throw std::invalid_argument("comparison_report: no rows");
    for (const auto& row : table.rows) {
        if (row.runs_averaged < 1) {
            throw std::invalid_argument("comparison_report: runs_averaged must be >= 1");
        }
    }
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;

    auto csv_path = out_dir / "comparison.csv";
    {
        std::ofstream out(csv_path, std::ios::binary);
        if (!out) throw DataError("cannot open " + csv_path.string() + " for writing");
        out << metrics_csv_header() << '\n';
        for (const auto& row : table.rows) {
            out << csv_escape(row.strategy) << ',' << format_number(row.metrics.energy_kwh)
                << ',' << format_number(row.metrics.sla_violation_pct) << ','
                << format_number(row.metrics.migrations) << ','
                << format_number(row.metrics.exec_time_s) << ','
                << format_number(row.metrics.active_pms) << '\n';
        }
    }
    written.push_back(csv_path);

    struct Chart {
        const char* name;
        double (*get)(const MeanMetrics&);
    };
    const Chart charts[] = {
        {"energy_kwh", [](const MeanMetrics& m) { return m.energy_kwh; }},
        {"sla_pct", [](const MeanMetrics& m) { return m.sla_violation_pct; }},
        {"migrations", [](const MeanMetrics& m) { return m.migrations; }},
        {"exec_time_s", [](const MeanMetrics& m) { return m.exec_time_s; }},
        {"active_pms", [](const MeanMetrics& m) { return m.active_pms; }},
    };
    for (const auto& chart : charts) {
        auto path = out_dir / (std::string("chart_") + chart.name + ".svg");
        write_bar_chart(table, chart.name, chart.get, path);
        written.push_back(path);
    }
    return written;
}

FeatureMatrix vm_target_matrix(const Instance& instance, const Placement& placement,
                               const Placement& baseline) {
    validate_placement(placement, instance);
    validate_placement(baseline, instance);

    std::vector<double> cpu_load(instance.pm_count(), 0.0);
    std::vector<double> work(instance.pm_count(), 0.0);
    std::vector<int> count(instance.pm_count(), 0);
    for (std::size_t v = 0; v < instance.vm_count(); ++v) {
        auto p = static_cast<std::size_t>(placement.assignment[v]);
        cpu_load[p] += instance.vms[v].cpu_demand;
        work[p] += instance.vms[v].duration * instance.vms[v].cpu_demand;
        count[p] += 1;
    }

    FeatureMatrix matrix;
    matrix.names = {"sla_pct", "migrations", "exec_time_s", "energy_kwh"};
    matrix.columns.assign(4, {});
    matrix.row_count = instance.vm_count();
    for (auto& col : matrix.columns) col.reserve(instance.vm_count());

    for (std::size_t v = 0; v < instance.vm_count(); ++v) {
        auto p = static_cast<std::size_t>(placement.assignment[v]);
        const auto& pm = instance.pms[p];
        double util = cpu_load[p] / pm.cpu_capacity;
        double host_energy = power_watts(pm, util, true) * instance.horizon / 3.6e6;
        double share = cpu_load[p] > 0 ? instance.vms[v].cpu_demand / cpu_load[p]
                                       : 1.0 / count[p];
        matrix.columns[0].push_back(util > instance.sla_threshold ? 100.0 : 0.0);
        matrix.columns[1].push_back(
            placement.assignment[v] != baseline.assignment[v] ? 1.0 : 0.0);
        matrix.columns[2].push_back(work[p] / pm.cpu_capacity);
        matrix.columns[3].push_back(host_energy * share);
    }
    matrix.validate();
    return matrix;
}

} // namespace placelab
