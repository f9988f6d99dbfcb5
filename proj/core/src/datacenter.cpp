#include "placelab/datacenter.hpp"

#include "placelab/csv.hpp"
#include "placelab/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace placelab {

namespace {

constexpr double kJoulesPerKwh = 3.6e6;

struct PmLoads {
    std::vector<double> cpu;
    std::vector<double> mem;
    std::vector<double> work; // duration * cpu_demand
    std::vector<int> count;
};

// Sums in VM index order so repeated evaluations of the same placement are
// bit-identical.
PmLoads compute_loads(const Placement& placement, const Instance& instance) {
    validate_placement(placement, instance);
    PmLoads loads;
    loads.cpu.assign(instance.pm_count(), 0.0);
    loads.mem.assign(instance.pm_count(), 0.0);
    loads.work.assign(instance.pm_count(), 0.0);
    loads.count.assign(instance.pm_count(), 0);
    for (std::size_t v = 0; v < instance.vm_count(); ++v) {
        const auto& vm = instance.vms[v];
        auto p = static_cast<std::size_t>(placement.assignment[v]);
        loads.cpu[p] += vm.cpu_demand;
        loads.mem[p] += vm.mem_demand;
        loads.work[p] += vm.duration * vm.cpu_demand;
        loads.count[p] += 1;
    }
    return loads;
}

} // namespace

void VmSpec::validate() const {
    if (!(cpu_demand >= 0.0) || !(mem_demand >= 0.0)) {
        throw DataError("vm " + std::to_string(id) + ": demands must be non-negative");
    }
    if (!(duration > 0.0)) {
        throw DataError("vm " + std::to_string(id) + ": duration must be positive");
    }
}

void PmSpec::validate() const {
    if (!(cpu_capacity > 0.0) || !(mem_capacity > 0.0)) {
        throw DataError("pm " + std::to_string(id) + ": capacities must be positive");
    }
    if (!(p_idle >= 0.0) || !(p_max >= p_idle)) {
        throw DataError("pm " + std::to_string(id) + ": need 0 <= p_idle <= p_max");
    }
}

void Instance::validate() const {
    if (vms.empty()) throw DataError("instance has no VMs");
    if (pms.empty()) throw DataError("instance has no PMs");
    for (const auto& vm : vms) vm.validate();
    for (const auto& pm : pms) pm.validate();
    if (!(horizon > 0.0)) throw DataError("instance horizon must be positive");
    if (!(sla_threshold > 0.0 && sla_threshold <= 1.0)) {
        throw DataError("instance sla_threshold must be in (0, 1]");
    }
}

void validate_placement(const Placement& placement, const Instance& instance) {
    if (placement.size() != instance.vm_count()) {
        throw std::invalid_argument("placement covers " + std::to_string(placement.size()) +
                                    " VMs, instance has " + std::to_string(instance.vm_count()));
    }
    for (std::size_t v = 0; v < placement.size(); ++v) {
        auto p = placement.assignment[v];
        if (p < 0 || static_cast<std::size_t>(p) >= instance.pm_count()) {
            throw std::invalid_argument("placement assigns vm " + std::to_string(v) +
                                        " to nonexistent pm " + std::to_string(p));
        }
    }
}

Utilization pm_utilization(const Placement& placement, const Instance& instance,
                           std::size_t pm_index) {
    if (pm_index >= instance.pm_count()) {
        throw std::out_of_range("pm index " + std::to_string(pm_index) + " out of range");
    }
    auto loads = compute_loads(placement, instance);
    const auto& pm = instance.pms[pm_index];
    return {loads.cpu[pm_index] / pm.cpu_capacity, loads.mem[pm_index] / pm.mem_capacity};
}

double power_watts(const PmSpec& pm, double cpu_util, bool hosts_any_vm) {
    if (!hosts_any_vm) return 0.0;
    double u = std::clamp(cpu_util, 0.0, 1.0);
    return pm.p_idle + (pm.p_max - pm.p_idle) * u;
}

double energy_kwh(const Placement& placement, const Instance& instance) {
    auto loads = compute_loads(placement, instance);
    double joules = 0.0;
    for (std::size_t p = 0; p < instance.pm_count(); ++p) {
        const auto& pm = instance.pms[p];
        double watts = power_watts(pm, loads.cpu[p] / pm.cpu_capacity, loads.count[p] > 0);
        joules += watts * instance.horizon;
    }
    return joules / kJoulesPerKwh;
}

double sla_violation_pct(const Placement& placement, const Instance& instance) {
    auto loads = compute_loads(placement, instance);
    int active = 0;
    int violating = 0;
    for (std::size_t p = 0; p < instance.pm_count(); ++p) {
        if (loads.count[p] == 0) continue;
        ++active;
        if (loads.cpu[p] / instance.pms[p].cpu_capacity > instance.sla_threshold) ++violating;
    }
    if (active == 0) return 0.0;
    return 100.0 * violating / active;
}

std::int64_t migration_count(const Placement& previous, const Placement& next) {
    if (previous.size() != next.size()) {
        throw std::invalid_argument("placements cover different VM counts");
    }
    std::int64_t moved = 0;
    for (std::size_t v = 0; v < next.size(); ++v) {
        if (previous.assignment[v] != next.assignment[v]) ++moved;
    }
    return moved;
}

int active_pm_count(const Placement& placement, const Instance& instance) {
    auto loads = compute_loads(placement, instance);
    int active = 0;
    for (int c : loads.count) {
        if (c > 0) ++active;
    }
    return active;
}

double capacity_overflow(const Placement& placement, const Instance& instance) {
    auto loads = compute_loads(placement, instance);
    double overflow = 0.0;
    for (std::size_t p = 0; p < instance.pm_count(); ++p) {
        const auto& pm = instance.pms[p];
        overflow += std::max(0.0, loads.cpu[p] / pm.cpu_capacity - 1.0);
        overflow += std::max(0.0, loads.mem[p] / pm.mem_capacity - 1.0);
    }
    return overflow;
}

double estimate_exec_time(const Placement& placement, const Instance& instance) {
    auto loads = compute_loads(placement, instance);
    double worst = 0.0;
    for (std::size_t p = 0; p < instance.pm_count(); ++p) {
        if (loads.count[p] == 0) continue;
        worst = std::max(worst, loads.work[p] / instance.pms[p].cpu_capacity);
    }
    return worst;
}

MetricsReport evaluate(const Placement& placement, const Instance& instance,
                       const Placement* previous) {
    MetricsReport report;
    report.energy_kwh = energy_kwh(placement, instance);
    report.sla_violation_pct = sla_violation_pct(placement, instance);
    report.migrations = previous ? migration_count(*previous, placement) : 0;
    report.exec_time_s = estimate_exec_time(placement, instance);
    report.active_pms = active_pm_count(placement, instance);
    return report;
}

namespace {

using nlohmann::json;

double require_number(const json& obj, const char* key, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) {
        throw DataError(ctx + ": missing numeric field '" + key + "'");
    }
    return it->get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& ctx) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_number()) {
        throw DataError(ctx + ": field '" + key + "' must be numeric");
    }
    return it->get<double>();
}

Instance instance_from_json(const json& doc) {
    if (!doc.is_object()) throw DataError("instance json: top level must be an object");
    auto vms_it = doc.find("vms");
    auto pms_it = doc.find("pms");
    if (vms_it == doc.end() || !vms_it->is_array()) {
        throw DataError("instance json: missing 'vms' array");
    }
    if (pms_it == doc.end() || !pms_it->is_array()) {
        throw DataError("instance json: missing 'pms' array");
    }
    Instance inst;
    inst.vms.reserve(vms_it->size());
    int idx = 0;
    for (const auto& v : *vms_it) {
        std::string ctx = "vm[" + std::to_string(idx) + "]";
        if (!v.is_object()) throw DataError(ctx + ": must be an object");
        VmSpec vm;
        vm.id = static_cast<int>(number_or(v, "id", idx, ctx));
        vm.cpu_demand = require_number(v, "cpu_demand", ctx);
        vm.mem_demand = require_number(v, "mem_demand", ctx);
        vm.duration = require_number(v, "duration", ctx);
        inst.vms.push_back(vm);
        ++idx;
    }
    inst.pms.reserve(pms_it->size());
    idx = 0;
    for (const auto& p : *pms_it) {
        std::string ctx = "pm[" + std::to_string(idx) + "]";
        if (!p.is_object()) throw DataError(ctx + ": must be an object");
        PmSpec pm;
        pm.id = static_cast<int>(number_or(p, "id", idx, ctx));
        pm.cpu_capacity = require_number(p, "cpu_capacity", ctx);
        pm.mem_capacity = require_number(p, "mem_capacity", ctx);
        pm.p_idle = number_or(p, "p_idle", pm.p_idle, ctx);
        pm.p_max = number_or(p, "p_max", pm.p_max, ctx);
        inst.pms.push_back(pm);
        ++idx;
    }
    inst.horizon = number_or(doc, "horizon", inst.horizon, "instance");
    inst.sla_threshold = number_or(doc, "sla_threshold", inst.sla_threshold, "instance");
    inst.validate();
    return inst;
}

json instance_to_json(const Instance& inst) {
    json vms = json::array();
    for (const auto& vm : inst.vms) {
        vms.push_back({{"id", vm.id},
                       {"cpu_demand", vm.cpu_demand},
                       {"mem_demand", vm.mem_demand},
                       {"duration", vm.duration}});
    }
    json pms = json::array();
    for (const auto& pm : inst.pms) {
        pms.push_back({{"id", pm.id},
                       {"cpu_capacity", pm.cpu_capacity},
                       {"mem_capacity", pm.mem_capacity},
                       {"p_idle", pm.p_idle},
                       {"p_max", pm.p_max}});
    }
    return json{{"vms", std::move(vms)},
                {"pms", std::move(pms)},
                {"horizon", inst.horizon},
                {"sla_threshold", inst.sla_threshold}};
}

} // namespace

Instance load_instance_json(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("instance json: ") + e.what());
    }
    return instance_from_json(doc);
}

Instance load_instance_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return load_instance_json(in);
}

void save_instance_json(const Instance& instance, std::ostream& out) {
    out << instance_to_json(instance).dump(2) << '\n';
}

void save_instance_json(const Instance& instance, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    save_instance_json(instance, out);
}

std::string metrics_csv_header() {
    return "strategy,energy_kwh,sla_pct,migrations,exec_time_s,active_pms";
}

std::string metrics_csv_row(std::string_view strategy, const MetricsReport& m) {
    std::string row;
    row += csv_escape(strategy);
    row += ',';
    row += format_number(m.energy_kwh);
    row += ',';
    row += format_number(m.sla_violation_pct);
    row += ',';
    row += std::to_string(m.migrations);
    row += ',';
    row += format_number(m.exec_time_s);
    row += ',';
    row += std::to_string(m.active_pms);
    return row;
}

} // namespace placelab
