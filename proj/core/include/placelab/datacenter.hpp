#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace placelab {

struct VmSpec {
    int id = 0;
    double cpu_demand = 0.0;  // cores
    double mem_demand = 0.0;  // GiB
    double duration = 0.0;    // seconds of work at full demand

    void validate() const; // throws DataError
};

struct PmSpec {
    int id = 0;
    double cpu_capacity = 0.0; // cores
    double mem_capacity = 0.0; // GiB
    double p_idle = 70.0;      // watts when active but unloaded
    double p_max = 250.0;      // watts at full cpu utilization

    void validate() const;
};

struct Instance {
    std::vector<VmSpec> vms;
    std::vector<PmSpec> pms;
    double horizon = 3600.0;    // seconds billed for energy
    double sla_threshold = 0.8; // cpu utilization above this risks violations

    std::size_t vm_count() const { return vms.size(); }
    std::size_t pm_count() const { return pms.size(); }
    void validate() const;
};

/// assignment[v] = index into Instance::pms for VM v.
struct Placement {
    std::vector<std::int32_t> assignment;

    std::size_t size() const { return assignment.size(); }
    bool operator==(const Placement&) const = default;
};

struct MetricsReport {
    double energy_kwh = 0.0;
    double sla_violation_pct = 0.0;
    std::int64_t migrations = 0;
    double exec_time_s = 0.0;
    int active_pms = 0;
};

struct Utilization {
    double cpu = 0.0;
    double mem = 0.0;
};

/// Throws std::invalid_argument when the placement does not fit the instance
/// (wrong length or PM index out of range).
void validate_placement(const Placement& placement, const Instance& instance);

/// Aggregate demand on one PM divided by its capacity. May exceed 1.
Utilization pm_utilization(const Placement& placement, const Instance& instance,
                           std::size_t pm_index);

/// Linear power model; hosts_any_vm == false means the PM is powered off (0 W).
double power_watts(const PmSpec& pm, double cpu_util, bool hosts_any_vm);

/// Sum of PM power draws over the horizon, in kWh.
double energy_kwh(const Placement& placement, const Instance& instance);

/// Percentage of active PMs whose cpu utilization exceeds the SLA threshold.
/// No active PMs means no violations (0).
double sla_violation_pct(const Placement& placement, const Instance& instance);

/// Number of VMs whose assignment differs between two placements.
std::int64_t migration_count(const Placement& previous, const Placement& next);

/// Number of distinct PMs hosting at least one VM.
int active_pm_count(const Placement& placement, const Instance& instance);

/// Sum over PMs and dimensions of max(0, utilization - 1). Zero iff feasible.
double capacity_overflow(const Placement& placement, const Instance& instance);

/// Makespan proxy: the busiest PM's total work (duration * cpu_demand summed
/// over its VMs) divided by its cpu capacity.
double estimate_exec_time(const Placement& placement, const Instance& instance);

/// All metrics in one go. previous == nullptr reports 0 migrations.
MetricsReport evaluate(const Placement& placement, const Instance& instance,
                       const Placement* previous = nullptr);

Instance load_instance_json(std::istream& in);
Instance load_instance_json(const std::filesystem::path& path);
void save_instance_json(const Instance& instance, std::ostream& out);
void save_instance_json(const Instance& instance, const std::filesystem::path& path);

std::string metrics_csv_header();
std::string metrics_csv_row(std::string_view strategy, const MetricsReport& metrics);

} // namespace placelab
