#include "placelab/synth.hpp"

#include "placelab/errors.hpp"

#include <utility>

namespace placelab {

std::vector<PmSpec> make_fleet(int pm_count) {
    if (pm_count < 1) throw DataError("fleet needs at least one PM");
    int high_density = pm_count * 2 / 5;
    int standard = pm_count - high_density;
    std::vector<PmSpec> fleet;
    fleet.reserve(static_cast<std::size_t>(pm_count));
    for (int i = 0; i < pm_count; ++i) {
        PmSpec pm;
        pm.id = i;
        if (i < standard) {
            pm.cpu_capacity = 8.0;
            pm.mem_capacity = 32.0;
            pm.p_idle = 120.0;
            pm.p_max = 300.0;
        } else {
            pm.cpu_capacity = 16.0;
            pm.mem_capacity = 64.0;
            pm.p_idle = 60.0;
            pm.p_max = 200.0;
        }
        fleet.push_back(pm);
    }
    return fleet;
}

std::vector<VmSpec> vms_from_records(const std::vector<RawTraceRecord>& records) {
    auto numeric = [](const RawTraceRecord& rec, const char* name) {
        auto it = rec.fields.find(name);
        if (it == rec.fields.end() || !is_number(it->second)) {
            throw DataError("record '" + rec.job_id + "': missing numeric column '" + name +
                            "' (records must be cleaned first)");
        }
        return as_number(it->second);
    };
    std::vector<VmSpec> vms;
    vms.reserve(records.size());
    int id = 0;
    for (const auto& rec : records) {
        VmSpec vm;
        vm.id = id++;
        vm.cpu_demand = numeric(rec, "requested_cpus");
        vm.mem_demand = numeric(rec, "requested_memory");
        vm.duration = numeric(rec, "duration");
        vms.push_back(vm);
    }
    return vms;
}

Instance instance_from_records(const std::vector<RawTraceRecord>& records,
                               std::vector<PmSpec> fleet, double horizon,
                               double sla_threshold) {
    Instance inst;
    inst.vms = vms_from_records(records);
    inst.pms = std::move(fleet);
    inst.horizon = horizon;
    inst.sla_threshold = sla_threshold;
    inst.validate();
    return inst;
}

Instance make_synthetic_instance(int vm_count, int pm_count, std::uint64_t seed) {
    SynthSpec spec;
    spec.vm_count = vm_count;
    auto records = synth_workload(spec, seed);
    return instance_from_records(clean_records(std::move(records)), make_fleet(pm_count));
}

} // namespace placelab
