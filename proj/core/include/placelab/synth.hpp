#pragma once

#include "placelab/datacenter.hpp"
#include "placelab/trace.hpp"

#include <cstdint>
#include <vector>

namespace placelab {

/// Mixed fleet: the low-index 60% are small standard hosts (8 cores, 32 GiB,
/// 120/300 W), the rest large high-density hosts (16 cores, 64 GiB,
/// 60/200 W). Index-ordered heuristics fill the inefficient standard hosts
/// first, which is exactly the consolidation headroom an optimizer can exploit.
std::vector<PmSpec> make_fleet(int pm_count);

/// VM list derived from cleaned trace records: requested_cpus -> cpu_demand,
/// requested_memory -> mem_demand, duration -> duration.
std::vector<VmSpec> vms_from_records(const std::vector<RawTraceRecord>& records);

Instance instance_from_records(const std::vector<RawTraceRecord>& records,
                               std::vector<PmSpec> fleet, double horizon = 3600.0,
                               double sla_threshold = 0.8);

/// The reproducible desk-scale instance: synthetic workload of `vm_count`
/// jobs on a make_fleet(pm_count) fleet, fully determined by the seed.
Instance make_synthetic_instance(int vm_count, int pm_count, std::uint64_t seed);

} // namespace placelab
