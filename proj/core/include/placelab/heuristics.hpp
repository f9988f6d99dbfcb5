#pragma once

#include "placelab/datacenter.hpp"

namespace placelab {

/// First-Fit Decreasing: VMs sorted by cpu_demand descending (ties: mem_demand
/// descending, then id ascending), each placed on the lowest-indexed PM with
/// room in both dimensions. Throws InfeasibleError when a VM fits nowhere.
Placement ffd_place(const Instance& instance);

/// Best-Fit Decreasing: same order, but each VM goes to the feasible PM with
/// the least cpu capacity left after placement (ties: least remaining memory,
/// then lowest index).
Placement bfd_place(const Instance& instance);

} // namespace placelab
