#include "placelab/heuristics.hpp"

#include "placelab/errors.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace placelab {

namespace {

// Per-PM member lists let the fit check re-sum demands in VM index order,
// exactly as the metric ops do. A candidate set passes only when that sum
// stays within capacity, so finished placements never show capacity overflow
// due to summation-order rounding.
struct Bins {
    const Instance& instance;
    std::vector<std::vector<std::size_t>> members; // VM indices, ascending
    std::vector<double> cpu_load; // running totals, selection heuristics only
    std::vector<double> mem_load;

    explicit Bins(const Instance& inst)
        : instance(inst),
          members(inst.pm_count()),
          cpu_load(inst.pm_count(), 0.0),
          mem_load(inst.pm_count(), 0.0) {}

    bool fits(std::size_t pm, std::size_t vm) const {
        const auto& spec = instance.pms[pm];
        double cpu = 0.0;
        double mem = 0.0;
        bool added = false;
        auto add = [&](std::size_t v) {
            cpu += instance.vms[v].cpu_demand;
            mem += instance.vms[v].mem_demand;
        };
        for (std::size_t v : members[pm]) {
            if (!added && vm < v) {
                add(vm);
                added = true;
            }
            add(v);
        }
        if (!added) add(vm);
        return cpu <= spec.cpu_capacity && mem <= spec.mem_capacity;
    }

    void place(std::size_t pm, std::size_t vm) {
        auto& list = members[pm];
        list.insert(std::upper_bound(list.begin(), list.end(), vm), vm);
        cpu_load[pm] += instance.vms[vm].cpu_demand;
        mem_load[pm] += instance.vms[vm].mem_demand;
    }
};

std::vector<std::size_t> decreasing_order(const Instance& instance) {
    std::vector<std::size_t> order(instance.vm_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& va = instance.vms[a];
        const auto& vb = instance.vms[b];
        if (va.cpu_demand != vb.cpu_demand) return va.cpu_demand > vb.cpu_demand;
        if (va.mem_demand != vb.mem_demand) return va.mem_demand > vb.mem_demand;
        if (va.id != vb.id) return va.id < vb.id;
        return a < b;
    });
    return order;
}

template <typename PickPm>
Placement place_decreasing(const Instance& instance, PickPm&& pick) {
    instance.validate();
    Bins bins(instance);
    Placement placement;
    placement.assignment.assign(instance.vm_count(), -1);
    for (std::size_t vm : decreasing_order(instance)) {
        std::size_t target = pick(bins, vm);
        if (target >= instance.pm_count()) {
            throw InfeasibleError("vm " + std::to_string(instance.vms[vm].id) +
                                      " does not fit on any PM",
                                  instance.vms[vm].id);
        }
        bins.place(target, vm);
        placement.assignment[vm] = static_cast<std::int32_t>(target);
    }
    return placement;
}

} // namespace

Placement ffd_place(const Instance& instance) {
    return place_decreasing(instance, [&](const Bins& bins, std::size_t vm) {
        for (std::size_t pm = 0; pm < instance.pm_count(); ++pm) {
            if (bins.fits(pm, vm)) return pm;
        }
        return instance.pm_count();
    });
}

Placement bfd_place(const Instance& instance) {
    return place_decreasing(instance, [&](const Bins& bins, std::size_t vm) {
        std::size_t best = instance.pm_count();
        double best_cpu_left = std::numeric_limits<double>::infinity();
        double best_mem_left = std::numeric_limits<double>::infinity();
        for (std::size_t pm = 0; pm < instance.pm_count(); ++pm) {
            if (!bins.fits(pm, vm)) continue;
            const auto& spec = instance.pms[pm];
            double cpu_left =
                spec.cpu_capacity - (bins.cpu_load[pm] + instance.vms[vm].cpu_demand);
            double mem_left =
                spec.mem_capacity - (bins.mem_load[pm] + instance.vms[vm].mem_demand);
            if (cpu_left < best_cpu_left ||
                (cpu_left == best_cpu_left && mem_left < best_mem_left)) {
                best = pm;
                best_cpu_left = cpu_left;
                best_mem_left = mem_left;
            }
        }
        return best;
    });
}

} // namespace placelab
