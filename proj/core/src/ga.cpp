#include "placelab/ga.hpp"

#include "placelab/errors.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace placelab {

void FitnessWeights::validate() const {
    if (w_energy < 0 || w_sla < 0 || w_mig < 0 || w_time < 0) {
        throw DataError("fitness weights must be >= 0");
    }
    if (!(w_energy + w_sla + w_mig + w_time > 0)) {
        throw DataError("fitness weights must not all be zero");
    }
}

double GaConfig::effective_mutation_rate(std::size_t vm_count) const {
    if (mutation_rate) return *mutation_rate;
    return vm_count > 0 ? 1.0 / static_cast<double>(vm_count) : 0.0;
}

void GaConfig::validate() const {
    if (population_size < 2) throw DataError("population_size must be >= 2");
    if (max_generations < 0) throw DataError("max_generations must be >= 0");
    if (stagnation_window < 1) throw DataError("stagnation_window must be >= 1");
    if (!(stagnation_epsilon >= 0)) throw DataError("stagnation_epsilon must be >= 0");
    if (crossover_rate < 0 || crossover_rate > 1) {
        throw DataError("crossover_rate must be in [0, 1]");
    }
    if (mutation_rate && (*mutation_rate < 0 || *mutation_rate > 1)) {
        throw DataError("mutation_rate must be in [0, 1]");
    }
    if (tournament_size < 1 || tournament_size > population_size) {
        throw DataError("tournament_size must be in [1, population_size]");
    }
    if (elitism_count < 0 || elitism_count >= population_size) {
        throw DataError("elitism_count must be in [0, population_size)");
    }
    if (!(infeasibility_lambda >= 0)) throw DataError("infeasibility_lambda must be >= 0");
    weights.validate();
}

NormBounds NormBounds::for_instance(const Instance& instance) {
    NormBounds bounds;
    double watts = 0.0;
    for (const auto& pm : instance.pms) watts += pm.p_max;
    bounds.e_max = watts * instance.horizon / 3.6e6;
    double work = 0.0;
    for (const auto& vm : instance.vms) work += vm.duration * vm.cpu_demand;
    double min_cap = std::numeric_limits<double>::infinity();
    for (const auto& pm : instance.pms) min_cap = std::min(min_cap, pm.cpu_capacity);
    bounds.t_max = work / min_cap;
    // Degenerate instances (all-zero power or all-zero demand) would divide
    // by zero in the fitness; floor the bounds at a harmless positive value.
    bounds.e_max = std::max(bounds.e_max, 1e-12);
    bounds.t_max = std::max(bounds.t_max, 1e-12);
    return bounds;
}

std::vector<Placement> init_population(const Instance& instance, const GaConfig& config,
                                       Rng& rng) {
    instance.validate();
    config.validate();
    std::vector<Placement> population;
    population.reserve(static_cast<std::size_t>(config.population_size));
    for (int i = 0; i < config.population_size; ++i) {
        Placement p;
        p.assignment.resize(instance.vm_count());
        for (auto& gene : p.assignment) {
            gene = static_cast<std::int32_t>(rng.next_index(instance.pm_count()));
        }
        population.push_back(repair(std::move(p), instance));
    }
    return population;
}

double fitness(const Placement& placement, const Instance& instance,
               const Placement* previous, const FitnessWeights& weights,
               const NormBounds& bounds, double lambda) {
    double e_term = energy_kwh(placement, instance) / bounds.e_max;
    double sla_term = sla_violation_pct(placement, instance) / 100.0;
    double mig_term = 0.0;
    if (previous) {
        mig_term = static_cast<double>(migration_count(*previous, placement)) /
                   static_cast<double>(instance.vm_count());
    }
    double t_term = estimate_exec_time(placement, instance) / bounds.t_max;
    double penalty = lambda * capacity_overflow(placement, instance);
    return weights.w_energy * e_term + weights.w_sla * sla_term + weights.w_mig * mig_term +
           weights.w_time * t_term + penalty;
}

std::size_t tournament_select(std::span<const double> fitness_values, int k, Rng& rng) {
    if (fitness_values.empty()) throw std::invalid_argument("empty tournament pool");
    if (k < 1 || static_cast<std::size_t>(k) > fitness_values.size()) {
        throw std::invalid_argument("tournament size out of range");
    }
    std::size_t winner = rng.next_index(fitness_values.size());
    for (int draw = 1; draw < k; ++draw) {
        std::size_t challenger = rng.next_index(fitness_values.size());
        if (fitness_values[challenger] < fitness_values[winner]) winner = challenger;
    }
    return winner;
}

std::pair<Placement, Placement> crossover_at(const Placement& a, const Placement& b,
                                             std::size_t i, std::size_t j) {
    if (a.size() != b.size()) throw std::invalid_argument("parent length mismatch");
    if (i > j || j > a.size()) throw std::invalid_argument("bad cut points");
    Placement c1 = a;
    Placement c2 = b;
    for (std::size_t g = i; g < j; ++g) {
        std::swap(c1.assignment[g], c2.assignment[g]);
    }
    return {std::move(c1), std::move(c2)};
}

std::pair<Placement, Placement> two_point_crossover(const Placement& a, const Placement& b,
                                                    double crossover_rate, Rng& rng) {
    if (a.size() != b.size()) throw std::invalid_argument("parent length mismatch");
    if (a.size() == 0) return {a, b};
    if (!rng.next_bool(crossover_rate)) return {a, b};
    std::size_t n = a.size();
    std::size_t i = rng.next_index(n + 1);
    std::size_t j = rng.next_index(n + 1);
    while (i == j) {
        i = rng.next_index(n + 1);
        j = rng.next_index(n + 1);
    }
    if (i > j) std::swap(i, j);
    return crossover_at(a, b, i, j);
}

Placement mutate(const Placement& placement, double mutation_rate, std::size_t pm_count,
                 Rng& rng) {
    if (pm_count < 2 || mutation_rate <= 0.0) return placement;
    Placement out = placement;
    for (auto& gene : out.assignment) {
        if (!rng.next_bool(mutation_rate)) continue;
        auto drawn = static_cast<std::int32_t>(rng.next_index(pm_count - 1));
        gene = drawn >= gene ? drawn + 1 : drawn;
    }
    return out;
}

namespace {

// Membership lists per PM, kept sorted by VM index so load sums reproduce the
// metric ops bit-for-bit (same summation order).
struct RepairState {
    const Instance& instance;
    std::vector<std::vector<std::size_t>> members;
    std::vector<double> cpu_load;
    std::vector<double> mem_load;

    RepairState(const Placement& placement, const Instance& inst)
        : instance(inst),
          members(inst.pm_count()),
          cpu_load(inst.pm_count(), 0.0),
          mem_load(inst.pm_count(), 0.0) {
        for (std::size_t v = 0; v < placement.size(); ++v) {
            members[static_cast<std::size_t>(placement.assignment[v])].push_back(v);
        }
        for (std::size_t p = 0; p < inst.pm_count(); ++p) resum(p);
    }

    void resum(std::size_t pm) {
        double cpu = 0.0;
        double mem = 0.0;
        for (std::size_t v : members[pm]) {
            cpu += instance.vms[v].cpu_demand;
            mem += instance.vms[v].mem_demand;
        }
        cpu_load[pm] = cpu;
        mem_load[pm] = mem;
    }

    bool overloaded(std::size_t pm) const {
        return cpu_load[pm] > instance.pms[pm].cpu_capacity ||
               mem_load[pm] > instance.pms[pm].mem_capacity;
    }

    // Index-ordered sum of members plus the candidate, per dimension.
    std::pair<double, double> load_with(std::size_t pm, std::size_t vm) const {
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
        return {cpu, mem};
    }

    void move(std::size_t vm, std::size_t from, std::size_t to) {
        auto& src = members[from];
        src.erase(std::find(src.begin(), src.end(), vm));
        auto& dst = members[to];
        dst.insert(std::upper_bound(dst.begin(), dst.end(), vm), vm);
        resum(from);
        resum(to);
    }
};

} // namespace

Placement repair(Placement placement, const Instance& instance) {
    validate_placement(placement, instance);
    RepairState state(placement, instance);
    std::vector<bool> stuck(instance.pm_count(), false);
    // Each successful move parks a VM on a PM that stays within capacity, and
    // such PMs never shed VMs, so at most N moves happen.
    std::size_t budget = instance.vm_count() * instance.pm_count() + 1;
    while (budget-- > 0) {
        std::size_t src = instance.pm_count();
        for (std::size_t p = 0; p < instance.pm_count(); ++p) {
            if (!stuck[p] && state.overloaded(p)) {
                src = p;
                break;
            }
        }
        if (src == instance.pm_count()) break;

        std::size_t victim = state.members[src][0];
        for (std::size_t v : state.members[src]) {
            if (instance.vms[v].cpu_demand > instance.vms[victim].cpu_demand) victim = v;
        }

        std::size_t best = instance.pm_count();
        double best_util = std::numeric_limits<double>::infinity();
        for (std::size_t p = 0; p < instance.pm_count(); ++p) {
            if (p == src) continue;
            auto [cpu, mem] = state.load_with(p, victim);
            const auto& spec = instance.pms[p];
            if (cpu > spec.cpu_capacity || mem > spec.mem_capacity) continue;
            double util = cpu / spec.cpu_capacity;
            if (util < best_util) {
                best = p;
                best_util = util;
            }
        }
        if (best == instance.pm_count()) {
            stuck[src] = true; // nothing fits elsewhere; leave for the penalty
            continue;
        }
        state.move(victim, src, best);
        placement.assignment[victim] = static_cast<std::int32_t>(best);
    }
    return placement;
}

GaResult evolve(const Instance& instance, const GaConfig& config, const Placement* previous) {
    instance.validate();
    config.validate();
    if (previous) validate_placement(*previous, instance);

    auto t0 = std::chrono::steady_clock::now();
    Rng rng(config.seed);
    NormBounds bounds = NormBounds::for_instance(instance);
    double lambda = config.infeasibility_lambda;
    double mrate = config.effective_mutation_rate(instance.vm_count());
    auto pop_size = static_cast<std::size_t>(config.population_size);

    std::vector<Placement> population = init_population(instance, config, rng);
    std::vector<double> fit(pop_size);
    auto score_all = [&] {
        for (std::size_t i = 0; i < pop_size; ++i) {
            fit[i] = fitness(population[i], instance, previous, config.weights, bounds, lambda);
        }
    };
    score_all();

    GaResult result;
    auto best_it = std::min_element(fit.begin(), fit.end());
    result.best = population[static_cast<std::size_t>(best_it - fit.begin())];
    result.best_fitness = *best_it;
    result.fitness_history.push_back(result.best_fitness);

    std::vector<std::size_t> order(pop_size);
    int stagnant = 0;
    for (int gen = 1; gen <= config.max_generations; ++gen) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (fit[a] != fit[b]) return fit[a] < fit[b];
            return a < b;
        });

        std::vector<Placement> next;
        next.reserve(pop_size);
        for (int e = 0; e < config.elitism_count; ++e) {
            next.push_back(population[order[static_cast<std::size_t>(e)]]);
        }
        while (next.size() < pop_size) {
            std::size_t pa = tournament_select(fit, config.tournament_size, rng);
            std::size_t pb = tournament_select(fit, config.tournament_size, rng);
            auto [c1, c2] = two_point_crossover(population[pa], population[pb],
                                                config.crossover_rate, rng);
            next.push_back(repair(mutate(c1, mrate, instance.pm_count(), rng), instance));
            if (next.size() < pop_size) {
                next.push_back(repair(mutate(c2, mrate, instance.pm_count(), rng), instance));
            }
        }
        population = std::move(next);
        score_all();
        result.generations_run = gen;

        auto gen_best_it = std::min_element(fit.begin(), fit.end());
        double improvement = result.best_fitness - *gen_best_it;
        if (*gen_best_it < result.best_fitness) {
            result.best_fitness = *gen_best_it;
            result.best = population[static_cast<std::size_t>(gen_best_it - fit.begin())];
        }
        result.fitness_history.push_back(result.best_fitness);
        if (improvement < config.stagnation_epsilon) {
            ++stagnant;
        } else {
            stagnant = 0;
        }
        if (stagnant >= config.stagnation_window) break;
    }

    result.metrics = evaluate(result.best, instance, previous);
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

} // namespace placelab
