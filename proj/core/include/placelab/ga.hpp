#pragma once

#include "placelab/datacenter.hpp"
#include "placelab/rng.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace placelab {

struct FitnessWeights {
    double w_energy = 0.4;
    double w_sla = 0.3;
    double w_mig = 0.2;
    double w_time = 0.1;

    void validate() const; // all >= 0, sum > 0
};

struct GaConfig {
    int population_size = 100;
    int max_generations = 300;
    int stagnation_window = 20;
    double stagnation_epsilon = 1e-9;
    double crossover_rate = 0.9;
    std::optional<double> mutation_rate; // per gene; unset means 1/N
    int tournament_size = 3;
    int elitism_count = 2;
    double infeasibility_lambda = 10.0;
    FitnessWeights weights;
    std::uint64_t seed = 1;

    double effective_mutation_rate(std::size_t vm_count) const;
    void validate() const;
};

/// Fixed normalizers that bound energy and exec time for any placement of the
/// instance, so the weighted fitness terms stay in [0, 1] when feasible.
struct NormBounds {
    double e_max = 0.0; // kWh: all PMs at p_max for the whole horizon
    double t_max = 0.0; // s: all work serialized on the slowest PM

    static NormBounds for_instance(const Instance& instance);
};

struct GaResult {
    Placement best;
    double best_fitness = 0.0;
    std::vector<double> fitness_history; // best-so-far, entry 0 = initial population
    int generations_run = 0;
    MetricsReport metrics;
    double wall_time_s = 0.0;
};

/// population_size chromosomes with uniform genes over [0, M), each repaired.
std::vector<Placement> init_population(const Instance& instance, const GaConfig& config,
                                       Rng& rng);

/// Weighted sum, lower is better:
///   w1*E/e_max + w2*SLA/100 + w3*MIG/N + w4*T/t_max + lambda*capacity_overflow.
/// The migration term is 0 when previous is null.
double fitness(const Placement& placement, const Instance& instance,
               const Placement* previous, const FitnessWeights& weights,
               const NormBounds& bounds, double lambda);

/// k draws uniformly with replacement; index of the minimal fitness wins,
/// ties go to the earliest draw.
std::size_t tournament_select(std::span<const double> fitness_values, int k, Rng& rng);

/// Swap genes [i, j) between copies of a and b. Exposed for tests.
std::pair<Placement, Placement> crossover_at(const Placement& a, const Placement& b,
                                             std::size_t i, std::size_t j);

/// With probability crossover_rate draws cuts 0 <= i < j <= N (uniform over
/// pairs) and swaps the segment; otherwise returns copies of the parents.
std::pair<Placement, Placement> two_point_crossover(const Placement& a, const Placement& b,
                                                    double crossover_rate, Rng& rng);

/// Per-gene reassignment to one of the M-1 other PMs with the given
/// probability. M < 2 or rate <= 0 returns the input unchanged.
Placement mutate(const Placement& placement, double mutation_rate, std::size_t pm_count,
                 Rng& rng);

/// Greedy overload resolution: repeatedly move the largest-CPU VM off an
/// overloaded PM to the feasible PM with the lowest resulting cpu utilization
/// (ties: lowest index). PMs that cannot be fixed are left for the fitness
/// penalty. Fully deterministic.
Placement repair(Placement placement, const Instance& instance);

/// Full generational loop with elitism and stagnation-based early stop.
GaResult evolve(const Instance& instance, const GaConfig& config,
                const Placement* previous = nullptr);

} // namespace placelab
