#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbftpool/metrics.hpp"
#include "pbftpool/params.hpp"
#include "pbftpool/rng.hpp"

namespace pbftpool::moea {

// Decision vector (mu_r, beta_h, beta_w).
using Genes = std::array<double, 3>;
// Objective pair (total maintenance cost, response time), both minimized.
using Objectives = std::array<double, 2>;

struct GeneBounds {
    Genes low{1.0, 0.1, 3.0};
    Genes high{10.0, 30.0, 15.0};

    Genes clamp(Genes g) const;
};

struct Individual {
    Genes genes{};
    Objectives objectives{std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
    double scalarized = std::numeric_limits<double>::infinity();
    int rank = -1;
    double crowding = 0.0;
};

struct RunConfig {
    int population = 50;
    int generations = 200;
    double eta_c = 20.0;          // SBX distribution index
    double eta_m = 20.0;          // polynomial-mutation distribution index
    double p_crossover = 0.9;
    double p_mutation = 1.0 / 3;  // per gene; one expected mutated gene
    std::uint64_t seed = 1;
    Objectives hv_reference{1.1, 1.1};  // on run-normalized objectives
};

struct EvalOutcome {
    Objectives objectives{std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity()};
    double scalarized = std::numeric_limits<double>::infinity();
    bool ok = false;
    std::string diagnostic;
};

using GeneEvaluator = std::function<EvalOutcome(const Genes&)>;

// --- operators ---------------------------------------------------------

// Child forms for a fixed spread factor per gene:
//   child1 = 0.5*((1+psi)*a + (1-psi)*b), child2 = 0.5*((1-psi)*a + (1+psi)*b).
std::pair<Genes, Genes> sbx_children(const Genes& a, const Genes& b,
                                     const std::array<double, 3>& psi);

// Samples the spread factor per gene from the standard SBX distribution
// with index eta_c, then clamps the children to bounds.
std::pair<Genes, Genes> sbx_crossover(const Genes& a, const Genes& b, double eta_c, Rng& rng,
                                      const GeneBounds& bounds);

// Bounded polynomial mutation; each gene mutates independently with
// probability p_m.
Genes polynomial_mutation(const Genes& x, double eta_m, double p_m, const GeneBounds& bounds,
                          Rng& rng);

// Front 0 is the non-dominated set; front k is non-dominated once fronts
// < k are removed. Minimization dominance.
std::vector<std::vector<int>> fast_nondominated_sort(std::span<const Objectives> objectives);

// Boundary points per objective get +inf; interior points accumulate
// (neighbor gap) / (objective range) per objective. Zero range contributes 0.
std::vector<double> crowding_distance(std::span<const Objectives> front);

// Binary tournament between positions a and b: lower rank wins, ties go to
// larger crowding, remaining ties to the first-drawn contestant.
int tournament_select(std::span<const Individual> population, int a, int b);

// --- indicators --------------------------------------------------------

// Exact 2-D hypervolume against `reference`; points that do not strictly
// dominate the reference are excluded. Empty front yields 0.
double hypervolume_2d(std::span<const Objectives> front, const Objectives& reference);

// Population standard deviation of nearest-neighbor Manhattan distances;
// fronts of size < 2 yield 0.
double spacing(std::span<const Objectives> front);

// --- runs --------------------------------------------------------------

struct GenerationStats {
    int generation = 0;
    double hv = 0.0;        // front-0 hypervolume on run-normalized objectives
    double spacing = 0.0;   // front-0 spacing on the same normalization
    double best_scalarized = std::numeric_limits<double>::infinity();
};

struct RunResult {
    std::vector<Individual> front;       // final non-dominated set, sorted by cost
    Individual chosen;                   // front member with minimal scalarized fitness
    GenerationStats generation_zero;     // indicators of the initial population
    std::vector<GenerationStats> history;  // one entry per generation
    std::int64_t evaluator_calls = 0;
};

using GenerationObserver =
    std::function<void(int generation, const std::vector<Individual>& population)>;

// Classic NSGA-II loop: uniform init, binary tournaments, SBX + PM,
// merge-and-truncate elitism. Deterministic for a fixed config: every
// mating pair draws from its own seed-derived stream, so results do not
// depend on evaluation scheduling.
RunResult nsga2_run(const GeneEvaluator& evaluate, const GeneBounds& bounds,
                    const RunConfig& config, const GenerationObserver& observer = nullptr);

struct RandomSearchResult {
    Individual best;
    std::int64_t evaluator_calls = 0;
};

// Uniform sampling baseline at the same evaluation budget
// (population * generations by default); minimizes the scalarized fitness.
RandomSearchResult random_search(const GeneEvaluator& evaluate, const GeneBounds& bounds,
                                 std::int64_t budget, std::uint64_t seed);

// Substitutes genes into `base` and runs the analytical pipeline; outcomes
// are memoized on genes quantized to 6 decimals since one evaluation is a
// full stationary solve. Failures become +inf objectives with a diagnostic.
GeneEvaluator make_model_evaluator(const SystemParams& base, const CostParams& costs,
                                   const ObjectiveWeights& weights,
                                   const SolveOptions& solve = {});

}  // namespace pbftpool::moea
