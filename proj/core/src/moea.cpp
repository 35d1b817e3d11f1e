#include "pbftpool/moea.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace pbftpool::moea {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool dominates(const Objectives& a, const Objectives& b) {
    return a[0] <= b[0] && a[1] <= b[1] && (a[0] < b[0] || a[1] < b[1]);
}

bool finite(const Objectives& o) { return std::isfinite(o[0]) && std::isfinite(o[1]); }

}  // namespace

Genes GeneBounds::clamp(Genes g) const {
    for (size_t i = 0; i < g.size(); ++i) g[i] = std::clamp(g[i], low[i], high[i]);
    return g;
}

std::pair<Genes, Genes> sbx_children(const Genes& a, const Genes& b,
                                     const std::array<double, 3>& psi) {
    Genes c1, c2;
    for (size_t i = 0; i < a.size(); ++i) {
        c1[i] = 0.5 * ((1.0 + psi[i]) * a[i] + (1.0 - psi[i]) * b[i]);
        c2[i] = 0.5 * ((1.0 - psi[i]) * a[i] + (1.0 + psi[i]) * b[i]);
    }
    return {c1, c2};
}

std::pair<Genes, Genes> sbx_crossover(const Genes& a, const Genes& b, double eta_c, Rng& rng,
                                      const GeneBounds& bounds) {
    std::array<double, 3> psi;
    for (double& p : psi) {
        const double u = rng.uniform();
        p = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta_c + 1.0))
                     : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta_c + 1.0));
    }
    auto [c1, c2] = sbx_children(a, b, psi);
    return {bounds.clamp(c1), bounds.clamp(c2)};
}

Genes polynomial_mutation(const Genes& x, double eta_m, double p_m, const GeneBounds& bounds,
                          Rng& rng) {
    Genes out = x;
    for (size_t i = 0; i < out.size(); ++i) {
        if (rng.uniform() >= p_m) continue;
        const double lo = bounds.low[i], hi = bounds.high[i];
        const double range = hi - lo;
        if (range <= 0) continue;
        const double u = rng.uniform();
        const double d1 = (out[i] - lo) / range;
        const double d2 = (hi - out[i]) / range;
        double dq;
        if (u <= 0.5) {
            const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta_m + 1.0);
            dq = std::pow(v, 1.0 / (eta_m + 1.0)) - 1.0;
        } else {
            const double v =
                2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta_m + 1.0);
            dq = 1.0 - std::pow(v, 1.0 / (eta_m + 1.0));
        }
        out[i] = std::clamp(out[i] + dq * range, lo, hi);
    }
    return out;
}

std::vector<std::vector<int>> fast_nondominated_sort(std::span<const Objectives> objectives) {
    const int n = static_cast<int>(objectives.size());
    std::vector<int> domination_count(static_cast<size_t>(n), 0);
    std::vector<std::vector<int>> dominated(static_cast<size_t>(n));

    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (dominates(objectives[i], objectives[j])) {
                dominated[static_cast<size_t>(i)].push_back(j);
                domination_count[static_cast<size_t>(j)]++;
            } else if (dominates(objectives[j], objectives[i])) {
                dominated[static_cast<size_t>(j)].push_back(i);
                domination_count[static_cast<size_t>(i)]++;
            }
        }
    }

    std::vector<std::vector<int>> fronts;
    std::vector<int> current;
    for (int i = 0; i < n; ++i)
        if (domination_count[static_cast<size_t>(i)] == 0) current.push_back(i);
    while (!current.empty()) {
        std::vector<int> next;
        for (int i : current)
            for (int j : dominated[static_cast<size_t>(i)])
                if (--domination_count[static_cast<size_t>(j)] == 0) next.push_back(j);
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<double> crowding_distance(std::span<const Objectives> front) {
    const int n = static_cast<int>(front.size());
    std::vector<double> distance(static_cast<size_t>(n), 0.0);
    if (n == 0) return distance;
    if (n <= 2) {
        std::fill(distance.begin(), distance.end(), kInf);
        return distance;
    }
    std::vector<int> order(static_cast<size_t>(n));
    for (int m = 0; m < 2; ++m) {
        for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
            return front[static_cast<size_t>(a)][static_cast<size_t>(m)] <
                   front[static_cast<size_t>(b)][static_cast<size_t>(m)];
        });
        const double lo = front[static_cast<size_t>(order.front())][static_cast<size_t>(m)];
        const double hi = front[static_cast<size_t>(order.back())][static_cast<size_t>(m)];
        distance[static_cast<size_t>(order.front())] = kInf;
        distance[static_cast<size_t>(order.back())] = kInf;
        const double range = hi - lo;
        if (range <= 0) continue;  // degenerate objective adds nothing
        for (int k = 1; k + 1 < n; ++k) {
            const int idx = order[static_cast<size_t>(k)];
            if (distance[static_cast<size_t>(idx)] == kInf) continue;
            const double gap =
                front[static_cast<size_t>(order[static_cast<size_t>(k + 1)])][static_cast<size_t>(m)] -
                front[static_cast<size_t>(order[static_cast<size_t>(k - 1)])][static_cast<size_t>(m)];
            distance[static_cast<size_t>(idx)] += gap / range;
        }
    }
    return distance;
}

int tournament_select(std::span<const Individual> population, int a, int b) {
    const Individual& ia = population[static_cast<size_t>(a)];
    const Individual& ib = population[static_cast<size_t>(b)];
    if (ia.rank != ib.rank) return ia.rank < ib.rank ? a : b;
    if (ia.crowding != ib.crowding) return ia.crowding > ib.crowding ? a : b;
    return a;
}

double hypervolume_2d(std::span<const Objectives> front, const Objectives& reference) {
    std::vector<Objectives> pts;
    pts.reserve(front.size());
    for (const Objectives& o : front)
        if (o[0] < reference[0] && o[1] < reference[1]) pts.push_back(o);
    if (pts.empty()) return 0.0;
    std::sort(pts.begin(), pts.end());

    double hv = 0.0;
    double min_y = kInf;
    for (size_t i = 0; i < pts.size(); ++i) {
        min_y = std::min(min_y, pts[i][1]);
        const double x_next = i + 1 < pts.size() ? std::min(pts[i + 1][0], reference[0])
                                                 : reference[0];
        if (x_next > pts[i][0]) hv += (x_next - pts[i][0]) * (reference[1] - min_y);
    }
    return hv;
}

double spacing(std::span<const Objectives> front) {
    const int n = static_cast<int>(front.size());
    if (n < 2) return 0.0;
    std::vector<double> nearest(static_cast<size_t>(n), kInf);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double d = std::abs(front[static_cast<size_t>(i)][0] -
                                      front[static_cast<size_t>(j)][0]) +
                             std::abs(front[static_cast<size_t>(i)][1] -
                                      front[static_cast<size_t>(j)][1]);
            nearest[static_cast<size_t>(i)] = std::min(nearest[static_cast<size_t>(i)], d);
        }
    double mean = 0.0;
    for (double d : nearest) mean += d;
    mean /= n;
    double var = 0.0;
    for (double d : nearest) var += (d - mean) * (d - mean);
    return std::sqrt(var / n);
}

namespace {

void assign_ranks_and_crowding(std::vector<Individual>& population) {
    std::vector<Objectives> objs(population.size());
    for (size_t i = 0; i < population.size(); ++i) objs[i] = population[i].objectives;
    const auto fronts = fast_nondominated_sort(objs);
    for (size_t f = 0; f < fronts.size(); ++f) {
        std::vector<Objectives> front_objs;
        front_objs.reserve(fronts[f].size());
        for (int idx : fronts[f]) front_objs.push_back(objs[static_cast<size_t>(idx)]);
        const auto dist = crowding_distance(front_objs);
        for (size_t k = 0; k < fronts[f].size(); ++k) {
            population[static_cast<size_t>(fronts[f][k])].rank = static_cast<int>(f);
            population[static_cast<size_t>(fronts[f][k])].crowding = dist[k];
        }
    }
}

struct Normalization {
    Objectives lo{kInf, kInf};
    Objectives hi{-kInf, -kInf};

    void absorb(const Objectives& o) {
        if (!finite(o)) return;
        lo[0] = std::min(lo[0], o[0]);
        lo[1] = std::min(lo[1], o[1]);
        hi[0] = std::max(hi[0], o[0]);
        hi[1] = std::max(hi[1], o[1]);
    }

    Objectives apply(const Objectives& o) const {
        Objectives out;
        for (int m = 0; m < 2; ++m) {
            const double range = hi[static_cast<size_t>(m)] - lo[static_cast<size_t>(m)];
            out[static_cast<size_t>(m)] =
                range > 0 ? (o[static_cast<size_t>(m)] - lo[static_cast<size_t>(m)]) / range : 0.0;
        }
        return out;
    }
};

std::vector<Objectives> front_zero_objectives(const std::vector<Individual>& population) {
    std::vector<Objectives> out;
    for (const Individual& ind : population)
        if (ind.rank == 0 && finite(ind.objectives)) out.push_back(ind.objectives);
    return out;
}

double best_scalarized_of(const std::vector<Individual>& population) {
    double best = kInf;
    for (const Individual& ind : population) best = std::min(best, ind.scalarized);
    return best;
}

}  // namespace

RunResult nsga2_run(const GeneEvaluator& evaluate, const GeneBounds& bounds,
                    const RunConfig& config, const GenerationObserver& observer) {
    if (config.population < 4 || config.population % 2 != 0)
        throw std::invalid_argument("population must be even and >= 4");
    if (config.generations < 1) throw std::invalid_argument("generations must be >= 1");

    RunResult result;
    auto evaluate_into = [&](Individual& ind) {
        const EvalOutcome outcome = evaluate(ind.genes);
        ind.objectives = outcome.objectives;
        ind.scalarized = outcome.scalarized;
        result.evaluator_calls++;
    };

    std::vector<Individual> population(static_cast<size_t>(config.population));
    Rng init_rng(mix_seed(config.seed, 0));
    for (Individual& ind : population) {
        for (size_t g = 0; g < ind.genes.size(); ++g)
            ind.genes[g] = init_rng.uniform(bounds.low[g], bounds.high[g]);
        evaluate_into(ind);
    }
    assign_ranks_and_crowding(population);
    if (observer) observer(0, population);

    // Raw front-0 snapshots per generation; indicators are computed after
    // the run so normalization can span every generation.
    std::vector<std::vector<Objectives>> front_snapshots;
    std::vector<double> best_history;
    Normalization norm;
    auto snapshot = [&]() {
        for (const Individual& ind : population) norm.absorb(ind.objectives);
        front_snapshots.push_back(front_zero_objectives(population));
        best_history.push_back(best_scalarized_of(population));
    };
    snapshot();  // generation 0

    const int pairs = config.population / 2;
    for (int gen = 1; gen <= config.generations; ++gen) {
        std::vector<Individual> offspring;
        offspring.reserve(static_cast<size_t>(config.population));
        for (int pair = 0; pair < pairs; ++pair) {
            Rng rng(mix_seed(config.seed,
                             (static_cast<std::uint64_t>(gen) << 20) + static_cast<std::uint64_t>(pair) + 1));
            auto draw_index = [&]() {
                return std::min(static_cast<int>(rng.uniform() * config.population),
                                config.population - 1);
            };
            const int p1 = tournament_select(population, draw_index(), draw_index());
            const int p2 = tournament_select(population, draw_index(), draw_index());

            Genes g1 = population[static_cast<size_t>(p1)].genes;
            Genes g2 = population[static_cast<size_t>(p2)].genes;
            if (rng.uniform() < config.p_crossover)
                std::tie(g1, g2) = sbx_crossover(g1, g2, config.eta_c, rng, bounds);
            g1 = polynomial_mutation(g1, config.eta_m, config.p_mutation, bounds, rng);
            g2 = polynomial_mutation(g2, config.eta_m, config.p_mutation, bounds, rng);

            Individual c1, c2;
            c1.genes = g1;
            c2.genes = g2;
            evaluate_into(c1);
            evaluate_into(c2);
            offspring.push_back(std::move(c1));
            offspring.push_back(std::move(c2));
        }

        // Merge parents and offspring, keep the best fronts, truncate the
        // boundary front by crowding.
        std::vector<Individual> merged = std::move(population);
        merged.insert(merged.end(), std::make_move_iterator(offspring.begin()),
                      std::make_move_iterator(offspring.end()));
        std::vector<Objectives> objs(merged.size());
        for (size_t i = 0; i < merged.size(); ++i) objs[i] = merged[i].objectives;
        const auto fronts = fast_nondominated_sort(objs);

        population.clear();
        population.reserve(static_cast<size_t>(config.population));
        for (size_t f = 0; f < fronts.size() && static_cast<int>(population.size()) < config.population; ++f) {
            std::vector<Objectives> front_objs;
            front_objs.reserve(fronts[f].size());
            for (int idx : fronts[f]) front_objs.push_back(objs[static_cast<size_t>(idx)]);
            const auto dist = crowding_distance(front_objs);

            std::vector<int> order(fronts[f].size());
            for (size_t k = 0; k < order.size(); ++k) order[k] = static_cast<int>(k);
            const int room = config.population - static_cast<int>(population.size());
            if (static_cast<int>(fronts[f].size()) > room) {
                std::stable_sort(order.begin(), order.end(),
                                 [&](int a, int b) { return dist[static_cast<size_t>(a)] > dist[static_cast<size_t>(b)]; });
                order.resize(static_cast<size_t>(room));
            }
            for (int k : order) {
                Individual ind = std::move(merged[static_cast<size_t>(fronts[f][static_cast<size_t>(k)])]);
                ind.rank = static_cast<int>(f);
                ind.crowding = dist[static_cast<size_t>(k)];
                population.push_back(std::move(ind));
            }
        }
        assign_ranks_and_crowding(population);
        snapshot();
        if (observer) observer(gen, population);
    }

    // Indicators on run-wide normalized objectives.
    auto stats_for = [&](int generation) {
        GenerationStats stats;
        stats.generation = generation;
        std::vector<Objectives> normalized;
        normalized.reserve(front_snapshots[static_cast<size_t>(generation)].size());
        for (const Objectives& o : front_snapshots[static_cast<size_t>(generation)])
            normalized.push_back(norm.apply(o));
        stats.hv = hypervolume_2d(normalized, config.hv_reference);
        stats.spacing = spacing(normalized);
        stats.best_scalarized = best_history[static_cast<size_t>(generation)];
        return stats;
    };
    result.generation_zero = stats_for(0);
    result.history.reserve(static_cast<size_t>(config.generations));
    for (int gen = 1; gen <= config.generations; ++gen) result.history.push_back(stats_for(gen));

    for (const Individual& ind : population)
        if (ind.rank == 0) result.front.push_back(ind);
    std::sort(result.front.begin(), result.front.end(),
              [](const Individual& a, const Individual& b) { return a.objectives < b.objectives; });

    const Individual* chosen = nullptr;
    for (const Individual& ind : result.front)
        if (!chosen || ind.scalarized < chosen->scalarized) chosen = &ind;
    if (!chosen) throw std::logic_error("empty final front");
    result.chosen = *chosen;
    return result;
}

RandomSearchResult random_search(const GeneEvaluator& evaluate, const GeneBounds& bounds,
                                 std::int64_t budget, std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("budget must be >= 1");
    RandomSearchResult result;
    Rng rng(mix_seed(seed, 0));
    for (std::int64_t i = 0; i < budget; ++i) {
        Individual ind;
        for (size_t g = 0; g < ind.genes.size(); ++g)
            ind.genes[g] = rng.uniform(bounds.low[g], bounds.high[g]);
        const EvalOutcome outcome = evaluate(ind.genes);
        ind.objectives = outcome.objectives;
        ind.scalarized = outcome.scalarized;
        ind.rank = 0;
        result.evaluator_calls++;
        if (i == 0 || ind.scalarized < result.best.scalarized) result.best = ind;
    }
    return result;
}

GeneEvaluator make_model_evaluator(const SystemParams& base, const CostParams& costs,
                                   const ObjectiveWeights& weights, const SolveOptions& solve) {
    struct Memo {
        std::mutex mutex;
        std::map<std::array<long long, 3>, EvalOutcome> entries;
    };
    auto memo = std::make_shared<Memo>();

    return [base, costs, weights, solve, memo](const Genes& genes) -> EvalOutcome {
        std::array<long long, 3> key;
        for (size_t i = 0; i < genes.size(); ++i) key[i] = std::llround(genes[i] * 1e6);
        {
            std::lock_guard lock(memo->mutex);
            if (auto it = memo->entries.find(key); it != memo->entries.end()) return it->second;
        }

        EvalOutcome outcome;
        SystemParams params = base;
        params.mu_r = genes[0];
        params.beta_h = genes[1];
        params.beta_w = genes[2];
        if (!(params.mu_r > params.xi)) {
            outcome.diagnostic = fmt::format("infeasible: mu_r = {} <= xi = {}", params.mu_r,
                                             params.xi);
        } else {
            try {
                const MetricsReport report = pbftpool::evaluate(params, costs, weights, solve);
                outcome.objectives = {report.total_cost, report.t_resp};
                outcome.scalarized = report.scalarized;
                outcome.ok = true;
            } catch (const std::exception& e) {
                outcome.diagnostic = e.what();
            }
        }

        std::lock_guard lock(memo->mutex);
        return memo->entries.try_emplace(key, std::move(outcome)).first->second;
    };
}

}  // namespace pbftpool::moea
