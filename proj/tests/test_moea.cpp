#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "pbftpool/moea.hpp"
#include "pbftpool/rng.hpp"

using namespace pbftpool;
using namespace pbftpool::moea;

namespace {

// Cheap analytic stand-in for the model evaluator: a smooth bi-objective
// with a conflicting trade-off across the same gene box.
EvalOutcome toy_evaluate(const Genes& g) {
    EvalOutcome out;
    const double cost = g[0] * 2.0 + g[1] * 0.5 + g[2];
    const double resp = 50.0 / g[0] + 0.1 * g[1] + 100.0 / g[2];
    out.objectives = {cost, resp};
    out.scalarized = 0.5 * cost + 0.5 * resp;
    out.ok = true;
    return out;
}

}  // namespace

TEST_CASE("sbx child forms honor the spread factor") {
    const Genes a{2.0, 10.0, 4.0};
    const Genes b{8.0, 20.0, 12.0};

    SUBCASE("zero spread yields the parental mean") {
        const auto [c1, c2] = sbx_children(a, b, {0.0, 0.0, 0.0});
        for (size_t i = 0; i < 3; ++i) {
            CHECK(c1[i] == doctest::Approx((a[i] + b[i]) / 2));
            CHECK(c2[i] == doctest::Approx((a[i] + b[i]) / 2));
        }
    }
    SUBCASE("unit spread reproduces the parents") {
        const auto [c1, c2] = sbx_children(a, b, {1.0, 1.0, 1.0});
        CHECK(c1 == a);
        CHECK(c2 == b);
    }
    SUBCASE("identical parents are fixed points for any spread") {
        Rng rng(99);
        for (int i = 0; i < 20; ++i) {
            const auto [c1, c2] = sbx_crossover(a, a, 15.0, rng, GeneBounds{});
            CHECK(c1 == a);
            CHECK(c2 == a);
        }
    }
}

TEST_CASE("sampled sbx children stay inside bounds") {
    const GeneBounds bounds;
    Rng rng(5);
    const Genes a{1.0, 0.1, 3.0}, b{10.0, 30.0, 15.0};
    for (int i = 0; i < 200; ++i) {
        const auto [c1, c2] = sbx_crossover(a, b, 20.0, rng, bounds);
        for (size_t g = 0; g < 3; ++g) {
            CHECK(c1[g] >= bounds.low[g]);
            CHECK(c1[g] <= bounds.high[g]);
            CHECK(c2[g] >= bounds.low[g]);
            CHECK(c2[g] <= bounds.high[g]);
        }
    }
}

TEST_CASE("polynomial mutation respects probability and bounds") {
    const GeneBounds bounds;
    Rng rng(1);
    const Genes x{5.0, 15.0, 9.0};

    SUBCASE("zero probability leaves genes unchanged") {
        for (int i = 0; i < 50; ++i) CHECK(polynomial_mutation(x, 20.0, 0.0, bounds, rng) == x);
    }
    SUBCASE("mutations never leave the box") {
        const Genes edge{1.0, 30.0, 3.0};
        for (int i = 0; i < 500; ++i) {
            const Genes m = polynomial_mutation(edge, 20.0, 1.0, bounds, rng);
            for (size_t g = 0; g < 3; ++g) {
                CHECK(m[g] >= bounds.low[g]);
                CHECK(m[g] <= bounds.high[g]);
            }
        }
    }
    SUBCASE("mid-range displacement is symmetric on average") {
        GeneBounds unit;
        unit.low = {0.0, 0.0, 0.0};
        unit.high = {1.0, 1.0, 1.0};
        const Genes mid{0.5, 0.5, 0.5};
        const int n = 100'000;
        double sum = 0.0, sum_sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const Genes m = polynomial_mutation(mid, 20.0, 1.0, unit, rng);
            const double d = m[0] - 0.5;
            sum += d;
            sum_sq += d * d;
        }
        const double mean = sum / n;
        const double std_err = std::sqrt((sum_sq / n - mean * mean) / n);
        CHECK(std::abs(mean) <= 3.0 * std_err);
    }
}

TEST_CASE("non-dominated sorting matches the worked examples") {
    {
        const std::vector<Objectives> objs{{1, 2}, {2, 1}, {3, 3}};
        const auto fronts = fast_nondominated_sort(objs);
        REQUIRE(fronts.size() == 2);
        CHECK(std::set<int>(fronts[0].begin(), fronts[0].end()) == std::set<int>{0, 1});
        CHECK(fronts[1] == std::vector<int>{2});
    }
    {
        const std::vector<Objectives> objs{{1, 1}, {2, 2}, {3, 3}};
        const auto fronts = fast_nondominated_sort(objs);
        REQUIRE(fronts.size() == 3);
        for (size_t f = 0; f < 3; ++f) CHECK(fronts[f] == std::vector<int>{static_cast<int>(f)});
    }
    {
        const std::vector<Objectives> objs{{2, 2}, {2, 2}, {2, 2}};
        const auto fronts = fast_nondominated_sort(objs);
        REQUIRE(fronts.size() == 1);
        CHECK(fronts[0].size() == 3);
    }
}

TEST_CASE("non-dominated sorting agrees with brute force on random sets") {
    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform() * 40);
        std::vector<Objectives> objs;
        std::vector<std::array<double, 2>> raw;
        for (int i = 0; i < n; ++i) {
            // quantized coordinates so duplicates and ties occur
            const double x = std::floor(rng.uniform() * 10.0) / 10.0;
            const double y = std::floor(rng.uniform() * 10.0) / 10.0;
            objs.push_back({x, y});
            raw.push_back({x, y});
        }
        const auto fast = fast_nondominated_sort(objs);
        const auto brute = test::brute_force_fronts(raw);
        REQUIRE(fast.size() == brute.size());
        for (size_t f = 0; f < fast.size(); ++f) {
            CHECK(std::set<int>(fast[f].begin(), fast[f].end()) ==
                  std::set<int>(brute[f].begin(), brute[f].end()));
        }
    }
}

TEST_CASE("crowding distance matches the worked example") {
    const std::vector<Objectives> front{{0.0, 1.0}, {0.5, 0.5}, {1.0, 0.0}};
    const auto d = crowding_distance(front);
    REQUIRE(d.size() == 3);
    CHECK(std::isinf(d[0]));
    CHECK(d[1] == doctest::Approx(2.0));
    CHECK(std::isinf(d[2]));

    CHECK(crowding_distance(std::vector<Objectives>{{1, 1}}) ==
          std::vector<double>{std::numeric_limits<double>::infinity()});
    const auto two = crowding_distance(std::vector<Objectives>{{0, 1}, {1, 0}});
    CHECK(std::isinf(two[0]));
    CHECK(std::isinf(two[1]));
}

TEST_CASE("tournament prefers rank, then crowding, then the first drawn") {
    std::vector<Individual> pop(3);
    pop[0].rank = 0;
    pop[0].crowding = 1.0;
    pop[1].rank = 1;
    pop[1].crowding = std::numeric_limits<double>::infinity();
    pop[2].rank = 0;
    pop[2].crowding = std::numeric_limits<double>::infinity();
    CHECK(tournament_select(pop, 0, 1) == 0);  // lower rank wins
    CHECK(tournament_select(pop, 2, 0) == 2);  // equal rank, larger crowding
    CHECK(tournament_select(pop, 0, 0) == 0);
    pop[2].crowding = 1.0;
    CHECK(tournament_select(pop, 2, 0) == 2);  // full tie: first drawn
    CHECK(tournament_select(pop, 0, 2) == 0);
}

TEST_CASE("hypervolume matches the worked examples") {
    CHECK(hypervolume_2d(std::vector<Objectives>{{0.5, 0.5}}, {1.0, 1.0}) == 0.25);
    CHECK(hypervolume_2d(std::vector<Objectives>{{0.25, 0.75}, {0.5, 0.5}, {0.75, 0.25}},
                         {1.0, 1.0}) == 0.375);
    // points outside the reference are excluded
    CHECK(hypervolume_2d(std::vector<Objectives>{{0.5, 0.5}, {2.0, 0.1}}, {1.0, 1.0}) == 0.25);
    CHECK(hypervolume_2d(std::vector<Objectives>{}, {1.0, 1.0}) == 0.0);
    // dominated points add nothing
    CHECK(hypervolume_2d(std::vector<Objectives>{{0.5, 0.5}, {0.6, 0.6}}, {1.0, 1.0}) == 0.25);
}

TEST_CASE("spacing matches the worked examples") {
    CHECK(spacing(std::vector<Objectives>{}) == 0.0);
    CHECK(spacing(std::vector<Objectives>{{1, 1}}) == 0.0);
    // equally spaced collinear points
    CHECK(spacing(std::vector<Objectives>{{0, 0}, {0, 1}, {0, 2}, {0, 3}}) ==
          doctest::Approx(0.0));
    // nearest distances (1,1,2): population std
    CHECK(spacing(std::vector<Objectives>{{0, 0}, {0, 1}, {0, 3}}) ==
          doctest::Approx(0.4714045207910317));
}

TEST_CASE("random search is deterministic with a prefix property") {
    const GeneBounds bounds;
    const auto a = random_search(toy_evaluate, bounds, 100, 7);
    const auto b = random_search(toy_evaluate, bounds, 100, 7);
    CHECK(a.best.genes == b.best.genes);
    CHECK(a.best.scalarized == b.best.scalarized);

    const auto longer = random_search(toy_evaluate, bounds, 400, 7);
    CHECK(longer.best.scalarized <= a.best.scalarized);

    const auto single = random_search(toy_evaluate, bounds, 1, 7);
    CHECK(single.evaluator_calls == 1);
    CHECK(std::isfinite(single.best.scalarized));
}

TEST_CASE("nsga2 is deterministic and keeps valid fronts") {
    const GeneBounds bounds;
    RunConfig cfg;
    cfg.population = 16;
    cfg.generations = 12;
    cfg.seed = 3;

    std::vector<std::vector<Individual>> populations;
    const RunResult a = nsga2_run(toy_evaluate, bounds, cfg,
                                  [&](int, const std::vector<Individual>& pop) {
                                      populations.push_back(pop);
                                  });
    const RunResult b = nsga2_run(toy_evaluate, bounds, cfg);

    CHECK(a.chosen.genes == b.chosen.genes);
    REQUIRE(a.front.size() == b.front.size());
    for (size_t i = 0; i < a.front.size(); ++i) {
        CHECK(a.front[i].genes == b.front[i].genes);
        CHECK(a.front[i].objectives == b.front[i].objectives);
    }
    REQUIRE(a.history.size() == static_cast<size_t>(cfg.generations));
    for (size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].hv == b.history[i].hv);
        CHECK(a.history[i].best_scalarized == b.history[i].best_scalarized);
    }

    // front validity after every generation: no retained rank-0 individual
    // dominated by any retained individual
    REQUIRE(populations.size() == static_cast<size_t>(cfg.generations) + 1);
    for (const auto& pop : populations) {
        for (const Individual& ind : pop) {
            if (ind.rank != 0) continue;
            for (const Individual& other : pop) {
                const bool dom = other.objectives[0] <= ind.objectives[0] &&
                                 other.objectives[1] <= ind.objectives[1] &&
                                 (other.objectives[0] < ind.objectives[0] ||
                                  other.objectives[1] < ind.objectives[1]);
                CHECK_FALSE(dom);
            }
        }
    }

    // genes always inside the box
    for (const Individual& ind : a.front)
        for (size_t g = 0; g < 3; ++g) {
            CHECK(ind.genes[g] >= bounds.low[g]);
            CHECK(ind.genes[g] <= bounds.high[g]);
        }

    // evaluation budget: population * (generations + 1)
    CHECK(a.evaluator_calls == cfg.population * (cfg.generations + 1));
}

TEST_CASE("nsga2 improves on random search for the toy problem") {
    const GeneBounds bounds;
    RunConfig cfg;
    cfg.population = 20;
    cfg.generations = 30;
    cfg.seed = 11;
    const RunResult run = nsga2_run(toy_evaluate, bounds, cfg);
    const auto baseline =
        random_search(toy_evaluate, bounds, cfg.population * cfg.generations, 11);
    CHECK(run.chosen.scalarized <= baseline.best.scalarized);
    CHECK(run.history.back().hv >= run.generation_zero.hv);
}

TEST_CASE("failed evaluations receive infinite objectives") {
    int calls = 0;
    const GeneEvaluator flaky = [&](const Genes& g) {
        ++calls;
        EvalOutcome out = toy_evaluate(g);
        if (calls % 7 == 0) {
            out = EvalOutcome{};
            out.diagnostic = "synthetic failure";
        }
        return out;
    };
    RunConfig cfg;
    cfg.population = 8;
    cfg.generations = 6;
    cfg.seed = 19;
    const RunResult run = nsga2_run(flaky, GeneBounds{}, cfg);
    CHECK(std::isfinite(run.chosen.scalarized));
    for (const Individual& ind : run.front) {
        CHECK(std::isfinite(ind.objectives[0]));
        CHECK(std::isfinite(ind.objectives[1]));
    }
}

TEST_CASE("config validation rejects bad populations") {
    RunConfig cfg;
    cfg.population = 5;  // odd
    CHECK_THROWS_AS(nsga2_run(toy_evaluate, GeneBounds{}, cfg), std::invalid_argument);
    cfg.population = 2;  // too small
    CHECK_THROWS_AS(nsga2_run(toy_evaluate, GeneBounds{}, cfg), std::invalid_argument);
    cfg.population = 8;
    cfg.generations = 0;
    CHECK_THROWS_AS(nsga2_run(toy_evaluate, GeneBounds{}, cfg), std::invalid_argument);
}

TEST_CASE("the model evaluator memoizes and rejects infeasible repair rates") {
    SystemParams base;
    base.n_total = 5;
    base.k_capacity = 4;
    base.f = 1;
    const GeneEvaluator evaluator = make_model_evaluator(base, CostParams{}, ObjectiveWeights{});

    const Genes g{5.0, 1.0, 6.0};
    const EvalOutcome first = evaluator(g);
    const EvalOutcome second = evaluator(g);
    CHECK(first.ok);
    CHECK(first.objectives == second.objectives);
    CHECK(first.scalarized == doctest::Approx(second.scalarized));

    const EvalOutcome infeasible = evaluator({0.3, 1.0, 6.0});  // mu_r below xi = 0.5
    CHECK_FALSE(infeasible.ok);
    CHECK(std::isinf(infeasible.objectives[0]));
    CHECK(infeasible.diagnostic.find("mu_r") != std::string::npos);
}
