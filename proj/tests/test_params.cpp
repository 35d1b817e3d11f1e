#include <doctest.h>

#include "pbftpool/params.hpp"

using namespace pbftpool;

TEST_CASE("defaults carry the reference parameter set") {
    const auto [params, costs] = default_params();
    CHECK(params.f == 3);
    CHECK(params.n_total == 15);
    CHECK(params.k_capacity == 20);
    CHECK(params.lambda == 4.0);
    CHECK(params.mu_h == 5.0);
    CHECK(params.xi == 0.5);
    CHECK(params.mu_r == 10.0);
    CHECK(params.beta_h == 0.2);
    CHECK(params.beta_w == 8.0);
    CHECK(costs.c_h == 5.0);
    CHECK(costs.c_w == 3.0);
    CHECK(costs.c_r == 2.0);
    CHECK(costs.c_hw == 1.0);
    CHECK(costs.c_wh == 1.5);
    CHECK(params.quorum() == 10);
}

TEST_CASE("quorum is derived from f") {
    SystemParams p;
    for (int f : {0, 1, 2, 3, 7}) {
        p.f = f;
        CHECK(p.quorum() == 3 * f + 1);
    }
}

TEST_CASE("defaults validate for any weights with sum <= 1") {
    CHECK(validate(SystemParams{}, CostParams{}, ObjectiveWeights{}).ok());
    CHECK(validate(SystemParams{}, CostParams{}, {0.0, 0.0, 0.0}).ok());
    CHECK(validate(SystemParams{}, CostParams{}, {1.0, 0.0, 0.0}).ok());
    CHECK(validate(SystemParams{}, CostParams{}, {0.3, 0.3, 0.4}).ok());
}

TEST_CASE("validate names each violated constraint") {
    SystemParams p;
    p.n_total = 9;  // below 3f+1 = 10
    const ValidationResult result = validate(p);
    REQUIRE_FALSE(result.ok());
    CHECK(result.violations.size() == 1);
    CHECK(result.violations[0].constraint == "N >= 3f+1");

    const ValidationResult weights = validate(SystemParams{}, CostParams{}, {0.5, 0.5, 0.5});
    REQUIRE_FALSE(weights.ok());
    CHECK(weights.violations[0].constraint == "sum(w) <= 1");

    SystemParams bad;
    bad.lambda = 0.0;
    bad.mu_h = -1.0;
    bad.xi = -0.5;
    const ValidationResult multiple = validate(bad);
    CHECK(multiple.violations.size() == 3);
}

TEST_CASE("weight residual lands on response time") {
    ObjectiveWeights w{0.2, 0.2, 0.2};
    CHECK(w.residual() == doctest::Approx(0.4));
}
