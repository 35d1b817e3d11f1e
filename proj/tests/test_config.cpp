#include <doctest.h>

#include "pbftpool/config_io.hpp"

using namespace pbftpool;

TEST_CASE("empty object falls back to defaults everywhere") {
    const ModelConfig cfg = parse_model_config("{}");
    CHECK(cfg.params == SystemParams{});
    CHECK(cfg.costs == CostParams{});
    CHECK(cfg.weights == ObjectiveWeights{});
}

TEST_CASE("partial sections override only their keys") {
    const ModelConfig cfg = parse_model_config(
        R"({"model": {"n_total": 20, "mu_r": 2.5}, "weights": {"w1": 0.1}})");
    CHECK(cfg.params.n_total == 20);
    CHECK(cfg.params.mu_r == 2.5);
    CHECK(cfg.params.k_capacity == 20);  // untouched default
    CHECK(cfg.weights.w1 == 0.1);
    CHECK(cfg.weights.w2 == 0.2);
}

TEST_CASE("unknown keys are rejected, not ignored") {
    CHECK_THROWS_AS(parse_model_config(R"({"model": {"lamda": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse_model_config(R"({"extra": {}})"), ConfigError);
}

TEST_CASE("type errors are rejected") {
    CHECK_THROWS_AS(parse_model_config(R"({"model": {"f": 2.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_model_config(R"({"model": {"lambda": "fast"}})"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("[1,2]"), ConfigError);
    CHECK_THROWS_AS(parse_model_config("not json"), ConfigError);
}

TEST_CASE("round trip through JSON preserves the config") {
    ModelConfig cfg;
    cfg.params.n_total = 18;
    cfg.params.beta_w = 6.25;
    cfg.costs.c_r = 0.5;
    cfg.weights = {0.05, 0.05, 0.05};
    const ModelConfig back = parse_model_config(to_json_string(cfg));
    CHECK(back.params == cfg.params);
    CHECK(back.costs == cfg.costs);
    CHECK(back.weights == cfg.weights);
}

TEST_CASE("missing file reports a config error") {
    CHECK_THROWS_AS(load_model_config("/nonexistent/config.json"), ConfigError);
}
