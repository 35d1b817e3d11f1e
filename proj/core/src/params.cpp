#include "pbftpool/params.hpp"

#include <fmt/format.h>

namespace pbftpool {

std::string ValidationResult::describe() const {
    if (ok()) return "valid";
    std::string out;
    for (const auto& v : violations) {
        if (!out.empty()) out += "; ";
        out += fmt::format("{} ({})", v.constraint, v.detail);
    }
    return out;
}

std::pair<SystemParams, CostParams> default_params() {
    return {SystemParams{}, CostParams{}};
}

ValidationResult validate(const SystemParams& p, const CostParams& c,
                          const ObjectiveWeights& w) {
    ValidationResult result;
    auto fail = [&](std::string name, std::string detail) {
        result.violations.push_back({std::move(name), std::move(detail)});
    };

    if (p.f < 0) fail("f >= 0", fmt::format("f = {}", p.f));
    if (p.n_total < p.quorum())
        fail("N >= 3f+1", fmt::format("N = {}, 3f+1 = {}", p.n_total, p.quorum()));
    if (p.k_capacity < 1) fail("K >= 1", fmt::format("K = {}", p.k_capacity));
    if (!(p.lambda > 0)) fail("lambda > 0", fmt::format("lambda = {}", p.lambda));
    if (!(p.mu_h > 0)) fail("mu_h > 0", fmt::format("mu_h = {}", p.mu_h));
    if (p.xi < 0) fail("xi >= 0", fmt::format("xi = {}", p.xi));
    if (p.mu_r < 0) fail("mu_r >= 0", fmt::format("mu_r = {}", p.mu_r));
    if (p.beta_h < 0) fail("beta_h >= 0", fmt::format("beta_h = {}", p.beta_h));
    if (p.beta_w < 0) fail("beta_w >= 0", fmt::format("beta_w = {}", p.beta_w));

    if (c.c_h < 0) fail("c_h >= 0", fmt::format("c_h = {}", c.c_h));
    if (c.c_w < 0) fail("c_w >= 0", fmt::format("c_w = {}", c.c_w));
    if (c.c_r < 0) fail("c_r >= 0", fmt::format("c_r = {}", c.c_r));
    if (c.c_hw < 0) fail("c_hw >= 0", fmt::format("c_hw = {}", c.c_hw));
    if (c.c_wh < 0) fail("c_wh >= 0", fmt::format("c_wh = {}", c.c_wh));

    if (w.w1 < 0) fail("w1 >= 0", fmt::format("w1 = {}", w.w1));
    if (w.w2 < 0) fail("w2 >= 0", fmt::format("w2 = {}", w.w2));
    if (w.w3 < 0) fail("w3 >= 0", fmt::format("w3 = {}", w.w3));
    if (w.w1 + w.w2 + w.w3 > 1.0)
        fail("sum(w) <= 1", fmt::format("w1+w2+w3 = {}", w.w1 + w.w2 + w.w3));

    return result;
}

}  // namespace pbftpool
