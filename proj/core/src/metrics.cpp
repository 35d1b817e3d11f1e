#include "pbftpool/metrics.hpp"

#include <fmt/format.h>

#include <array>
#include <map>
#include <memory>
#include <mutex>

#include <json.hpp>

#include "pbftpool/generator.hpp"

namespace pbftpool {

double mean_queue_length(const Eigen::VectorXd& pi, const StateSpace& space) {
    double total = 0.0;
    for (int i = 0; i < space.size(); ++i) total += space.state_at(i).q * pi[i];
    return total;
}

double drop_probability(const Eigen::VectorXd& pi, const StateSpace& space) {
    double total = 0.0;
    const int k = space.k_capacity();
    for (int i = 0; i < space.size(); ++i)
        if (space.state_at(i).q == k) total += pi[i];
    return total;
}

double response_time(double mean_queue, double p_drop, double lambda) {
    const double admitted = lambda * (1.0 - p_drop);
    if (!(admitted > 0.0))
        throw DegenerateThroughputError(fmt::format(
            "no admitted traffic: lambda = {}, p_drop = {}", lambda, p_drop));
    return mean_queue / admitted;
}

double availability(const Eigen::VectorXd& pi, const StateSpace& space, int f) {
    const int quorum = 3 * f + 1;
    double total = 0.0;
    for (int i = 0; i < space.size(); ++i)
        if (space.state_at(i).h >= quorum) total += pi[i];
    return total;
}

PoolMeans mean_pool_sizes(const Eigen::VectorXd& pi, const StateSpace& space) {
    PoolMeans means;
    for (int i = 0; i < space.size(); ++i) {
        const SystemState& s = space.state_at(i);
        means.h += s.h * pi[i];
        means.w += s.w * pi[i];
        means.r += s.r * pi[i];
    }
    return means;
}

CostComponents cost_components(const SystemParams& p, const CostParams& c, double mean_h,
                               double mean_w) {
    return {mean_h * c.c_h + mean_w * c.c_w, p.mu_r * c.c_r,
            p.beta_h * c.c_hw + p.beta_w * c.c_wh};
}

double scalarized_objective(const MetricsReport& r, const ObjectiveWeights& w) {
    return r.x_host * w.w1 + r.x_repair * w.w2 + r.x_migr * w.w3 + r.t_resp * w.residual();
}

namespace {

// Reachability classes depend only on which rates are non-zero, so the
// state space and report can be shared across evaluations of one shape.
struct ModelShapeKey {
    int n, k, f;
    std::array<bool, 6> active;

    auto operator<=>(const ModelShapeKey&) const = default;
};

struct ModelShape {
    std::shared_ptr<const StateSpace> space;
    std::shared_ptr<const ReachabilityReport> report;
};

class ShapeCache {
public:
    ModelShape get_or_build(const SystemParams& p) {
        const ModelShapeKey key{p.n_total, p.k_capacity, p.f,
                                {p.lambda > 0, p.mu_h > 0, p.xi > 0, p.mu_r > 0,
                                 p.beta_h > 0, p.beta_w > 0}};
        {
            std::lock_guard lock(mutex_);
            if (auto it = entries_.find(key); it != entries_.end()) return it->second;
        }
        auto space = std::make_shared<const StateSpace>(p.n_total, p.k_capacity);
        GeneratorMatrix gen = build_generator(*space, p);
        const SystemState start{p.n_total, 0, 0, 0};
        auto report = std::make_shared<const ReachabilityReport>(
            reachability_report(*space, gen, start));
        ModelShape shape{std::move(space), std::move(report)};
        std::lock_guard lock(mutex_);
        return entries_.try_emplace(key, std::move(shape)).first->second;
    }

private:
    std::mutex mutex_;
    std::map<ModelShapeKey, ModelShape> entries_;
};

ShapeCache& shape_cache() {
    static ShapeCache cache;
    return cache;
}

}  // namespace

MetricsReport evaluate(const SystemParams& p, const CostParams& costs,
                       const ObjectiveWeights& weights, const SolveOptions& solve) {
    const ModelShape shape = shape_cache().get_or_build(p);
    const StateSpace& space = *shape.space;
    const GeneratorMatrix gen = build_generator(space, p);

    if (shape.report->closed_class_count != 1)
        throw MultipleRecurrentClassesError(fmt::format(
            "{} closed communicating classes reachable from (N,0,0,0)",
            shape.report->closed_class_count));
    const StationaryDistribution dist =
        solve_stationary(gen.rates, shape.report->recurrent, solve);

    MetricsReport report;
    report.mean_queue = mean_queue_length(dist.pi, space);
    report.p_drop = drop_probability(dist.pi, space);
    report.t_resp = response_time(report.mean_queue, report.p_drop, p.lambda);
    report.availability = availability(dist.pi, space, p.f);
    const PoolMeans means = mean_pool_sizes(dist.pi, space);
    report.mean_h = means.h;
    report.mean_w = means.w;
    report.mean_r = means.r;
    const CostComponents cost = cost_components(p, costs, means.h, means.w);
    report.x_host = cost.x_host;
    report.x_repair = cost.x_repair;
    report.x_migr = cost.x_migr;
    report.total_cost = cost.total();
    report.scalarized = scalarized_objective(report, weights);
    return report;
}

std::string to_json_string(const MetricsReport& r) {
    nlohmann::ordered_json j{{"mean_queue", r.mean_queue},
                             {"p_drop", r.p_drop},
                             {"t_resp", r.t_resp},
                             {"availability", r.availability},
                             {"mean_h", r.mean_h},
                             {"mean_w", r.mean_w},
                             {"mean_r", r.mean_r},
                             {"x_host", r.x_host},
                             {"x_repair", r.x_repair},
                             {"x_migr", r.x_migr},
                             {"total_cost", r.total_cost},
                             {"scalarized", r.scalarized}};
    return j.dump(2);
}

}  // namespace pbftpool
