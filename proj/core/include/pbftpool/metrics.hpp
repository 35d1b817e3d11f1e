#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "pbftpool/params.hpp"
#include "pbftpool/state_space.hpp"
#include "pbftpool/stationary.hpp"

namespace pbftpool {

struct DegenerateThroughputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MetricsReport {
    double mean_queue = 0.0;     // expected transactions in the hot pool
    double p_drop = 0.0;         // stationary mass at q = K
    double t_resp = 0.0;         // ms, mean response time of admitted transactions
    double availability = 0.0;   // stationary mass with h >= 3f+1
    double mean_h = 0.0;
    double mean_w = 0.0;
    double mean_r = 0.0;
    double x_host = 0.0;         // cost per ms
    double x_repair = 0.0;
    double x_migr = 0.0;
    double total_cost = 0.0;
    double scalarized = 0.0;     // weighted cost/response-time objective
};

struct PoolMeans {
    double h = 0.0, w = 0.0, r = 0.0;
};

double mean_queue_length(const Eigen::VectorXd& pi, const StateSpace& space);
double drop_probability(const Eigen::VectorXd& pi, const StateSpace& space);

// Little's law restricted to admitted traffic: E[Q] / (lambda * (1 - P_drop)).
// Throws DegenerateThroughputError when no traffic is admitted.
double response_time(double mean_queue, double p_drop, double lambda);

// Stationary probability that consensus can proceed (h >= 3f+1).
double availability(const Eigen::VectorXd& pi, const StateSpace& space, int f);

PoolMeans mean_pool_sizes(const Eigen::VectorXd& pi, const StateSpace& space);

struct CostComponents {
    double x_host = 0.0, x_repair = 0.0, x_migr = 0.0;

    double total() const { return x_host + x_repair + x_migr; }
};

// X_host = h*c_h + w*c_w, X_repair = mu_r*c_r, X_migr = beta_h*c_hw + beta_w*c_wh.
CostComponents cost_components(const SystemParams& params, const CostParams& costs,
                               double mean_h, double mean_w);

// x_host*w1 + x_repair*w2 + x_migr*w3 + t_resp*(1 - w1 - w2 - w3).
double scalarized_objective(const MetricsReport& report, const ObjectiveWeights& weights);

// Full pipeline: generator -> stationary distribution -> every metric. The
// state space and reachability analysis are cached across calls that share
// the same shape (N, K, f and the set of non-zero rates); the cache is safe
// for concurrent use. Starts the chain at (N, 0, 0, 0).
MetricsReport evaluate(const SystemParams& params, const CostParams& costs = {},
                       const ObjectiveWeights& weights = {}, const SolveOptions& solve = {});

// Flat JSON object, field names as in MetricsReport.
std::string to_json_string(const MetricsReport& report);

}  // namespace pbftpool
