#pragma once

#include <string>
#include <utility>
#include <vector>

namespace pbftpool {

// All rates are per millisecond. Parameter objects are immutable value
// types once constructed and safe to share across threads.

struct SystemParams {
    int f = 3;            // max Byzantine nodes tolerated
    int n_total = 15;     // nodes across hot + warm + repair pools
    int k_capacity = 20;  // max transactions the hot pool holds, incl. the one in service
    double lambda = 4.0;  // transaction arrival rate
    double mu_h = 5.0;    // consensus completion rate
    double xi = 0.5;      // failure rate of one hot node
    double mu_r = 10.0;   // repair rate of the repair facility
    double beta_h = 0.2;  // hot -> warm migration rate
    double beta_w = 8.0;  // warm -> hot migration rate

    // Quorum is always derived from f, never stored.
    int quorum() const { return 3 * f + 1; }

    bool operator==(const SystemParams&) const = default;
};

struct CostParams {
    double c_h = 5.0;   // hot-node cost per ms
    double c_w = 3.0;   // warm-node cost per ms
    double c_r = 2.0;   // repair cost per ms
    double c_hw = 1.0;  // hot -> warm migration cost per event
    double c_wh = 1.5;  // warm -> hot migration cost per event

    bool operator==(const CostParams&) const = default;
};

struct ObjectiveWeights {
    double w1 = 0.2;  // hosting-cost weight
    double w2 = 0.2;  // repair-cost weight
    double w3 = 0.2;  // migration-cost weight

    // Remaining weight lands on response time.
    double residual() const { return 1.0 - (w1 + w2 + w3); }

    bool operator==(const ObjectiveWeights&) const = default;
};

struct Violation {
    std::string constraint;  // e.g. "N >= 3f+1"
    std::string detail;
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

std::pair<SystemParams, CostParams> default_params();

// Checks every type invariant; reports each violated constraint by name
// instead of aborting.
ValidationResult validate(const SystemParams& params,
                          const CostParams& costs = {},
                          const ObjectiveWeights& weights = {});

}  // namespace pbftpool
