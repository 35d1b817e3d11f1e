#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pbftpool/generator.hpp"
#include "pbftpool/metrics.hpp"
#include "pbftpool/params.hpp"
#include "pbftpool/state_space.hpp"

namespace pbftpool {

struct SimConfig {
    double horizon_ms = 1e6;
    double warmup_ms = -1.0;  // < 0 means horizon / 10
    std::uint64_t seed = 1;
    int batch_count = 20;     // batch-means confidence intervals
    std::optional<SystemState> initial;  // defaults to (N, 0, 0, 0)

    double effective_warmup() const {
        return warmup_ms < 0 ? horizon_ms / 10.0 : warmup_ms;
    }
};

// Test hook: deliberately mis-applies one transition guard so the
// guard-equivalence check has a negative control.
struct SimFault {
    bool relax_consensus_quorum = false;  // enables consensus at h = 3f
};

struct SimEvent {
    EventKind kind;
    double rate;
    SystemState target;
    bool is_drop = false;  // arrival against a full queue
};

// The simulator's own transition table. Kept independent of the generator
// module so the two implementations can be cross-checked against each other.
std::vector<SimEvent> sim_enabled_events(const SystemState& s, const SystemParams& params,
                                         const SimFault& fault = {});

struct Estimate {
    double value = 0.0;
    double half_width = 0.0;  // 95% batch-means half width
    int batches = 0;          // batches with data

    bool contains(double x) const { return std::abs(x - value) <= half_width; }
};

struct SimReport {
    Estimate mean_queue, p_drop, t_resp, availability, mean_h, mean_w, mean_r;
    std::array<std::uint64_t, kEventKindCount> event_counts{};  // whole run
    std::uint64_t arrivals_observed = 0;  // post-warmup
    std::uint64_t arrivals_dropped = 0;   // post-warmup
    std::uint64_t completions = 0;        // post-warmup
    double horizon_ms = 0.0;
    double warmup_ms = 0.0;
    std::uint64_t seed = 0;
};

using TraceSink = std::function<void(double time_ms, EventKind kind, const SystemState& s)>;

// Event-driven simulation with competing exponential clocks matching the
// CTMC event rules; arrivals at q = K are counted as drops. FCFS queue;
// a consensus round in progress is memoryless, so its clock is simply
// disabled while h < 3f+1. Deterministic for fixed (params, config).
SimReport simulate(const SystemParams& params, const SimConfig& config,
                   const TraceSink& trace = nullptr, const SimFault& fault = {});

struct MetricComparison {
    std::string name;
    double analytical = 0.0;
    double simulated = 0.0;
    double half_width = 0.0;
    double rel_error = 0.0;
    bool inside_ci = false;
};

struct ComparisonReport {
    bool ok = false;          // comparison itself was possible
    std::string reason;       // set when !ok
    std::vector<MetricComparison> metrics;
    int inside_count = 0;

    bool consistent() const {
        return ok && inside_count == static_cast<int>(metrics.size());
    }
};

// Flags, per metric, whether the analytical value lies inside the
// simulator's 95% confidence interval. Refuses (ok = false) when the
// simulation produced too few samples to form intervals.
ComparisonReport compare(const SimReport& sim, const MetricsReport& analytical);

std::string to_json_string(const SimReport& report);
std::string to_json_string(const ComparisonReport& report);

}  // namespace pbftpool
