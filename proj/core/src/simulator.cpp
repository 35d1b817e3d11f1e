#include "pbftpool/simulator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <json.hpp>

#include "pbftpool/rng.hpp"

namespace pbftpool {

std::vector<SimEvent> sim_enabled_events(const SystemState& s, const SystemParams& p,
                                         const SimFault& fault) {
    const int quorum = fault.relax_consensus_quorum ? 3 * p.f : p.quorum();
    std::vector<SimEvent> events;
    events.reserve(kEventKindCount);

    if (p.lambda > 0) {
        if (s.q < p.k_capacity)
            events.push_back({EventKind::Arrival, p.lambda, {s.h, s.w, s.r, s.q + 1}, false});
        else
            events.push_back({EventKind::Arrival, p.lambda, s, true});
    }
    if (s.h >= quorum && s.q > 0 && p.mu_h > 0)
        events.push_back({EventKind::ConsensusCompletion, p.mu_h, {s.h, s.w, s.r, s.q - 1}});
    if (s.h > 0 && p.xi > 0)
        events.push_back({EventKind::Failure, s.h * p.xi, {s.h - 1, s.w, s.r + 1, s.q}});
    if (s.r > 0 && p.mu_r > 0)
        events.push_back({EventKind::RepairCompletion, p.mu_r, {s.h, s.w + 1, s.r - 1, s.q}});
    if (s.h > p.quorum() && p.beta_h > 0)
        events.push_back({EventKind::HpMigration, p.beta_h, {s.h - 1, s.w + 1, s.r, s.q}});
    if (s.w > 0 && p.beta_w > 0)
        events.push_back({EventKind::WpMigration, p.beta_w, {s.h + 1, s.w - 1, s.r, s.q}});
    return events;
}

namespace {

double t_quantile_975(int dof) {
    static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                       2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                       2.131,  2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
                                       2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048,
                                       2.045,  2.042};
    if (dof < 1) return std::numeric_limits<double>::quiet_NaN();
    if (dof <= 30) return table[dof - 1];
    if (dof <= 40) return 2.021;
    if (dof <= 60) return 2.000;
    if (dof <= 120) return 1.980;
    return 1.960;
}

Estimate batch_estimate(const std::vector<double>& batch_means, double point) {
    Estimate est;
    est.value = point;
    est.batches = static_cast<int>(batch_means.size());
    if (est.batches < 2) {
        est.half_width = std::numeric_limits<double>::quiet_NaN();
        return est;
    }
    double mean = 0.0;
    for (double x : batch_means) mean += x;
    mean /= est.batches;
    double var = 0.0;
    for (double x : batch_means) var += (x - mean) * (x - mean);
    var /= (est.batches - 1);
    est.half_width = t_quantile_975(est.batches - 1) * std::sqrt(var / est.batches);
    return est;
}

// Time-weighted accumulator split across equal batch windows.
class BatchIntegrator {
public:
    BatchIntegrator(double warmup, double horizon, int batches)
        : warmup_(warmup), width_((horizon - warmup) / batches), batches_(batches),
          sums_(static_cast<size_t>(batches), 0.0) {}

    void add(double t0, double t1, double value) {
        const double lo = std::max(t0, warmup_);
        if (t1 <= lo) return;
        total_ += (t1 - lo) * value;
        int b = static_cast<int>((lo - warmup_) / width_);
        double cursor = lo;
        while (cursor < t1 && b < batches_) {
            const double end = std::min(t1, warmup_ + (b + 1) * width_);
            sums_[static_cast<size_t>(b)] += (end - cursor) * value;
            cursor = end;
            ++b;
        }
    }

    Estimate estimate(double window) const {
        std::vector<double> means(sums_.size());
        for (size_t i = 0; i < sums_.size(); ++i) means[i] = sums_[i] / width_;
        return batch_estimate(means, total_ / window);
    }

private:
    double warmup_, width_;
    int batches_;
    double total_ = 0.0;
    std::vector<double> sums_;
};

// Per-batch tallies for ratio statistics (drop fraction, mean latency).
class BatchRatio {
public:
    BatchRatio(double warmup, double width, int batches)
        : warmup_(warmup), width_(width),
          num_(static_cast<size_t>(batches), 0.0), den_(static_cast<size_t>(batches), 0.0) {}

    void add(double t, double numerator, double denominator) {
        if (t < warmup_) return;
        total_num_ += numerator;
        total_den_ += denominator;
        const int b = std::min(static_cast<int>((t - warmup_) / width_),
                               static_cast<int>(num_.size()) - 1);
        num_[static_cast<size_t>(b)] += numerator;
        den_[static_cast<size_t>(b)] += denominator;
    }

    Estimate estimate() const {
        std::vector<double> means;
        means.reserve(num_.size());
        for (size_t i = 0; i < num_.size(); ++i)
            if (den_[i] > 0) means.push_back(num_[i] / den_[i]);
        const double point = total_den_ > 0 ? total_num_ / total_den_
                                            : std::numeric_limits<double>::quiet_NaN();
        return batch_estimate(means, point);
    }

    double total_numerator() const { return total_num_; }
    double total_denominator() const { return total_den_; }

private:
    double warmup_, width_;
    double total_num_ = 0.0, total_den_ = 0.0;
    std::vector<double> num_, den_;
};

}  // namespace

SimReport simulate(const SystemParams& p, const SimConfig& config, const TraceSink& trace,
                   const SimFault& fault) {
    const double horizon = config.horizon_ms;
    const double warmup = config.effective_warmup();
    if (!(horizon > warmup) || warmup < 0)
        throw std::invalid_argument(
            fmt::format("horizon ({}) must exceed warmup ({})", horizon, warmup));
    if (config.batch_count < 2) throw std::invalid_argument("batch_count must be >= 2");

    SystemState s = config.initial.value_or(SystemState{p.n_total, 0, 0, 0});
    if (s.h + s.w + s.r != p.n_total || s.q < 0 || s.q > p.k_capacity)
        throw std::invalid_argument("initial state outside the state space");

    Rng rng(config.seed);
    const int quorum = p.quorum();
    const double window = horizon - warmup;
    const double batch_width = window / config.batch_count;

    BatchIntegrator queue_len(warmup, horizon, config.batch_count);
    BatchIntegrator avail(warmup, horizon, config.batch_count);
    BatchIntegrator hot(warmup, horizon, config.batch_count);
    BatchIntegrator warm(warmup, horizon, config.batch_count);
    BatchIntegrator repair(warmup, horizon, config.batch_count);
    BatchRatio drops(warmup, batch_width, config.batch_count);
    BatchRatio latency(warmup, batch_width, config.batch_count);

    SimReport report;
    report.horizon_ms = horizon;
    report.warmup_ms = warmup;
    report.seed = config.seed;

    std::deque<double> queue;  // arrival stamps of admitted transactions, FCFS
    for (int i = 0; i < s.q; ++i) queue.push_back(0.0);

    double now = 0.0;
    std::vector<SimEvent> events;
    while (now < horizon) {
        events = sim_enabled_events(s, p, fault);
        double total_rate = 0.0;
        for (const SimEvent& e : events) total_rate += e.rate;

        const double next = total_rate > 0 ? now + rng.exponential(total_rate)
                                           : std::numeric_limits<double>::infinity();
        const double segment_end = std::min(next, horizon);
        queue_len.add(now, segment_end, s.q);
        avail.add(now, segment_end, s.h >= quorum ? 1.0 : 0.0);
        hot.add(now, segment_end, s.h);
        warm.add(now, segment_end, s.w);
        repair.add(now, segment_end, s.r);
        if (next >= horizon) break;
        now = next;

        double pick = rng.uniform() * total_rate;
        const SimEvent* chosen = &events.back();
        for (const SimEvent& e : events) {
            if (pick < e.rate) {
                chosen = &e;
                break;
            }
            pick -= e.rate;
        }

        report.event_counts[static_cast<size_t>(chosen->kind)]++;
        switch (chosen->kind) {
            case EventKind::Arrival:
                drops.add(now, chosen->is_drop ? 1.0 : 0.0, 1.0);
                if (now >= warmup) {
                    report.arrivals_observed++;
                    if (chosen->is_drop) report.arrivals_dropped++;
                }
                if (!chosen->is_drop) queue.push_back(now);
                break;
            case EventKind::ConsensusCompletion:
                latency.add(now, now - queue.front(), 1.0);
                if (now >= warmup) report.completions++;
                queue.pop_front();
                break;
            default:
                break;
        }
        s = chosen->target;
        if (trace) trace(now, chosen->kind, s);
    }

    report.mean_queue = queue_len.estimate(window);
    report.availability = avail.estimate(window);
    report.mean_h = hot.estimate(window);
    report.mean_w = warm.estimate(window);
    report.mean_r = repair.estimate(window);
    report.p_drop = drops.estimate();
    report.t_resp = latency.estimate();
    return report;
}

ComparisonReport compare(const SimReport& sim, const MetricsReport& analytical) {
    ComparisonReport report;
    if (!(sim.horizon_ms > sim.warmup_ms)) {
        report.reason = "insufficient samples: empty post-warmup window";
        return report;
    }

    struct Row {
        const char* name;
        double a;
        const Estimate* e;
    };
    const Row rows[] = {
        {"mean_queue", analytical.mean_queue, &sim.mean_queue},
        {"p_drop", analytical.p_drop, &sim.p_drop},
        {"t_resp", analytical.t_resp, &sim.t_resp},
        {"availability", analytical.availability, &sim.availability},
        {"mean_h", analytical.mean_h, &sim.mean_h},
        {"mean_w", analytical.mean_w, &sim.mean_w},
        {"mean_r", analytical.mean_r, &sim.mean_r},
    };
    for (const Row& row : rows) {
        if (row.e->batches < 2 || !std::isfinite(row.e->half_width)) {
            report.reason = fmt::format("insufficient samples: no interval for {}", row.name);
            report.metrics.clear();
            report.inside_count = 0;
            return report;
        }
        MetricComparison mc;
        mc.name = row.name;
        mc.analytical = row.a;
        mc.simulated = row.e->value;
        mc.half_width = row.e->half_width;
        mc.inside_ci = row.e->contains(row.a);
        mc.rel_error = std::abs(row.a - row.e->value) /
                       std::max({std::abs(row.a), std::abs(row.e->value), 1e-12});
        if (mc.inside_ci) report.inside_count++;
        report.metrics.push_back(std::move(mc));
    }
    report.ok = true;
    return report;
}

namespace {

nlohmann::ordered_json estimate_json(const Estimate& e) {
    return {{"value", e.value}, {"half_width", e.half_width}, {"batches", e.batches}};
}

}  // namespace

std::string to_json_string(const SimReport& r) {
    nlohmann::ordered_json j;
    j["mean_queue"] = estimate_json(r.mean_queue);
    j["p_drop"] = estimate_json(r.p_drop);
    j["t_resp"] = estimate_json(r.t_resp);
    j["availability"] = estimate_json(r.availability);
    j["mean_h"] = estimate_json(r.mean_h);
    j["mean_w"] = estimate_json(r.mean_w);
    j["mean_r"] = estimate_json(r.mean_r);
    nlohmann::ordered_json counts;
    for (int k = 0; k < kEventKindCount; ++k)
        counts[to_string(static_cast<EventKind>(k))] = r.event_counts[static_cast<size_t>(k)];
    j["event_counts"] = std::move(counts);
    j["arrivals_observed"] = r.arrivals_observed;
    j["arrivals_dropped"] = r.arrivals_dropped;
    j["completions"] = r.completions;
    j["horizon_ms"] = r.horizon_ms;
    j["warmup_ms"] = r.warmup_ms;
    j["seed"] = r.seed;
    return j.dump(2);
}

std::string to_json_string(const ComparisonReport& r) {
    nlohmann::ordered_json j;
    j["ok"] = r.ok;
    if (!r.ok) j["reason"] = r.reason;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const MetricComparison& m : r.metrics) {
        rows.push_back({{"name", m.name},
                        {"analytical", m.analytical},
                        {"simulated", m.simulated},
                        {"half_width", m.half_width},
                        {"rel_error", m.rel_error},
                        {"inside_ci", m.inside_ci}});
    }
    j["metrics"] = std::move(rows);
    j["inside_count"] = r.inside_count;
    j["total"] = r.metrics.size();
    return j.dump(2);
}

}  // namespace pbftpool
