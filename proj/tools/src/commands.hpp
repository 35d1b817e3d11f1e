#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pbftpool::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // validation / solver failure
inline constexpr int kExitUsage = 2;

struct EvaluateArgs {
    std::string config_path;
    std::string out_dir;  // empty: stdout only
    std::string format = "json";
};

struct SweepArgs {
    std::string config_path;
    std::string param;
    std::vector<double> values;
    std::optional<std::string> contrast_param;
    std::vector<double> contrast_values;
    std::string out_dir;
};

struct OptimizeArgs {
    std::string config_path;
    std::string out_dir = ".";
    int population = 50;
    int generations = 200;
    std::uint64_t seed = 1;
};

struct SimulateArgs {
    std::string config_path;
    std::string out_dir;
    double horizon_ms = 1e6;
    double warmup_ms = -1.0;
    std::uint64_t seed = 1;
    int batch_count = 20;
    std::string trace_path;  // optional event-trace CSV
};

struct ValidateArgs {
    bool inject_fault = false;  // negative-control hook for the guard check
};

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out);
int cmd_sweep(const SweepArgs& args, std::ostream& out);
int cmd_optimize(const OptimizeArgs& args, std::ostream& out);
int cmd_simulate(const SimulateArgs& args, std::ostream& out);
int cmd_validate(const ValidateArgs& args, std::ostream& out);

// Sweepable parameter names: n_total, k_capacity, lambda, mu_h, xi, mu_r,
// beta_h, beta_w.
bool is_sweepable_param(const std::string& name);

}  // namespace pbftpool::cli
