#include "commands.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "artifacts.hpp"
#include "pbftpool/config_io.hpp"
#include "pbftpool/metrics.hpp"
#include "pbftpool/moea.hpp"
#include "pbftpool/simulator.hpp"
#include "validate_suite.hpp"

namespace pbftpool::cli {

namespace {

using nlohmann::ordered_json;

std::string error_json(const std::string& type, const std::string& message,
                       const std::vector<Violation>& violations = {}) {
    ordered_json err{{"type", type}, {"message", message}};
    if (!violations.empty()) {
        ordered_json list = ordered_json::array();
        for (const auto& v : violations)
            list.push_back({{"constraint", v.constraint}, {"detail", v.detail}});
        err["violations"] = std::move(list);
    }
    return ordered_json{{"error", std::move(err)}}.dump(2);
}

// Loads + validates; on failure prints error JSON and returns exit code.
std::optional<ModelConfig> load_validated(const std::string& path, std::ostream& out,
                                          int& exit_code) {
    ModelConfig cfg;
    try {
        cfg = load_model_config(path);
    } catch (const ConfigError& e) {
        fmt::print(out, "{}\n", error_json("config", e.what()));
        exit_code = kExitFailure;
        return std::nullopt;
    }
    const ValidationResult check = validate(cfg.params, cfg.costs, cfg.weights);
    if (!check.ok()) {
        fmt::print(out, "{}\n", error_json("validation", check.describe(), check.violations));
        exit_code = kExitFailure;
        return std::nullopt;
    }
    return cfg;
}

constexpr const char* kMetricsCsvHeader =
    "mean_queue,p_drop,t_resp,availability,mean_h,mean_w,mean_r,"
    "x_host,x_repair,x_migr,total_cost,scalarized";

std::string metrics_csv_row(const MetricsReport& r) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}", r.mean_queue, r.p_drop, r.t_resp,
                       r.availability, r.mean_h, r.mean_w, r.mean_r, r.x_host, r.x_repair,
                       r.x_migr, r.total_cost, r.scalarized);
}

bool apply_param(SystemParams& p, const std::string& name, double value, std::string& error) {
    auto as_count = [&](int& field) {
        if (value != std::floor(value)) {
            error = fmt::format("{} must be an integer, got {}", name, value);
            return false;
        }
        field = static_cast<int>(value);
        return true;
    };
    if (name == "n_total") return as_count(p.n_total);
    if (name == "k_capacity") return as_count(p.k_capacity);
    if (name == "lambda") { p.lambda = value; return true; }
    if (name == "mu_h") { p.mu_h = value; return true; }
    if (name == "xi") { p.xi = value; return true; }
    if (name == "mu_r") { p.mu_r = value; return true; }
    if (name == "beta_h") { p.beta_h = value; return true; }
    if (name == "beta_w") { p.beta_w = value; return true; }
    error = fmt::format("unknown parameter \"{}\"", name);
    return false;
}

}  // namespace

bool is_sweepable_param(const std::string& name) {
    static const char* names[] = {"n_total", "k_capacity", "lambda", "mu_h",
                                  "xi",      "mu_r",       "beta_h", "beta_w"};
    for (const char* n : names)
        if (name == n) return true;
    return false;
}

int cmd_evaluate(const EvaluateArgs& args, std::ostream& out) {
    int exit_code = kExitOk;
    const auto cfg = load_validated(args.config_path, out, exit_code);
    if (!cfg) return exit_code;

    MetricsReport report;
    try {
        report = evaluate(cfg->params, cfg->costs, cfg->weights);
    } catch (const std::exception& e) {
        fmt::print(out, "{}\n", error_json("solver", e.what()));
        return kExitFailure;
    }

    std::string payload;
    if (args.format == "csv")
        payload = fmt::format("{}\n{}\n", kMetricsCsvHeader, metrics_csv_row(report));
    else
        payload = to_json_string(report) + "\n";
    fmt::print(out, "{}", payload);
    if (!args.out_dir.empty())
        write_file_atomic(join_path(args.out_dir, args.format == "csv" ? "metrics.csv"
                                                                       : "metrics.json"),
                          payload);
    return kExitOk;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
    int exit_code = kExitOk;
    const auto cfg = load_validated(args.config_path, out, exit_code);
    if (!cfg) return exit_code;

    if (!is_sweepable_param(args.param) || args.values.empty()) {
        fmt::print(out, "{}\n",
                   error_json("usage", fmt::format("invalid sweep parameter \"{}\" or empty "
                                                   "value list",
                                                   args.param)));
        return kExitUsage;
    }
    if (args.contrast_param &&
        (!is_sweepable_param(*args.contrast_param) || *args.contrast_param == args.param ||
         args.contrast_values.empty())) {
        fmt::print(out, "{}\n", error_json("usage", "invalid contrast specification"));
        return kExitUsage;
    }

    std::ostringstream csv;
    fmt::print(csv, "param,value{},{},error\n",
               args.contrast_param ? ",contrast_param,contrast_value" : "", kMetricsCsvHeader);

    const std::vector<double> contrast =
        args.contrast_param ? args.contrast_values : std::vector<double>{0.0};
    for (double cv : contrast) {
        for (double value : args.values) {
            SystemParams point = cfg->params;
            std::string error;
            bool ok = apply_param(point, args.param, value, error);
            if (ok && args.contrast_param)
                ok = apply_param(point, *args.contrast_param, cv, error);
            std::string row_metrics;
            if (ok) {
                const ValidationResult check = validate(point, cfg->costs, cfg->weights);
                if (!check.ok()) {
                    ok = false;
                    error = check.describe();
                }
            }
            if (ok) {
                try {
                    row_metrics = metrics_csv_row(evaluate(point, cfg->costs, cfg->weights));
                } catch (const std::exception& e) {
                    ok = false;
                    error = e.what();
                }
            }
            if (!ok) row_metrics = ",,,,,,,,,,,";
            if (args.contrast_param)
                fmt::print(csv, "{},{},{},{},{},{}\n", args.param, value, *args.contrast_param,
                           cv, row_metrics, ok ? "" : error);
            else
                fmt::print(csv, "{},{},{},{}\n", args.param, value, row_metrics,
                           ok ? "" : error);
        }
    }

    fmt::print(out, "{}", csv.str());
    if (!args.out_dir.empty()) write_file_atomic(join_path(args.out_dir, "sweep.csv"), csv.str());
    return kExitOk;
}

int cmd_optimize(const OptimizeArgs& args, std::ostream& out) {
    int exit_code = kExitOk;
    const auto cfg = load_validated(args.config_path, out, exit_code);
    if (!cfg) return exit_code;

    moea::RunConfig run;
    run.population = args.population;
    run.generations = args.generations;
    run.seed = args.seed;
    const moea::GeneBounds bounds;

    moea::RunResult result;
    moea::RandomSearchResult baseline;
    try {
        const moea::GeneEvaluator evaluator =
            moea::make_model_evaluator(cfg->params, cfg->costs, cfg->weights);
        result = moea::nsga2_run(evaluator, bounds, run);
        const std::int64_t budget =
            static_cast<std::int64_t>(run.population) * run.generations;
        baseline = moea::random_search(evaluator, bounds, budget, mix_seed(args.seed, 1000003));
    } catch (const std::exception& e) {
        fmt::print(out, "{}\n", error_json("solver", e.what()));
        return kExitFailure;
    }

    std::ostringstream front_csv;
    fmt::print(front_csv, "mu_r,beta_h,beta_w,total_cost,t_resp,rank,crowding\n");
    for (const moea::Individual& ind : result.front)
        fmt::print(front_csv, "{},{},{},{},{},{},{}\n", ind.genes[0], ind.genes[1], ind.genes[2],
                   ind.objectives[0], ind.objectives[1], ind.rank, ind.crowding);

    std::ostringstream history_csv;
    fmt::print(history_csv, "generation,hv,spacing,best_scalarized\n");
    for (const moea::GenerationStats& g : result.history)
        fmt::print(history_csv, "{},{},{},{}\n", g.generation, g.hv, g.spacing,
                   g.best_scalarized);

    const auto individual_json = [](const moea::Individual& ind) {
        return ordered_json{{"mu_r", ind.genes[0]},       {"beta_h", ind.genes[1]},
                            {"beta_w", ind.genes[2]},     {"total_cost", ind.objectives[0]},
                            {"t_resp", ind.objectives[1]}, {"scalarized", ind.scalarized}};
    };
    const std::string chosen_json = individual_json(result.chosen).dump(2);

    ordered_json baseline_json{
        {"nsga2_best_scalarized", result.chosen.scalarized},
        {"random_best_scalarized", baseline.best.scalarized},
        {"random_best", individual_json(baseline.best)},
        {"nsga2_evaluations", result.evaluator_calls},
        {"random_evaluations", baseline.evaluator_calls},
        {"nsga2_superior_or_equal",
         result.chosen.scalarized <= baseline.best.scalarized},
    };

    write_file_atomic(join_path(args.out_dir, "front.csv"), front_csv.str());
    write_file_atomic(join_path(args.out_dir, "history.csv"), history_csv.str());
    write_file_atomic(join_path(args.out_dir, "chosen.json"), chosen_json + "\n");
    write_file_atomic(join_path(args.out_dir, "baseline.json"), baseline_json.dump(2) + "\n");

    ordered_json summary{
        {"chosen", individual_json(result.chosen)},
        {"front_size", result.front.size()},
        {"generations", args.generations},
        {"population", args.population},
        {"seed", args.seed},
        {"hv_first", result.generation_zero.hv},
        {"hv_last", result.history.empty() ? 0.0 : result.history.back().hv},
        {"baseline", std::move(baseline_json)},
        {"out_dir", args.out_dir},
    };
    fmt::print(out, "{}\n", summary.dump(2));
    return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
    int exit_code = kExitOk;
    const auto cfg = load_validated(args.config_path, out, exit_code);
    if (!cfg) return exit_code;

    SimConfig sim_cfg;
    sim_cfg.horizon_ms = args.horizon_ms;
    sim_cfg.warmup_ms = args.warmup_ms;
    sim_cfg.seed = args.seed;
    sim_cfg.batch_count = args.batch_count;
    if (!(sim_cfg.horizon_ms > sim_cfg.effective_warmup()) || sim_cfg.batch_count < 2) {
        fmt::print(out, "{}\n",
                   error_json("validation", fmt::format("horizon {} must exceed warmup {} and "
                                                        "batch_count {} must be >= 2",
                                                        sim_cfg.horizon_ms,
                                                        sim_cfg.effective_warmup(),
                                                        sim_cfg.batch_count)));
        return kExitFailure;
    }

    try {
        SimReport sim;
        if (!args.trace_path.empty()) {
            std::ostringstream trace;
            fmt::print(trace, "time_ms,event_kind,h,w,r,q\n");
            sim = simulate(cfg->params, sim_cfg,
                           [&](double t, EventKind kind, const SystemState& s) {
                               fmt::print(trace, "{},{},{},{},{},{}\n", t, to_string(kind), s.h,
                                          s.w, s.r, s.q);
                           });
            write_file_atomic(args.trace_path, trace.str());
        } else {
            sim = simulate(cfg->params, sim_cfg);
        }
        const MetricsReport analytical = evaluate(cfg->params, cfg->costs, cfg->weights);
        const ComparisonReport comparison = compare(sim, analytical);

        ordered_json output{{"simulation", nlohmann::ordered_json::parse(to_json_string(sim))},
                            {"analytical",
                             nlohmann::ordered_json::parse(to_json_string(analytical))},
                            {"comparison",
                             nlohmann::ordered_json::parse(to_json_string(comparison))}};
        const std::string payload = output.dump(2) + "\n";
        fmt::print(out, "{}", payload);
        if (!args.out_dir.empty())
            write_file_atomic(join_path(args.out_dir, "simulate.json"), payload);
    } catch (const std::exception& e) {
        fmt::print(out, "{}\n", error_json("solver", e.what()));
        return kExitFailure;
    }
    return kExitOk;
}

int cmd_validate(const ValidateArgs& args, std::ostream& out) {
    const std::vector<CheckResult> results = run_validation_suite(args.inject_fault);
    bool all_ok = true;
    for (const CheckResult& check : results) {
        fmt::print(out, "[{}] {}{}\n", check.passed ? "PASS" : "FAIL", check.name,
                   check.detail.empty() ? "" : " - " + check.detail);
        all_ok = all_ok && check.passed;
    }
    fmt::print(out, "{}: {} of {} checks passed\n", all_ok ? "OK" : "FAILED",
               std::count_if(results.begin(), results.end(),
                             [](const CheckResult& c) { return c.passed; }),
               results.size());
    return all_ok ? kExitOk : kExitFailure;
}

}  // namespace pbftpool::cli
