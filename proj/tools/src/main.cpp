#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using namespace pbftpool::cli;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pooled-PBFT capacity planning: analytical model, simulation and tuning"};
    app.require_subcommand(1);

    EvaluateArgs eval_args;
    auto* eval_cmd = app.add_subcommand("evaluate", "Solve the model once and print metrics");
    eval_cmd->add_option("--config", eval_args.config_path, "Model config JSON")->required();
    eval_cmd->add_option("--out", eval_args.out_dir, "Directory for artifacts");
    eval_cmd->add_option("--format", eval_args.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));

    SweepArgs sweep_args;
    std::string contrast_spec;
    auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate over a grid of one parameter");
    sweep_cmd->add_option("--config", sweep_args.config_path, "Model config JSON")->required();
    sweep_cmd->add_option("--param", sweep_args.param, "Swept parameter name")->required();
    sweep_cmd->add_option("--values", sweep_args.values, "Comma-separated values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--contrast", contrast_spec,
                          "Second parameter as name=v1,v2,v3 (one curve per value)");
    sweep_cmd->add_option("--out", sweep_args.out_dir, "Directory for sweep.csv");

    OptimizeArgs opt_args;
    auto* opt_cmd = app.add_subcommand("optimize", "Tune (mu_r, beta_h, beta_w)");
    opt_cmd->add_option("--config", opt_args.config_path, "Model config JSON")->required();
    opt_cmd->add_option("--out", opt_args.out_dir, "Directory for run artifacts");
    opt_cmd->add_option("--pop", opt_args.population, "Population size");
    opt_cmd->add_option("--generations", opt_args.generations, "Generation count");
    opt_cmd->add_option("--seed", opt_args.seed, "Random seed");

    SimulateArgs sim_args;
    auto* sim_cmd = app.add_subcommand("simulate", "Cross-validate against the simulator");
    sim_cmd->add_option("--config", sim_args.config_path, "Model config JSON")->required();
    sim_cmd->add_option("--out", sim_args.out_dir, "Directory for simulate.json");
    sim_cmd->add_option("--horizon", sim_args.horizon_ms, "Simulated time, ms");
    sim_cmd->add_option("--warmup", sim_args.warmup_ms, "Discarded prefix, ms");
    sim_cmd->add_option("--seed", sim_args.seed, "Random seed");
    sim_cmd->add_option("--batches", sim_args.batch_count, "Batch count for CIs");
    sim_cmd->add_option("--trace", sim_args.trace_path, "Event-trace CSV path");

    ValidateArgs validate_args;
    auto* validate_cmd = app.add_subcommand("validate", "Run the built-in oracle suite");
    validate_cmd->add_flag("--inject-fault", validate_args.inject_fault,
                           "Test hook: flip one simulator guard (must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }

    if (sweep_cmd->parsed() && !contrast_spec.empty()) {
        const auto eq = contrast_spec.find('=');
        if (eq == std::string::npos) {
            std::cerr << "--contrast expects name=v1,v2,...\n";
            return kExitUsage;
        }
        sweep_args.contrast_param = contrast_spec.substr(0, eq);
        std::string rest = contrast_spec.substr(eq + 1);
        size_t pos = 0;
        try {
            while (pos < rest.size()) {
                size_t used = 0;
                sweep_args.contrast_values.push_back(std::stod(rest.substr(pos), &used));
                pos += used;
                if (pos < rest.size() && rest[pos] == ',') ++pos;
            }
        } catch (const std::exception&) {
            std::cerr << "--contrast expects numeric values\n";
            return kExitUsage;
        }
        if (sweep_args.contrast_values.empty()) {
            std::cerr << "--contrast expects at least one value\n";
            return kExitUsage;
        }
    }

    if (eval_cmd->parsed()) return cmd_evaluate(eval_args, std::cout);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, std::cout);
    if (opt_cmd->parsed()) return cmd_optimize(opt_args, std::cout);
    if (sim_cmd->parsed()) return cmd_simulate(sim_args, std::cout);
    if (validate_cmd->parsed()) return cmd_validate(validate_args, std::cout);
    return kExitUsage;
}
