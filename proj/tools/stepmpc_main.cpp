#include <CLI11.hpp>

#include "stepmpc/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stepmpc: stochastic shrinking-horizon MPC for activity messaging"};
    app.require_subcommand(1);

    stepmpc::RunOptions run_opts;
    std::string opt_config, opt_scenario, opt_model, opt_out;
    std::uint64_t opt_seed = 0;
    int opt_n = 0, opt_alpha = 0;
    double opt_beta = 0.0, opt_goal = 0.0;

    auto* run = app.add_subcommand("run", "run one intervention window experiment");
    auto* f_config = run->add_option("--config", opt_config, "JSON config file");
    auto* f_scenario =
        run->add_option("--scenario", opt_scenario, "preset: regular|low|high|custom")
            ->check(CLI::IsMember({"regular", "low", "high", "custom"}));
    auto* f_model = run->add_option("--model", opt_model, "model JSON file");
    auto* f_seed = run->add_option("--seed", opt_seed, "master seed");
    auto* f_n = run->add_option("--n-scenarios", opt_n, "scenarios per solve");
    auto* f_alpha = run->add_option("--alpha", opt_alpha, "max messages per window");
    auto* f_beta = run->add_option("--beta", opt_beta, "cost budget");
    auto* f_goal = run->add_option("--goal", opt_goal, "step-count goal");
    auto* f_out = run->add_option("--out", opt_out, "output directory");
    run->add_flag("--dump-scenarios", run_opts.dump_scenarios,
                  "write per-scenario thresholds to scenarios.csv");

    std::string validate_model_path;
    auto* validate = app.add_subcommand("validate", "validate a model file");
    validate->add_option("--model", validate_model_path, "model JSON file")->required();

    std::string goal_history_path;
    auto* goal = app.add_subcommand("goal",
                                    "compute the goal from a daily-totals history CSV");
    goal->add_option("--history", goal_history_path, "history CSV")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        if (*f_config) run_opts.config_path = opt_config;
        if (*f_scenario) run_opts.scenario = opt_scenario;
        if (*f_model) run_opts.model_path = opt_model;
        if (*f_seed) run_opts.seed = opt_seed;
        if (*f_n) run_opts.n_scenarios = opt_n;
        if (*f_alpha) run_opts.alpha = opt_alpha;
        if (*f_beta) run_opts.beta = opt_beta;
        if (*f_goal) run_opts.goal = opt_goal;
        if (*f_out) run_opts.out_dir = opt_out;
        return stepmpc::cmd_run(run_opts);
    }
    if (validate->parsed()) return stepmpc::cmd_validate(validate_model_path);
    return stepmpc::cmd_goal(goal_history_path);
}
