#include "stepmpc/experiment.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "stepmpc/rng.hpp"

namespace stepmpc {

namespace {

// Stream tag separating measurement draws from the per-step scenario fans.
constexpr std::uint64_t kMeasurementStream = 0x4d454153;  // "MEAS"

nlohmann::json parse_json_file(const std::filesystem::path& path,
                               const char* what) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(std::string("cannot open ") + what + ": " + path.string());
    try {
        nlohmann::json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string(what) + " " + path.string() + ": " + e.what());
    }
}

std::string clock_label(int minutes_of_day) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%02d:%02d", (minutes_of_day / 60) % 24,
                  minutes_of_day % 60);
    return buf;
}

}  // namespace

std::string fmt_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void apply_preset(ExperimentConfig& config, const std::string& name) {
    if (name == "regular") {
        config.multiplier = 1.0;
    } else if (name == "low") {
        config.multiplier = 0.3;
    } else if (name == "high") {
        config.multiplier = 1.5;
    } else if (name != "custom") {
        throw ConfigError("unknown scenario preset: " + name);
    }
    config.scenario = name;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    const nlohmann::json j = parse_json_file(path, "config file");
    ExperimentConfig cfg;
    try {
        if (j.contains("model")) {
            const auto& jm = j.at("model");
            if (jm.contains("path")) cfg.model_path = jm.at("path").get<std::string>();
            if (jm.contains("day_type")) {
                const auto d = jm.at("day_type").get<std::string>();
                if (d == "weekday")
                    cfg.day_type = DayType::weekday;
                else if (d == "weekend")
                    cfg.day_type = DayType::weekend;
                else
                    throw ConfigError("model.day_type must be weekday or weekend");
            }
        }
        if (j.contains("constraints")) {
            const auto& jc = j.at("constraints");
            if (jc.contains("alpha")) cfg.alpha = jc.at("alpha").get<int>();
            if (jc.contains("beta") && !jc.at("beta").is_null())
                cfg.beta = jc.at("beta").get<double>();
            if (jc.contains("spacing_steps"))
                cfg.spacing_steps = jc.at("spacing_steps").get<int>();
        }
        if (j.contains("costs")) {
            const auto& jc = j.at("costs");
            if (jc.contains("c_time")) {
                cfg.c_time_start = jc.at("c_time").at("start").get<double>();
                cfg.c_time_end = jc.at("c_time").at("end").get<double>();
            }
            if (jc.contains("hourly_averages"))
                cfg.hourly_averages =
                    jc.at("hourly_averages").get<std::vector<double>>();
        }
        if (j.contains("mpc")) {
            const auto& jm = j.at("mpc");
            if (jm.contains("n_scenarios"))
                cfg.n_scenarios = jm.at("n_scenarios").get<int>();
            if (jm.contains("seed")) cfg.seed = jm.at("seed").get<std::uint64_t>();
            if (jm.contains("window_steps"))
                cfg.window_steps = jm.at("window_steps").get<int>();
            if (jm.contains("window_start_minutes"))
                cfg.window_start_minutes = jm.at("window_start_minutes").get<int>();
            if (jm.contains("goal") && !jm.at("goal").is_null())
                cfg.goal = jm.at("goal").get<double>();
            if (jm.contains("goal_increment"))
                cfg.goal_increment = jm.at("goal_increment").get<double>();
            if (jm.contains("goal_sum_from"))
                cfg.goal_sum_from = jm.at("goal_sum_from").get<int>();
            if (jm.contains("decide_at_terminal"))
                cfg.decide_at_terminal = jm.at("decide_at_terminal").get<bool>();
            if (jm.contains("solver")) {
                const auto s = jm.at("solver").get<std::string>();
                if (s == "fast_path")
                    cfg.solver = SolverKind::shared_gain_fast_path;
                else if (s == "branch_and_bound")
                    cfg.solver = SolverKind::branch_and_bound;
                else
                    throw ConfigError("mpc.solver must be fast_path or branch_and_bound");
            }
        }
        if (j.contains("experiment")) {
            const auto& je = j.at("experiment");
            if (je.contains("scenario"))
                apply_preset(cfg, je.at("scenario").get<std::string>());
            if (je.contains("mu_window"))
                cfg.mu_window = je.at("mu_window").get<double>();
            if (je.contains("sigma_window"))
                cfg.sigma_window = je.at("sigma_window").get<double>();
            if (je.contains("multiplier"))
                cfg.multiplier = je.at("multiplier").get<double>();
            if (je.contains("history") && !je.at("history").is_null())
                cfg.history_path = je.at("history").get<std::string>();
            if (je.contains("out_dir")) cfg.out_dir = je.at("out_dir").get<std::string>();
            if (je.contains("dump_scenarios"))
                cfg.dump_scenarios = je.at("dump_scenarios").get<bool>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path.string() + ": " + e.what());
    }
    return cfg;
}

std::vector<double> generate_measurements(double mu, double sigma, double multiplier,
                                          int steps, std::uint64_t seed) {
    if (steps < 0) throw std::invalid_argument("generate_measurements: steps < 0");
    GaussianSampler g(seed);
    std::vector<double> out;
    out.reserve(steps);
    for (int k = 0; k < steps; ++k)
        out.push_back(std::max(0.0, g.next(multiplier * mu, sigma)));
    return out;
}

PwaModel load_experiment_model(const ExperimentConfig& config) {
    if (config.model_path.empty()) return reference_weekday_model();
    try {
        return load_model(config.model_path);
    } catch (const std::exception& e) {
        throw ModelError(e.what());
    }
}

std::vector<double> read_history_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open history file: " + path.string());
    std::vector<double> totals;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            totals.push_back(std::stod(line));
        } catch (const std::exception&) {
            if (first) {
                first = false;
                continue;  // header line
            }
            throw ConfigError("history file " + path.string() +
                              ": cannot parse line '" + line + "'");
        }
        first = false;
    }
    if (totals.empty())
        throw ConfigError("history file " + path.string() + " has no values");
    return totals;
}

MpcConfig build_mpc_config(const ExperimentConfig& config, const PwaModel& model) {
    if (config.multiplier <= 0.0) throw ConfigError("multiplier must be positive");
    if (config.sigma_window < 0.0) throw ConfigError("sigma_window must be >= 0");
    if (config.window_steps < 0) throw ConfigError("window_steps must be >= 0");
    if (config.n_scenarios < 1) throw ConfigError("n_scenarios must be >= 1");
    if (config.alpha < 0 || config.alpha > config.window_steps)
        throw ConfigError("alpha must lie in [0, window_steps]");
    if (config.spacing_steps < 1) throw ConfigError("spacing_steps must be >= 1");
    if (60 % model.sampling_minutes != 0)
        throw ConfigError("sampling period must divide one hour");
    const int steps_per_hour = 60 / model.sampling_minutes;
    if (config.window_steps % steps_per_hour != 0)
        throw ConfigError("window_steps must cover whole hours");
    const int hours = config.window_steps / steps_per_hour;

    std::vector<double> hourly = config.hourly_averages;
    if (hourly.empty()) hourly.assign(hours, 1.0);

    MpcConfig mpc;
    mpc.model = model;
    mpc.regime = submodel_for_day_type(model, config.day_type);
    try {
        mpc.costs = build_cost_profile(hourly, config.window_steps, steps_per_hour,
                                       config.c_time_start, config.c_time_end);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    mpc.cons.alpha = config.alpha;
    mpc.cons.beta = config.beta.value_or(default_beta(config.alpha, mpc.costs));
    mpc.cons.spacing_steps = config.spacing_steps;
    mpc.cons.window_len = config.window_steps;

    if (config.history_path) {
        const auto totals = read_history_csv(*config.history_path);
        mpc.goal = compute_goal(totals, config.goal_increment);
    } else {
        mpc.goal = config.goal;
    }
    if (!std::isfinite(mpc.goal)) throw ConfigError("goal must be finite");
    if (config.goal_sum_from < 0 || config.goal_sum_from > config.window_steps)
        throw ConfigError("goal_sum_from must lie in [0, window_steps]");
    mpc.goal_sum_from = config.goal_sum_from;

    mpc.n_scenarios = config.n_scenarios;
    mpc.seed = config.seed;
    mpc.decide_at_terminal = config.decide_at_terminal;
    mpc.solver = config.solver;
    mpc.record_thetas = config.dump_scenarios;
    return mpc;
}

RunLog simulate_experiment(const ExperimentConfig& config) {
    const PwaModel model = load_experiment_model(config);
    const MpcConfig mpc = build_mpc_config(config, model);
    const auto measurements = generate_measurements(
        config.mu_window, config.sigma_window, config.multiplier, config.window_steps,
        derive_seed(config.seed, kMeasurementStream));
    return run_window(mpc, [&](int k) { return measurements[k]; });
}

namespace {

void write_artifacts(const ExperimentConfig& config, const MpcConfig& mpc,
                     const RunLog& log) {
    namespace fs = std::filesystem;
    const fs::path dir(config.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output dir: " + dir.string());

    const int sampling = mpc.model.sampling_minutes;
    {
        std::ofstream csv(dir / "runlog.csv");
        if (!csv) throw std::runtime_error("cannot write runlog.csv");
        csv << "step,clock,measured_steps,message_type,prob_estimate,messages_used,"
               "cost_used,nodes\n";
        for (const auto& rec : log.steps) {
            csv << (rec.step + 1) << ','
                << clock_label(config.window_start_minutes + rec.step * sampling) << ','
                << fmt_double(rec.measurement) << ',' << rec.message_type << ','
                << fmt_double(rec.prob_estimate) << ',' << rec.messages_used << ','
                << fmt_double(rec.cost_used) << ',' << rec.node_count << '\n';
        }
    }
    {
        std::ofstream csv(dir / "prob_trace.csv");
        if (!csv) throw std::runtime_error("cannot write prob_trace.csv");
        csv << "step,prob_estimate\n";
        for (const auto& rec : log.steps)
            csv << (rec.step + 1) << ',' << fmt_double(rec.prob_estimate) << '\n';
    }
    if (config.dump_scenarios) {
        std::ofstream csv(dir / "scenarios.csv");
        if (!csv) throw std::runtime_error("cannot write scenarios.csv");
        csv << "step,scenario,theta\n";
        for (const auto& rec : log.steps)
            for (std::size_t s = 0; s < rec.thetas.size(); ++s)
                csv << (rec.step + 1) << ',' << s << ',' << fmt_double(rec.thetas[s])
                    << '\n';
    }
    {
        nlohmann::ordered_json j;
        j["scenario"] = config.scenario;
        j["seed"] = config.seed;
        j["goal"] = mpc.goal;
        j["alpha"] = mpc.cons.alpha;
        j["beta"] = mpc.cons.beta;
        j["spacing_steps"] = mpc.cons.spacing_steps;
        j["n_scenarios"] = mpc.n_scenarios;
        j["window_steps"] = mpc.cons.window_len;
        j["total_measured_steps"] = log.total_measured;
        j["goal_attained"] = log.total_measured >= mpc.goal;
        j["messages_total"] = log.total_messages;
        j["messages_by_type"] = log.messages_by_type;
        j["total_cost"] = log.total_cost;
        j["final_prob_estimate"] = log.final_prob_estimate;
        std::ofstream out(dir / "summary.json");
        if (!out) throw std::runtime_error("cannot write summary.json");
        out << j.dump(2) << '\n';
    }
}

}  // namespace

RunLog run_experiment(const ExperimentConfig& config) {
    const PwaModel model = load_experiment_model(config);
    const MpcConfig mpc = build_mpc_config(config, model);
    const auto measurements = generate_measurements(
        config.mu_window, config.sigma_window, config.multiplier, config.window_steps,
        derive_seed(config.seed, kMeasurementStream));
    const RunLog log = run_window(mpc, [&](int k) { return measurements[k]; });
    write_artifacts(config, mpc, log);
    return log;
}

int cmd_run(const RunOptions& options) {
    try {
        ExperimentConfig cfg;
        if (options.config_path) cfg = load_experiment_config(*options.config_path);
        if (options.scenario) apply_preset(cfg, *options.scenario);
        if (options.model_path) cfg.model_path = *options.model_path;
        if (options.seed) cfg.seed = *options.seed;
        if (options.n_scenarios) cfg.n_scenarios = *options.n_scenarios;
        if (options.alpha) cfg.alpha = *options.alpha;
        if (options.beta) cfg.beta = *options.beta;
        if (options.goal) cfg.goal = *options.goal;
        if (options.out_dir) cfg.out_dir = *options.out_dir;
        if (options.dump_scenarios) cfg.dump_scenarios = true;

        const RunLog log = run_experiment(cfg);
        std::cout << "scenario=" << cfg.scenario << " seed=" << cfg.seed
                  << " messages=" << log.total_messages
                  << " final_prob=" << fmt_double(log.final_prob_estimate)
                  << " out=" << cfg.out_dir << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}

int cmd_validate(const std::string& model_path) {
    try {
        const PwaModel model = load_model(model_path);
        const auto report = validate_model(model);
        if (report.empty()) {
            std::cout << "OK: " << model_path << " (" << model.submodels.size()
                      << " sub-model(s), order " << model.order << ", "
                      << model.channels << " message types)\n";
            return 0;
        }
        for (const auto& r : report) std::cerr << "violation: " << r << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 3;
    }
}

int cmd_goal(const std::string& history_path) {
    try {
        const auto totals = read_history_csv(history_path);
        std::cout << fmt_double(compute_goal(totals)) << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}

}  // namespace stepmpc
