#include "stepmpc/pwa_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace stepmpc {

History History::zeros(int order, int channels) {
    History h;
    h.y_past.assign(order, 0.0);
    h.u_past.assign(channels, std::vector<std::uint8_t>(order, 0));
    return h;
}

void History::push(double y, std::span<const std::uint8_t> u_now) {
    if (u_now.size() != u_past.size())
        throw std::invalid_argument("History::push: channel count mismatch");
    if (!y_past.empty()) {
        y_past.pop_back();
        y_past.insert(y_past.begin(), y);
    }
    for (std::size_t j = 0; j < u_past.size(); ++j) {
        if (!u_past[j].empty()) {
            u_past[j].pop_back();
            u_past[j].insert(u_past[j].begin(), u_now[j]);
        }
    }
}

namespace {

bool all_finite(std::span<const double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

std::vector<std::string> validate_model(const PwaModel& model) {
    std::vector<std::string> report;
    auto add = [&](const std::string& msg) { report.push_back(msg); };

    if (model.order < 1) add("order must be a positive integer");
    if (model.channels < 1) add("channels must be a positive integer");
    if (model.sampling_minutes < 1) add("sampling_minutes must be a positive integer");
    if (model.submodels.empty()) add("submodels must be nonempty");

    for (std::size_t s = 0; s < model.submodels.size(); ++s) {
        const SubModel& sub = model.submodels[s];
        const std::string tag = "submodel " + std::to_string(s) + ": ";
        if (!std::isfinite(sub.a0)) add(tag + "a0 not finite");
        if (static_cast<int>(sub.a.size()) != model.order)
            add(tag + "a has " + std::to_string(sub.a.size()) + " entries, expected " +
                std::to_string(model.order));
        else if (!all_finite(sub.a))
            add(tag + "a has non-finite entries");
        if (static_cast<int>(sub.b.size()) != model.channels) {
            add(tag + "b has " + std::to_string(sub.b.size()) + " rows, expected " +
                std::to_string(model.channels));
        } else {
            for (std::size_t j = 0; j < sub.b.size(); ++j) {
                if (static_cast<int>(sub.b[j].size()) != model.order + 1) {
                    add(tag + "b row " + std::to_string(j) + " has " +
                        std::to_string(sub.b[j].size()) + " entries, expected " +
                        std::to_string(model.order + 1));
                } else if (!all_finite(sub.b[j])) {
                    add(tag + "b row " + std::to_string(j) + " has non-finite entries");
                }
            }
        }
    }

    const int n_sub = static_cast<int>(model.submodels.size());
    for (int d = 0; d < 2; ++d) {
        const int idx = model.switch_rule[d];
        if (idx < 0 || idx >= n_sub)
            add(std::string("switch_rule for ") + (d == 0 ? "weekday" : "weekend") +
                " points to sub-model " + std::to_string(idx) + ", have " +
                std::to_string(n_sub));
    }

    if (!(model.noise.sigma >= 0.0) || !std::isfinite(model.noise.sigma))
        add("noise sigma must be finite and nonnegative");
    if (!std::isfinite(model.noise.mu)) add("noise mu must be finite");
    for (std::size_t k = 0; k < model.noise.per_step_sigma.size(); ++k) {
        const double s = model.noise.per_step_sigma[k];
        if (!(s >= 0.0) || !std::isfinite(s)) {
            add("per_step_sigma entry " + std::to_string(k) +
                " must be finite and nonnegative");
            break;
        }
    }
    return report;
}

int submodel_for_day_type(const PwaModel& model, DayType day) {
    return model.switch_rule[static_cast<int>(day)];
}

int active_submodel(const PwaModel& model, std::chrono::year_month_day date) {
    const std::chrono::weekday wd{std::chrono::sys_days{date}};
    const DayType day = (wd == std::chrono::Saturday || wd == std::chrono::Sunday)
                            ? DayType::weekend
                            : DayType::weekday;
    return submodel_for_day_type(model, day);
}

double simulate_step(const SubModel& sub, const History& hist,
                     std::span<const std::uint8_t> u_now, double w) {
    const int n = static_cast<int>(sub.a.size());
    const int m = static_cast<int>(sub.b.size());
    if (static_cast<int>(hist.y_past.size()) != n ||
        static_cast<int>(hist.u_past.size()) != m)
        throw std::invalid_argument("simulate_step: history does not match sub-model");
    if (static_cast<int>(u_now.size()) != m)
        throw std::invalid_argument("simulate_step: wrong number of input channels");
    for (int j = 0; j < m; ++j) {
        if (u_now[j] > 1)
            throw std::invalid_argument("simulate_step: inputs must be 0 or 1");
        if (static_cast<int>(hist.u_past[j].size()) != n)
            throw std::invalid_argument("simulate_step: input history length mismatch");
        for (int i = 0; i < n; ++i)
            if (hist.u_past[j][i] > 1)
                throw std::invalid_argument("simulate_step: history inputs must be 0 or 1");
    }

    // Accumulate in the order the model equation is written: intercept,
    // output lags, then per message type the lag-0..n input terms, then noise.
    double y = sub.a0;
    for (int i = 0; i < n; ++i) y += sub.a[i] * hist.y_past[i];
    for (int j = 0; j < m; ++j) {
        if (u_now[j]) y += sub.b[j][0];
        for (int i = 1; i <= n; ++i)
            if (hist.u_past[j][i - 1]) y += sub.b[j][i];
    }
    return y + w;
}

std::vector<double> simulate_trajectory(const PwaModel& model, int regime,
                                        History hist, const Schedule& schedule,
                                        std::span<const double> noise) {
    if (regime < 0 || regime >= static_cast<int>(model.submodels.size()))
        throw std::invalid_argument("simulate_trajectory: regime out of range");
    if (schedule.steps != static_cast<int>(noise.size()))
        throw std::invalid_argument("simulate_trajectory: schedule/noise length mismatch");
    if (schedule.channels != model.channels)
        throw std::invalid_argument("simulate_trajectory: channel count mismatch");

    const SubModel& sub = model.submodels[regime];
    std::vector<double> out;
    out.reserve(schedule.steps);
    std::vector<std::uint8_t> u_now(model.channels);
    for (int k = 0; k < schedule.steps; ++k) {
        for (int j = 0; j < model.channels; ++j) u_now[j] = schedule.at(k, j);
        const double y = simulate_step(sub, hist, u_now, noise[k]);
        out.push_back(y);
        hist.push(y, u_now);
    }
    return out;
}

namespace {

PwaModel model_from_json(const nlohmann::json& j) {
    PwaModel model;
    model.order = j.at("order").get<int>();
    model.channels = j.at("channels").get<int>();
    model.sampling_minutes = j.at("sampling_minutes").get<int>();
    for (const auto& js : j.at("submodels")) {
        SubModel sub;
        sub.a0 = js.at("a0").get<double>();
        sub.a = js.at("a").get<std::vector<double>>();
        sub.b = js.at("b").get<std::vector<std::vector<double>>>();
        model.submodels.push_back(std::move(sub));
    }
    const auto& sw = j.at("switch_rule");
    model.switch_rule[static_cast<int>(DayType::weekday)] = sw.at("weekday").get<int>();
    model.switch_rule[static_cast<int>(DayType::weekend)] = sw.at("weekend").get<int>();
    const auto& jn = j.at("noise");
    model.noise.mu = jn.at("mu").get<double>();
    model.noise.sigma = jn.at("sigma").get<double>();
    if (jn.contains("per_step_sigma"))
        model.noise.per_step_sigma = jn.at("per_step_sigma").get<std::vector<double>>();
    return model;
}

}  // namespace

PwaModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model file " + path.string() + ": " + e.what());
    }
    PwaModel model;
    try {
        model = model_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("model file " + path.string() + ": " + e.what());
    }
    const auto report = validate_model(model);
    if (!report.empty()) {
        std::ostringstream msg;
        msg << "model file " << path.string() << " is invalid:";
        for (const auto& r : report) msg << "\n  - " << r;
        throw std::runtime_error(msg.str());
    }
    return model;
}

PwaModel reference_weekday_model() {
    PwaModel model;
    model.order = 5;
    model.channels = 3;
    model.sampling_minutes = 15;
    SubModel weekday;
    weekday.a0 = 80.51;
    weekday.a = {-0.0052, 0.0043, 0.0421, -0.0674, 0.4607};
    weekday.b = {
        {-20.418, 33.621, -9.370, 9.534, 9.417, 4.002},
        {2.383, -4.976, 5.695, 25.936, -1.737, 19.616},
        {-14.345, 14.103, 25.980, 32.900, -17.978, -61.739},
    };
    model.submodels.push_back(std::move(weekday));
    // Weekend coefficients were never identified; both day types use the
    // weekday sub-model unless a config overrides the switch rule.
    model.switch_rule[static_cast<int>(DayType::weekday)] = 0;
    model.switch_rule[static_cast<int>(DayType::weekend)] = 0;
    model.noise.mu = -0.0155;
    model.noise.sigma = 268.679;
    return model;
}

}  // namespace stepmpc
