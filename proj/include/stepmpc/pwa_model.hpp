#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stepmpc/schedule.hpp"

namespace stepmpc {

/// One affine sub-model of the switched system:
///   y_k = a0 + sum_i a[i-1]*y_{k-i} + sum_j sum_i b[j][i]*u^j_{k-i} + w_k
/// with i = 0..n input lags (b[j][0] multiplies the current input).
struct SubModel {
    double a0 = 0.0;
    std::vector<double> a;               // autoregressive coefficients, size n
    std::vector<std::vector<double>> b;  // b[j][i], m rows of n+1 entries
};

/// Gaussian process noise. `per_step_sigma`, when nonempty, gives one
/// standard deviation per window step and overrides `sigma`; the shipped
/// reference model uses the constant pair only.
struct NoiseModel {
    double mu = 0.0;
    double sigma = 0.0;
    std::vector<double> per_step_sigma;

    double sigma_at(int step) const {
        if (per_step_sigma.empty()) return sigma;
        if (step < 0 || step >= static_cast<int>(per_step_sigma.size()))
            throw std::out_of_range("NoiseModel: step outside per_step_sigma");
        return per_step_sigma[step];
    }
};

enum class DayType { weekday = 0, weekend = 1 };

/// Switched affine autoregressive step-count model. The active sub-model
/// is selected by calendar day type and is constant within a day.
struct PwaModel {
    int order = 0;             // n
    int channels = 0;          // m message types
    int sampling_minutes = 0;  // length of one step
    std::vector<SubModel> submodels;
    int switch_rule[2] = {0, 0};  // indexed by DayType
    NoiseModel noise;
};

/// Rolling lag window: y_past[0] = y_{k-1}, ..., y_past[n-1] = y_{k-n};
/// u_past[j][i] = u^j_{k-1-i}. Inputs are 0/1.
struct History {
    std::vector<double> y_past;
    std::vector<std::vector<std::uint8_t>> u_past;

    static History zeros(int order, int channels);

    /// Advance one step: the freshly realized output and applied input
    /// become lag 1, the oldest lags fall off.
    void push(double y, std::span<const std::uint8_t> u_now);
};

/// Returns a list of invariant violations; empty means the model is valid.
std::vector<std::string> validate_model(const PwaModel& model);

/// Sub-model index active on `date` (Mon-Fri -> weekday, Sat/Sun -> weekend).
int active_submodel(const PwaModel& model, std::chrono::year_month_day date);

int submodel_for_day_type(const PwaModel& model, DayType day);

/// One exact affine evaluation; no clamping. Throws on non-binary input or
/// a history that does not match the sub-model dimensions.
double simulate_step(const SubModel& sub, const History& hist,
                     std::span<const std::uint8_t> u_now, double w);

/// Iterates simulate_step over `schedule.steps` steps, feeding outputs and
/// inputs back into the rolling history. `noise` must have one entry per
/// step. The regime is fixed over the window.
std::vector<double> simulate_trajectory(const PwaModel& model, int regime,
                                        History hist, const Schedule& schedule,
                                        std::span<const double> noise);

/// Load a model from the JSON schema
/// {order, channels, sampling_minutes, submodels:[{a0,a[],b[][]}],
///  switch_rule:{weekday,weekend}, noise:{mu,sigma[,per_step_sigma]}}.
/// Throws std::runtime_error on IO/parse/validation failure.
PwaModel load_model(const std::filesystem::path& path);

/// The identified weekday model shipped with the library (also available
/// as data/weekday_reference.json). Weekends map to the same sub-model.
PwaModel reference_weekday_model();

}  // namespace stepmpc
