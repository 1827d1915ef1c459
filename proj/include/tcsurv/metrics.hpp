#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcsurv/hazard_model.hpp"
#include "tcsurv/seqdata.hpp"

namespace tcsurv {

/// Product-limit estimate km(k) = P(duration > k) on the integer grid.
struct KmCurve {
    std::vector<double> values;  // values[k] for k = 0..max duration

    /// km(k); right-continuous, constant past the last grid point.
    double at(std::size_t k) const;
};

/// Kaplan-Meier over durations >= 1. At each time k with events,
/// km *= 1 - events(k) / at_risk(k), at_risk(k) = #{duration >= k}.
KmCurve kaplan_meier(const std::vector<std::size_t>& durations, const std::vector<bool>& censored);

/// Predicted survival curves S(0..H | x_0), one row per record. Any values
/// work for ranking metrics; Brier scores expect probabilities.
using SurvivalCurves = std::vector<std::vector<double>>;

SurvivalCurves initial_state_survival(const HazardModel& model, const Dataset& ds);

struct ConcordanceResult {
    std::optional<double> ci;  // absent when no comparable pair exists
    std::size_t pairs = 0;
};

/// Harrell-style CI over pairs (i, j) with t_i > t_j and j uncensored,
/// comparing S(t_j | x_0) of both subjects; ties count 1/2.
ConcordanceResult concordance_index(const SurvivalCurves& curves, const Dataset& ds);
ConcordanceResult concordance_index(const HazardModel& model, const Dataset& ds);

/// IPCW Brier score for k = 0..H-1.
///
/// A record with duration t has event index T = t - 1 when uncensored and is
/// known event-free through index t - 1 when censored. G is the Kaplan-Meier
/// curve of the censoring times (censored flags swapped), so G(s) estimates
/// P(still under observation at index s). Then
///
///   BS(k) = 1/n * sum_i [ S(k|x_0)^2 / G(T_i)      if uncensored and T_i <= k
///                       + (1 - S(k|x_0))^2 / G(k)  if known event-free past k ]
///
/// Terms whose G is below 1e-12 are dropped from the sum and from n; a k with
/// no remaining terms scores 0.
std::vector<double> brier_curve(const SurvivalCurves& curves, const Dataset& ds);
std::vector<double> brier_curve(const HazardModel& model, const Dataset& ds);

/// Mean of the curve; 0 for an empty curve.
double ibs(const std::vector<double>& bs_curve);

struct EvalReport {
    std::optional<double> ci;
    std::size_t n_pairs_used = 0;
    std::vector<double> bs_curve;
    double ibs = 0.0;
};

EvalReport evaluate(const HazardModel& model, const Dataset& ds);

nlohmann::json to_json(const EvalReport& report);
std::string bs_curve_csv(const std::vector<double>& bs_curve);

struct VariabilityResult {
    std::vector<double> delta;  // one per retained entry
    double mean = 0.0;
    std::size_t excluded = 0;   // entries whose mean hazard was 0 or 1
};

/// samples[e] holds the estimates of entry e across seeds. Per entry,
/// delta = population std / (mean * (1 - mean)).
VariabilityResult variability_delta(const std::vector<std::vector<double>>& samples);

}  // namespace tcsurv
