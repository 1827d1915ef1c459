#include "tcsurv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tcsurv/errors.hpp"

namespace tcsurv {

using nlohmann::json;

namespace {

constexpr double kMinWeight = 1e-12;

std::vector<std::size_t> durations_of(const Dataset& ds) {
    std::vector<std::size_t> t;
    t.reserve(ds.size());
    for (const auto& r : ds.records) t.push_back(r.duration());
    return t;
}

void check_curves(const SurvivalCurves& curves, const Dataset& ds, std::size_t min_len) {
    if (curves.size() != ds.size()) throw PreconditionError("one survival curve per record required");
    for (const auto& c : curves) {
        if (c.size() < min_len) throw PreconditionError("survival curve too short");
    }
}

}  // namespace

double KmCurve::at(std::size_t k) const {
    if (values.empty()) return 1.0;
    return k < values.size() ? values[k] : values.back();
}

KmCurve kaplan_meier(const std::vector<std::size_t>& durations, const std::vector<bool>& censored) {
    if (durations.empty()) throw PreconditionError("kaplan_meier: empty input");
    if (durations.size() != censored.size()) {
        throw PreconditionError("kaplan_meier: durations and flags differ in length");
    }
    const std::size_t max_t = *std::max_element(durations.begin(), durations.end());
    std::vector<std::size_t> events(max_t + 1, 0);
    std::vector<std::size_t> exits(max_t + 1, 0);
    for (std::size_t i = 0; i < durations.size(); ++i) {
        if (durations[i] < 1) throw PreconditionError("kaplan_meier: durations must be >= 1");
        ++exits[durations[i]];
        if (!censored[i]) ++events[durations[i]];
    }
    KmCurve km;
    km.values.assign(max_t + 1, 1.0);
    std::size_t at_risk = durations.size();
    double s = 1.0;
    for (std::size_t k = 1; k <= max_t; ++k) {
        if (events[k] > 0) {
            s *= static_cast<double>(at_risk - events[k]) / static_cast<double>(at_risk);
        }
        km.values[k] = s;
        at_risk -= exits[k];
    }
    return km;
}

SurvivalCurves initial_state_survival(const HazardModel& model, const Dataset& ds) {
    SurvivalCurves curves;
    curves.reserve(ds.size());
    for (const auto& r : ds.records) {
        curves.push_back(model.survival_curve(r.states.front(), model.dims().horizon));
    }
    return curves;
}

ConcordanceResult concordance_index(const SurvivalCurves& curves, const Dataset& ds) {
    if (ds.empty()) throw PreconditionError("concordance_index: empty dataset");
    check_curves(curves, ds, 0);
    double score = 0.0;
    ConcordanceResult out;
    for (std::size_t j = 0; j < ds.size(); ++j) {
        const auto& rj = ds.records[j];
        if (rj.censored) continue;
        const std::size_t tj = rj.duration();
        const double sj = curves[j].at(tj);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            if (ds.records[i].duration() <= tj) continue;
            const double si = curves[i].at(tj);
            ++out.pairs;
            if (si > sj) {
                score += 1.0;
            } else if (si == sj) {
                score += 0.5;
            }
        }
    }
    if (out.pairs > 0) out.ci = score / static_cast<double>(out.pairs);
    return out;
}

ConcordanceResult concordance_index(const HazardModel& model, const Dataset& ds) {
    return concordance_index(initial_state_survival(model, ds), ds);
}

std::vector<double> brier_curve(const SurvivalCurves& curves, const Dataset& ds) {
    const std::size_t horizon = ds.horizon;
    check_curves(curves, ds, horizon);
    std::vector<double> bs(horizon, 0.0);
    if (ds.empty()) return bs;

    std::vector<bool> censoring_event;
    censoring_event.reserve(ds.size());
    for (const auto& r : ds.records) censoring_event.push_back(!r.censored);
    const KmCurve g = kaplan_meier(durations_of(ds), censoring_event);

    for (std::size_t k = 0; k < horizon; ++k) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto& r = ds.records[i];
            const std::size_t last = r.duration() - 1;
            const double s = curves[i][k];
            double weight;
            double err;
            if (!r.censored && last <= k) {
                weight = g.at(last);
                err = s * s;
            } else if (last > k || (r.censored && last == k)) {
                weight = g.at(k);
                err = (1.0 - s) * (1.0 - s);
            } else {
                ++count;  // censored before k: counted, contributes nothing
                continue;
            }
            if (weight < kMinWeight) continue;
            sum += err / weight;
            ++count;
        }
        bs[k] = count > 0 ? sum / static_cast<double>(count) : 0.0;
    }
    return bs;
}

std::vector<double> brier_curve(const HazardModel& model, const Dataset& ds) {
    return brier_curve(initial_state_survival(model, ds), ds);
}

double ibs(const std::vector<double>& bs_curve) {
    if (bs_curve.empty()) return 0.0;
    double s = 0.0;
    for (double v : bs_curve) s += v;
    return s / static_cast<double>(bs_curve.size());
}

EvalReport evaluate(const HazardModel& model, const Dataset& ds) {
    if (model.dims().horizon < ds.horizon) {
        throw PreconditionError("model horizon is shorter than the dataset horizon");
    }
    const auto curves = initial_state_survival(model, ds);
    EvalReport rep;
    const auto ci = concordance_index(curves, ds);
    rep.ci = ci.ci;
    rep.n_pairs_used = ci.pairs;
    rep.bs_curve = brier_curve(curves, ds);
    rep.ibs = ibs(rep.bs_curve);
    return rep;
}

json to_json(const EvalReport& report) {
    json j;
    j["ci"] = report.ci ? json(*report.ci) : json(nullptr);
    j["n_pairs_used"] = report.n_pairs_used;
    j["bs_curve"] = report.bs_curve;
    j["ibs"] = report.ibs;
    return j;
}

std::string bs_curve_csv(const std::vector<double>& bs_curve) {
    std::ostringstream out;
    out.precision(17);
    out << "k,bs\n";
    for (std::size_t k = 0; k < bs_curve.size(); ++k) out << k << ',' << bs_curve[k] << '\n';
    return out.str();
}

VariabilityResult variability_delta(const std::vector<std::vector<double>>& samples) {
    VariabilityResult out;
    for (const auto& entry : samples) {
        if (entry.size() < 2) throw PreconditionError("variability_delta needs >= 2 samples per entry");
        double mean = 0.0;
        for (double v : entry) mean += v;
        mean /= static_cast<double>(entry.size());
        if (mean <= 0.0 || mean >= 1.0) {
            ++out.excluded;
            continue;
        }
        double var = 0.0;
        for (double v : entry) var += (v - mean) * (v - mean);
        var /= static_cast<double>(entry.size());
        out.delta.push_back(std::sqrt(var) / (mean * (1.0 - mean)));
    }
    if (!out.delta.empty()) {
        double s = 0.0;
        for (double v : out.delta) s += v;
        out.mean = s / static_cast<double>(out.delta.size());
    }
    return out;
}

}  // namespace tcsurv
