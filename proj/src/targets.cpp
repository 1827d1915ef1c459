#include "tcsurv/targets.hpp"

#include <cmath>

#include "tcsurv/errors.hpp"

namespace tcsurv {

namespace {

double event_indicator(const SequenceRecord& seq, std::size_t index) {
    return (!seq.censored && index + 1 == seq.duration()) ? 1.0 : 0.0;
}

void check_inputs(const SequenceRecord& seq, const HazardMatrix& m, double lambda,
                  const std::vector<std::size_t>& windows) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw PreconditionError("lambda must lie in [0, 1]");
    }
    if (m.landmarks() != seq.duration() || m.survival.size() != seq.duration()) {
        throw PreconditionError("target outputs for '" + seq.id + "' have wrong landmark count");
    }
    for (std::size_t l = 0; l < windows.size(); ++l) {
        if (m.hazard[l].size() < windows[l] + 1 || m.survival[l].size() < windows[l] + 1) {
            throw PreconditionError("target outputs for '" + seq.id + "' do not cover landmark " +
                                    std::to_string(l));
        }
    }
}

TargetTable empty_table(const std::vector<std::size_t>& windows, double lambda, TableMode mode) {
    TargetTable tab;
    tab.lambda = lambda;
    tab.mode = mode;
    tab.ytilde.reserve(windows.size());
    tab.wtilde.reserve(windows.size());
    for (std::size_t w : windows) {
        tab.ytilde.emplace_back(w + 1, 0.0);
        tab.wtilde.emplace_back(w + 1, 0.0);
    }
    return tab;
}

}  // namespace

std::vector<std::size_t> table_windows(std::size_t duration, std::size_t horizon, TableMode mode) {
    if (duration == 0) throw PreconditionError("sequence duration must be >= 1");
    if (mode == TableMode::Extended && duration > horizon) {
        throw PreconditionError("extended tables need duration <= horizon");
    }
    const std::size_t last = (mode == TableMode::WithinWindow ? duration : horizon) - 1;
    std::vector<std::size_t> w(duration);
    for (std::size_t l = 0; l < duration; ++l) w[l] = last - l;
    return w;
}

TargetTable hard_labels(const SequenceRecord& seq) {
    const std::size_t t = seq.duration();
    auto tab = empty_table(table_windows(t, t, TableMode::WithinWindow), 1.0,
                           TableMode::WithinWindow);
    for (std::size_t l = 0; l < t; ++l) {
        for (std::size_t d = 0; d < tab.ytilde[l].size(); ++d) {
            tab.ytilde[l][d] = event_indicator(seq, l + d);
            tab.wtilde[l][d] = 1.0;
        }
    }
    return tab;
}

TargetTable initial_state_labels(const SequenceRecord& seq) {
    auto tab = hard_labels(seq);
    for (std::size_t l = 1; l < tab.landmarks(); ++l) {
        std::fill(tab.wtilde[l].begin() + 1, tab.wtilde[l].end(), 0.0);
    }
    return tab;
}

TargetTable pseudo_table(const SequenceRecord& seq, const HazardMatrix& target_outputs,
                         double lambda, TableMode mode, std::size_t horizon) {
    const std::size_t t = seq.duration();
    const auto windows = table_windows(t, horizon, mode);
    check_inputs(seq, target_outputs, lambda, windows);
    auto tab = empty_table(windows, lambda, mode);
    const auto& h = target_outputs.hazard;
    const auto& s = target_outputs.survival;

    const std::size_t last = t - 1;
    const double y_last = event_indicator(seq, last);
    for (std::size_t d = 0; d <= windows[last]; ++d) {
        tab.ytilde[last][d] = y_last;
        tab.wtilde[last][d] = (d == 0) ? 1.0 : (seq.censored ? s[last][d - 1] : 0.0);
    }

    for (std::size_t l = last; l-- > 0;) {
        const std::size_t next = l + 1;
        tab.ytilde[l][0] = 0.0;
        tab.wtilde[l][0] = 1.0;
        for (std::size_t d = 1; d <= windows[l]; ++d) {
            const double boot_h = (d == 1) ? event_indicator(seq, next) : h[next][d - 1];
            const double boot_s = (d == 1) ? 1.0 : s[next][d - 1];
            tab.ytilde[l][d] = lambda * tab.ytilde[next][d - 1] + (1.0 - lambda) * boot_h;
            tab.wtilde[l][d] = lambda * tab.wtilde[next][d - 1] + (1.0 - lambda) * boot_s;
        }
    }
    return tab;
}

TargetTable pseudo_table_oracle(const SequenceRecord& seq, const HazardMatrix& target_outputs,
                                double lambda, TableMode mode, std::size_t horizon) {
    const std::size_t t = seq.duration();
    const auto windows = table_windows(t, horizon, mode);
    check_inputs(seq, target_outputs, lambda, windows);
    auto tab = empty_table(windows, lambda, mode);
    const auto& h = target_outputs.hazard;
    const auto& s = target_outputs.survival;
    const std::size_t last = t - 1;

    auto y = [&](std::size_t j) { return event_indicator(seq, j); };
    auto boot_h = [&](std::size_t j, std::size_t k) { return k == 0 ? y(j) : h[j][k]; };
    auto boot_s = [&](std::size_t j, std::size_t k) { return k == 0 ? 1.0 : s[j][k]; };

    for (std::size_t l = 0; l < t; ++l) {
        for (std::size_t d = 0; d <= windows[l]; ++d) {
            // boundary reached after `steps` moves along the chain
            std::size_t steps = 0;
            while (d - steps > 0 && l + steps < last) ++steps;
            const std::size_t bl = l + steps;
            const std::size_t bd = d - steps;
            double y_boundary;
            double w_boundary;
            if (bd == 0) {
                y_boundary = y(bl);
                w_boundary = 1.0;
            } else {
                y_boundary = y(last);
                w_boundary = seq.censored ? s[last][bd - 1] : 0.0;
            }
            double ysum = 0.0;
            double wsum = 0.0;
            for (std::size_t k = 1; k <= steps; ++k) {
                const double coef = std::pow(lambda, static_cast<double>(k - 1)) * (1.0 - lambda);
                ysum += coef * boot_h(l + k, d - k);
                wsum += coef * boot_s(l + k, d - k);
            }
            const double tail = std::pow(lambda, static_cast<double>(steps));
            tab.ytilde[l][d] = ysum + tail * y_boundary;
            tab.wtilde[l][d] = wsum + tail * w_boundary;
        }
    }
    return tab;
}

}  // namespace tcsurv
