#pragma once

#include <cstddef>
#include <vector>

namespace tcsurv {

/// Per-sequence model outputs indexed by (landmark l, offset d).
///
/// hazard[l][d] = h(d | x_l) for d = 1..window(l); hazard[l][0] is unused and
/// kept at 0 so that both tables share the same row lengths.
/// survival[l][0] = 1 and survival[l][d] = survival[l][d-1] * (1 - hazard[l][d]).
struct HazardMatrix {
    std::vector<std::vector<double>> hazard;
    std::vector<std::vector<double>> survival;

    std::size_t landmarks() const noexcept { return hazard.size(); }
    std::size_t window(std::size_t l) const { return hazard.at(l).size() - 1; }
};

enum class TableMode {
    WithinWindow,  // offsets d = 1..t-1-l (observed window)
    Extended,      // offsets d = 1..H-1-l
};

/// Supervision for one sequence: soft labels and weights for every (l, d),
/// d = 0..window(l). Offset 0 is a base case and never enters the loss.
struct TargetTable {
    std::vector<std::vector<double>> ytilde;
    std::vector<std::vector<double>> wtilde;
    double lambda = 1.0;
    TableMode mode = TableMode::WithinWindow;

    std::size_t landmarks() const noexcept { return ytilde.size(); }
    std::size_t window(std::size_t l) const { return ytilde.at(l).size() - 1; }

    bool operator==(const TargetTable&) const = default;
};

/// Largest offset per landmark for a sequence of `duration` states.
std::vector<std::size_t> table_windows(std::size_t duration, std::size_t horizon, TableMode mode);

}  // namespace tcsurv
