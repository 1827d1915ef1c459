#pragma once

#include "tcsurv/seqdata.hpp"
#include "tcsurv/tables.hpp"

namespace tcsurv {

/// Landmarking supervision for the observed window: label(l, d) = 1 iff
/// l + d = t - 1 and the record is uncensored, every weight 1.
TargetTable hard_labels(const SequenceRecord& seq);

/// Pseudo-targets and pseudo-weights bootstrapped from target-network outputs.
///
/// Offset-0 entries are the observed indicator y_l (1 only at l = t-1 for an
/// uncensored record) with weight 1. For l < t-1 and d >= 1:
///
///   ytilde[l][d] = lambda * ytilde[l+1][d-1] + (1 - lambda) * h(d-1 | x_{l+1})
///   wtilde[l][d] = lambda * wtilde[l+1][d-1] + (1 - lambda) * S(d-1 | x_{l+1})
///
/// with h(0 | x_j) = y_j and S(0 | x) = 1. In extended mode the last landmark
/// also carries offsets d >= 1 with label y_{t-1} and weight S(d-1 | x_{t-1})
/// if censored, 0 otherwise.
///
/// `target_outputs` must cover windows table_windows(t, horizon, mode).
TargetTable pseudo_table(const SequenceRecord& seq, const HazardMatrix& target_outputs,
                         double lambda, TableMode mode, std::size_t horizon);

/// Same table computed entry by entry as an explicit geometric sum along the
/// (l, d) -> (l+1, d-1) chain. Slow; for verification only.
TargetTable pseudo_table_oracle(const SequenceRecord& seq, const HazardMatrix& target_outputs,
                                double lambda, TableMode mode, std::size_t horizon);

/// hard_labels with every landmark other than l = 0 weighted 0.
TargetTable initial_state_labels(const SequenceRecord& seq);

}  // namespace tcsurv
