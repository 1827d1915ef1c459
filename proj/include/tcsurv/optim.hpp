#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tcsurv {

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;

    bool operator==(const AdamState&) const = default;
};

struct AdamHyper {
    double lr = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.0;
};

/// One Adam step with bias correction. Weight decay is decoupled and applied
/// first: p <- p - lr * wd * p, then p <- p - lr * mhat / (sqrt(vhat) + eps).
/// An empty state is sized on first use.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const AdamHyper& hyper);

/// p <- p - lr * (g + wd * p).
void sgd_step(std::span<double> params, std::span<const double> grad, double lr,
              double weight_decay);

}  // namespace tcsurv
