#include "tcsurv/optim.hpp"

#include <cmath>

#include "tcsurv/errors.hpp"

namespace tcsurv {

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const AdamHyper& hyper) {
    if (grad.size() != params.size()) throw PreconditionError("adam_step: shape mismatch");
    if (state.m.empty() && state.v.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        throw PreconditionError("adam_step: optimizer state has wrong size");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bias1 = 1.0 - std::pow(hyper.beta1, t);
    const double bias2 = 1.0 - std::pow(hyper.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = hyper.beta1 * state.m[i] + (1.0 - hyper.beta1) * grad[i];
        state.v[i] = hyper.beta2 * state.v[i] + (1.0 - hyper.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bias1;
        const double vhat = state.v[i] / bias2;
        params[i] -= hyper.lr * hyper.weight_decay * params[i];
        params[i] -= hyper.lr * mhat / (std::sqrt(vhat) + hyper.eps);
    }
}

void sgd_step(std::span<double> params, std::span<const double> grad, double lr,
              double weight_decay) {
    if (grad.size() != params.size()) throw PreconditionError("sgd_step: shape mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] -= lr * (grad[i] + weight_decay * params[i]);
    }
}

}  // namespace tcsurv
