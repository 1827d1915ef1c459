#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tcsurv/seqdata.hpp"
#include "tcsurv/tables.hpp"

namespace tcsurv {

enum class Architecture { LinearCox, Feedforward };

std::string to_string(Architecture arch);
Architecture parse_architecture(std::string_view name);

struct ModelDims {
    std::size_t feature_dim = 1;
    std::size_t horizon = 1;
    std::size_t hidden = 16;  // feedforward only

    bool operator==(const ModelDims&) const = default;
};

struct ParamBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t size = 0;

    bool operator==(const ParamBlock&) const = default;
};

/// Flat parameter storage with named blocks. theta, phi, gradients and
/// optimizer moments all share one layout.
struct ParameterVector {
    std::vector<double> values;
    std::vector<ParamBlock> layout;

    std::size_t size() const noexcept { return values.size(); }
    std::span<double> block(std::string_view name);
    std::span<const double> block(std::string_view name) const;
    /// Same layout, all zeros.
    ParameterVector zeros_like() const;

    bool operator==(const ParameterVector&) const = default;
};

std::vector<ParamBlock> make_layout(Architecture arch, const ModelDims& dims);

/// Discrete-time hazard h(d | x) = sigmoid(g(x, d)), d = 1..H.
///
/// LinearCox:   g(x, d) = beta.x + alpha[d-1]
/// Feedforward: g(x, d) = w2.tanh(W1 x + b1 + E[d-1]) + b2, where E holds one
///              learned offset embedding of width `hidden` per offset.
///
/// Logits are clamped to [-30, 30].
class HazardModel {
public:
    HazardModel(Architecture arch, ModelDims dims, ParameterVector params);

    Architecture architecture() const noexcept { return arch_; }
    const ModelDims& dims() const noexcept { return dims_; }
    const ParameterVector& params() const noexcept { return params_; }
    ParameterVector& params() noexcept { return params_; }

    double logit(const StateVector& x, std::size_t d) const;

    /// Hazards for offsets 1..max_offset; element 0 of the result is unused (0).
    std::vector<double> hazard_row(const StateVector& x, std::size_t max_offset) const;

    /// S(0..max_offset | x).
    std::vector<double> survival_curve(const StateVector& x, std::size_t max_offset) const;

    bool operator==(const HazardModel&) const = default;

private:
    void check_input(const StateVector& x) const;

    Architecture arch_;
    ModelDims dims_;
    ParameterVector params_;
};

inline constexpr double kLogitClamp = 30.0;

double sigmoid(double z) noexcept;

double hazard(const HazardModel& model, const StateVector& x, std::size_t d);
double survival(const HazardModel& model, const StateVector& x, std::size_t d);

/// h and S for every landmark of `seq`, offsets 1..window[l].
HazardMatrix hazard_matrix(const HazardModel& model, const SequenceRecord& seq,
                           std::span<const std::size_t> window);

struct BatchItem {
    const SequenceRecord& sequence;
    const TargetTable& targets;
};

struct LossAndGrad {
    double loss = 0.0;
    ParameterVector grad;
};

/// Sum over the batch of wtilde[l][d] * CE(ytilde[l][d], h(d | x_l)) for d >= 1,
/// with its exact gradient. Sequences are reduced in batch order.
/// Throws NumericalError naming the sequence when a term is not finite.
LossAndGrad loss_and_grad(const HazardModel& model, std::span<const BatchItem> batch);

/// LinearCox starts at zero. Feedforward draws every block uniformly from
/// [-1/sqrt(fan_in), 1/sqrt(fan_in)] (fan_in = feature_dim for W1 and b1,
/// hidden for E, w2 and b2) from a stream derived from `seed`.
HazardModel init_params(Architecture arch, const ModelDims& dims, std::uint64_t seed);

/// tau * theta + (1 - tau) * phi, elementwise.
ParameterVector ema_update(const ParameterVector& phi, const ParameterVector& theta, double tau);

nlohmann::json to_json(const ParameterVector& p);
ParameterVector parameter_vector_from_json(const nlohmann::json& j);
nlohmann::json to_json(const HazardModel& model);
HazardModel hazard_model_from_json(const nlohmann::json& j);

}  // namespace tcsurv
