#include "tcsurv/hazard_model.hpp"

#include <algorithm>
#include <cmath>

#include "tcsurv/errors.hpp"
#include "tcsurv/rng.hpp"

namespace tcsurv {

using nlohmann::json;

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Views of the feedforward blocks; W1 is hidden x feature_dim row-major and
// E is horizon x hidden row-major (row d-1 belongs to offset d).
struct FeedforwardView {
    std::span<const double> w1, b1, emb, w2, b2;
    std::size_t dim, hidden;

    explicit FeedforwardView(const HazardModel& m)
        : w1(m.params().block("W1")),
          b1(m.params().block("b1")),
          emb(m.params().block("E")),
          w2(m.params().block("w2")),
          b2(m.params().block("b2")),
          dim(m.dims().feature_dim),
          hidden(m.dims().hidden) {}

    std::vector<double> pre_activation(const StateVector& x) const {
        std::vector<double> pre(b1.begin(), b1.end());
        for (std::size_t j = 0; j < hidden; ++j) pre[j] += dot(w1.subspan(j * dim, dim), x);
        return pre;
    }

    // fills z = tanh(pre + E[d-1]) and returns the raw logit
    double output(std::span<const double> pre, std::size_t d, std::span<double> z) const {
        const auto e = emb.subspan((d - 1) * hidden, hidden);
        double out = b2[0];
        for (std::size_t j = 0; j < hidden; ++j) {
            z[j] = std::tanh(pre[j] + e[j]);
            out += w2[j] * z[j];
        }
        return out;
    }
};

void check_offset(const HazardModel& m, std::size_t d) {
    if (d < 1 || d > m.dims().horizon) {
        throw PreconditionError("hazard offset " + std::to_string(d) + " outside 1.." +
                                std::to_string(m.dims().horizon));
    }
}

}  // namespace

std::string to_string(Architecture arch) {
    return arch == Architecture::LinearCox ? "linear" : "feedforward";
}

Architecture parse_architecture(std::string_view name) {
    if (name == "linear" || name == "linear-cox" || name == "linear_cox") {
        return Architecture::LinearCox;
    }
    if (name == "feedforward" || name == "ff") return Architecture::Feedforward;
    throw PreconditionError("unknown architecture '" + std::string(name) + "'");
}

std::span<double> ParameterVector::block(std::string_view name) {
    for (const auto& b : layout) {
        if (b.name == name) return std::span<double>(values).subspan(b.offset, b.size);
    }
    throw PreconditionError("no parameter block '" + std::string(name) + "'");
}

std::span<const double> ParameterVector::block(std::string_view name) const {
    for (const auto& b : layout) {
        if (b.name == name) return std::span<const double>(values).subspan(b.offset, b.size);
    }
    throw PreconditionError("no parameter block '" + std::string(name) + "'");
}

ParameterVector ParameterVector::zeros_like() const {
    return ParameterVector{std::vector<double>(values.size(), 0.0), layout};
}

std::vector<ParamBlock> make_layout(Architecture arch, const ModelDims& dims) {
    if (dims.feature_dim == 0 || dims.horizon == 0) {
        throw PreconditionError("model dims must be positive");
    }
    std::vector<std::pair<std::string, std::size_t>> sizes;
    if (arch == Architecture::LinearCox) {
        sizes = {{"beta", dims.feature_dim}, {"alpha", dims.horizon}};
    } else {
        if (dims.hidden == 0) throw PreconditionError("hidden size must be positive");
        sizes = {{"W1", dims.hidden * dims.feature_dim},
                 {"b1", dims.hidden},
                 {"E", dims.horizon * dims.hidden},
                 {"w2", dims.hidden},
                 {"b2", 1}};
    }
    std::vector<ParamBlock> layout;
    std::size_t offset = 0;
    for (auto& [name, size] : sizes) {
        layout.push_back({name, offset, size});
        offset += size;
    }
    return layout;
}

HazardModel::HazardModel(Architecture arch, ModelDims dims, ParameterVector params)
    : arch_(arch), dims_(dims), params_(std::move(params)) {
    if (arch_ == Architecture::LinearCox) dims_.hidden = 0;
    const auto expected = make_layout(arch_, dims_);
    if (params_.layout != expected) throw PreconditionError("parameter layout does not match model");
    std::size_t total = 0;
    for (const auto& b : expected) total += b.size;
    if (params_.values.size() != total) {
        throw PreconditionError("parameter vector has wrong length");
    }
    for (double v : params_.values) {
        if (!std::isfinite(v)) throw PreconditionError("parameters must be finite");
    }
}

void HazardModel::check_input(const StateVector& x) const {
    if (x.size() != dims_.feature_dim) {
        throw PreconditionError("state dimension " + std::to_string(x.size()) + " != " +
                                std::to_string(dims_.feature_dim));
    }
}

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double HazardModel::logit(const StateVector& x, std::size_t d) const {
    check_input(x);
    check_offset(*this, d);
    double z;
    if (arch_ == Architecture::LinearCox) {
        z = dot(params_.block("beta"), x) + params_.block("alpha")[d - 1];
    } else {
        FeedforwardView ff(*this);
        const auto pre = ff.pre_activation(x);
        std::vector<double> hidden(dims_.hidden);
        z = ff.output(pre, d, hidden);
    }
    return std::clamp(z, -kLogitClamp, kLogitClamp);
}

std::vector<double> HazardModel::hazard_row(const StateVector& x, std::size_t max_offset) const {
    check_input(x);
    if (max_offset > dims_.horizon) check_offset(*this, max_offset);
    std::vector<double> row(max_offset + 1, 0.0);
    if (arch_ == Architecture::LinearCox) {
        const double risk = dot(params_.block("beta"), x);
        const auto alpha = params_.block("alpha");
        for (std::size_t d = 1; d <= max_offset; ++d) {
            row[d] = sigmoid(std::clamp(risk + alpha[d - 1], -kLogitClamp, kLogitClamp));
        }
    } else {
        FeedforwardView ff(*this);
        const auto pre = ff.pre_activation(x);
        std::vector<double> hidden(dims_.hidden);
        for (std::size_t d = 1; d <= max_offset; ++d) {
            row[d] = sigmoid(std::clamp(ff.output(pre, d, hidden), -kLogitClamp, kLogitClamp));
        }
    }
    return row;
}

std::vector<double> HazardModel::survival_curve(const StateVector& x, std::size_t max_offset) const {
    const auto h = hazard_row(x, max_offset);
    std::vector<double> s(max_offset + 1);
    s[0] = 1.0;
    for (std::size_t d = 1; d <= max_offset; ++d) s[d] = s[d - 1] * (1.0 - h[d]);
    return s;
}

double hazard(const HazardModel& model, const StateVector& x, std::size_t d) {
    return sigmoid(model.logit(x, d));
}

double survival(const HazardModel& model, const StateVector& x, std::size_t d) {
    if (d > model.dims().horizon) {
        throw PreconditionError("survival offset " + std::to_string(d) + " > horizon");
    }
    return model.survival_curve(x, d)[d];
}

HazardMatrix hazard_matrix(const HazardModel& model, const SequenceRecord& seq,
                           std::span<const std::size_t> window) {
    if (window.size() != seq.duration()) {
        throw PreconditionError("window must have one entry per landmark");
    }
    HazardMatrix m;
    m.hazard.reserve(window.size());
    m.survival.reserve(window.size());
    for (std::size_t l = 0; l < window.size(); ++l) {
        auto h = model.hazard_row(seq.states[l], window[l]);
        std::vector<double> s(h.size());
        s[0] = 1.0;
        for (std::size_t d = 1; d < h.size(); ++d) s[d] = s[d - 1] * (1.0 - h[d]);
        m.hazard.push_back(std::move(h));
        m.survival.push_back(std::move(s));
    }
    return m;
}

LossAndGrad loss_and_grad(const HazardModel& model, std::span<const BatchItem> batch) {
    const auto& dims = model.dims();
    LossAndGrad out{0.0, model.params().zeros_like()};
    const bool linear = model.architecture() == Architecture::LinearCox;

    std::vector<double> hidden(dims.hidden);
    std::vector<double> dpre(dims.hidden);

    for (const auto& item : batch) {
        const auto& seq = item.sequence;
        const auto& tab = item.targets;
        if (tab.landmarks() != seq.duration() || tab.wtilde.size() != seq.duration()) {
            throw PreconditionError("target table for '" + seq.id + "' has wrong landmark count");
        }
        auto fail = [&](std::size_t l, std::size_t d) {
            throw NumericalError("non-finite loss term at landmark " + std::to_string(l) +
                                     ", offset " + std::to_string(d) + " of sequence '" + seq.id +
                                     "'",
                                 seq.id);
        };
        double seq_loss = 0.0;
        for (std::size_t l = 0; l < seq.duration(); ++l) {
            const auto& x = seq.states[l];
            const std::size_t window = tab.window(l);
            if (tab.wtilde[l].size() != window + 1) {
                throw PreconditionError("target table rows for '" + seq.id + "' disagree");
            }
            if (window > dims.horizon) check_offset(model, window);

            if (linear) {
                const auto beta = model.params().block("beta");
                const auto alpha = model.params().block("alpha");
                auto gbeta = out.grad.block("beta");
                auto galpha = out.grad.block("alpha");
                const double risk = dot(beta, x);
                double gsum = 0.0;
                for (std::size_t d = 1; d <= window; ++d) {
                    const double w = tab.wtilde[l][d];
                    if (w == 0.0) continue;
                    const double y = tab.ytilde[l][d];
                    const double raw = risk + alpha[d - 1];
                    const double z = std::clamp(raw, -kLogitClamp, kLogitClamp);
                    const double term = w * (y * softplus(-z) + (1.0 - y) * softplus(z));
                    const double g = (raw == z) ? w * (sigmoid(z) - y) : 0.0;
                    if (!std::isfinite(term) || !std::isfinite(g)) fail(l, d);
                    seq_loss += term;
                    galpha[d - 1] += g;
                    gsum += g;
                }
                for (std::size_t j = 0; j < x.size(); ++j) gbeta[j] += gsum * x[j];
            } else {
                FeedforwardView ff(model);
                auto gw1 = out.grad.block("W1");
                auto gb1 = out.grad.block("b1");
                auto gemb = out.grad.block("E");
                auto gw2 = out.grad.block("w2");
                auto gb2 = out.grad.block("b2");
                const auto pre = ff.pre_activation(x);
                std::fill(dpre.begin(), dpre.end(), 0.0);
                bool any = false;
                for (std::size_t d = 1; d <= window; ++d) {
                    const double w = tab.wtilde[l][d];
                    if (w == 0.0) continue;
                    const double y = tab.ytilde[l][d];
                    const double raw = ff.output(pre, d, hidden);
                    const double z = std::clamp(raw, -kLogitClamp, kLogitClamp);
                    const double term = w * (y * softplus(-z) + (1.0 - y) * softplus(z));
                    const double g = (raw == z) ? w * (sigmoid(z) - y) : 0.0;
                    if (!std::isfinite(term) || !std::isfinite(g)) fail(l, d);
                    seq_loss += term;
                    if (g == 0.0) continue;
                    any = true;
                    gb2[0] += g;
                    auto ge = gemb.subspan((d - 1) * dims.hidden, dims.hidden);
                    for (std::size_t j = 0; j < dims.hidden; ++j) {
                        gw2[j] += g * hidden[j];
                        const double da = g * ff.w2[j] * (1.0 - hidden[j] * hidden[j]);
                        ge[j] += da;
                        dpre[j] += da;
                    }
                }
                if (!any) continue;
                for (std::size_t j = 0; j < dims.hidden; ++j) {
                    gb1[j] += dpre[j];
                    auto row = gw1.subspan(j * dims.feature_dim, dims.feature_dim);
                    for (std::size_t k = 0; k < dims.feature_dim; ++k) row[k] += dpre[j] * x[k];
                }
            }
        }
        if (!std::isfinite(seq_loss)) {
            throw NumericalError("non-finite loss for sequence '" + seq.id + "'", seq.id);
        }
        out.loss += seq_loss;
    }
    for (double v : out.grad.values) {
        if (!std::isfinite(v)) {
            throw NumericalError("non-finite gradient", batch.empty() ? "" : batch.back().sequence.id);
        }
    }
    return out;
}

HazardModel init_params(Architecture arch, const ModelDims& dims, std::uint64_t seed) {
    ParameterVector p;
    p.layout = make_layout(arch, dims);
    std::size_t total = 0;
    for (const auto& b : p.layout) total += b.size;
    p.values.assign(total, 0.0);
    if (arch == Architecture::Feedforward) {
        Rng rng(derive_seed(seed, 0));
        for (const auto& b : p.layout) {
            const bool from_input = (b.name == "W1" || b.name == "b1");
            const double bound =
                1.0 / std::sqrt(static_cast<double>(from_input ? dims.feature_dim : dims.hidden));
            for (std::size_t i = 0; i < b.size; ++i) {
                p.values[b.offset + i] = bound * (2.0 * rng.uniform() - 1.0);
            }
        }
    }
    return HazardModel(arch, dims, std::move(p));
}

ParameterVector ema_update(const ParameterVector& phi, const ParameterVector& theta, double tau) {
    if (phi.layout != theta.layout || phi.values.size() != theta.values.size()) {
        throw PreconditionError("ema_update: parameter layouts differ");
    }
    if (!(tau >= 0.0 && tau <= 1.0)) throw PreconditionError("ema_update: tau must lie in [0, 1]");
    ParameterVector out = phi;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        // equal entries are a fixed point; the affine form can round them off it
        if (theta.values[i] == phi.values[i]) continue;
        out.values[i] = tau * theta.values[i] + (1.0 - tau) * phi.values[i];
    }
    return out;
}

json to_json(const ParameterVector& p) {
    json layout = json::array();
    for (const auto& b : p.layout) {
        layout.push_back({{"name", b.name}, {"offset", b.offset}, {"size", b.size}});
    }
    return json{{"layout", layout}, {"values", p.values}};
}

ParameterVector parameter_vector_from_json(const json& j) {
    ParameterVector p;
    try {
        for (const auto& b : j.at("layout")) {
            p.layout.push_back({b.at("name").get<std::string>(), b.at("offset").get<std::size_t>(),
                                b.at("size").get<std::size_t>()});
        }
        p.values = j.at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed parameter vector: ") + e.what());
    }
    return p;
}

json to_json(const HazardModel& model) {
    return json{{"architecture", to_string(model.architecture())},
                {"feature_dim", model.dims().feature_dim},
                {"horizon", model.dims().horizon},
                {"hidden", model.dims().hidden},
                {"params", to_json(model.params())}};
}

HazardModel hazard_model_from_json(const json& j) {
    try {
        const auto arch = parse_architecture(j.at("architecture").get<std::string>());
        ModelDims dims{j.at("feature_dim").get<std::size_t>(), j.at("horizon").get<std::size_t>(),
                       j.at("hidden").get<std::size_t>()};
        return HazardModel(arch, dims, parameter_vector_from_json(j.at("params")));
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model: ") + e.what());
    }
}

}  // namespace tcsurv
