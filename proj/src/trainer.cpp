#include "tcsurv/trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "tcsurv/errors.hpp"
#include "tcsurv/metrics.hpp"
#include "tcsurv/rng.hpp"
#include "tcsurv/targets.hpp"

namespace tcsurv {

using nlohmann::json;

std::string to_string(LossMode m) {
    switch (m) {
        case LossMode::InitState: return "init_state";
        case LossMode::Landmarking: return "landmarking";
        case LossMode::Dtcsr: return "dtcsr";
    }
    return "?";
}

std::string to_string(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

std::string to_string(TableMode m) {
    return m == TableMode::WithinWindow ? "within_window" : "extended";
}

LossMode parse_loss_mode(std::string_view s) {
    if (s == "init_state") return LossMode::InitState;
    if (s == "landmarking") return LossMode::Landmarking;
    if (s == "dtcsr") return LossMode::Dtcsr;
    throw PreconditionError("unknown loss mode '" + std::string(s) + "'");
}

OptimizerKind parse_optimizer(std::string_view s) {
    if (s == "sgd") return OptimizerKind::Sgd;
    if (s == "adam") return OptimizerKind::Adam;
    throw PreconditionError("unknown optimizer '" + std::string(s) + "'");
}

TableMode parse_table_mode(std::string_view s) {
    if (s == "within_window") return TableMode::WithinWindow;
    if (s == "extended") return TableMode::Extended;
    throw PreconditionError("unknown table mode '" + std::string(s) + "'");
}

void validate(const TrainConfig& cfg) {
    if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) throw PreconditionError("lambda must lie in [0, 1]");
    if (cfg.loss_mode == LossMode::Dtcsr && !(cfg.tau > 0.0 && cfg.tau <= 1.0)) {
        throw PreconditionError("tau must lie in (0, 1]");
    }
    if (!(cfg.learning_rate > 0.0)) throw PreconditionError("learning_rate must be positive");
    if (!(cfg.weight_decay >= 0.0)) throw PreconditionError("weight_decay must be >= 0");
    if (cfg.batch_size < 1) throw PreconditionError("batch_size must be >= 1");
    if (cfg.epochs < 1) throw PreconditionError("epochs must be >= 1");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0) ||
        !(cfg.eps > 0.0)) {
        throw PreconditionError("invalid Adam hyperparameters");
    }
}

std::string train_log_csv(const TrainLog& log, bool include_wall_time) {
    std::ostringstream out;
    out.precision(17);
    out << "epoch,loss,grad_norm,wall_ms,ci,ibs\n";
    for (const auto& e : log.epochs) {
        out << e.epoch << ',' << e.mean_loss << ',' << e.grad_norm << ',';
        if (include_wall_time) out << e.wall_ms;
        out << ',';
        if (e.ci) out << *e.ci;
        out << ',';
        if (e.ibs) out << *e.ibs;
        out << '\n';
    }
    return out.str();
}

json to_json(const TrainState& state) {
    return json{{"model", to_json(state.theta)},
                {"target_params", to_json(state.phi)},
                {"adam", {{"m", state.adam.m}, {"v", state.adam.v}, {"step", state.adam.step}}},
                {"epochs_done", state.epochs_done}};
}

TrainState train_state_from_json(const json& j) {
    try {
        AdamState adam;
        adam.m = j.at("adam").at("m").get<std::vector<double>>();
        adam.v = j.at("adam").at("v").get<std::vector<double>>();
        adam.step = j.at("adam").at("step").get<std::uint64_t>();
        TrainState st{hazard_model_from_json(j.at("model")),
                      parameter_vector_from_json(j.at("target_params")), std::move(adam),
                      j.at("epochs_done").get<std::size_t>()};
        if (st.phi.layout != st.theta.params().layout ||
            st.phi.values.size() != st.theta.params().values.size()) {
            throw DataError("checkpoint target parameters do not match the model layout");
        }
        return st;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
}

TargetTable build_targets(const SequenceRecord& seq, const HazardModel& phi, const TrainConfig& cfg) {
    switch (cfg.loss_mode) {
        case LossMode::InitState: return initial_state_labels(seq);
        case LossMode::Landmarking: return hard_labels(seq);
        case LossMode::Dtcsr: {
            const std::size_t horizon = phi.dims().horizon;
            const auto windows = table_windows(seq.duration(), horizon, cfg.table_mode);
            const auto outputs = hazard_matrix(phi, seq, windows);
            return pseudo_table(seq, outputs, cfg.lambda, cfg.table_mode, horizon);
        }
    }
    throw PreconditionError("unknown loss mode");
}

FitResult resume_fit(const Dataset& ds, TrainState state, const TrainConfig& cfg,
                     const Dataset* eval_ds) {
    validate(cfg);
    if (ds.empty()) throw PreconditionError("fit: empty dataset");
    const auto& dims = state.theta.dims();
    if (dims.feature_dim != ds.feature_dim) {
        throw PreconditionError("fit: model feature_dim does not match the dataset");
    }
    if (dims.horizon < ds.horizon) {
        throw PreconditionError("fit: model horizon is shorter than the dataset horizon");
    }

    const AdamHyper hyper{cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay};
    TrainLog log;
    std::vector<std::size_t> order(ds.size());

    for (std::size_t epoch = state.epochs_done; epoch < cfg.epochs; ++epoch) {
        const auto start = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(cfg.seed, epoch));
        rng.shuffle(order);

        double loss_sum = 0.0;
        double norm_sum = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t first = 0; first < order.size(); first += cfg.batch_size) {
            const std::size_t last = std::min(order.size(), first + cfg.batch_size);
            const HazardModel phi_model(state.theta.architecture(), dims, state.phi);

            std::vector<TargetTable> tables;
            tables.reserve(last - first);
            for (std::size_t b = first; b < last; ++b) {
                tables.push_back(build_targets(ds.records[order[b]], phi_model, cfg));
            }
            std::vector<BatchItem> batch;
            batch.reserve(tables.size());
            for (std::size_t b = first; b < last; ++b) {
                batch.push_back(BatchItem{ds.records[order[b]], tables[b - first]});
            }

            LossAndGrad lg;
            try {
                lg = loss_and_grad(state.theta, batch);
            } catch (const NumericalError& e) {
                throw NumericalError("epoch " + std::to_string(epoch + 1) + ", batch " +
                                         std::to_string(n_batches) + ": " + e.what(),
                                     e.sequence_id());
            }
            const double scale = 1.0 / static_cast<double>(batch.size());
            double sq = 0.0;
            for (auto& g : lg.grad.values) {
                g *= scale;
                sq += g * g;
            }
            loss_sum += lg.loss;
            norm_sum += std::sqrt(sq);
            ++n_batches;

            auto& values = state.theta.params().values;
            if (cfg.optimizer == OptimizerKind::Adam) {
                adam_step(values, lg.grad.values, state.adam, hyper);
            } else {
                sgd_step(values, lg.grad.values, cfg.learning_rate, cfg.weight_decay);
            }
            for (double v : values) {
                if (!std::isfinite(v)) {
                    throw NumericalError("parameters diverged in epoch " + std::to_string(epoch + 1),
                                         "");
                }
            }
            if (cfg.loss_mode == LossMode::Dtcsr) {
                state.phi = ema_update(state.phi, state.theta.params(), cfg.tau);
            } else {
                state.phi = state.theta.params();
            }
        }

        EpochRecord rec;
        rec.epoch = epoch + 1;
        rec.mean_loss = loss_sum / static_cast<double>(ds.size());
        rec.grad_norm = norm_sum / static_cast<double>(n_batches);
        if (eval_ds != nullptr && !eval_ds->empty()) {
            const auto report = evaluate(state.theta, *eval_ds);
            rec.ci = report.ci;
            rec.ibs = report.ibs;
        }
        rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                                start)
                          .count();
        log.epochs.push_back(rec);
        state.epochs_done = epoch + 1;
    }
    HazardModel model = state.theta;
    return FitResult{std::move(model), std::move(log), std::move(state)};
}

FitResult fit(const Dataset& ds, const HazardModel& init, const TrainConfig& cfg,
              const Dataset* eval_ds) {
    TrainState state{init, init.params(), AdamState{}, 0};
    return resume_fit(ds, std::move(state), cfg, eval_ds);
}

}  // namespace tcsurv
