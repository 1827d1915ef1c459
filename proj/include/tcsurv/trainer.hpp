#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tcsurv/hazard_model.hpp"
#include "tcsurv/optim.hpp"
#include "tcsurv/seqdata.hpp"
#include "tcsurv/tables.hpp"

namespace tcsurv {

enum class LossMode {
    InitState,    // hard labels, landmark 0 only
    Landmarking,  // hard labels, every landmark
    Dtcsr,        // pseudo-tables from the target network
};

enum class OptimizerKind { Sgd, Adam };

std::string to_string(LossMode m);
std::string to_string(OptimizerKind k);
std::string to_string(TableMode m);
LossMode parse_loss_mode(std::string_view s);
OptimizerKind parse_optimizer(std::string_view s);
TableMode parse_table_mode(std::string_view s);

struct TrainConfig {
    double lambda = 0.0;
    double tau = 0.01;
    double learning_rate = 0.01;
    double weight_decay = 1e-4;
    std::size_t batch_size = 128;
    std::size_t epochs = 100;
    LossMode loss_mode = LossMode::Dtcsr;
    TableMode table_mode = TableMode::WithinWindow;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::uint64_t seed = 0;
};

void validate(const TrainConfig& cfg);

struct EpochRecord {
    std::size_t epoch = 0;     // 1-based
    double mean_loss = 0.0;    // per sequence, averaged over the epoch
    double grad_norm = 0.0;    // mean L2 norm of the per-batch gradients
    double wall_ms = 0.0;
    std::optional<double> ci;  // only with an evaluation set
    std::optional<double> ibs;
};

struct TrainLog {
    std::vector<EpochRecord> epochs;
};

/// Header "epoch,loss,grad_norm,wall_ms,ci,ibs". Missing values are empty
/// fields; with include_wall_time = false the wall_ms column is left empty so
/// that reruns produce identical bytes.
std::string train_log_csv(const TrainLog& log, bool include_wall_time);

/// Everything needed to continue a run: main and target parameters, optimizer
/// moments and the number of completed epochs.
struct TrainState {
    HazardModel theta;
    ParameterVector phi;
    AdamState adam;
    std::size_t epochs_done = 0;
};

nlohmann::json to_json(const TrainState& state);
TrainState train_state_from_json(const nlohmann::json& j);

struct FitResult {
    HazardModel model;
    TrainLog log;
    TrainState state;
};

/// Mini-batch training. Each epoch shuffles the records with a stream derived
/// from (cfg.seed, epoch) and splits them into whole-sequence batches. Per
/// batch: target-network outputs and tables are built first, then the mean
/// per-sequence loss gradient drives one optimizer step on theta, then (for
/// Dtcsr) phi <- tau * theta + (1 - tau) * phi.
FitResult fit(const Dataset& ds, const HazardModel& init, const TrainConfig& cfg,
              const Dataset* eval_ds = nullptr);

/// Continues from a saved state until cfg.epochs epochs are complete.
FitResult resume_fit(const Dataset& ds, TrainState state, const TrainConfig& cfg,
                     const Dataset* eval_ds = nullptr);

/// Target table for one sequence under `cfg` (phi is ignored unless Dtcsr).
TargetTable build_targets(const SequenceRecord& seq, const HazardModel& phi,
                          const TrainConfig& cfg);

}  // namespace tcsurv
