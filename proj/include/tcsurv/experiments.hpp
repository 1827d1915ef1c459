#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tcsurv/config.hpp"
#include "tcsurv/hazard_model.hpp"
#include "tcsurv/seqdata.hpp"
#include "tcsurv/synthgen.hpp"
#include "tcsurv/trainer.hpp"

namespace tcsurv {

/// Reads keys from a Config with defaults and records every value actually
/// used, so the resolved set can be written out and replayed.
class ResolvedConfig {
public:
    explicit ResolvedConfig(Config source) : source_(std::move(source)) {}

    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    std::size_t get_size(const std::string& key, std::size_t fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback);
    std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& fallback);
    std::vector<std::string> get_strings(const std::string& key,
                                         const std::vector<std::string>& fallback);
    std::optional<std::string> find(const std::string& key);
    bool has(const std::string& key) const { return source_.has(key); }

    /// Records a value computed during resolution (e.g. a calibrated intercept).
    void record(const std::string& key, std::string value) { used_.set(key, std::move(value)); }

    const Config& source() const noexcept { return source_; }
    const Config& used() const noexcept { return used_; }

private:
    Config source_;
    Config used_;
};

/// gen.* keys. With gen.censoring set, b is calibrated and recorded as gen.b;
/// the coefficient vector is always resolved and recorded as gen.a.
RwConfig resolve_rw_config(ResolvedConfig& rc);

/// train.* keys; defaults follow the architecture (linear: lr 0.1, tau 0.1,
/// weight decay 0; feedforward: lr 0.01, tau 0.01, weight decay 1e-4).
TrainConfig resolve_train_config(ResolvedConfig& rc, Architecture arch);

struct ModelSpec {
    Architecture arch = Architecture::LinearCox;
    std::size_t hidden = 16;
};

ModelSpec resolve_model_spec(ResolvedConfig& rc);

/// data.path (optionally chunked by data.chunk), otherwise the generator.
Dataset resolve_dataset(ResolvedConfig& rc);

/// "SA Init State", "SA Landmarking" or "DTCSR(<lambda>)".
std::string method_label(LossMode mode, double lambda);

struct CompareCell {
    std::string method;
    LossMode mode = LossMode::Dtcsr;
    double lambda = 0.0;
    std::size_t size = 0;
    std::uint64_t seed = 0;
    std::optional<double> ci;
    double ibs = 0.0;
    std::size_t n_pairs = 0;
    std::string error;  // empty on success
};

struct SummaryRow {
    std::string method;
    std::size_t size = 0;
    std::size_t n = 0;  // successful cells with a defined CI
    double ci_mean = 0.0;
    double ci_std = 0.0;
    double ibs_mean = 0.0;
    double ibs_std = 0.0;
};

struct CompareResult {
    std::vector<CompareCell> cells;
    std::vector<SummaryRow> summary;
};

/// Trains and evaluates every (method, size, seed) cell.
CompareResult run_compare(ResolvedConfig& rc);

/// Mean and sample standard deviation (0 for fewer than two values).
std::pair<double, double> mean_std(const std::vector<double>& v);

std::vector<SummaryRow> summarize(const std::vector<CompareCell>& cells);
std::string compare_cells_csv(const std::vector<CompareCell>& cells);
std::string compare_summary_csv(const std::vector<SummaryRow>& rows);

struct TauRow {
    double tau = 0.0;
    std::vector<double> delta;  // per hazard entry retained
    double mean_delta = 0.0;
    std::size_t excluded = 0;
    std::vector<std::uint64_t> seeds;
    std::vector<std::optional<double>> ci;  // per seed
    std::vector<double> ibs;                // per seed
    std::vector<std::string> errors;        // per seed, empty on success
};

struct AblationResult {
    std::vector<TauRow> rows;
};

/// For each tau, one DTCSR model per seed; hazards h(d | x_l) over every
/// in-window (l, d) of a fixed test set feed variability_delta.
AblationResult run_ablate_tau(ResolvedConfig& rc);

/// Hazard estimates for every test sequence, landmark l and offset
/// d = 1..t-1-l, flattened in (sequence, l, d) order.
std::vector<double> collect_window_hazards(const HazardModel& model, const Dataset& ds);

/// CLI commands. Each writes into `out_dir` (created if needed) including
/// resolved_config.cfg and resolved_config.json, and returns the exit status.
int cmd_generate(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_train(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_evaluate(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_compare(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);
int cmd_ablate_tau(const Config& cfg, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace tcsurv
