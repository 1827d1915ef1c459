#include "tcsurv/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "tcsurv/errors.hpp"
#include "tcsurv/metrics.hpp"
#include "tcsurv/rng.hpp"

namespace tcsurv {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTestStream = 0;
constexpr std::uint64_t kSplitStream = 0x5eed;

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

template <class T>
std::string join_ints(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

std::string join_strings(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed for " + path.string());
}

void write_resolved(const fs::path& out_dir, const ResolvedConfig& rc) {
    write_text(out_dir / "resolved_config.cfg", rc.used().to_text());
    json j = json::object();
    for (const auto& [k, v] : rc.used().entries()) j[k] = v;
    write_text(out_dir / "resolved_config.json", j.dump(2) + "\n");
}

std::string csv_opt(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

// Runs body(i) for i in [0, n) on up to `threads` workers; each index writes
// only its own slot, so results do not depend on scheduling.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

struct CellData {
    Dataset train;
    Dataset test;
};

// Produces (train, test) for a given training size and cell seed.
class CellSource {
public:
    explicit CellSource(ResolvedConfig& rc) {
        from_file_ = rc.has("data.path");
        if (from_file_) {
            pool_ = resolve_dataset(rc);
            if (auto test_path = rc.find("test.path")) {
                test_ = load_dataset(*test_path);
                have_test_ = true;
            } else {
                split_ = rc.get_string("split", "holdout:0.2");
                parse_split();
            }
        } else {
            rw_ = resolve_rw_config(rc);
            if (auto test_path = rc.find("test.path")) {
                test_ = load_dataset(*test_path);
            } else {
                RwConfig t = rw_;
                t.n = rc.get_size("test.n", 1000);
                t.seed = derive_seed(rw_.seed, kTestStream);
                test_ = generate_random_walk(t);
            }
            have_test_ = true;
        }
    }

    /// Generator mode builds one training pool per seed, nested across sizes.
    void prepare(const std::vector<std::uint64_t>& seeds, std::size_t max_size) {
        if (from_file_) return;
        for (auto s : seeds) {
            if (pools_.count(s)) continue;
            RwConfig t = rw_;
            t.n = max_size;
            t.seed = derive_seed(rw_.seed, s + 1);
            pools_.emplace(s, generate_random_walk(t));
        }
    }

    CellData cell(std::size_t size, std::uint64_t seed) const {
        if (size == 0) throw PreconditionError("training size must be positive");
        if (!from_file_) {
            const Dataset& pool = pools_.at(seed);
            std::vector<std::size_t> idx(size);
            for (std::size_t i = 0; i < size; ++i) idx[i] = i;
            return {subset(pool, idx), test_};
        }
        std::vector<std::size_t> order(pool_.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        Rng rng(derive_seed(seed, kSplitStream));
        rng.shuffle(order);
        std::vector<std::size_t> train_idx;
        std::vector<std::size_t> test_idx;
        if (have_test_) {
            train_idx = order;
        } else if (kfold_ > 0) {
            const std::size_t fold = seed % kfold_;
            for (std::size_t i = 0; i < order.size(); ++i) {
                (i % kfold_ == fold ? test_idx : train_idx).push_back(order[i]);
            }
        } else {
            const auto n_test = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(holdout_ * static_cast<double>(order.size()))));
            if (n_test >= order.size()) throw PreconditionError("holdout leaves no training data");
            test_idx.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
            train_idx.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
        }
        if (size > train_idx.size()) {
            throw PreconditionError("training size " + std::to_string(size) + " exceeds the " +
                                    std::to_string(train_idx.size()) + " available records");
        }
        train_idx.resize(size);
        return {subset(pool_, train_idx), have_test_ ? test_ : subset(pool_, test_idx)};
    }

private:
    void parse_split() {
        const auto colon = split_.find(':');
        const std::string kind = split_.substr(0, colon);
        const std::string arg = colon == std::string::npos ? "" : split_.substr(colon + 1);
        try {
            if (kind == "kfold") {
                kfold_ = arg.empty() ? 5 : std::stoul(arg);
                if (kfold_ < 2) throw PreconditionError("kfold needs at least 2 folds");
                return;
            }
            if (kind == "holdout") {
                holdout_ = arg.empty() ? 0.2 : std::stod(arg);
                if (!(holdout_ > 0.0 && holdout_ < 1.0)) {
                    throw PreconditionError("holdout fraction must lie in (0, 1)");
                }
                return;
            }
        } catch (const std::logic_error&) {
            throw DataError("malformed split '" + split_ + "'");
        }
        throw DataError("unknown split strategy '" + split_ + "' (use kfold:K or holdout:P)");
    }

    bool from_file_ = false;
    bool have_test_ = false;
    Dataset pool_;
    Dataset test_;
    RwConfig rw_;
    std::string split_;
    std::size_t kfold_ = 0;
    double holdout_ = 0.2;
    std::map<std::uint64_t, Dataset> pools_;
};

struct Method {
    LossMode mode;
    double lambda;
};

std::vector<Method> resolve_methods(ResolvedConfig& rc) {
    const auto names = rc.get_strings("sweep.methods", {"sa_init", "sa_landmark", "dtcsr"});
    const auto lambdas = rc.get_doubles("sweep.lambdas", {0.0});
    std::vector<Method> out;
    for (const auto& name : names) {
        if (name == "sa_init") {
            out.push_back({LossMode::InitState, 1.0});
        } else if (name == "sa_landmark") {
            out.push_back({LossMode::Landmarking, 1.0});
        } else if (name == "dtcsr") {
            for (double l : lambdas) out.push_back({LossMode::Dtcsr, l});
        } else {
            throw DataError("unknown method '" + name + "' (use sa_init, sa_landmark, dtcsr)");
        }
    }
    if (out.empty()) throw DataError("sweep.methods is empty");
    return out;
}

std::vector<std::uint64_t> resolve_seeds(ResolvedConfig& rc) {
    const auto raw = rc.get_sizes("sweep.seeds", {0, 1, 2, 3, 4});
    if (raw.empty()) throw DataError("sweep.seeds is empty");
    return {raw.begin(), raw.end()};
}

struct TrainedCell {
    HazardModel model;
    EvalReport report;
};

TrainedCell train_cell(const CellData& data, const ModelSpec& spec, TrainConfig tc,
                       std::optional<std::uint64_t> model_seed, std::uint64_t seed) {
    tc.seed = seed;
    const ModelDims dims{data.train.feature_dim, std::max(data.train.horizon, data.test.horizon),
                         spec.hidden};
    const auto init = init_params(spec.arch, dims, model_seed.value_or(seed));
    auto fitted = fit(data.train, init, tc);
    auto report = evaluate(fitted.model, data.test);
    return {std::move(fitted.model), std::move(report)};
}

std::optional<std::uint64_t> resolve_model_seed(ResolvedConfig& rc) {
    if (!rc.has("model.seed")) return std::nullopt;
    return rc.get_u64("model.seed", 0);
}

}  // namespace

std::string ResolvedConfig::get_string(const std::string& key, const std::string& fallback) {
    auto v = source_.get_string(key, fallback);
    used_.set(key, v);
    return v;
}

double ResolvedConfig::get_double(const std::string& key, double fallback) {
    const double v = source_.get_double(key, fallback);
    used_.set(key, format_double(v));
    return v;
}

std::size_t ResolvedConfig::get_size(const std::string& key, std::size_t fallback) {
    const auto v = source_.get_size(key, fallback);
    used_.set(key, std::to_string(v));
    return v;
}

std::uint64_t ResolvedConfig::get_u64(const std::string& key, std::uint64_t fallback) {
    const auto v = source_.get_u64(key, fallback);
    used_.set(key, std::to_string(v));
    return v;
}

bool ResolvedConfig::get_bool(const std::string& key, bool fallback) {
    const bool v = source_.get_bool(key, fallback);
    used_.set(key, v ? "true" : "false");
    return v;
}

std::vector<double> ResolvedConfig::get_doubles(const std::string& key,
                                                const std::vector<double>& fallback) {
    auto v = source_.get_doubles(key, fallback);
    used_.set(key, join(v));
    return v;
}

std::vector<std::size_t> ResolvedConfig::get_sizes(const std::string& key,
                                                   const std::vector<std::size_t>& fallback) {
    auto v = source_.get_sizes(key, fallback);
    used_.set(key, join_ints(v));
    return v;
}

std::vector<std::string> ResolvedConfig::get_strings(const std::string& key,
                                                     const std::vector<std::string>& fallback) {
    auto v = source_.get_strings(key, fallback);
    used_.set(key, join_strings(v));
    return v;
}

std::optional<std::string> ResolvedConfig::find(const std::string& key) {
    auto v = source_.find(key);
    if (v) used_.set(key, *v);
    return v;
}

RwConfig resolve_rw_config(ResolvedConfig& rc) {
    RwConfig rw;
    const auto base_seed = rc.get_u64("seed", 0);
    rw.seed = rc.get_u64("gen.seed", base_seed);
    rw.n = rc.get_size("gen.n", 1000);
    rw.dim = rc.get_size("gen.dim", 20);
    rw.horizon = rc.get_size("gen.horizon", 11);
    if (rc.has("gen.a")) {
        rw.a = rc.get_doubles("gen.a", {});
    } else {
        rw.a = default_coefficients(rw.dim, rw.seed);
        rc.record("gen.a", join(rw.a));
    }
    if (rc.has("gen.censoring")) {
        const double target = rc.get_double("gen.censoring", 0.2);
        rw.b = calibrate_intercept(rw.dim, rw.horizon, rw.a, target, rw.seed);
        rc.record("gen.b", format_double(rw.b));
    } else {
        rw.b = rc.get_double("gen.b", 0.0);
    }
    validate(rw);
    return rw;
}

TrainConfig resolve_train_config(ResolvedConfig& rc, Architecture arch) {
    const bool linear = arch == Architecture::LinearCox;
    TrainConfig tc;
    tc.lambda = rc.get_double("train.lambda", 0.0);
    tc.tau = rc.get_double("train.tau", linear ? 0.1 : 0.01);
    tc.learning_rate = rc.get_double("train.lr", linear ? 0.1 : 0.01);
    tc.weight_decay = rc.get_double("train.weight_decay", linear ? 0.0 : 1e-4);
    tc.batch_size = rc.get_size("train.batch_size", 128);
    tc.epochs = rc.get_size("train.epochs", 100);
    tc.loss_mode = parse_loss_mode(rc.get_string("train.loss", "dtcsr"));
    tc.table_mode = parse_table_mode(rc.get_string("train.table_mode", "within_window"));
    tc.optimizer = parse_optimizer(rc.get_string("train.optimizer", "adam"));
    tc.beta1 = rc.get_double("train.beta1", 0.9);
    tc.beta2 = rc.get_double("train.beta2", 0.999);
    tc.eps = rc.get_double("train.eps", 1e-8);
    tc.seed = rc.get_u64("train.seed", rc.get_u64("seed", 0));
    validate(tc);
    return tc;
}

ModelSpec resolve_model_spec(ResolvedConfig& rc) {
    ModelSpec spec;
    spec.arch = parse_architecture(rc.get_string("model.arch", "linear"));
    if (spec.arch == Architecture::Feedforward) spec.hidden = rc.get_size("model.hidden", 16);
    return spec;
}

Dataset resolve_dataset(ResolvedConfig& rc) {
    if (auto path = rc.find("data.path")) {
        Dataset ds = load_dataset(*path);
        if (rc.has("data.chunk")) ds = chunk_sequences(ds, rc.get_size("data.chunk", 100));
        return ds;
    }
    return generate_random_walk(resolve_rw_config(rc));
}

std::string method_label(LossMode mode, double lambda) {
    switch (mode) {
        case LossMode::InitState: return "SA Init State";
        case LossMode::Landmarking: return "SA Landmarking";
        case LossMode::Dtcsr: return "DTCSR(" + format_double(lambda) + ")";
    }
    return "?";
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
    if (v.empty()) return {0.0, 0.0};
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    if (v.size() < 2) return {m, 0.0};
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    return {m, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

std::vector<SummaryRow> summarize(const std::vector<CompareCell>& cells) {
    std::vector<SummaryRow> rows;
    std::vector<std::pair<std::string, std::size_t>> keys;
    for (const auto& c : cells) {
        const auto key = std::make_pair(c.method, c.size);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& [method, size] : keys) {
        std::vector<double> ci;
        std::vector<double> ib;
        for (const auto& c : cells) {
            if (c.method != method || c.size != size || !c.error.empty() || !c.ci) continue;
            ci.push_back(*c.ci);
            ib.push_back(c.ibs);
        }
        SummaryRow r;
        r.method = method;
        r.size = size;
        r.n = ci.size();
        std::tie(r.ci_mean, r.ci_std) = mean_std(ci);
        std::tie(r.ibs_mean, r.ibs_std) = mean_std(ib);
        rows.push_back(r);
    }
    return rows;
}

std::string compare_cells_csv(const std::vector<CompareCell>& cells) {
    std::string out = "method,size,seed,ci,ibs,n_pairs,status\n";
    for (const auto& c : cells) {
        out += c.method + "," + std::to_string(c.size) + "," + std::to_string(c.seed) + ",";
        if (c.error.empty()) {
            out += csv_opt(c.ci) + "," + format_double(c.ibs) + "," + std::to_string(c.n_pairs) + ",ok\n";
        } else {
            std::string msg = c.error;
            std::replace(msg.begin(), msg.end(), ',', ';');
            std::replace(msg.begin(), msg.end(), '\n', ' ');
            out += ",,,error: " + msg + "\n";
        }
    }
    return out;
}

std::string compare_summary_csv(const std::vector<SummaryRow>& rows) {
    std::string out = "method,size,n,ci_mean,ci_std,ibs_mean,ibs_std\n";
    for (const auto& r : rows) {
        out += r.method + "," + std::to_string(r.size) + "," + std::to_string(r.n) + "," +
               format_double(r.ci_mean) + "," + format_double(r.ci_std) + "," +
               format_double(r.ibs_mean) + "," + format_double(r.ibs_std) + "\n";
    }
    return out;
}

CompareResult run_compare(ResolvedConfig& rc) {
    const ModelSpec spec = resolve_model_spec(rc);
    const TrainConfig base = resolve_train_config(rc, spec.arch);
    const auto model_seed = resolve_model_seed(rc);
    const auto methods = resolve_methods(rc);
    const auto sizes = rc.get_sizes("sweep.sizes", {50});
    if (sizes.empty()) throw DataError("sweep.sizes is empty");
    const auto seeds = resolve_seeds(rc);
    const std::size_t threads = rc.get_size("run.threads", 1);

    CellSource source(rc);
    source.prepare(seeds, *std::max_element(sizes.begin(), sizes.end()));

    CompareResult result;
    for (const auto& m : methods) {
        for (auto size : sizes) {
            for (auto seed : seeds) {
                CompareCell c;
                c.method = method_label(m.mode, m.lambda);
                c.mode = m.mode;
                c.lambda = m.lambda;
                c.size = size;
                c.seed = seed;
                result.cells.push_back(c);
            }
        }
    }
    parallel_for(result.cells.size(), threads, [&](std::size_t i) {
        auto& c = result.cells[i];
        try {
            TrainConfig tc = base;
            tc.loss_mode = c.mode;
            tc.lambda = c.lambda;
            const auto trained = train_cell(source.cell(c.size, c.seed), spec, tc, model_seed, c.seed);
            c.ci = trained.report.ci;
            c.ibs = trained.report.ibs;
            c.n_pairs = trained.report.n_pairs_used;
        } catch (const std::exception& e) {
            c.error = e.what();
        }
    });
    result.summary = summarize(result.cells);
    return result;
}

std::vector<double> collect_window_hazards(const HazardModel& model, const Dataset& ds) {
    std::vector<double> out;
    for (const auto& rec : ds.records) {
        const std::size_t t = rec.duration();
        for (std::size_t l = 0; l + 1 < t; ++l) {
            const auto row = model.hazard_row(rec.states[l], t - 1 - l);
            out.insert(out.end(), row.begin() + 1, row.end());
        }
    }
    return out;
}

AblationResult run_ablate_tau(ResolvedConfig& rc) {
    const ModelSpec spec = resolve_model_spec(rc);
    TrainConfig base = resolve_train_config(rc, spec.arch);
    if (base.loss_mode != LossMode::Dtcsr) throw DataError("ablate-tau requires train.loss=dtcsr");
    const auto model_seed = resolve_model_seed(rc);
    const auto taus = rc.get_doubles("sweep.taus", {0.01, 0.05, 0.1, 0.25, 0.5, 1.0});
    if (taus.empty()) throw DataError("sweep.taus is empty");
    const auto seeds = resolve_seeds(rc);
    if (seeds.size() < 2) throw DataError("ablate-tau needs at least 2 seeds");
    const std::size_t size = rc.get_size("sweep.size", 50);
    const std::size_t threads = rc.get_size("run.threads", 1);

    CellSource source(rc);
    source.prepare(seeds, size);

    AblationResult result;
    const std::size_t n_cells = taus.size() * seeds.size();
    std::vector<std::vector<double>> hazards(n_cells);
    result.rows.resize(taus.size());
    for (std::size_t r = 0; r < taus.size(); ++r) {
        auto& row = result.rows[r];
        row.tau = taus[r];
        row.seeds = seeds;
        row.ci.assign(seeds.size(), std::nullopt);
        row.ibs.assign(seeds.size(), 0.0);
        row.errors.assign(seeds.size(), "");
    }
    parallel_for(n_cells, threads, [&](std::size_t i) {
        auto& row = result.rows[i / seeds.size()];
        const std::size_t s = i % seeds.size();
        try {
            TrainConfig tc = base;
            tc.tau = row.tau;
            const auto data = source.cell(size, seeds[s]);
            const auto trained = train_cell(data, spec, tc, model_seed, seeds[s]);
            row.ci[s] = trained.report.ci;
            row.ibs[s] = trained.report.ibs;
            hazards[i] = collect_window_hazards(trained.model, data.test);
        } catch (const std::exception& e) {
            row.errors[s] = e.what();
        }
    });

    for (std::size_t r = 0; r < taus.size(); ++r) {
        auto& row = result.rows[r];
        std::vector<std::size_t> ok;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            if (row.errors[s].empty()) ok.push_back(r * seeds.size() + s);
        }
        if (ok.size() < 2) continue;
        const std::size_t n_entries = hazards[ok.front()].size();
        std::vector<std::vector<double>> samples(n_entries, std::vector<double>(ok.size()));
        for (std::size_t k = 0; k < ok.size(); ++k) {
            for (std::size_t e = 0; e < n_entries; ++e) samples[e][k] = hazards[ok[k]][e];
        }
        auto v = variability_delta(samples);
        row.delta = std::move(v.delta);
        row.mean_delta = v.mean;
        row.excluded = v.excluded;
    }
    return result;
}

int cmd_generate(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
    fs::create_directories(out_dir);
    ResolvedConfig rc(cfg);
    const RwConfig rw = resolve_rw_config(rc);
    const Dataset ds = generate_random_walk(rw);
    save_dataset(ds, out_dir / "dataset.jsonl");

    json sidecar{{"n", rw.n},       {"dim", rw.dim}, {"horizon", rw.horizon},
                 {"a", rw.a},       {"b", rw.b},     {"seed", rw.seed}};
    if (cfg.has("gen.censoring")) sidecar["target_censoring"] = cfg.get_double("gen.censoring", 0.2);
    write_text(out_dir / "rw_config.json", sidecar.dump(2) + "\n");
    write_resolved(out_dir, rc);

    const auto st = dataset_stats(ds);
    log << "generated " << st.n << " sequences: dim " << st.feature_dim << ", horizon "
        << st.horizon << ", max duration " << st.max_duration << ", censored fraction "
        << (st.censoring_fraction ? format_double(*st.censoring_fraction) : "n/a") << '\n';
    return 0;
}

int cmd_train(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
    fs::create_directories(out_dir);
    ResolvedConfig rc(cfg);
    const Dataset ds = resolve_dataset(rc);
    const ModelSpec spec = resolve_model_spec(rc);
    const TrainConfig tc = resolve_train_config(rc, spec.arch);
    const bool wall_time = rc.get_bool("log.wall_time", false);

    std::optional<Dataset> eval_ds;
    if (auto p = rc.find("eval.path")) eval_ds = load_dataset(*p);

    FitResult result = [&] {
        if (auto resume = rc.find("train.resume")) {
            std::ifstream in(*resume);
            if (!in) throw DataError("cannot open checkpoint " + *resume);
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                throw DataError(std::string("malformed checkpoint: ") + e.what());
            }
            return resume_fit(ds, train_state_from_json(j), tc, eval_ds ? &*eval_ds : nullptr);
        }
        const ModelDims dims{ds.feature_dim, ds.horizon, spec.hidden};
        const auto init = init_params(spec.arch, dims, rc.get_u64("model.seed", tc.seed));
        return fit(ds, init, tc, eval_ds ? &*eval_ds : nullptr);
    }();

    write_text(out_dir / "checkpoint.json", to_json(result.state).dump() + "\n");
    write_text(out_dir / "train_log.csv", train_log_csv(result.log, wall_time));
    write_resolved(out_dir, rc);

    if (!result.log.epochs.empty()) {
        const auto& first = result.log.epochs.front();
        const auto& last = result.log.epochs.back();
        log << "trained " << result.log.epochs.size() << " epochs: loss " << first.mean_loss
            << " -> " << last.mean_loss << '\n';
    } else {
        log << "checkpoint already complete; no epochs run\n";
    }
    return 0;
}

int cmd_evaluate(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
    fs::create_directories(out_dir);
    ResolvedConfig rc(cfg);
    const std::string ckpt = rc.get_string("eval.checkpoint", (out_dir / "checkpoint.json").string());
    std::ifstream in(ckpt);
    if (!in) throw DataError("cannot open checkpoint " + ckpt);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed checkpoint: ") + e.what());
    }
    const HazardModel model =
        j.contains("model") ? hazard_model_from_json(j.at("model")) : hazard_model_from_json(j);

    Dataset ds;
    if (auto p = rc.find("eval.path")) {
        ds = load_dataset(*p);
    } else {
        ds = resolve_dataset(rc);
    }
    const EvalReport report = evaluate(model, ds);
    write_text(out_dir / "report.json", to_json(report).dump(2) + "\n");
    write_text(out_dir / "bs_curve.csv", bs_curve_csv(report.bs_curve));
    write_resolved(out_dir, rc);
    log << "CI " << (report.ci ? format_double(*report.ci) : "undefined") << " over "
        << report.n_pairs_used << " pairs, IBS " << format_double(report.ibs) << '\n';
    return 0;
}

int cmd_compare(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
    fs::create_directories(out_dir);
    ResolvedConfig rc(cfg);
    const auto result = run_compare(rc);
    write_text(out_dir / "results.csv", compare_cells_csv(result.cells));
    write_text(out_dir / "summary.csv", compare_summary_csv(result.summary));
    write_resolved(out_dir, rc);

    std::size_t failed = 0;
    for (const auto& c : result.cells) failed += c.error.empty() ? 0 : 1;
    for (const auto& r : result.summary) {
        log << r.method << "  size " << r.size << "  CI " << format_double(r.ci_mean) << " (+-"
            << format_double(r.ci_std) << ")  IBS " << format_double(r.ibs_mean) << " (+-"
            << format_double(r.ibs_std) << ")  n=" << r.n << '\n';
    }
    if (failed > 0) log << failed << " of " << result.cells.size() << " cells failed\n";
    return failed == 0 ? 0 : 1;
}

int cmd_ablate_tau(const Config& cfg, const fs::path& out_dir, std::ostream& log) {
    fs::create_directories(out_dir);
    ResolvedConfig rc(cfg);
    const auto result = run_ablate_tau(rc);

    std::ostringstream samples;
    samples << "tau,delta\n";
    std::string means = "tau,mean_delta,n_entries,excluded\n";
    std::string scores = "tau,n,ci_mean,ci_std,ibs_mean,ibs_std\n";
    std::string cells = "tau,seed,ci,ibs,status\n";
    std::size_t failed = 0;
    for (const auto& row : result.rows) {
        const std::string tau = format_double(row.tau);
        for (double d : row.delta) samples << tau << ',' << format_double(d) << '\n';
        means += tau + "," + format_double(row.mean_delta) + "," + std::to_string(row.delta.size()) +
                 "," + std::to_string(row.excluded) + "\n";
        std::vector<double> ci;
        std::vector<double> ib;
        for (std::size_t s = 0; s < row.seeds.size(); ++s) {
            cells += tau + "," + std::to_string(row.seeds[s]) + ",";
            if (!row.errors[s].empty()) {
                ++failed;
                std::string msg = row.errors[s];
                std::replace(msg.begin(), msg.end(), ',', ';');
                cells += ",,error: " + msg + "\n";
                continue;
            }
            cells += csv_opt(row.ci[s]) + "," + format_double(row.ibs[s]) + ",ok\n";
            if (row.ci[s]) {
                ci.push_back(*row.ci[s]);
                ib.push_back(row.ibs[s]);
            }
        }
        const auto [cm, cs] = mean_std(ci);
        const auto [im, is] = mean_std(ib);
        scores += tau + "," + std::to_string(ci.size()) + "," + format_double(cm) + "," +
                  format_double(cs) + "," + format_double(im) + "," + format_double(is) + "\n";
        log << "tau " << tau << "  mean delta " << format_double(row.mean_delta) << "  CI "
            << format_double(cm) << "  IBS " << format_double(im) << '\n';
    }
    write_text(out_dir / "delta_samples.csv", samples.str());
    write_text(out_dir / "delta_mean.csv", means);
    write_text(out_dir / "scores.csv", scores);
    write_text(out_dir / "cells.csv", cells);
    write_resolved(out_dir, rc);
    return failed == 0 ? 0 : 1;
}

}  // namespace tcsurv
