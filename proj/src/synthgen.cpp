#include "tcsurv/synthgen.hpp"

#include <cmath>
#include <string>

#include "tcsurv/errors.hpp"
#include "tcsurv/rng.hpp"

namespace tcsurv {

namespace {

constexpr std::uint64_t kCoefficientStream = 0xa11ce5eedULL;
constexpr std::size_t kPilotSize = 2000;
constexpr int kMaxBisectionSteps = 60;
constexpr double kAcceptTolerance = 0.05;
constexpr double kStopTolerance = 0.005;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

SequenceRecord walk(const RwConfig& cfg, const std::vector<double>& a, std::size_t index) {
    Rng rng(derive_seed(cfg.seed, index));
    SequenceRecord rec;
    rec.id = std::to_string(index);
    rec.censored = true;
    rec.states.reserve(cfg.horizon);
    rec.states.push_back(rng.normal_vector(cfg.dim));
    for (std::size_t k = 1; k < cfg.horizon; ++k) {
        StateVector x = rec.states.back();
        for (auto& v : x) v += rng.normal();
        double z = cfg.b;
        for (std::size_t j = 0; j < cfg.dim; ++j) z += a[j] * x[j];
        const double u = rng.uniform();
        rec.states.push_back(std::move(x));
        if (u < sigmoid(z)) {
            rec.censored = false;
            break;
        }
    }
    return rec;
}

double censoring_fraction(const RwConfig& cfg) {
    const Dataset ds = generate_random_walk(cfg);
    return *dataset_stats(ds).censoring_fraction;
}

}  // namespace

void validate(const RwConfig& cfg) {
    if (cfg.n < 1) throw PreconditionError("RwConfig: n must be >= 1");
    if (cfg.dim < 1) throw PreconditionError("RwConfig: dim must be >= 1");
    if (cfg.horizon < 2) throw PreconditionError("RwConfig: horizon must be >= 2");
    if (!cfg.a.empty() && cfg.a.size() != cfg.dim) {
        throw PreconditionError("RwConfig: a must have length dim");
    }
    for (double v : cfg.a) {
        if (!std::isfinite(v)) throw PreconditionError("RwConfig: a must be finite");
    }
    if (!std::isfinite(cfg.b)) throw PreconditionError("RwConfig: b must be finite");
}

std::vector<double> default_coefficients(std::size_t dim, std::uint64_t seed) {
    Rng rng(derive_seed(seed, kCoefficientStream));
    std::vector<double> a;
    double norm = 0.0;
    do {
        a = rng.normal_vector(dim);
        norm = 0.0;
        for (double v : a) norm += v * v;
        norm = std::sqrt(norm);
    } while (norm == 0.0);
    for (auto& v : a) v /= norm;
    return a;
}

Dataset generate_random_walk(const RwConfig& cfg) {
    validate(cfg);
    const std::vector<double> a = cfg.a.empty() ? default_coefficients(cfg.dim, cfg.seed) : cfg.a;
    Dataset ds;
    ds.feature_dim = cfg.dim;
    ds.horizon = cfg.horizon;
    ds.records.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) ds.records.push_back(walk(cfg, a, i));
    return ds;
}

double calibrate_intercept(std::size_t dim, std::size_t horizon, const std::vector<double>& a,
                           double target_censoring, std::uint64_t seed) {
    if (!(target_censoring > 0.0 && target_censoring < 1.0)) {
        throw PreconditionError("target censoring fraction must lie in (0, 1)");
    }
    RwConfig pilot;
    pilot.n = kPilotSize;
    pilot.dim = dim;
    pilot.horizon = horizon;
    pilot.a = a.empty() ? default_coefficients(dim, seed) : a;
    pilot.seed = seed;

    auto fraction_at = [&](double b) {
        pilot.b = b;
        return censoring_fraction(pilot);
    };

    // censoring fraction is non-increasing in b
    double lo = -10.0;
    double hi = 10.0;
    const double f_lo = fraction_at(lo);
    const double f_hi = fraction_at(hi);
    if (f_lo < target_censoring - kAcceptTolerance || f_hi > target_censoring + kAcceptTolerance) {
        throw CalibrationError("censoring target " + std::to_string(target_censoring) +
                               " not bracketed: fraction is " + std::to_string(f_lo) +
                               " at b=-10 and " + std::to_string(f_hi) + " at b=10");
    }
    double best_b = std::abs(f_lo - target_censoring) <= std::abs(f_hi - target_censoring) ? lo : hi;
    double best_err = std::min(std::abs(f_lo - target_censoring), std::abs(f_hi - target_censoring));
    for (int step = 0; step < kMaxBisectionSteps && best_err > kStopTolerance; ++step) {
        const double mid = 0.5 * (lo + hi);
        const double f = fraction_at(mid);
        const double err = std::abs(f - target_censoring);
        if (err < best_err) {
            best_err = err;
            best_b = mid;
        }
        if (f > target_censoring) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if (best_err > kAcceptTolerance) {
        throw CalibrationError("calibration reached censoring error " + std::to_string(best_err));
    }
    return best_b;
}

}  // namespace tcsurv
