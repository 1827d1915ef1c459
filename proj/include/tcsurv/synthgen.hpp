#pragma once

#include <cstdint>
#include <vector>

#include "tcsurv/seqdata.hpp"

namespace tcsurv {

/// Gaussian random-walk churn generator settings.
///
/// x_0 ~ N(0, I), x_{k+1} = x_k + N(0, I). At each k = 1..H-1 the walk ends with
/// probability sigmoid(a.x_k + b). Walks that survive index H-1 are censored.
struct RwConfig {
    std::size_t n = 1000;
    std::size_t dim = 20;
    std::size_t horizon = 11;
    std::vector<double> a;  // empty -> default_coefficients(dim, seed)
    double b = 0.0;
    std::uint64_t seed = 0;
};

void validate(const RwConfig& cfg);

/// Unit-norm coefficient vector drawn from a stream derived from `seed`.
std::vector<double> default_coefficients(std::size_t dim, std::uint64_t seed);

/// Record i is drawn from its own stream derive_seed(seed, i); within a record
/// the draw order is x_0, then (increment, termination uniform) per step, and
/// the termination uniform is consumed whether or not the walk ends. This
/// makes the censoring fraction monotone in b for a fixed seed.
Dataset generate_random_walk(const RwConfig& cfg);

/// Bisection on b over [-10, 10] so that a pilot set of 2000 walks has
/// censoring fraction within 0.05 of `target_censoring`.
/// Throws CalibrationError when the target is not bracketed or not reached.
double calibrate_intercept(std::size_t dim, std::size_t horizon, const std::vector<double>& a,
                           double target_censoring, std::uint64_t seed);

}  // namespace tcsurv
