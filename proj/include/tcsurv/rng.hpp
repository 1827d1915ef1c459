#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace tcsurv {

/// SplitMix64 finalizer; used to derive independent seeds from (seed, index).
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for sub-stream `index` of a master seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Portable random source: std::mt19937_64 (bit-exact across standard libraries)
/// with hand-written uniform and Box-Muller normal transforms, since the
/// standard distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;

    /// Standard normal.
    double normal() noexcept;

    /// Uniform integer in [0, n), unbiased. n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

    std::vector<double> normal_vector(std::size_t n);

    /// Fisher-Yates.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[below(i)]);
        }
    }

    std::uint64_t next_u64() noexcept { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace tcsurv
