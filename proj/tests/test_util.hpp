#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcsurv/hazard_model.hpp"
#include "tcsurv/rng.hpp"
#include "tcsurv/seqdata.hpp"

namespace tcsurv::testing {

inline SequenceRecord random_sequence(Rng& rng, std::size_t dim, std::size_t max_len,
                                      const std::string& id) {
    SequenceRecord rec;
    rec.id = id;
    const std::size_t t = 1 + rng.below(max_len);
    for (std::size_t k = 0; k < t; ++k) rec.states.push_back(rng.normal_vector(dim));
    rec.censored = rng.uniform() < 0.4;
    return rec;
}

inline Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t dim,
                              std::size_t horizon) {
    Rng rng(seed);
    Dataset ds;
    ds.feature_dim = dim;
    ds.horizon = horizon;
    for (std::size_t i = 0; i < n; ++i) {
        ds.records.push_back(random_sequence(rng, dim, horizon, "r" + std::to_string(i)));
    }
    return ds;
}

/// Model with every parameter drawn from N(0, scale^2).
inline HazardModel random_model(Architecture arch, const ModelDims& dims, std::uint64_t seed,
                                double scale = 0.5) {
    auto model = init_params(arch, dims, seed);
    Rng rng(seed ^ 0x9999);
    for (auto& v : model.params().values) v = scale * rng.normal();
    return model;
}

/// One-feature records with the given outcomes; state values are the record index.
inline Dataset make_dataset(const std::vector<std::size_t>& durations,
                            const std::vector<bool>& censored, std::size_t horizon) {
    Dataset ds{1, horizon, {}};
    for (std::size_t i = 0; i < durations.size(); ++i) {
        SequenceRecord r{"r" + std::to_string(i), {}, censored[i]};
        for (std::size_t s = 0; s < durations[i]; ++s) r.states.push_back({static_cast<double>(i)});
        ds.records.push_back(r);
    }
    return ds;
}

/// Random non-increasing curves over offsets 0..horizon starting at 1.
inline std::vector<std::vector<double>> random_curves(Rng& rng, std::size_t n, std::size_t horizon) {
    std::vector<std::vector<double>> out(n);
    for (auto& c : out) {
        c.assign(horizon + 1, 1.0);
        for (std::size_t d = 1; d <= horizon; ++d) c[d] = c[d - 1] * (1.0 - 0.4 * rng.uniform());
    }
    return out;
}

}  // namespace tcsurv::testing
