#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tcsurv {

/// Covariates observed at one time index. Every entry must be finite.
using StateVector = std::vector<double>;

/// One observed trajectory x_0..x_{t-1}.
///
/// The duration is the number of stored states. An uncensored record means the
/// event happened at absolute index t-1; the absorbing terminal state itself is
/// never stored.
struct SequenceRecord {
    std::string id;
    std::vector<StateVector> states;
    bool censored = false;

    std::size_t duration() const noexcept { return states.size(); }

    bool operator==(const SequenceRecord&) const = default;
};

struct Dataset {
    std::size_t feature_dim = 1;
    std::size_t horizon = 1;
    std::vector<SequenceRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }

    bool operator==(const Dataset&) const = default;
};

struct DatasetStats {
    std::size_t n = 0;
    std::size_t feature_dim = 0;
    std::size_t horizon = 0;
    std::size_t max_duration = 0;
    std::size_t total_states = 0;
    std::optional<double> censoring_fraction;  // absent for an empty dataset
};

/// Throws DataError describing the first violated invariant.
void validate(const Dataset& ds);

/// Reads the JSONL format: a metadata line {"feature_dim","horizon"} followed by
/// one {"id","states","censored"} object per line.
Dataset load_dataset(const std::filesystem::path& path);

void save_dataset(const Dataset& ds, const std::filesystem::path& path);

/// In-memory variants of the file format, used by the file functions.
std::string dataset_to_jsonl(const Dataset& ds);
Dataset dataset_from_jsonl(const std::string& text);

/// Splits every record into consecutive chunks of at most chunk_len states.
/// Only the last chunk of an uncensored record keeps the event; chunk ids are
/// "<id>#<chunk index>". The horizon of the result is min(horizon, chunk_len).
Dataset chunk_sequences(const Dataset& ds, std::size_t chunk_len);

DatasetStats dataset_stats(const Dataset& ds);

/// Records selected by index, keeping dims and horizon.
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices);

}  // namespace tcsurv
