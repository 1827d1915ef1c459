#include "tcsurv/seqdata.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tcsurv/errors.hpp"

namespace tcsurv {

using nlohmann::json;

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

void check_record(const SequenceRecord& rec, std::size_t feature_dim, std::size_t horizon,
                  const std::string& where) {
    if (rec.states.empty()) {
        throw DataError(where + "record '" + rec.id + "' has no states");
    }
    if (rec.states.size() > horizon) {
        throw DataError(where + "record '" + rec.id + "' has duration " +
                        std::to_string(rec.states.size()) + " > horizon " +
                        std::to_string(horizon));
    }
    for (std::size_t k = 0; k < rec.states.size(); ++k) {
        const auto& x = rec.states[k];
        if (x.size() != feature_dim) {
            throw DataError(where + "record '" + rec.id + "' state " + std::to_string(k) +
                            " has dimension " + std::to_string(x.size()) + ", expected " +
                            std::to_string(feature_dim));
        }
        for (double v : x) {
            if (!std::isfinite(v)) {
                throw DataError(where + "record '" + rec.id + "' state " + std::to_string(k) +
                                " has a non-finite value");
            }
        }
    }
}

SequenceRecord parse_record(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("id") || !j.contains("states") || !j.contains("censored")) {
        throw DataError(where + "expected an object with id, states and censored");
    }
    if (!j["id"].is_string() || !j["states"].is_array() || !j["censored"].is_boolean()) {
        throw DataError(where + "wrong field types");
    }
    SequenceRecord rec;
    rec.id = j["id"].get<std::string>();
    rec.censored = j["censored"].get<bool>();
    rec.states.reserve(j["states"].size());
    for (const auto& row : j["states"]) {
        if (!row.is_array()) throw DataError(where + "each state must be an array of numbers");
        StateVector x;
        x.reserve(row.size());
        for (const auto& v : row) {
            if (!v.is_number()) throw DataError(where + "non-numeric state value");
            x.push_back(v.get<double>());
        }
        rec.states.push_back(std::move(x));
    }
    return rec;
}

}  // namespace

void validate(const Dataset& ds) {
    if (ds.feature_dim == 0) throw DataError("feature_dim must be positive");
    if (ds.horizon == 0) throw DataError("horizon must be positive");
    for (const auto& rec : ds.records) check_record(rec, ds.feature_dim, ds.horizon, "");
}

std::string dataset_to_jsonl(const Dataset& ds) {
    validate(ds);
    std::string out;
    out += json{{"feature_dim", ds.feature_dim}, {"horizon", ds.horizon}}.dump();
    out += '\n';
    for (const auto& rec : ds.records) {
        json states = json::array();
        for (const auto& x : rec.states) states.push_back(x);
        // key order is fixed by nlohmann's sorted object map
        out += json{{"id", rec.id}, {"states", std::move(states)}, {"censored", rec.censored}}.dump();
        out += '\n';
    }
    return out;
}

Dataset dataset_from_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    Dataset ds;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw DataError(at_line(lineno) + "malformed JSON (" + e.what() + ")");
        }
        if (!have_header) {
            if (!j.is_object() || !j.contains("feature_dim") || !j.contains("horizon") ||
                !j["feature_dim"].is_number_unsigned() || !j["horizon"].is_number_unsigned()) {
                throw DataError(at_line(lineno) +
                                "expected metadata {\"feature_dim\": int, \"horizon\": int}");
            }
            ds.feature_dim = j["feature_dim"].get<std::size_t>();
            ds.horizon = j["horizon"].get<std::size_t>();
            if (ds.feature_dim == 0 || ds.horizon == 0) {
                throw DataError(at_line(lineno) + "feature_dim and horizon must be positive");
            }
            have_header = true;
            continue;
        }
        auto rec = parse_record(j, at_line(lineno));
        check_record(rec, ds.feature_dim, ds.horizon, at_line(lineno));
        ds.records.push_back(std::move(rec));
    }
    if (!have_header) throw DataError("missing metadata line");
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return dataset_from_jsonl(buf.str());
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    const std::string text = dataset_to_jsonl(ds);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed for " + path.string());
}

Dataset chunk_sequences(const Dataset& ds, std::size_t chunk_len) {
    if (chunk_len < 2) throw PreconditionError("chunk_len must be at least 2");
    Dataset out;
    out.feature_dim = ds.feature_dim;
    out.horizon = std::min(ds.horizon, chunk_len);
    for (const auto& rec : ds.records) {
        const std::size_t t = rec.duration();
        const std::size_t n_chunks = (t + chunk_len - 1) / chunk_len;
        for (std::size_t c = 0; c < n_chunks; ++c) {
            SequenceRecord piece;
            piece.id = rec.id + "#" + std::to_string(c);
            const auto first = rec.states.begin() + static_cast<std::ptrdiff_t>(c * chunk_len);
            const auto last = rec.states.begin() +
                              static_cast<std::ptrdiff_t>(std::min(t, (c + 1) * chunk_len));
            piece.states.assign(first, last);
            piece.censored = (c + 1 < n_chunks) ? true : rec.censored;
            out.records.push_back(std::move(piece));
        }
    }
    return out;
}

DatasetStats dataset_stats(const Dataset& ds) {
    DatasetStats s;
    s.n = ds.size();
    s.feature_dim = ds.feature_dim;
    s.horizon = ds.horizon;
    std::size_t n_censored = 0;
    for (const auto& rec : ds.records) {
        s.max_duration = std::max(s.max_duration, rec.duration());
        s.total_states += rec.duration();
        if (rec.censored) ++n_censored;
    }
    if (s.n > 0) s.censoring_fraction = static_cast<double>(n_censored) / static_cast<double>(s.n);
    return s;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& indices) {
    Dataset out;
    out.feature_dim = ds.feature_dim;
    out.horizon = ds.horizon;
    out.records.reserve(indices.size());
    for (std::size_t i : indices) out.records.push_back(ds.records.at(i));
    return out;
}

}  // namespace tcsurv
