#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tcsurv {

/// Flat key-value configuration with dotted keys, e.g. `train.lambda = 0.9`.
/// Lines starting with '#' and blank lines are ignored. Later assignments
/// (including command-line overrides) replace earlier ones.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::filesystem::path& path);

    /// Parses a single `key=value` assignment.
    void assign(const std::string& assignment);
    void set(const std::string& key, std::string value);
    bool has(const std::string& key) const;

    std::optional<std::string> find(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Comma-separated lists.
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::size_t> get_sizes(const std::string& key,
                                       const std::vector<std::size_t>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key,
                                         const std::vector<std::string>& fallback) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    /// `key=value` lines in key order; parse(to_text()) reproduces the config.
    std::string to_text() const;

private:
    std::map<std::string, std::string> entries_;
};

/// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace tcsurv
