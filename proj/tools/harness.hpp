#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critperc/estimate.hpp"

namespace critperc::cli {

/// Invalid configuration; the harness exits with status 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CsvRow {
    std::string experiment;
    std::int64_t n = 0;
    double p = 0.0;
    std::string variant;
    std::uint64_t samples = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

CsvRow estimateRow(const std::string& experiment, std::int64_t n, double p, const std::string& variant,
                   const Estimate& e);
std::string csvHeader();
std::string formatCsv(const CsvRow& row);

/// Fills options of `app` that were not given on the command line from a
/// flat `key = value` file, or from the "config" object of a manifest.
/// Unknown keys are rejected.
void applyConfigFile(CLI::App& app, const std::string& path);

/// Every result-relevant option of `app` as key -> value, defaults included.
std::map<std::string, std::string> resolvedConfig(const CLI::App& app, const std::vector<std::string>& skip);
std::string configHash(const std::string& experiment, const std::map<std::string, std::string>& config);

struct Manifest {
    std::string experiment;
    std::map<std::string, std::string> config;
    std::string configHash;
    std::uint64_t seed = 0;
    std::string started;
    std::string finished;
    std::uint64_t rowsWritten = 0;
};

std::string utcNow();
void writeManifest(const std::string& path, const Manifest& manifest);

/// JSON-backed checkpoint; rewritten atomically on every store. A file
/// written under a different configuration hash is rejected.
class FileCheckpoint : public CheckpointSink {
public:
    FileCheckpoint(std::string path, std::string configHash);
    bool load(const std::string& key, Estimate& partial) override;
    void store(const std::string& key, const Estimate& partial) override;

private:
    void flush() const;

    std::string path_;
    std::string hash_;
    std::map<std::string, Estimate> entries_;
};

/// Writes `text` to `path` via a temporary file and rename.
void writeFileAtomically(const std::string& path, const std::string& text);

/// Exact dyadic fraction of a double when the denominator is at most 2^20.
std::string dyadicFraction(double value);

}  // namespace critperc::cli
