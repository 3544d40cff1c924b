#pragma once

#include "fbmloss/bounds.hpp"
#include "fbmloss/montecarlo.hpp"

#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>

namespace fbm {

inline constexpr std::string_view kToolName = "fbmloss";
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Config files are JSON objects mirroring ExperimentConfig:
///
///   {"params": {"hurst": 0.7, "mu": 0, "sigma": 1, "horizon": 1},
///    "n": 1024, "reps": 100000, "method": "circulant", "seed": 42,
///    "x_grid": [0.5, 1, 2, 4], "confidence": 0.99}
///
/// Every key is optional; unknown keys are rejected with ConfigError. Keys that
/// were present are added to `seen` as dotted paths ("params.hurst", "n", ...).
void apply_config_json(ExperimentConfig& config, std::string_view text, std::set<std::string>* seen = nullptr);
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path,
                       std::set<std::string>* seen = nullptr);

/// Compact single-line JSON of every field, in a fixed key order.
std::string config_to_json(const ExperimentConfig& config);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Header plus one row per record:
/// target,x,estimate,std_error,ci_low,ci_high,exceed_count
void write_estimates_csv(std::ostream& out, std::span<const EstimateRecord> records);

/// check,x,bound_low,bound_high,estimate,std_error,ci_low,ci_high,slack,exceed_count,verdict,note
void write_report_csv(std::ostream& out, const VerificationReport& report);
std::string report_to_json(const VerificationReport& report, const ExperimentConfig& config);

} // namespace fbm
