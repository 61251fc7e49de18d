#pragma once

#include <string>

#include "json.hpp"

#include "weylstrip/matrix.hpp"

namespace weylstrip {

using Json = nlohmann::json;

/// Outcome of one experiment run. The report is deterministic for a fixed
/// (config, seed); wall-clock goes into the separate timings object so the
/// report can be compared byte for byte.
struct RunResult {
    int exit_code = 0;  // 0 ok, 2 config error, 3 numerical failure
    bool all_pass = true;
    std::string failing_stage;
    Json report;
    Json timings;
    std::string csv;
    std::string csv_name;
};

Json load_config(const std::string& path);

/// Schema validation: required keys per kind, types, no unknown fields.
void validate_config(const Json& config);

RunResult run_experiment(const Json& config, int threads = 0);

/// Write report.json, <kind>.csv and timings.json under out_dir.
void write_outputs(const RunResult& result, const std::string& out_dir);

/// Full command-line behavior; returns the process exit code.
int run_cli(int argc, char** argv);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace weylstrip
