// harness.hpp: Run orchestration: builds generators from a RunConfig, runs the
// requested solver(s) and writes CSV/JSON artifacts with provenance

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "spinflux/config.hpp"
#include "spinflux/operator.hpp"

namespace spinflux {

inline constexpr std::string_view kVersion = "1.0.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitSolverError = 3;

struct RunOptions {
    unsigned threads = 1; // MCWF workers; 0 picks hardware concurrency
};

struct RunOutcome {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files; // artifacts written, in order
    std::string error;                         // JSON error record when exit_code != 0
};

// Single-line JSON object {"error": {...}} describing a failure.
std::string error_record(std::string_view kind, std::string_view message, std::string_view key = {},
                         int line = 0);

// rho0 selected by config.initial for the chain Hamiltonian h.
Operator initial_density(const InitialState& initial, const Operator& h);

// Validates, runs and writes into config.output_dir:
//   steady  -> steady.json
//   evolve  -> evolve.csv
//   mcwf    -> mcwf.csv
//   compare -> compare.csv and compare.json
// On failure writes error.json (when the directory is usable) and returns the
// exit code with the record; nothing is thrown for config or solver errors.
RunOutcome run(const RunConfig& config, const RunOptions& options = {});

} // namespace spinflux
