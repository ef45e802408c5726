#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>

#include "confocal/scenario.hpp"

namespace confocal {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitEarlyStop = 3;   // singularity / chart exit / integration failure
inline constexpr int kExitDegeneracy = 4;  // billiard focus or arc-corner hit
inline constexpr int kExitCheckFailed = 5;

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::optional<std::filesystem::path> svg;
};

// Write trajectory.csv + summary.json (+ optional SVG); returns an exit code.
int run_simulate(const Scenario& scenario, const RunOptions& options);

// Write trajectory.csv, bounces.csv + summary.json (+ optional SVG).
int run_billiard(const Scenario& scenario, const RunOptions& options);

enum class CheckSuite { identities, brackets, projective, quadrature };

std::optional<CheckSuite> check_suite_from_name(std::string_view name);
const char* to_string(CheckSuite suite);

// Run a verification suite; prints a report, writes report.json under
// out_dir, exit 0 iff every figure is under its threshold.
int run_check(CheckSuite suite, int samples, std::uint64_t seed, const RunOptions& options);

// Run every scenario of a batch file ({"scenarios": [paths...]}), each into
// out_dir/<name>/, optionally on `jobs` threads. Exit = worst scenario exit.
int run_sweep(const std::filesystem::path& batch_path, const RunOptions& options, int jobs);

} // namespace confocal
