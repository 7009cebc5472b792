#pragma once

#include "bosekin/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bosekin {

/// Exit codes of the command-line tool.
enum ExitCode : int
{
    exit_ok = 0,
    exit_check_failed = 1,  ///< ran to completion but a monitored check failed
    exit_config = 2,
    exit_runtime = 3,
};

struct CommandOptions
{
    std::string config;
    std::string out;  ///< overrides [output] directory when set
    int threads = 0;
    std::uint64_t seed = 20240601;
    std::optional<double> slack;
    std::int64_t trials = 1'000'000;
    std::vector<std::string> suites;  ///< empty or "all" runs every suite
    std::optional<double> K;
    int bench_points = 16;
};

int cmd_run(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_check_theorem(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_bench(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Header and rows of the trajectory CSV, floats with 17 significant digits.
std::string trajectory_csv(const Trajectory& trajectory, const std::vector<std::string>& monitors);

struct BenchResult
{
    int points = 0;
    std::size_t angles = 0;
    int threads = 0;
    double seconds_single = 0.0;
    double seconds_parallel = 0.0;
    double speedup = 0.0;
};

/// Wall time of one Q_K evaluation (hard sphere, Gaussian datum) with one
/// thread and with `threads` threads.
BenchResult bench_collision(int points, int polar_order, int azimuthal_order, int threads);

} // namespace bosekin
