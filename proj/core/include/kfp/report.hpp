#pragma once

#include "kfp/config.hpp"
#include "kfp/io.hpp"

namespace kfp {

/// Exit codes shared by every subcommand: 0 ok, 2 invalid config,
/// 3 infeasible search / failed certificate, 4 numeric failure.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitInfeasible = 3,
    kExitNumeric = 4,
};

struct CommandResult {
    int exit_code = kExitOk;
    OrderedJson payload;
};

/// Resolves C_PI: closed form for quadratic potentials under
/// "quadratic-auto", otherwise the user-supplied value (ConfigError if none).
double resolve_c_pi(const RunConfig& cfg, double alpha0);

CommandResult run_check(const RunConfig& cfg);
CommandResult run_rate(const RunConfig& cfg);
CommandResult run_certify(const RunConfig& cfg);
CommandResult run_propagator(const RunConfig& cfg, const std::string& outdir);
CommandResult run_simulate(const RunConfig& cfg, const std::string& outdir);
CommandResult run_hypo(const RunConfig& cfg);

/// Aggregates every stage named in the config into one bundle; timing data
/// lives in a separate "timings" section so byte comparisons can strip it.
CommandResult run_report(const RunConfig& cfg, const std::string& outdir);

/// Dispatch by subcommand name; writes artifacts under outdir.
CommandResult run_subcommand(const std::string& name, const RunConfig& cfg,
                             const std::string& outdir);

} // namespace kfp
