#pragma once

#include <optional>
#include <string>

#include "kfp/potential.hpp"
#include "kfp/solver.hpp"

#include <json.hpp>

namespace kfp {

/// Invalid or malformed run configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssumptionConfig {
    Box box;
    GridSpec resolution;
    std::optional<double> c;   // fixed c instead of the feasibility search
    std::optional<double> tau; // fixed tau
};

struct RateConfig {
    bool c_pi_auto = true; // "quadratic-auto": C_PI from the closed form
    std::optional<double> c_pi;
    std::optional<double> epsilon_b;
};

struct SolverConfig {
    int nx = 256;
    int nv = 256;
    double dt = 0.0; // 0 => pick from the CFL bound with a safety factor
    double T = 10.0;
    int sample_every = 10;
    F0Spec f0 = GaussianInit{{1.0, 0.0}, SymMatrix::identity(2)};
};

struct HypoConfig {
    int nx = 1024;
    int nv = 256;
    double t_lo = 2e-3;
    double t_hi = 2e-2;
    double dt = 1e-4;
    RoughIndicatorInit f0;
};

struct CertifyConfig {
    std::optional<double> a;
    std::optional<double> gamma;
    double t0 = 0.5;
    std::optional<double> hessnorm_max;
};

struct OutputConfig {
    std::string dir = "out";
    bool csv = true;
    bool json = true;
};

struct SweepConfig {
    std::vector<double> alpha0;
    std::vector<double> nu;
};

struct RunConfig {
    std::optional<PotentialModel> potential; // set after parsing
    double nu = 1.0;
    double sigma = 1.0;
    AssumptionConfig assumption;
    RateConfig rate;
    SolverConfig solver;
    HypoConfig hypo;
    CertifyConfig certify;
    OutputConfig output;
    std::optional<SweepConfig> sweep;
    nlohmann::json echo; // validated source document, for report bundles
};

/// Parses and schema-validates a configuration document; unknown keys are
/// rejected with a path diagnostic. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);

/// Reads the file and parses it. Throws ConfigError on I/O or schema errors.
RunConfig load_config(const std::string& path);

} // namespace kfp
