#pragma once

#include <optional>

#include "kfp/potential.hpp"
#include "kfp/rates.hpp"

namespace kfp {

enum class ConditionKind {
    assumption_psd_block,   // the n(n+1) block condition matrix is PSD
    assumption_third_bound, // sufficient per-coordinate third-derivative bounds
    lyapunov_inequality,    // QP + PQ^T + gamma D - (nu-delta) P is PSD
    sandwich_lower,         // diag(I, V''+(1-alpha0)I) - c1 P is PSD
    sandwich_upper,         // c2 P - diag(I, V''+(1-alpha0)I) is PSD
};

const char* to_string(ConditionKind k);

/// Result of a sampling-based positive-semi-definiteness sweep over a box.
struct ConditionCertificate {
    HypoParams params;
    Box box;
    GridSpec resolution;
    bool passed = false;
    Vec worst_point;
    double worst_min_eig = 0.0;
    double tol = 0.0;
    ConditionKind checked_condition = ConditionKind::assumption_psd_block;
};

/// Assembles the m x m condition matrix, m = n(n+1): n diagonal blocks
/// nu (V'' + cI), last block row/column -1/2 * (Hessian of d_{x_k} V),
/// corner block (tau nu / 2 sigma) (V'' + cI).
SymMatrix build_condition_matrix(const PotentialModel& V, const Vec& x,
                                 const HypoParams& p);

/// Verifies the requested condition at every grid point of the box and
/// records the worst violation. Tolerance is the scale-aware PSD default.
ConditionCertificate check_assumption(const PotentialModel& V, const Box& box,
                                      const GridSpec& resolution,
                                      const HypoParams& p, ConditionKind which);

struct FeasibleSearchResult {
    bool found = false;
    HypoParams params;
    ConditionCertificate certificate;
    RateReport rate;
};

/// Coarse grid search over c in [-alpha0_est, -alpha0_est + 10 max(1,nu^2)]
/// (64 points) x tau in [0, 0.99 nu] (32 points), keeping pairs whose block
/// condition matrix passes over the box and returning the one that maximizes
/// the decay rate. Ties (within 1e-12) prefer smaller tau, then smaller c.
/// An empty grid result is reported via found=false, not an exception.
FeasibleSearchResult find_feasible(const PotentialModel& V, const Box& box,
                                   const GridSpec& resolution, double nu,
                                   double sigma, double c_pi,
                                   std::optional<double> epsilon_b = std::nullopt);

/// find_feasible plus the sharpness flag for quadratic potentials in the
/// regimes where the closed-form rate is attained.
FeasibleSearchResult optimize_rate(const PotentialModel& V, const Box& box,
                                   const GridSpec& resolution, double nu,
                                   double sigma, double c_pi,
                                   std::optional<double> epsilon_b = std::nullopt);

} // namespace kfp
