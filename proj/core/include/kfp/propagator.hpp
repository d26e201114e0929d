#pragma once

#include "kfp/lyapunov.hpp"
#include "kfp/matrixkit.hpp"

namespace kfp {

/// Finite-dimensional reduction for quadratic potentials: the weighted-L2
/// propagator norm equals the 2-norm of exp(-C t) for the drift matrix
/// C = [[0, -M^{-1/2}], [M^{-1/2}, nu I]], with M^{-1} the Hessian.
struct OdeSystem {
    int n = 0;
    SymMatrix m_inv;
    double nu = 0.0;
    double sigma = 0.0;
    Matrix C;
    bool positive_stable = false;
    bool no_invariant_kerD_subspace = false;
};

enum class DecayClass {
    exp_half_nu,           // alpha0 > nu^2/4 : e^{-nu t/2}
    poly_times_exp_half_nu,// alpha0 = nu^2/4 : (1+t) e^{-nu t/2}
    exp_slow,              // alpha0 < nu^2/4 : e^{-(nu - sqrt(nu^2-4 alpha0)) t/2}
};

const char* to_string(DecayClass c);

struct PropagatorCurve {
    std::vector<double> times;
    std::vector<double> norms;
    DecayClass classification = DecayClass::exp_half_nu;
    double fitted_rate = 0.0;
    int fitted_poly_degree = 0;
};

struct JordanReport {
    DecayClass classification;
    double alpha0 = 0.0;
    double rate = 0.0;                 // asymptotic norm decay rate
    bool defective = false;            // some alpha_i == nu^2/4 (tol 1e-8)
    int jordan_block_size = 1;         // 2 when defective
    std::vector<double> alphas;        // Hessian eigenvalues, ascending
    std::vector<std::complex<double>> betas; // drift eigenvalues
    std::vector<int> defective_indices;      // indices into alphas
};

/// Assembles C and checks the two reduction hypotheses.
OdeSystem build_ode(const SymMatrix& m_inv, double nu, double sigma);

/// Operator norms of exp(-C t) on an ascending time grid.
PropagatorCurve norm_curve(const OdeSystem& sys, const std::vector<double>& times);

/// Default grid: 50 uniform points on [0,1], then 200 on (1,50].
std::vector<double> default_time_grid();

/// Trichotomy on alpha0 vs nu^2/4 (tolerance 1e-8 relative) plus eigenvalue
/// multiplicities and defectiveness from the closed-form spectrum.
JordanReport classify(const SymMatrix& m_inv, double nu);

struct FittedRate {
    double rate = 0.0;
    int poly_degree = 0;
    double log_poly_coeff = 0.0;
};

/// Least-squares fit of log(norm) against {1, t, log(1+t)} on the window;
/// rate = -slope, poly_degree = 1 when the log(1+t) coefficient exceeds 0.5.
FittedRate fit_rate(const PropagatorCurve& curve, double t_lo, double t_hi);

} // namespace kfp
