#pragma once

#include <complex>

#include "kfp/assumptions.hpp"
#include "kfp/potential.hpp"

namespace kfp {

/// Shift/weight parameters for the state-dependent quadratic form.
struct LyapunovSelection {
    double a = 0.0;     // Hessian shift in the lower-right block of P
    double gamma = 0.0; // L^2 admixture weight
    double delta = 0.0; // rate give-back, closed form in (a, gamma)
    double eta = 0.0;   // uniform lower eigenvalue bound of P
    double mu = 0.0;    // spectral abscissa of the drift block Q
};

struct SandwichConstants {
    double c1 = 0.0;
    double c2 = 0.0;
};

/// Feasibility certificate for the short-time regularization functional.
struct HypoellipticCertificate {
    double t0 = 0.0;
    double epsilon = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double hessnorm_max = 0.0;
    bool feasible = false;
    double worst_margin = 0.0;
};

/// Drift block Q(x) = [[0, I], [-V''(x), nu I]], size 2n x 2n.
Matrix build_Q(const PotentialModel& V, const Vec& x, double nu);

struct QSpectrum {
    std::vector<std::complex<double>> beta; // 2 roots per Hessian eigenvalue
    double mu = 0.0;                        // min real part
    bool positive_stable = false;           // all Hessian eigenvalues > 0
};

/// Closed-form eigenvalues beta = (nu +- sqrt(nu^2 - 4 alpha_i)) / 2 per
/// Hessian eigenvalue alpha_i (complex pair when nu^2 < 4 alpha_i).
QSpectrum q_spectrum(const std::vector<double>& alphas, double nu);

/// Weight matrix P(x) = [[2I, nu I], [nu I, 2 V''(x) + 2a I]].
/// Requires a + alpha0 > nu^2/4 so that P is uniformly positive definite.
SymMatrix build_P(const PotentialModel& V, const Vec& x, double a, double nu,
                  double alpha0);

/// Closed forms for delta(a, gamma) (root of
/// 4 delta^2 (a+alpha0-nu^2/4) + 2 delta gamma sigma - 4 a^2 = 0),
/// eta(a), and the spectral abscissa mu.
LyapunovSelection select_gamma_delta(double a, double gamma, double nu,
                                     double sigma, double alpha0);

/// Same selection parameterized by s = gamma*sigma/(4a sqrt(a+alpha0-nu^2/4)).
LyapunovSelection select_from_s(double a, double s, double nu, double sigma,
                                double alpha0);

/// Picks gamma so that delta(a, gamma) == delta_target (< nu required for a
/// usable certificate); returns gamma = 0 when already delta(a,0) <= target.
double gamma_for_delta(double a, double delta_target, double nu, double sigma,
                       double alpha0);

/// Pointwise check of Q P + P Q^T + gamma D >= (nu - delta) P over the box,
/// D = diag(0, sigma I).
ConditionCertificate verify_lyapunov_inequality(const PotentialModel& V,
                                                const Box& box,
                                                const GridSpec& resolution,
                                                const LyapunovSelection& sel,
                                                const HypoParams& p);

/// Equivalence constants between diag(I, V'' + (1-alpha0) I) and P:
/// c1 = 1/(a+alpha0+1+sqrt((a+alpha0-1)^2+nu^2)),
/// c2 = (a+alpha0+1+sqrt((a+alpha0-1)^2+nu^2)) / (4(a+alpha0)-nu^2).
SandwichConstants sandwich_constants(double a, double alpha0, double nu);

/// Verifies both sandwich inequalities pointwise over the box; returns the
/// two certificates (lower: E - c1 P >= 0, upper: c2 P - E >= 0).
std::pair<ConditionCertificate, ConditionCertificate>
verify_sandwich(const PotentialModel& V, const Box& box,
                const GridSpec& resolution, double a, double alpha0,
                const HypoParams& p);

struct TraceCheck {
    double lhs = 0.0;
    std::vector<double> rhs_per_k;
    bool ok = false;
};

/// Checks sqrt(2 tau nu^2 / sigma) Tr[(V''+cI)^2] >= Tr[(V''+cI) T_k] for
/// every third-derivative slice T_k at x.
TraceCheck trace_inequality_check(const PotentialModel& V, const Vec& x,
                                  const HypoParams& p);

/// Margin min_{t in [0,t0]} of 1 - 3 eps - eps |1 - 2 eps^2 t^2|; the
/// certificate requires this to stay >= 1/2.
double hypo_epsilon_margin(double eps, double t0);

/// Feasibility search for the short-time certificate: epsilon by bisection
/// (largest value keeping the corner margin >= 1/2 on [0, t0]), then
/// (gamma1, gamma2) on a doubling grid until the quadratic-in-w residual is
/// nonnegative for w in [0, hessnorm_max] x t in [0, t0], sampled 1000x1000.
/// dim is the spatial dimension entering the exp(-8 tau n t) weight.
HypoellipticCertificate hypoelliptic_certificate(double t0, const HypoParams& p,
                                                 double hessnorm_max,
                                                 int dim = 1);

/// The quadratic-in-w residual whose nonnegativity the certificate needs;
/// exposed for tests and falsification probes.
double hypo_quadratic_residual(double w, double t, double eps, double gamma1,
                               double gamma2, const HypoParams& p, int dim);

} // namespace kfp
