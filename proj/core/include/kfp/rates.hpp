#pragma once

#include <optional>
#include <string>

namespace kfp {

/// Model and certificate parameters: friction nu, diffusion sigma, and the
/// (c, tau) pair of the structural condition on the potential.
struct HypoParams {
    double nu = 1.0;
    double sigma = 1.0;
    double c = 0.0;
    double tau = 0.0;

    /// Throws std::invalid_argument unless nu > 0, sigma > 0, 0 <= tau < nu.
    void validate() const;
};

enum class RateCase { a, b, c, d, uncovered };

const char* to_string(RateCase c);

/// Closed-form decay-rate evaluation with every intermediate recorded.
struct RateReport {
    RateCase case_tag = RateCase::uncovered;
    bool ok = false;          // false => parameters matched no covered region
    std::string message;      // diagnostic for the uncovered case
    double lambda = 0.0;      // decay rate of the H^1-type functional
    double two_lambda = 0.0;
    double c_pi = 0.0;
    double alpha0 = 0.0;
    HypoParams params;
    struct {
        double A = 0.0;
        double B = 0.0;
        double s = 0.0;
        double a = 0.0;
        std::optional<double> epsilon_b;
    } intermediates;
    bool sharp = false; // set for quadratic potentials in cases (a)/(d)
};

/// Spectral-gap constant of the Gaussian steady state for a quadratic
/// potential with smallest Hessian eigenvalue alpha0 > 0:
/// C_PI = (nu/sigma) * min(1, alpha0).
double poincare_constant_quadratic(double nu, double sigma, double alpha0);

/// Dispatches the explicit decay-rate formulas on (c, alpha0, nu):
///   (a) alpha0 > nu^2/4 and c <= -nu^2/4          : 2*lambda = nu - tau
///   (b) c = -alpha0 = -nu^2/4 (tol 1e-9)          : 2*lambda = nu - tau - eps
///   (c) c > -nu^2/4, c + 2*alpha0 >  nu^2/4       : shifted branch, a = c + nu^2/4
///   (d) c > -nu^2/4, c + 2*alpha0 <= nu^2/4       : spectral-gap branch,
///                                                   a = 2(nu^2/4 - alpha0)
/// Anything else yields an "uncovered" report instead of an exception.
RateReport decay_rate(const HypoParams& p, double alpha0, double c_pi,
                      std::optional<double> epsilon_b = std::nullopt);

/// The rate-vs-weight trade-off curve maximized by decay_rate's closed
/// forms: Lambda(s) = (nu - tau - B(sqrt(1+s^2)-s)) / (1 + A*B*s).
double rate_tradeoff(double nu_minus_tau, double A, double B, double s);

/// Coefficient A(a) = (1 + a + alpha0 + sqrt((a+alpha0-1)^2+nu^2)) / (2 sigma C_PI).
double rate_coeff_A(double a, double alpha0, double nu, double sigma, double c_pi);

/// Coefficient B(a) = a / sqrt(a + alpha0 - nu^2/4).
double rate_coeff_B(double a, double alpha0, double nu);

/// Interior maximizer s(a) of the trade-off curve (valid when
/// nu - tau < 1/A + B).
double rate_optimal_s(double nu_minus_tau, double A, double B);

/// Executable form of the inequality nu >= 1/A2 + sqrt(nu^2 - 4*alpha0)
/// (quadratic steady state, C_PI = (nu/sigma) min(1, alpha0)); selects the
/// first sub-branch of case (d) for quadratic potentials.
/// Requires 0 < alpha0 < nu^2/4.
bool check_a2_inequality(double nu, double sigma, double alpha0);

} // namespace kfp
