#include "kfp/rates.hpp"

#include <cmath>
#include <stdexcept>

namespace kfp {

void HypoParams::validate() const {
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw std::invalid_argument("HypoParams: nu must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("HypoParams: sigma must be positive");
    if (!std::isfinite(c))
        throw std::invalid_argument("HypoParams: c must be finite");
    if (!(tau >= 0.0) || !(tau < nu))
        throw std::invalid_argument("HypoParams: tau must lie in [0, nu)");
}

const char* to_string(RateCase c) {
    switch (c) {
    case RateCase::a: return "a";
    case RateCase::b: return "b";
    case RateCase::c: return "c";
    case RateCase::d: return "d";
    default: return "uncovered";
    }
}

double poincare_constant_quadratic(double nu, double sigma, double alpha0) {
    if (!(nu > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("poincare_constant_quadratic: nu, sigma must be positive");
    if (!(alpha0 > 0.0))
        throw std::domain_error(
            "poincare_constant_quadratic: alpha0 <= 0, steady state not normalizable");
    return nu * std::min(1.0, alpha0) / sigma;
}

double rate_coeff_A(double a, double alpha0, double nu, double sigma, double c_pi) {
    const double w = a + alpha0;
    return (1.0 + w + std::sqrt((w - 1.0) * (w - 1.0) + nu * nu)) /
           (2.0 * sigma * c_pi);
}

double rate_coeff_B(double a, double alpha0, double nu) {
    const double m = a + alpha0 - 0.25 * nu * nu;
    if (!(m > 0.0))
        throw std::domain_error("rate_coeff_B: requires a + alpha0 > nu^2/4");
    return a / std::sqrt(m);
}

double rate_tradeoff(double nu_minus_tau, double A, double B, double s) {
    return (nu_minus_tau - B * (std::sqrt(1.0 + s * s) - s)) / (1.0 + A * B * s);
}

double rate_optimal_s(double nu_minus_tau, double A, double B) {
    // stationarity of the trade-off curve: (1 - p) sqrt(s^2+1) - s + A B = 0
    // with p = (nu-tau) A; squaring gives
    //   p (p-2) s^2 + 2 A B s + (1-p)^2 - A^2 B^2 = 0.
    // Only one root solves the unsquared equation; select it explicitly and
    // polish with Newton (the sign pattern of the printed closed form flips
    // for p < 2).
    const double nt = nu_minus_tau;
    const double p = nt * A;
    const double ab = A * B;

    auto stat_resid = [&](double s) {
        return (1.0 - p) * std::sqrt(s * s + 1.0) - s + ab;
    };
    auto polish = [&](double s) {
        for (int it = 0; it < 60; ++it) {
            const double root = std::sqrt(s * s + 1.0);
            const double f = (1.0 - p) * root - s + ab;
            const double df = (1.0 - p) * s / root - 1.0;
            const double step = f / df;
            s -= step;
            if (std::abs(step) <= 1e-16 * (1.0 + std::abs(s)))
                break;
        }
        return s;
    };

    std::vector<double> candidates;
    if (std::abs(p - 2.0) <= 1e-12) {
        candidates.push_back((ab * ab - 1.0) / (2.0 * ab));
    } else {
        const double qa = p * (p - 2.0);
        const double qb = 2.0 * ab;
        const double qc = (1.0 - p) * (1.0 - p) - ab * ab;
        const double disc = std::max(0.0, qb * qb - 4.0 * qa * qc);
        const double q = -0.5 * (qb + (qb >= 0.0 ? 1.0 : -1.0) * std::sqrt(disc));
        if (qa != 0.0)
            candidates.push_back(q / qa);
        if (q != 0.0)
            candidates.push_back(qc / q);
    }

    double best = 0.0;
    double best_val = -std::numeric_limits<double>::infinity();
    for (double s : candidates) {
        if (!(s >= 0.0) || !std::isfinite(s))
            continue;
        if (std::abs(stat_resid(s)) > 1e-6 * (1.0 + ab + std::abs(s)))
            continue; // spurious root introduced by squaring
        s = std::max(0.0, polish(s));
        const double val = rate_tradeoff(nt, A, B, s);
        if (val > best_val) {
            best_val = val;
            best = s;
        }
    }
    return best;
}

RateReport decay_rate(const HypoParams& p, double alpha0, double c_pi,
                      std::optional<double> epsilon_b) {
    p.validate();
    if (!(c_pi > 0.0))
        throw std::invalid_argument("decay_rate: C_PI must be positive");
    if (!std::isfinite(alpha0))
        throw std::invalid_argument("decay_rate: alpha0 must be finite");

    const double nu = p.nu, tau = p.tau, c = p.c;
    const double q = 0.25 * nu * nu;
    const double btol = 1e-9; // defective-boundary detection

    RateReport r;
    r.params = p;
    r.alpha0 = alpha0;
    r.c_pi = c_pi;

    auto finish = [&](RateCase tag, double two_lambda) {
        r.case_tag = tag;
        r.two_lambda = two_lambda;
        r.lambda = 0.5 * two_lambda;
        r.ok = true;
        return r;
    };

    // (a) is tested before the defective boundary (b): where both match
    // within tolerance the larger rate wins.
    if (alpha0 > q && c <= -q + btol)
        return finish(RateCase::a, nu - tau);

    if (std::abs(c + alpha0) <= btol && std::abs(alpha0 - q) <= btol) {
        const double eps = epsilon_b.value_or(0.05 * (nu - tau));
        if (!(eps > 0.0) || !(eps < nu - tau))
            throw std::invalid_argument("decay_rate: epsilon must lie in (0, nu - tau)");
        r.intermediates.epsilon_b = eps;
        return finish(RateCase::b, nu - tau - eps);
    }

    if (c > -q) {
        const bool branch_c = (c + 2.0 * alpha0 > q);
        const double a = branch_c ? c + q : 2.0 * (q - alpha0);
        const double m = a + alpha0 - q;
        if (m > 0.0) {
            const double A = rate_coeff_A(a, alpha0, nu, p.sigma, c_pi);
            const double B = rate_coeff_B(a, alpha0, nu);
            r.intermediates.a = a;
            r.intermediates.A = A;
            r.intermediates.B = B;
            const double nt = nu - tau;
            if (nt >= 1.0 / A + B) {
                r.intermediates.s = 0.0;
                return finish(branch_c ? RateCase::c : RateCase::d, nt - B);
            }
            const double s = rate_optimal_s(nt, A, B);
            r.intermediates.s = s;
            return finish(branch_c ? RateCase::c : RateCase::d,
                          rate_tradeoff(nt, A, B, s));
        }
    }

    r.ok = false;
    r.case_tag = RateCase::uncovered;
    r.message = "parameters match no covered region (c <= -nu^2/4 requires alpha0 > nu^2/4)";
    return r;
}

bool check_a2_inequality(double nu, double sigma, double alpha0) {
    if (!(nu > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("check_a2_inequality: nu, sigma must be positive");
    if (!(alpha0 > 0.0) || !(alpha0 < 0.25 * nu * nu))
        throw std::domain_error("check_a2_inequality: requires 0 < alpha0 < nu^2/4");
    const double c_pi = poincare_constant_quadratic(nu, sigma, alpha0);
    const double a2 = 2.0 * (0.25 * nu * nu - alpha0);
    const double A2 = rate_coeff_A(a2, alpha0, nu, sigma, c_pi);
    const double gap = std::sqrt(nu * nu - 4.0 * alpha0);
    return nu + 1e-12 * std::max(1.0, nu) >= 1.0 / A2 + gap;
}

} // namespace kfp
