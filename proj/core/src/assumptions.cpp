#include "kfp/assumptions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kfp {

const char* to_string(ConditionKind k) {
    switch (k) {
    case ConditionKind::assumption_psd_block: return "assumption_psd_block";
    case ConditionKind::assumption_third_bound: return "assumption_third_bound";
    case ConditionKind::lyapunov_inequality: return "lyapunov_inequality";
    case ConditionKind::sandwich_lower: return "sandwich_lower";
    case ConditionKind::sandwich_upper: return "sandwich_upper";
    }
    return "unknown";
}

SymMatrix build_condition_matrix(const PotentialModel& V, const Vec& x,
                                 const HypoParams& p) {
    p.validate();
    const int n = V.n();
    const PotentialJet J = jet(V, x);

    SymMatrix shifted = J.hessian;
    {
        Matrix s = shifted.mat();
        for (int i = 0; i < n; ++i)
            s(i, i) += p.c;
        shifted = SymMatrix(s);
    }

    const int m = n * (n + 1);
    Matrix M(m, m);
    for (int b = 0; b < n; ++b) {
        Matrix blk = shifted.mat();
        blk *= p.nu;
        M.set_block(b * n, b * n, blk);
    }
    for (int b = 0; b < n; ++b) {
        Matrix t = J.third_slices[b].mat();
        t *= -0.5;
        M.set_block(b * n, n * n, t);
        M.set_block(n * n, b * n, t);
    }
    Matrix corner = shifted.mat();
    corner *= p.tau * p.nu / (2.0 * p.sigma);
    M.set_block(n * n, n * n, corner);
    return SymMatrix(M);
}

namespace {

// Worst (smallest) eigenvalue over the pointwise checks of the
// third-derivative-bound condition at x; also covers the PSD requirement
// on V'' + cI itself.
double third_bound_min_eig(const PotentialModel& V, const Vec& x,
                           const HypoParams& p) {
    const int n = V.n();
    const PotentialJet J = jet(V, x);

    Matrix shifted = J.hessian.mat();
    for (int i = 0; i < n; ++i)
        shifted(i, i) += p.c;
    const Spectrum hs = sym_eig(SymMatrix(shifted));
    double worst = hs.eigenvalues.front();

    const double ax_c = hs.eigenvalues.front(); // alpha(x) + c
    const double bound = std::sqrt(2.0 * p.tau * p.nu * p.nu / (n * p.sigma)) *
                         std::max(ax_c, 0.0);
    for (int k = 0; k < n; ++k) {
        const Spectrum ts = sym_eig(J.third_slices[k]);
        // bound*I - T_k >= 0 and T_k + bound*I >= 0
        worst = std::min(worst, bound - ts.eigenvalues.back());
        worst = std::min(worst, bound + ts.eigenvalues.front());
    }
    return worst;
}

} // namespace

ConditionCertificate check_assumption(const PotentialModel& V, const Box& box,
                                      const GridSpec& resolution,
                                      const HypoParams& p, ConditionKind which) {
    p.validate();
    if (which != ConditionKind::assumption_psd_block &&
        which != ConditionKind::assumption_third_bound)
        throw std::invalid_argument("check_assumption: unsupported condition kind");

    ConditionCertificate cert;
    cert.params = p;
    cert.box = box;
    cert.resolution = resolution;
    cert.checked_condition = which;
    cert.worst_min_eig = std::numeric_limits<double>::infinity();

    double tol = 0.0;
    for_each_grid_point(box, resolution, [&](const Vec& x) {
        double mn;
        if (which == ConditionKind::assumption_psd_block) {
            const SymMatrix M = build_condition_matrix(V, x, p);
            mn = sym_eig(M).eigenvalues.front();
            tol = std::max(tol, psd_tol(M));
        } else {
            mn = third_bound_min_eig(V, x, p);
            tol = std::max(tol, 1e-10);
        }
        if (mn < cert.worst_min_eig) {
            cert.worst_min_eig = mn;
            cert.worst_point = x;
        }
    });
    cert.tol = tol;
    cert.passed = cert.worst_min_eig >= -tol;
    return cert;
}

FeasibleSearchResult find_feasible(const PotentialModel& V, const Box& box,
                                   const GridSpec& resolution, double nu,
                                   double sigma, double c_pi,
                                   std::optional<double> epsilon_b) {
    if (!(nu > 0.0) || !(sigma > 0.0))
        throw std::invalid_argument("find_feasible: nu, sigma must be positive");

    const Alpha0Estimate a0 = estimate_alpha0(V, box, resolution);

    constexpr int kNc = 64, kNtau = 32;
    const double c_lo = -a0.alpha0;
    const double c_hi = c_lo + 10.0 * std::max(1.0, nu * nu);

    FeasibleSearchResult best;
    for (int it = 0; it < kNtau; ++it) {
        const double tau = 0.99 * nu * it / double(kNtau - 1);
        for (int ic = 0; ic < kNc; ++ic) {
            const double c = c_lo + (c_hi - c_lo) * ic / double(kNc - 1);
            const HypoParams p{nu, sigma, c, tau};
            const RateReport rr = decay_rate(p, a0.alpha0, c_pi, epsilon_b);
            if (!rr.ok)
                continue;
            // rate can only degrade for larger (c, tau); skip certificates
            // that cannot improve on the incumbent
            if (best.found && rr.two_lambda <= best.rate.two_lambda + 1e-12)
                continue;
            const ConditionCertificate cert = check_assumption(
                V, box, resolution, p, ConditionKind::assumption_psd_block);
            if (!cert.passed)
                continue;
            best.found = true;
            best.params = p;
            best.certificate = cert;
            best.rate = rr;
        }
    }
    return best;
}

FeasibleSearchResult optimize_rate(const PotentialModel& V, const Box& box,
                                   const GridSpec& resolution, double nu,
                                   double sigma, double c_pi,
                                   std::optional<double> epsilon_b) {
    FeasibleSearchResult r =
        find_feasible(V, box, resolution, nu, sigma, c_pi, epsilon_b);
    if (r.found && V.is_quadratic() &&
        (r.rate.case_tag == RateCase::a || r.rate.case_tag == RateCase::d))
        r.rate.sharp = true;
    return r;
}

} // namespace kfp
